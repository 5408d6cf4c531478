import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_envelopes.core import jet_lift
from sphere_envelopes.dsl import (BinOp, Num, Pow, Var, as_vector, parse, parse_vector, to_source)
from sphere_envelopes.errors import DomainError, DslSyntaxError, UnknownIdentifierError

from helpers import fd_draw, random_expr, rel_err


def at(src, u, v):
    return jet_lift(parse(src), u, v)


def test_parse_structure_and_value():
    e = parse("u^2 + v")
    assert e == BinOp("+", Pow(Var("u"), 2.0), Var("v"))
    assert float(e(2.0, 3.0).val) == 7.0


def test_normal_component_of_example():
    assert float(parse("1/sqrt(9*u^2+4)")(0.0, 0.0).val) == 0.5


def test_implicit_multiplication_rejected():
    with pytest.raises(DslSyntaxError) as ei:
        parse("sin(u)cos(v)")
    assert ei.value.offset == 6
    assert "'*'" in ei.value.expected


def test_eval_product():
    j = at("u*v", 2.0, 3.0)
    assert [float(c) for c in (j.val, j.du, j.dv, j.duu, j.duv, j.dvv)] == [6, 3, 2, 0, 1, 0]


def test_eval_radius():
    j = at("sqrt(u^2+v^2)", 3.0, 4.0)
    assert float(j.du) == pytest.approx(0.6, abs=1e-12)
    assert float(j.dv) == pytest.approx(0.8, abs=1e-12)


def test_eval_half_axis_radius():
    j = at("v/2", 1.0, 2.0)
    assert (float(j.val), float(j.du), float(j.dv)) == (1.0, 0.0, 0.5)


@pytest.mark.parametrize("src, expected", [
    ("-u^2", -4.0), ("2^3^2", 512.0), ("1 - 2 - 3", -4.0), ("8/4/2", 1.0), ("-(u)^2", -4.0),
    ("2*-u", -4.0), ("pi", np.pi), ("e", np.e), ("u^-1", 0.5), ("(u+2)^0.5", 2.0),
])
def test_precedence(src, expected):
    assert float(parse(src)(2.0, 0.0).val) == pytest.approx(expected)


@pytest.mark.parametrize("src", ["", "   ", "u +", "(u", "u)", "sin u", "2 3", "u^v", "abs(u)", "u ** 2",
                                 "sin()", "u,v"])
def test_syntax_errors(src):
    with pytest.raises(DslSyntaxError):
        parse(src)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as ei:
        parse("u + w")
    assert ei.value.name == "w" and ei.value.offset == 4


def test_domain_error_carries_node_offset():
    with pytest.raises(DomainError) as ei:
        at("u + log(v)", 1.0, -1.0)
    assert ei.value.offset == 4 and ei.value.point == (1.0, -1.0)


def test_non_integer_power_needs_positive_base():
    with pytest.raises(DomainError):
        at("u^0.5", -1.0, 0.0)
    assert float(at("u^3", -2.0, 0.0).val) == -8.0


def test_bindings_substitute_literals():
    e = parse("k*u", {"k": 2.5})
    assert float(e(2.0, 0.0).val) == 5.0
    with pytest.raises(ValueError):
        parse("u", {"pi": 3.0})


def test_vector_parse_and_print():
    vec = parse_vector("(u^2, u^3, v)")
    assert str(vec) == "(u^2, u^3, v)"
    assert np.allclose(vec(2.0, 1.0).value(), [4, 8, 1])
    assert as_vector(("u", 0, "-v"))(1.0, 2.0).value().tolist() == [1.0, 0.0, -2.0]
    with pytest.raises(DslSyntaxError):
        parse_vector("(u, v)")


def test_fuzz_round_trip_10k():
    rng = np.random.default_rng(20260301)
    for _ in range(10_000):
        e = random_expr(rng)
        src = to_source(e)
        p = parse(src)
        assert p == e, src
        assert to_source(p) == src


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_whitespace_is_insignificant(seed):
    e = random_expr(np.random.default_rng(seed))
    src = to_source(e)
    padded = "".join(f" {c} " if c in "+-*/^()" else c for c in src)
    assert parse(padded) == e
    assert parse(src.replace(" ", "")) == e


def test_jet_partials_against_finite_differences():
    """First and second partials vs central differences (h = 1e-5); see helpers.fd_draw."""
    rng = np.random.default_rng(11)
    used = skipped = 0
    worst = 0.0
    while used < 2000:
        u, v = rng.uniform(-2, 2, 2)
        draw = fd_draw(random_expr(rng, 3), u, v)
        if draw is None:
            skipped += 1
            continue
        used += 1
        worst = max(worst, rel_err(*draw))
    assert worst <= 1e-6
    assert skipped < used


def test_literal_formatting_round_trips_exactly():
    for x in (0.1, 1 / 3, 1e-300, 123456789.125, 2.0**60):
        assert parse(to_source(Num(x))) == Num(x)
