"""Shared test helpers: random expression trees and finite-difference oracles."""

from __future__ import annotations

import numpy as np

from sphere_envelopes.dsl import BinOp, Call, Const, Neg, Num, Pow, Var

FUNCS = ("sin", "cos", "tan", "sqrt", "exp", "log", "atan")


def random_number(rng: np.random.Generator) -> float:
    r = rng.random()
    if r < 0.4:
        return float(rng.integers(0, 10))
    if r < 0.8:
        return float(np.round(rng.uniform(0, 5), int(rng.integers(1, 4))))
    return float(rng.uniform(0, 3))  # full 17-digit literal


def random_expr(rng: np.random.Generator, depth: int = 4):
    """A random well-formed AST (numbers are non-negative, as the parser produces)."""
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.35:
            return Var("u")
        if r < 0.7:
            return Var("v")
        if r < 0.8:
            return Const(("pi", "e")[int(rng.integers(0, 2))])
        return Num(random_number(rng))
    r = rng.random()
    if r < 0.45:
        op = "+-*/"[int(rng.integers(0, 4))]
        return BinOp(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if r < 0.55:
        return Neg(random_expr(rng, depth - 1))
    if r < 0.7:
        k = float(rng.choice([0, 1, 2, 3, -1, -2, 0.5, 1.5]))
        return Pow(random_expr(rng, depth - 1), k)
    return Call(FUNCS[int(rng.integers(0, len(FUNCS)))], random_expr(rng, depth - 1))


def fd_first(g, u, v, h=1e-5):
    gu = (g(u + h, v) - g(u - h, v)) / (2 * h)
    gv = (g(u, v + h) - g(u, v - h)) / (2 * h)
    return gu, gv


def fd_draw(e, u: float, v: float):
    """(jet partials, oracle) for one expression and point, or None if the draw is rejected.

    First partials are central differences of values and second partials are
    central differences of the jet's own first partials (h = 1e-5).  A draw is
    rejected on a domain error, non-finite numbers, a value or partial above
    1e4 (oracle roundoff then exceeds the bound), or when the oracle changes
    by more than 1e-7 between h and 2h.
    """
    from sphere_envelopes.core import jet_lift
    from sphere_envelopes.errors import DomainError

    def oracle(h):
        g = lambda a, b: float(e(a, b).val)  # noqa: E731
        gu = lambda a, b: float(jet_lift(e, a, b).du)  # noqa: E731
        gv = lambda a, b: float(jet_lift(e, a, b).dv)  # noqa: E731
        return np.array([*fd_first(g, u, v, h), *fd_first(gu, u, v, h), *fd_first(gv, u, v, h)])

    try:
        with np.errstate(all="ignore"):
            j = jet_lift(e, u, v)
            o1, o2 = oracle(1e-5), oracle(2e-5)
    except DomainError:
        return None
    jet = np.array([j.du, j.dv, j.duu, j.duv, j.duv, j.dvv], dtype=float)
    if (not np.all(np.isfinite(np.r_[o1, o2, jet, float(j.val)])) or max(abs(float(j.val)), *np.abs(jet)) > 1e4
            or rel_err(o1, o2) > 1e-7):
        return None
    return jet, o1


def rel_err(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
