import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_envelopes.errors import DegenerateJacobianError, FramedAxiomError, SingularPointError
from sphere_envelopes.fixtures import FIXTURES
from sphere_envelopes.frame import (Domain, Exclusion, FramedSurface, basic_invariants, derive_frame,
                                    framed_residuals, integrability_from, integrability_residuals,
                                    reconstruction_residuals, reparametrize, rotate_frame)

from helpers import fd_first

PLANE = FramedSurface("(u, v, 0)")
FRAMED = [k for k in FIXTURES if k not in ("fixed-sphere", "concentric")]  # those have constant x


def test_plane_frame():
    n, s = derive_frame(PLANE.x, 0.3, -0.2)
    assert n.tolist() == [0, 0, 1] and s.tolist() == [1, 0, 0]


def test_graph_frame_at_critical_point():
    n, s = derive_frame(FramedSurface("(u, v, u^2 + v^2)").x, 0.0, 0.0)
    assert n.tolist() == [0, 0, 1] and s.tolist() == [1, 0, 0]


def test_singular_point_of_cuspidal_cylinder():
    with pytest.raises(SingularPointError):
        derive_frame(FramedSurface("(u^2, u^3, v)").x, 0.0, 0.5)
    with pytest.raises(SingularPointError):
        FramedSurface("(u^2, u^3, v)").frame_at(0.0, 0.5)


def test_explicit_frame_passes_through_the_singular_point():
    fs = FIXTURES["parabolic-cylinder"].surface()
    inv = basic_invariants(fs, 0.0, 0.5)
    assert (inv.a1, inv.b1, inv.a2, inv.b2) == (0.0, 0.0, 1.0, 0.0)


def test_axiom_violation_detected():
    bad = FramedSurface("(u, v, 0)", "(0, 0, 1)", "(1, 1, 0)")
    with pytest.raises(FramedAxiomError):
        basic_invariants(bad, 0.1, 0.1)
    tilted = FramedSurface("(u, v, u)", "(0, 0, 1)", "(1, 0, 0)")
    with pytest.raises(FramedAxiomError):
        basic_invariants(tilted, 0.1, 0.1)


def test_cylinder_invariants_closed_form():
    # x_u = (2u, 3u^2, 0) = |x_u| t with t = n x s, so a1 = 0 and b1 = u sqrt(9u^2 + 4)
    fs = FIXTURES["parabolic-cylinder"].surface()
    for u in (-0.7, 0.2, 0.9):
        inv = basic_invariants(fs, u, 0.3)
        r = np.sqrt(9 * u * u + 4)
        assert inv.a1 == pytest.approx(0, abs=1e-15)
        assert inv.b1 == pytest.approx(u * r, rel=1e-14)
        assert (inv.a2, inv.b2) == (1.0, 0.0)
        assert inv.f1 == pytest.approx(-6 / (9 * u * u + 4), rel=1e-13)


@pytest.mark.parametrize("name", FRAMED)
def test_reconstruction_against_finite_differences(name):
    fx = FIXTURES[name]
    fs = fx.surface()
    rng = np.random.default_rng(3)
    u, v = fx.make_domain().random_points(50, rng, margin=1e-3)
    inv = basic_invariants(fs, u, v)
    xval = lambda a, b: fs.frame_at(a, b).x.value()  # noqa: E731
    xu, xv = fd_first(xval, u, v)
    assert np.max(np.abs(xu - (inv.a1[:, None] * inv.s + inv.b1[:, None] * inv.t))) < 1e-8
    assert np.max(np.abs(xv - (inv.a2[:, None] * inv.s + inv.b2[:, None] * inv.t))) < 1e-8
    nval = lambda a, b: fs.frame_at(a, b).n.value()  # noqa: E731
    nu, nv = fd_first(nval, u, v)
    assert np.max(np.abs(nu - (inv.e1[:, None] * inv.s + inv.f1[:, None] * inv.t))) < 1e-8
    assert np.max(np.abs(nv - (inv.e2[:, None] * inv.s + inv.f2[:, None] * inv.t))) < 1e-8
    res = reconstruction_residuals(fs, u, v)
    assert max(float(np.max(r)) for r in res.values()) < 1e-12


@pytest.mark.parametrize("name", FRAMED)
def test_integrability_on_fixtures(name):
    fx = FIXTURES[name]
    u, v = fx.make_domain().random_points(200, np.random.default_rng(4), margin=1e-3)
    assert np.max(np.abs(integrability_residuals(fx.surface(), u, v))) <= 1e-6


def test_integrability_exact_on_plane():
    assert np.max(np.abs(integrability_residuals(PLANE, np.array([0.1, -0.5]), np.array([0.3, 0.9])))) == 0.0


def test_perturbed_g1_breaks_first_identity():
    fs = FIXTURES["sphere-through-origin"].surface()
    inv = basic_invariants(fs, 0.4, 0.2).as_dict()
    zero = {k: 0.0 for k in inv}
    base = integrability_from(inv, zero, zero)
    bumped = integrability_from(dict(inv, g1=inv["g1"] + 0.1), zero, zero)
    # residual 1 contains + b2 g1, so the change is 0.1 b2
    assert bumped[0] - base[0] == pytest.approx(0.1 * inv["b2"], rel=1e-12)
    assert abs(inv["b2"]) > 0.5


def test_framed_residuals_shape():
    res = framed_residuals(PLANE, np.zeros((2, 3)), np.ones((2, 3)))
    assert all(r.shape == (2, 3) for r in res.values())


def test_reparametrize_identity_swap_scale():
    A = basic_invariants(PLANE, 0.3, 0.2).A
    assert np.array_equal(basic_invariants(reparametrize(PLANE, ("u", "v")), 0.3, 0.2).A, A)
    assert basic_invariants(reparametrize(PLANE, ("v", "u")), 0.3, 0.2).A.tolist() == [[0, 1], [1, 0]]
    assert basic_invariants(reparametrize(PLANE, ("2*u", "v")), 0.3, 0.2).A.tolist() == [[2, 0], [0, 1]]


def test_reparametrize_degenerate_jacobian():
    with pytest.raises(DegenerateJacobianError):
        reparametrize(PLANE, ("u + v", "2*u + 2*v"), Domain(-1, 1, -1, 1))


def test_reparametrized_invariants_follow_jacobian():
    fs = FIXTURES["sphere-through-origin"].surface()
    phi = ("0.5*u + 0.2*v", "0.3*u - 0.4*v + 1")
    J = np.array([[0.5, 0.3], [0.2, -0.4]])  # rows: d(u,v)/dp, d(u,v)/dq
    p, q = 0.3, 0.7
    u0, v0 = 0.5 * p + 0.2 * q, 0.3 * p - 0.4 * q + 1
    A = basic_invariants(fs, u0, v0).A
    At = basic_invariants(reparametrize(fs, phi, Domain(-1, 1, -1, 1)), p, q).A
    assert np.allclose(At, J @ A, atol=1e-14)


def test_rotation_examples():
    assert np.array_equal(basic_invariants(rotate_frame(PLANE, "0"), 0.3, 0.2).A,
                          basic_invariants(PLANE, 0.3, 0.2).A)
    Ar = basic_invariants(rotate_frame(PLANE, "pi/2"), 0.3, 0.2).A
    assert np.allclose(Ar, [[0, 1], [-1, 0]], atol=1e-15)
    fs = FIXTURES["parabolic-cylinder"].surface()
    g1 = basic_invariants(fs, 0.4, 0.2).g1
    assert basic_invariants(rotate_frame(fs, "u"), 0.4, 0.2).g1 == pytest.approx(g1 - 1, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_rotation_matrix_product(theta, u, v):
    fs = FIXTURES["parabolic-cylinder"].surface()
    A = basic_invariants(fs, u, v).A
    c, s = np.cos(theta), np.sin(theta)
    Ar = basic_invariants(rotate_frame(fs, lambda U, V: theta), u, v).A
    assert np.allclose(Ar, A @ np.array([[c, s], [-s, c]]), atol=1e-13)


def test_domain_exclusions():
    d = Domain(-1, 1, -2, 2, ("v <= 0", "u^2 > 0.81"))
    g = d.grid(5, 5)
    assert g.valid.tolist()[2] == [False, False, False, True, True]
    assert not g.valid[0].any()
    u, v = d.random_points(100, np.random.default_rng(0))
    assert np.all(v > 0) and np.all(u * u <= 0.81)
    with pytest.raises(ValueError):
        Exclusion.parse("u = 0")
    with pytest.raises(ValueError):
        Domain(1, 1, 0, 1)


def test_grid_scatter_round_trip():
    g = Domain(0, 1, 0, 1, ("u + v < 0.3",)).grid(4, 3)
    uu, vv = g.points()
    back = g.scatter(uu)
    assert np.array_equal(back[g.valid], uu) and np.isnan(back[~g.valid]).all()
