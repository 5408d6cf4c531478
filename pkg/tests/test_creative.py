import numpy as np
import pytest

from sphere_envelopes.core import Jet2
from sphere_envelopes.creative import (Kind, Sigma, classify_grid, creator_identity_residual, jays, solve_arrays,
                                       solve_at, summarize)
from sphere_envelopes.errors import NotApplicableError
from sphere_envelopes.fixtures import FIXTURES
from sphere_envelopes.frame import Domain, FramedSurface, basic_invariants


def fam(name):
    fx = FIXTURES[name]
    return fx.surface(), fx.radius()


def one(a1, b1, a2, b2, lu, lv):
    res = solve_arrays(*(np.array([q], dtype=float) for q in (a1, b1, a2, b2, lu, lv)))
    return {k: (w[0] if np.ndim(w) else w) for k, w in res.items()}


def test_jays_of_zero_matrix():
    inv = basic_invariants(FramedSurface("(u, v, 0)"), 0.0, 0.0).replace(a1=0.0, b1=0.0, a2=0.0, b2=0.0)
    j = jays(inv, Jet2.const(1.0))
    assert (j.J_F, j.J_a, j.J_b) == (0.0, 0.0, 0.0)


def test_cone_distance_unique():
    fs, lam = fam("cone-distance")
    sol = solve_at(FramedSurface(fs.x, fs.n, fs.s), lam, 3.0, 4.0)
    assert sol.kind is Kind.UNIQUE_ON_CIRCLE and sol.sigma is Sigma.S2 and sol.rank == 2
    assert sol.alpha_beta == pytest.approx((-0.6, -0.8), abs=1e-15)


def test_translated_planes_two_branch():
    sol = solve_at(*fam("translated-planes"), 0.2, 0.3)
    assert sol.kind is Kind.TWO_BRANCH and sol.sigma is Sigma.S1
    assert sol.alpha_beta == (0.0, 0.0)


def test_axis_full_tangent():
    sol = solve_at(*fam("axis-full"), 0.0, 1.5)
    assert sol.kind is Kind.UNIQUE_ON_CIRCLE and sol.sigma is Sigma.S3 and sol.rank == 1
    assert sol.alpha_beta == (0.0, -1.0)


def test_axis_half_segment():
    sol = solve_at(*fam("axis-half"), 0.0, 2.0)
    assert sol.kind is Kind.SEGMENT and sol.sigma is Sigma.S4
    (p0, p1) = sol.segment
    h = np.sqrt(3) / 2
    assert sorted([p0, p1]) == [pytest.approx((-h, -0.5)), pytest.approx((h, -0.5))]


def test_fixed_sphere_disk():
    sol = solve_at(*fam("fixed-sphere"), 0.1, 0.1)
    assert sol.kind is Kind.DISK and sol.sigma is Sigma.S5 and sol.rank == 0


def test_concentric_not_creative():
    sol = solve_at(*fam("concentric"), 0.3, 0.4)
    assert sol.kind is Kind.EMPTY and sol.sigma is Sigma.NOT_CREATIVE


@pytest.mark.parametrize("rho, sigma", [
    (0.25, Sigma.S1), (1 - 1e-10, Sigma.S2), (1 + 1e-10, Sigma.S2), (1 - 5e-9, Sigma.AMBIGUOUS),
    (1 + 5e-9, Sigma.AMBIGUOUS), (1.5, Sigma.NOT_CREATIVE),
])
def test_rank2_bands(rho, sigma):
    # A = I, so (alpha, beta) = (-lambda_u, -lambda_v)
    assert one(1, 0, 0, 1, -np.sqrt(rho), 0.0)["sigma"] == sigma


@pytest.mark.parametrize("c, sigma", [
    (0.5, Sigma.S4), (1.0, Sigma.S3), (1 - 1e-10, Sigma.S3), (1 - 5e-9, Sigma.AMBIGUOUS),
    (1.2, Sigma.NOT_CREATIVE),
])
def test_rank1_bands(c, sigma):
    # only the first equation is independent: alpha = c
    assert one(1, 0, 2, 0, -c, -2 * c)["sigma"] == sigma


def test_rank1_inconsistent_rows():
    assert one(1, 0, 2, 0, -0.3, -0.1)["sigma"] == Sigma.NOT_CREATIVE


def test_rank0():
    assert one(0, 0, 0, 0, 0, 0)["sigma"] == Sigma.S5
    assert one(0, 0, 0, 0, 0.1, 0)["sigma"] == Sigma.NOT_CREATIVE


def test_cylinder_grid_classification():
    fs, lam = fam("parabolic-cylinder")
    grid = FIXTURES["parabolic-cylinder"].sample_grid()
    cg = classify_grid(fs, lam, grid)
    assert np.all(cg.labels[50] == Sigma.S4)
    assert np.all(np.delete(cg.labels, 50, axis=0) == Sigma.S1)
    assert cg.summary.dense[1] and not cg.summary.dense[4]
    assert cg.summary.open_witness is None


def test_cone_grid_all_sigma2():
    fs, lam = fam("cone-distance")
    cg = classify_grid(fs, lam, FIXTURES["cone-distance"].sample_grid())
    assert np.all(cg.labels[cg.grid.valid] == Sigma.S2) and cg.summary.dense[2]


def test_fixed_sphere_open_witness():
    fs, lam = fam("fixed-sphere")
    cg = classify_grid(fs, lam, FIXTURES["fixed-sphere"].sample_grid())
    assert np.all(cg.labels == Sigma.S5) and cg.summary.open_witness is not None


def test_thread_count_does_not_change_labels():
    fs, lam = fam("sphere-through-origin")
    grid = FIXTURES["sphere-through-origin"].sample_grid(101, 101)  # several work chunks
    a = classify_grid(fs, lam, grid, threads=1)
    b = classify_grid(fs, lam, grid, threads=4)
    assert np.array_equal(a.labels, b.labels)
    assert all(np.array_equal(a.data[k], b.data[k], equal_nan=True) for k in ("alpha", "beta", "J_F"))


def test_density_summary_mixed_halves():
    labels = np.full((10, 10), int(Sigma.S1))
    labels[5:] = int(Sigma.S2)
    s = summarize(labels)
    assert not s.dense[1] and not s.dense[2]


def test_creator_identity_identity():
    assert abs(creator_identity_residual(*fam("cone-distance"), 3.0, 4.0)) <= 1e-6
    assert abs(creator_identity_residual(*fam("parabolic-cylinder"), 1.0, 1.0)) <= 1e-6
    fs = FramedSurface("(u, v, 0)", "(0, 0, 1)", "(1, 0, 0)", Domain(-5, 5, -5, 5))
    wrong = lambda u, v: (-u / np.hypot(u, v), v / np.hypot(u, v))  # beta negated  # noqa: E731
    assert abs(creator_identity_residual(fs, "sqrt(u^2 + v^2)", 3.0, 4.0, alpha_beta=wrong)) > 1e-3


def test_creator_identity_not_applicable_off_sigma12():
    with pytest.raises(NotApplicableError):
        creator_identity_residual(*fam("axis-full"), 0.0, 1.0)
    with pytest.raises(NotApplicableError):
        creator_identity_residual(*fam("fixed-sphere"), 0.0, 0.0)
