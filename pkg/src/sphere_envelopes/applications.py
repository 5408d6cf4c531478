"""Evolutes and pedal surfaces of framed surfaces, and checks of the
theorems relating them to envelopes.

Evolute: x_bar = x + delta n is an evolute when some theta gives

    M(delta) (sin theta, cos theta)^T = 0,
    M(delta) = [[a1 + delta e1, b1 + delta f1], [a2 + delta e2, b2 + delta f2]].

Pedal: Pe_P[x] = ((x - P).n) n, and the l-pedal uses a unit field l for n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOLERANCES, Tolerances
from .creative import as_radius, classify_grid
from .dsl import as_vector
from .envelope import Branch, BranchSpec, envelope_frame, sample_branch
from .errors import (BranchUnavailableError, EnvelopeToolError, HypothesisNotMetError,
                     NotCreativeError)
from .frame import FramedSurface, SampleGrid, basic_invariants, seeds

# evolutes --------------------------------------------------------------------


@dataclass(frozen=True)
class EvoluteRoot:
    delta: float
    theta: float
    double: bool = False      # near-double root of det M
    free_theta: bool = False  # M(delta) vanishes: every theta works
    residual: float = 0.0     # |M(delta) (sin theta, cos theta)|


@dataclass(frozen=True)
class EvoluteSolution:
    roots: tuple[EvoluteRoot, ...]
    degenerate: bool  # det M(delta) vanishes identically in delta
    coefficients: tuple[float, float, float]  # det M = c0 + c1 delta + c2 delta^2
    x: np.ndarray
    n: np.ndarray
    s: np.ndarray
    t: np.ndarray

    def evolute_point(self, root: EvoluteRoot) -> np.ndarray:
        return self.x + root.delta * self.n

    def evolute_frame(self, root: EvoluteRoot) -> tuple[np.ndarray, np.ndarray]:
        """(n_bar, s_bar) = (sin theta s + cos theta t, n)."""
        return np.sin(root.theta) * self.s + np.cos(root.theta) * self.t, self.n


def det_coefficients(inv) -> tuple[float, float, float]:
    c0 = inv.a1 * inv.b2 - inv.b1 * inv.a2
    c1 = inv.a1 * inv.f2 + inv.e1 * inv.b2 - inv.b1 * inv.e2 - inv.f1 * inv.a2
    c2 = inv.e1 * inv.f2 - inv.f1 * inv.e2
    return float(c0), float(c1), float(c2)


def _m_matrix(inv, d):
    return np.array([[inv.a1 + d * inv.e1, inv.b1 + d * inv.f1],
                     [inv.a2 + d * inv.e2, inv.b2 + d * inv.f2]], dtype=float)


def _theta(M: np.ndarray, tol: Tolerances) -> tuple[float, bool, float]:
    scale = float(np.max(np.abs(M)))
    r1, r2 = M[0], M[1]
    row = r1 if np.linalg.norm(r1) >= np.linalg.norm(r2) else r2
    nrm = float(np.linalg.norm(row))
    if nrm <= tol.eps_zero:
        return 0.0, True, scale
    sn, cs = -row[1] / nrm, row[0] / nrm
    if sn < 0 or (sn == 0 and cs < 0):
        sn, cs = -sn, -cs
    th = float(np.arctan2(sn, cs)) + 0.0  # no negative zero
    if th >= np.pi:
        th = 0.0
    res = float(np.linalg.norm(M @ np.array([np.sin(th), np.cos(th)])))
    return th, False, res


def solve_delta(c0: float, c1: float, c2: float, tol: Tolerances = DEFAULT_TOLERANCES):
    """Real roots of c0 + c1 d + c2 d^2, ascending, with a double-root flag.

    Returns (roots, double, degenerate) where degenerate means all three
    coefficients vanish.
    """
    scale = max(abs(c0), abs(c1), abs(c2))
    zero = tol.eps_zero * (1 + scale)
    if max(abs(c0), abs(c1), abs(c2)) <= tol.eps_zero:
        return [], False, True
    if abs(c2) <= zero:
        if abs(c1) <= zero:
            return [], False, False
        return [-c0 / c1], False, False
    disc = c1 * c1 - 4 * c2 * c0
    dscale = c1 * c1 + abs(4 * c2 * c0)
    if abs(disc) <= tol.eps_class * dscale:
        return [-c1 / (2 * c2)], True, False
    if disc < 0:
        return [], False, False
    q = -0.5 * (c1 + np.copysign(np.sqrt(disc), c1))
    roots = [q / c2, c0 / q] if q != 0 else [0.0, 0.0]
    return sorted(float(r) for r in roots), False, False


def evolute_at(fs: FramedSurface, u0: float, v0: float, tol: Tolerances | None = None) -> EvoluteSolution:
    tol = tol or fs.tol
    inv = basic_invariants(fs, u0, v0, tol)
    c0, c1, c2 = det_coefficients(inv)
    deltas, double, degenerate = solve_delta(c0, c1, c2, tol)
    roots = []
    for d in deltas:
        M = _m_matrix(inv, d)
        th, free, res = _theta(M, tol)
        roots.append(EvoluteRoot(float(d), th, double, free, 0.0 if free else res))
    x = fs.x(*seeds(u0, v0)).value()
    return EvoluteSolution(tuple(roots), degenerate, (c0, c1, c2), x, inv.n, inv.s, inv.t)


@dataclass(frozen=True, eq=False)
class EvoluteGrid:
    delta: np.ndarray      # (nu, nv, 2) ascending roots, NaN where absent
    theta: np.ndarray
    count: np.ndarray      # number of real roots (-1 if degenerate)
    discontinuities: list  # (i, j) where the root set jumps along a row


def evolute_grid(fs: FramedSurface, grid: SampleGrid, jump: float = 0.5, tol=None) -> EvoluteGrid:
    """Evolute roots on a grid, tracked along rows (increasing v index).

    A discontinuity is reported where the number of roots changes or a root
    moves by more than ``jump * (1 + |delta|)`` between neighbors.
    """
    tol = tol or fs.tol
    nu, nv = grid.shape
    delta = np.full((nu, nv, 2), np.nan)
    theta = np.full((nu, nv, 2), np.nan)
    count = np.zeros((nu, nv), dtype=int)
    for i in range(nu):
        for j in range(nv):
            if not grid.valid[i, j]:
                continue
            sol = evolute_at(fs, grid.UU[i, j], grid.VV[i, j], tol)
            count[i, j] = -1 if sol.degenerate else len(sol.roots)
            for k, r in enumerate(sol.roots):
                delta[i, j, k], theta[i, j, k] = r.delta, r.theta
    jumps = []
    for i in range(nu):
        for j in range(1, nv):
            if not (grid.valid[i, j] and grid.valid[i, j - 1]):
                continue
            if count[i, j] != count[i, j - 1]:
                jumps.append((i, j))
                continue
            a, b = delta[i, j], delta[i, j - 1]
            ok = np.isfinite(a) & np.isfinite(b)
            if np.any(np.abs(a[ok] - b[ok]) > jump * (1 + np.abs(b[ok]))):
                jumps.append((i, j))
    return EvoluteGrid(delta, theta, count, jumps)


# pedals ----------------------------------------------------------------------


class NonUnitDirectionError(EnvelopeToolError, ValueError):
    pass


@dataclass(frozen=True)
class PedalPoint:
    pe: np.ndarray
    base: np.ndarray
    height: np.ndarray  # (x - P).direction


def pedal_at(fs: FramedSurface, P, u0, v0) -> PedalPoint:
    fr = fs.frame_at(u0, v0)
    shape = np.broadcast_shapes(np.shape(u0), np.shape(v0)) + (3,)
    # constant fields evaluate to a single vector; give every sample its own row
    return _pedal(np.broadcast_to(fr.x.value(), shape), np.broadcast_to(fr.n.value(), shape), P)


def _pedal(x, d, P) -> PedalPoint:
    P = np.asarray(P, dtype=float)
    h = np.sum((x - P) * d, -1)
    return PedalPoint(h[..., None] * d, P, h)


def l_pedal_at(fs: FramedSurface, l, P, u0, v0, tol: Tolerances | None = None) -> PedalPoint:
    tol = tol or fs.tol
    field = as_vector(l) if isinstance(l, str) else l
    U, V = seeds(u0, v0)
    lv = field(U, V).value()
    lv = np.broadcast_to(lv, np.shape(np.asarray(U.val)) + (3,))
    if np.any(np.abs(np.sum(lv * lv, -1) - 1) > tol.eps_residual):
        raise NonUnitDirectionError("l must be a unit vector at every point")
    return _pedal(np.broadcast_to(fs.x(U, V).value(), lv.shape), lv, P)


# Theorem checks --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TheoremCheck:
    residuals: dict
    tolerance: float
    coverage: float = 1.0
    detail: dict | None = None

    @property
    def worst(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance

    def lines(self) -> list[str]:
        out = [f"{k}={format(v, '.17g')}" for k, v in self.residuals.items()]
        out.append(f"coverage={format(self.coverage, '.17g')}")
        out.append(f"passed={str(self.passed).lower()}")
        return out


def verify_evolute(fs: FramedSurface, lam, grid: SampleGrid, tol: Tolerances | None = None,
                   check_hypothesis: bool = True) -> TheoremCheck:
    """x is an evolute of the envelope frame (f, nu, omega), delta = -lambda, theta = pi/2.

    The hypothesis (Sigma2 or Sigma3 dense) is checked on the grid unless
    ``check_hypothesis`` is false; then the normalized Cramer creator is used
    regardless, which lets the check expose families that are not creative.
    """
    tol = tol or fs.tol
    lam = as_radius(lam)
    spec = BranchSpec(Branch.UNIQUE)
    if check_hypothesis:
        summary = classify_grid(fs, lam, grid, tol).summary
        if summary.any_not_creative or not (summary.dense[2] or summary.dense[3]):
            raise HypothesisNotMetError("neither Sigma2 nor Sigma3 is dense on the grid")
    else:
        spec = BranchSpec(Branch.UNIQUE, force=True)
    u, v = grid.points()
    ef = envelope_frame(fs, lam, spec, u, v, tol)
    L = np.asarray(lam(*seeds(u, v)).val, dtype=float) * np.ones_like(u)
    x = fs.x(*seeds(u, v)).value() * np.ones_like(u)[:, None]
    inv = ef.invariants
    res = {
        "f_u_dot_nu": float(np.max(np.abs(np.sum(ef.f_u * ef.nu, -1)))),
        "f_v_dot_nu": float(np.max(np.abs(np.sum(ef.f_v * ef.nu, -1)))),
        "row1": float(np.max(np.abs(inv.a1 - L * inv.e1))),
        "row2": float(np.max(np.abs(inv.a2 - L * inv.e2))),
        "evolute_point": float(np.max(np.linalg.norm(ef.f - L[:, None] * ef.nu - x, axis=-1))),
    }
    return TheoremCheck(res, 1e-6, detail={"finite_differences": ef.finite_differences})


def _diameter_bound(pts: np.ndarray) -> float:
    """2 max |p - p0|, an upper bound for the max pairwise distance."""
    if len(pts) == 0:
        return 0.0
    return 2.0 * float(np.max(np.linalg.norm(pts - pts[0], axis=-1)))


def verify_pedal(fs: FramedSurface, lam, grid: SampleGrid, tol: Tolerances | None = None) -> TheoremCheck:
    """f2 = Pe_{f1}[2x - f1] when one of the two envelopes is a point f1.

    With f1 moved to the origin this reads f2 = 2((x - f1).n) n.  The
    hypothesis needs Sigma1 dense and one branch constant (its diameter at
    most 1e-8 (1 + scale)).
    """
    tol = tol or fs.tol
    lam = as_radius(lam)
    summary = classify_grid(fs, lam, grid, tol).summary
    if summary.any_not_creative or not summary.dense[1]:
        raise HypothesisNotMetError("Sigma1 is not dense on the grid")
    try:
        plus = sample_branch(fs, lam, grid, Branch.PLUS, tol)
        minus = sample_branch(fs, lam, grid, Branch.MINUS, tol)
    except (BranchUnavailableError, NotCreativeError) as exc:
        raise HypothesisNotMetError(str(exc)) from None
    pts = {b: br.f[grid.valid] for b, br in (("plus", plus), ("minus", minus))}
    scale = 1 + max(float(np.max(np.abs(p))) for p in pts.values())
    const = [b for b in ("minus", "plus") if _diameter_bound(pts[b]) <= 1e-8 * scale]
    if not const:
        raise HypothesisNotMetError("neither envelope branch is constant")
    cb = const[0]
    other = "plus" if cb == "minus" else "minus"
    f1 = pts[cb][0]
    u, v = grid.points()
    fr = fs.frame_at(u, v)
    x, n = fr.x.value(), fr.n.value()
    f2 = pts[other]
    model = 2 * np.sum((x - f1) * n, -1)[:, None] * n
    err = np.linalg.norm((f2 - f1) - model, axis=-1)
    rep = (plus if other == "plus" else minus).report
    res = {"pedal": float(np.max(err)), "f2_sphere": rep.sphere,
           "f2_tangency_u": rep.tangency_u, "f2_tangency_v": rep.tangency_v}
    return TheoremCheck(res, 1e-8, detail={"constant_branch": cb, "f1": f1, "other_branch": other})


def verify_corollary(fs_x: FramedSurface, fs_f: FramedSurface, P, grid: SampleGrid,
                     tol: Tolerances | None = None) -> TheoremCheck:
    """Pe_P[x] = n-Pe_P[f] for x an evolute of the framed surface (f, nu, omega).

    ``fs_f`` supplies (f, nu, omega) as its (x, n, s).  The evolute relation
    is checked first: delta = (x - f).nu must give x = f + delta nu and
    det M_f(delta) = 0.  Samples with (x - P).n = 0 are skipped and counted
    against the coverage.
    """
    tol = tol or fs_x.tol
    P = np.asarray(P, dtype=float)
    u, v = grid.points()
    fx = fs_x.frame_at(u, v)
    x, n = fx.x.value(), fx.n.value()
    xu, xv = fx.x.du_value(), fx.x.dv_value()
    scale = 1 + float(np.max(np.abs(x)))
    if float(np.min(np.linalg.norm(x - P, axis=-1))) <= tol.eps_zero * (scale + float(np.max(np.abs(P)))):
        raise HypothesisNotMetError("the base point P lies on the surface x")
    inv = basic_invariants(fs_f, u, v, tol, check=False)
    ff = fs_f.frame_at(u, v)
    f, nu_f = ff.x.value(), ff.n.value()
    delta = np.sum((x - f) * nu_f, -1)
    offset = float(np.max(np.linalg.norm(x - f - delta[:, None] * nu_f, axis=-1)))
    det = ((inv.a1 + delta * inv.e1) * (inv.b2 + delta * inv.f2)
           - (inv.b1 + delta * inv.f1) * (inv.a2 + delta * inv.e2))
    mscale = 1 + np.maximum.reduce([np.abs(inv.a1 + delta * inv.e1), np.abs(inv.b1 + delta * inv.f1),
                                    np.abs(inv.a2 + delta * inv.e2), np.abs(inv.b2 + delta * inv.f2)]) ** 2
    det_res = float(np.max(np.abs(det) / mscale))
    if offset > 1e-6 * scale or det_res > 1e-6:
        raise HypothesisNotMetError(
            f"x is not an evolute of (f, nu, omega): offset {offset:.3e}, det M {det_res:.3e}")
    regular = np.linalg.norm(np.cross(xu, xv), axis=-1) > tol.eps_zero
    h = np.sum((x - P) * n, -1)
    use = regular & (np.abs(h) > tol.eps_zero * scale)
    lhs = _pedal(x[use], n[use], P).pe
    rhs = np.sum((f[use] - P) * n[use], -1)[:, None] * n[use]
    err = float(np.max(np.linalg.norm(lhs - rhs, axis=-1))) if use.any() else 0.0
    return TheoremCheck({"pedal": err, "evolute_det": det_res, "evolute_offset": offset}, 1e-8,
                        coverage=float(use.mean()) if use.size else 0.0)


__all__ = [
    "EvoluteRoot", "EvoluteSolution", "EvoluteGrid", "PedalPoint", "TheoremCheck",
    "NonUnitDirectionError", "det_coefficients", "solve_delta", "evolute_at", "evolute_grid",
    "pedal_at", "l_pedal_at", "verify_evolute", "verify_pedal", "verify_corollary",
]
