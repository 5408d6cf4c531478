"""The creative condition and the five-set decomposition of the parameter domain.

A sphere family S(x, lambda) is creative when there is a unit vector
nu = alpha s + beta t + gamma n with

    a1 alpha + b1 beta + lambda_u = 0
    a2 alpha + b2 beta + lambda_v = 0

at every point.  Pointwise the solution set in the (alpha, beta) disk is a
point, a chord, the whole disk or empty, and the points of U fall into

    S1: rank A = 2, J_a^2 + J_b^2 < J_F^2           (two creators)
    S2: rank A = 2, J_a^2 + J_b^2 = J_F^2            (one creator, gamma = 0)
    S3: rank A = 1, solution line tangent to the unit circle
    S4: rank A = 1, solution line cuts a chord       (a circle of creators)
    S5: A = 0 and lambda_u = lambda_v = 0            (every unit vector)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ._parallel import map_points
from .core import DEFAULT_TOLERANCES, Jet2, Tolerances
from .dsl import as_expr
from .errors import NotApplicableError
from .frame import FramedSurface, InvariantData, SampleGrid, basic_invariants, seeds


class Kind(IntEnum):
    UNIQUE_ON_CIRCLE = 0
    TWO_BRANCH = 1
    SEGMENT = 2
    DISK = 3
    EMPTY = 4


class Sigma(IntEnum):
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4
    S5 = 5
    NOT_CREATIVE = 6
    AMBIGUOUS = 7

    @property
    def label(self) -> str:
        return {6: "NotCreative", 7: "Ambiguous"}.get(int(self), f"Sigma{int(self)}")


EXCLUDED = -1  # label used on grids for excluded samples


def as_radius(lam):
    """Coerce a number, DSL string or field into a scalar field of (U, V)."""
    if isinstance(lam, (int, float)) and not isinstance(lam, bool):
        return as_expr(repr(float(lam)))
    if callable(lam) and not isinstance(lam, str):
        return lam
    return as_expr(lam)


@dataclass(frozen=True)
class Jays:
    J_F: float
    J_a: float
    J_b: float


def jays(inv: InvariantData, lam: Jet2) -> Jays:
    lu, lv = lam.du, lam.dv
    return Jays(
        J_F=inv.a1 * inv.b2 - inv.a2 * inv.b1,
        J_a=inv.a1 * lv - inv.a2 * lu,
        J_b=inv.b1 * lv - inv.b2 * lu,
    )


@dataclass(frozen=True)
class CreatorSolution:
    """Pointwise solution set of the creative condition.

    ``alpha_beta`` is a representative: the Cramer solution for rank 2, the
    foot of the perpendicular from the origin to the solution line for rank 1
    and the origin for the disk.  ``segment`` holds the chord endpoints,
    ordered by beta then alpha.
    """

    kind: Kind
    alpha_beta: tuple[float, float]
    sigma: Sigma
    segment: tuple[tuple[float, float], tuple[float, float]] | None = None
    rank: int = 2

    @property
    def gamma_squared(self) -> float:
        a, b = self.alpha_beta
        return max(0.0, 1.0 - a * a - b * b)


def _segment_endpoints(p0, w, half):
    perp = np.stack([-w[..., 1], w[..., 0]], -1)
    e1 = p0 + half[..., None] * perp
    e2 = p0 - half[..., None] * perp
    # order by beta, then alpha
    swap = (e2[..., 1] < e1[..., 1]) | ((e2[..., 1] == e1[..., 1]) & (e2[..., 0] < e1[..., 0]))
    lo = np.where(swap[..., None], e2, e1)
    hi = np.where(swap[..., None], e1, e2)
    return np.stack([lo, hi], -2)


def solve_arrays(a1, b1, a2, b2, lu, lv, tol: Tolerances = DEFAULT_TOLERANCES) -> dict[str, np.ndarray]:
    """Vectorized creative-condition solver.

    Returns arrays keyed ``kind``, ``sigma``, ``rank``, ``alpha``, ``beta``,
    ``J_F``, ``J_a``, ``J_b``, ``row`` (which equation spans the rank-1 line),
    ``segment`` (..., 2, 2) and ``margin`` (signed distance to the nearest
    set boundary in the relevant test).
    """
    a1, b1, a2, b2, lu, lv = np.broadcast_arrays(*(np.asarray(q, dtype=float) for q in (a1, b1, a2, b2, lu, lv)))
    shape = a1.shape
    scale = np.maximum.reduce([np.abs(a1), np.abs(b1), np.abs(a2), np.abs(b2), np.ones(shape)])
    lscale = np.maximum.reduce([np.abs(lu), np.abs(lv), np.ones(shape)])
    JF = a1 * b2 - a2 * b1
    Ja = a1 * lv - a2 * lu
    Jb = b1 * lv - b2 * lu

    def band(q, s, eps):
        return np.abs(q) <= eps * (1.0 + s)

    rank2_clean = ~band(JF, scale**2, tol.eps_zero)
    rank2_ambig = rank2_clean & band(JF, scale**2, tol.eps_class)
    r1 = np.hypot(a1, b1)
    r2 = np.hypot(a2, b2)
    rank0 = ~rank2_clean & band(r1, scale, tol.eps_zero) & band(r2, scale, tol.eps_zero)
    rank1 = ~rank2_clean & ~rank0
    rank = np.where(rank2_clean, 2, np.where(rank1, 1, 0))

    kind = np.full(shape, int(Kind.EMPTY))
    sigma = np.full(shape, int(Sigma.NOT_CREATIVE))
    alpha = np.full(shape, np.nan)
    beta = np.full(shape, np.nan)
    margin = np.full(shape, np.nan)
    segment = np.full(shape + (2, 2), np.nan)

    with np.errstate(all="ignore"):
        # rank 2: Cramer
        ca, cb = Jb / JF, -Ja / JF
        rho = ca * ca + cb * cb
        m2 = rho - 1.0
        sel = rank2_clean
        alpha[sel], beta[sel], margin[sel] = ca[sel], cb[sel], m2[sel]
        two = sel & (m2 < -tol.eps_class)
        on = sel & (np.abs(m2) <= tol.eps_class)
        out = sel & (m2 > tol.eps_class)
        kind[two], kind[on], kind[out] = Kind.TWO_BRANCH, Kind.UNIQUE_ON_CIRCLE, Kind.EMPTY
        sigma[two] = Sigma.S1
        sigma[on] = np.where(np.abs(m2[on]) <= 2 * tol.eps_zero, Sigma.S2, Sigma.AMBIGUOUS)
        sigma[out] = Sigma.NOT_CREATIVE
        sigma[rank2_ambig & (sigma != Sigma.NOT_CREATIVE)] = Sigma.AMBIGUOUS

        # rank 1: one independent equation w.p = cc
        use1 = r1 >= r2
        row = np.where(use1, 1, 2)
        ra, rb = np.where(use1, a1, a2), np.where(use1, b1, b2)
        rc = np.where(use1, lu, lv)
        r = np.hypot(ra, rb)
        w = np.stack([ra / r, rb / r], -1)
        cc = -rc / r
        d = np.abs(cc)
        p0 = cc[..., None] * w
        cscale = scale * lscale
        consistent = band(Ja, cscale, tol.eps_zero) & band(Jb, cscale, tol.eps_zero)
        near_consistent = band(Ja, cscale, tol.eps_class) & band(Jb, cscale, tol.eps_class)
        m1 = d - 1.0
        sel = rank1 & near_consistent
        margin[sel] = m1[sel]
        seg = sel & (m1 < -tol.eps_class)
        tan = sel & (np.abs(m1) <= tol.eps_class)
        far = sel & (m1 > tol.eps_class)
        alpha[seg], beta[seg] = p0[seg, 0], p0[seg, 1]
        half = np.sqrt(np.maximum(0.0, 1.0 - cc * cc))
        segment[seg] = _segment_endpoints(p0, w, half)[seg]
        kind[seg] = Kind.SEGMENT
        sigma[seg] = Sigma.S4
        # tangency: representative is the unit vector along p0
        sgn = np.where(cc >= 0, 1.0, -1.0)
        alpha[tan], beta[tan] = (sgn[..., None] * w)[tan, 0], (sgn[..., None] * w)[tan, 1]
        kind[tan] = Kind.UNIQUE_ON_CIRCLE
        # the printed componentwise test for S3, cross-checked against tangency
        comp = band(r1**2 - lu**2, scale**2 * lscale**2, tol.eps_class) & band(r2**2 - lv**2, scale**2 * lscale**2, tol.eps_class)
        clean_tan = np.abs(m1) <= 2 * tol.eps_zero
        sigma[tan] = np.where(clean_tan[tan] & comp[tan], Sigma.S3, Sigma.AMBIGUOUS)
        kind[far], sigma[far] = Kind.EMPTY, Sigma.NOT_CREATIVE
        sigma[sel & ~consistent & (sigma != Sigma.NOT_CREATIVE)] = Sigma.AMBIGUOUS

        # rank 0
        flat = rank0 & band(lu, scale, tol.eps_zero) & band(lv, scale, tol.eps_zero)
        kind[flat], sigma[flat] = Kind.DISK, Sigma.S5
        alpha[flat], beta[flat] = 0.0, 0.0
        margin[flat] = 0.0

    return {
        "kind": kind, "sigma": sigma, "rank": rank, "alpha": alpha, "beta": beta,
        "J_F": JF, "J_a": Ja, "J_b": Jb, "row": row, "segment": segment, "margin": margin,
    }


def solve_creator(inv: InvariantData, lam: Jet2, tol: Tolerances = DEFAULT_TOLERANCES) -> CreatorSolution:
    """Solve the creative condition at a single point."""
    res = solve_arrays(inv.a1, inv.b1, inv.a2, inv.b2, lam.du, lam.dv, tol)
    return _solution_at(res, ())


def _solution_at(res, idx) -> CreatorSolution:
    kind = Kind(int(res["kind"][idx]))
    seg = None
    if kind is Kind.SEGMENT:
        s = res["segment"][idx]
        seg = ((float(s[0, 0]), float(s[0, 1])), (float(s[1, 0]), float(s[1, 1])))
    return CreatorSolution(
        kind=kind,
        alpha_beta=(float(res["alpha"][idx]), float(res["beta"][idx])),
        sigma=Sigma(int(res["sigma"][idx])),
        segment=seg,
        rank=int(res["rank"][idx]),
    )


def family_data(fs: FramedSurface, lam, u, v, tol: Tolerances | None = None, check: bool = True):
    """Invariants, radius jet and creator arrays at points (u, v)."""
    tol = tol or fs.tol
    lam = as_radius(lam)
    inv = basic_invariants(fs, u, v, tol, check=check)
    L = Jet2.coerce(lam(*seeds(u, v)))
    res = solve_arrays(inv.a1, inv.b1, inv.a2, inv.b2, L.du, L.dv, tol)
    return inv, L, res


def solve_at(fs: FramedSurface, lam, u0: float, v0: float, tol: Tolerances | None = None) -> CreatorSolution:
    _, _, res = family_data(fs, lam, u0, v0, tol)
    return _solution_at(res, ())


# grid classification -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensitySummary:
    """Grid heuristics standing in for density and openness.

    ``dense[k]`` is true when every valid, non-ambiguous sample has a
    Sigma-k sample in its 3x3 neighborhood; ``complement[k]`` is the fraction
    of valid samples not labelled k.  ``open_witness`` is the first interior
    sample (row-major) whose full 3x3 neighborhood lies in S4 u S5.
    """

    fractions: dict[str, float]
    dense: dict[int, bool]
    complement: dict[int, float]
    open_witness: tuple[int, int] | None
    any_not_creative: bool
    n_valid: int

    def lines(self) -> list[str]:
        out = [f"valid={self.n_valid}"]
        out += [f"fraction[{k}]={format(v, '.17g')}" for k, v in self.fractions.items()]
        out += [f"dense[Sigma{k}]={str(self.dense[k]).lower()}" for k in sorted(self.dense)]
        wit = "none" if self.open_witness is None else f"{self.open_witness[0]},{self.open_witness[1]}"
        out.append(f"open_witness={wit}")
        return out


@dataclass(frozen=True, eq=False)
class ClassifiedGrid:
    grid: SampleGrid
    labels: np.ndarray  # Sigma codes, EXCLUDED where invalid
    kind: np.ndarray
    data: dict[str, np.ndarray]  # per-sample arrays on the grid (NaN where invalid)
    summary: DensitySummary


def _neighborhood_any(mask: np.ndarray) -> np.ndarray:
    p = np.pad(mask, 1, constant_values=False)
    out = np.zeros_like(mask)
    nu, nv = mask.shape
    for di in (0, 1, 2):
        for dj in (0, 1, 2):
            out |= p[di:di + nu, dj:dj + nv]
    return out


def _neighborhood_all(mask: np.ndarray) -> np.ndarray:
    p = np.pad(mask, 1, constant_values=False)
    out = np.ones_like(mask)
    nu, nv = mask.shape
    for di in (0, 1, 2):
        for dj in (0, 1, 2):
            out &= p[di:di + nu, dj:dj + nv]
    return out


def summarize(labels: np.ndarray) -> DensitySummary:
    valid = labels != EXCLUDED
    n_valid = int(valid.sum())
    fractions = {}
    for s in Sigma:
        c = int((labels == s).sum())
        if c:
            fractions[s.label] = c / n_valid
    decided = valid & (labels != Sigma.AMBIGUOUS)
    dense, complement = {}, {}
    for k in (1, 2, 3, 4, 5):
        mk = labels == k
        near = _neighborhood_any(mk)
        dense[k] = bool(mk.any() and np.all(near[decided]))
        complement[k] = float((valid & ~mk).sum() / n_valid) if n_valid else 1.0
    open_set = _neighborhood_all((labels == Sigma.S4) | (labels == Sigma.S5))
    hits = np.argwhere(open_set)
    witness = tuple(int(i) for i in hits[0]) if len(hits) else None
    return DensitySummary(fractions, dense, complement, witness,
                          bool((labels == Sigma.NOT_CREATIVE).any()), n_valid)


def classify_grid(fs: FramedSurface, lam, grid: SampleGrid, tol: Tolerances | None = None,
                  threads: int | None = None) -> ClassifiedGrid:
    tol = tol or fs.tol
    lam = as_radius(lam)
    uu, vv = grid.points()

    def work(u, v):
        inv, L, res = family_data(fs, lam, u, v, tol, check=False)
        res = {k: res[k] for k in ("kind", "sigma", "alpha", "beta", "J_F", "J_a", "J_b")}
        res["lambda"] = np.broadcast_to(np.asarray(L.val, dtype=float), u.shape).copy()
        return res

    flat = map_points(work, uu, vv, threads) if len(uu) else {}
    labels = np.full(grid.shape, EXCLUDED)
    kind = np.full(grid.shape, EXCLUDED)
    data = {}
    if flat:
        labels[grid.valid] = flat["sigma"]
        kind[grid.valid] = flat["kind"]
        data = {k: grid.scatter(w) for k, w in flat.items() if k not in ("sigma", "kind")}
    return ClassifiedGrid(grid, labels, kind, data, summarize(labels))


# the identity satisfied by creative rank-2 families -----------------------


def creator_identity_residual(fs: FramedSurface, lam, u0: float, v0: float, h: float = 1e-5,
                              alpha_beta=None, tol: Tolerances | None = None) -> float:
    """Signed left side of the identity

        alpha (b1 g2 - g1 b2) + beta (g1 a2 - a1 g2)
          + (a1 alpha_v - alpha_u a2) + (b1 beta_v - beta_u b2) = 0

    which every creative family satisfies on S1 u S2.  alpha and beta are
    the Cramer representatives; their partials are central differences.
    ``alpha_beta(u, v) -> (alpha, beta)`` overrides the representatives
    (used to check that a wrong creator is detected).
    """
    tol = tol or fs.tol
    sol = solve_at(fs, lam, u0, v0, tol)
    if sol.sigma not in (Sigma.S1, Sigma.S2):
        raise NotApplicableError(f"point ({u0}, {v0}) is {sol.sigma.label}, not in Sigma1 or Sigma2")
    us = np.array([u0, u0 + h, u0 - h, u0, u0])
    vs = np.array([v0, v0, v0, v0 + h, v0 - h])
    if alpha_beta is None:
        _, _, res = family_data(fs, lam, us, vs, tol, check=False)
        al, be = res["alpha"], res["beta"]
    else:
        al, be = (np.asarray(q, dtype=float) for q in alpha_beta(us, vs))
    inv = basic_invariants(fs, u0, v0, tol, check=False)
    a_u, a_v = (al[1] - al[2]) / (2 * h), (al[3] - al[4]) / (2 * h)
    b_u, b_v = (be[1] - be[2]) / (2 * h), (be[3] - be[4]) / (2 * h)
    a, b = al[0], be[0]
    return float(
        a * (inv.b1 * inv.g2 - inv.g1 * inv.b2) + b * (inv.g1 * inv.a2 - inv.a1 * inv.g2)
        + (inv.a1 * a_v - a_u * inv.a2) + (inv.b1 * b_v - b_u * inv.b2)
    )

