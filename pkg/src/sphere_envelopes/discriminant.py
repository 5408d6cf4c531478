"""The discriminant ("D envelope") of a sphere family, sampled.

D is the set of p with F = F_u = F_v = 0 for some (u, v), where
F(p, u, v) = |p - x(u, v)|^2 - lambda(u, v)^2.  It splits into the f
envelopes, one circle per S4 point and one whole sphere per S5 point.  We
never represent D implicitly: every emitted point carries its generating
(u, v) so the residual oracle can re-check it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .core import Jet2
from .creative import Kind, Sigma, _neighborhood_any, as_radius, family_data
from .envelope import Branch, creator_jets
from .errors import EnvelopeToolError, NotApplicableError
from .frame import FramedSurface, SampleGrid, seeds

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class InconsistentConstraintError(EnvelopeToolError):
    pass


def residual_oracle(p, fs: FramedSurface, lam, u0, v0):
    """(F, F_u, F_v) at p for the generator (u0, v0); broadcasts over both."""
    lam = as_radius(lam)
    U, V = seeds(u0, v0)
    x = fs.x(U, V)
    L = Jet2.coerce(lam(U, V))
    d = np.asarray(p, dtype=float) - x.value()
    F = np.sum(d * d, -1) - np.asarray(L.val) ** 2
    Fu = -2 * np.sum(x.du_value() * d, -1) - 2 * np.asarray(L.val) * np.asarray(L.du)
    Fv = -2 * np.sum(x.dv_value() * d, -1) - 2 * np.asarray(L.val) * np.asarray(L.dv)
    return F, Fu, Fv


def oracle_scaled(p, fs, lam, u0, v0) -> np.ndarray:
    """max(|F|, |F_u|, |F_v|) divided by the natural scale of each term."""
    lam = as_radius(lam)
    U, V = seeds(u0, v0)
    x = fs.x(U, V)
    L = Jet2.coerce(lam(U, V))
    F, Fu, Fv = residual_oracle(p, fs, lam, u0, v0)
    lv = np.abs(np.asarray(L.val))
    sF = 1 + lv * lv
    sU = 1 + 2 * lv * (np.linalg.norm(x.du_value(), axis=-1) + np.abs(np.asarray(L.du)))
    sV = 1 + 2 * lv * (np.linalg.norm(x.dv_value(), axis=-1) + np.abs(np.asarray(L.dv)))
    return np.maximum.reduce([np.abs(F) / sF, np.abs(Fu) / sU, np.abs(Fv) / sV])


@dataclass(frozen=True, eq=False)
class CircleData:
    center: np.ndarray  # x + lambda c w
    normal: np.ndarray  # w, unit normal of the circle's plane
    radius: float       # lambda sqrt(1 - c^2)
    points: np.ndarray  # (m, 3)

    def distance(self, q) -> np.ndarray:
        d = np.asarray(q, dtype=float) - self.center
        dn = d @ self.normal
        inplane = d - dn[..., None] * self.normal
        dr = np.linalg.norm(inplane, axis=-1) - self.radius
        return np.hypot(dn, dr)


def _circle_basis(fs, lam, u0, v0, tol):
    inv, L, res = family_data(fs, lam, u0, v0, tol, check=False)
    if int(res["sigma"]) != Sigma.S4:
        raise NotApplicableError(f"point ({u0}, {v0}) is not in Sigma4")
    if int(res["row"]) == 1:
        a, b, c = inv.a1, inv.b1, float(L.du)
    else:
        a, b, c = inv.a2, inv.b2, float(L.dv)
    r = float(np.hypot(a, b))
    cc = -c / r
    if abs(cc) > 1:
        raise InconsistentConstraintError(f"|c| = {abs(cc)!r} > 1 at ({u0}, {v0})")
    w3 = (a * inv.s + b * inv.t) / r
    e2 = (b * inv.s - a * inv.t) / r
    x = fs.x(*seeds(u0, v0)).value()
    return x, float(L.val), cc, w3, inv.n, e2


def circle_at(fs: FramedSurface, lam, u0: float, v0: float, m: int = 64, tol=None) -> CircleData:
    """m equally spaced points of the circle generated by an S4 point."""
    tol = tol or fs.tol
    lam = as_radius(lam)
    x, L, cc, w3, n, e2 = _circle_basis(fs, lam, u0, v0, tol)
    h = np.sqrt(max(0.0, 1.0 - cc * cc))
    th = 2 * np.pi * np.arange(m) / m
    nu = cc * w3 + h * (np.cos(th)[:, None] * n + np.sin(th)[:, None] * e2)
    return CircleData(x + L * cc * w3, w3, L * h, x + L * nu)


def fibonacci_sphere(m: int) -> np.ndarray:
    """Deterministic, nearly uniform unit vectors (Fibonacci lattice)."""
    i = np.arange(m)
    z = 1 - 2 * (i + 0.5) / m
    r = np.sqrt(1 - z * z)
    phi = i * GOLDEN_ANGLE
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], -1)


def sphere_at(fs: FramedSurface, lam, u0: float, v0: float, m: int = 64) -> np.ndarray:
    lam = as_radius(lam)
    U, V = seeds(u0, v0)
    return fs.x(U, V).value() + float(Jet2.coerce(lam(U, V)).val) * fibonacci_sphere(m)


@dataclass(frozen=True, eq=False)
class Component:
    """A tagged piece of D.  ``kind`` is envelope, circle or sphere.

    Envelope components are sampled on the full grid (NaN where the branch
    does not exist) so they can be meshed; ``points``/``generators`` list only
    the defined samples in row-major order.
    """

    tag: str
    kind: str
    points: np.ndarray
    generators: np.ndarray
    grid_values: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class DiscriminantSample:
    components: list[Component]
    max_residual: float
    limit_distance: float  # max distance of S4 branch limit points to their circle
    counts: dict = field(default_factory=dict)

    def by_kind(self, kind: str) -> list[Component]:
        return [c for c in self.components if c.kind == kind]


def _key(q: np.ndarray) -> tuple:
    return tuple(np.round(np.asarray(q, dtype=float), 9) + 0.0)


def _first_nonzero(w: np.ndarray) -> float:
    nz = w[np.abs(w) > 1e-12]
    return float(nz[0]) if len(nz) else 0.0


def decompose_d(fs: FramedSurface, lam, grid: SampleGrid, m: int = 64, tol=None) -> DiscriminantSample:
    """Envelope points on S1/S2/S3, a circle per S4 sample, a sphere per S5 sample.

    The plus/minus sheets also include S4 samples adjacent to S1 samples,
    where the sheets continue through their limit points.  Circles and
    spheres that coincide (same centre, plane and radius to 1e-9) are
    emitted once, tagged by their first generator.
    """
    tol = tol or fs.tol
    lam = as_radius(lam)
    uu, vv = grid.points()
    _, _, res = family_data(fs, lam, uu, vv, tol, check=False)
    kind, sigma = res["kind"], res["sigma"]
    comps: list[Component] = []

    def branch_points(mask, branch):
        if not mask.any():
            return None
        U, V = seeds(uu[mask], vv[mask])
        cj = creator_jets(fs, lam, U, V, branch, tol)
        return (cj.frame.x + cj.nu * cj.lam).value()

    two = kind == Kind.TWO_BRANCH
    # S4 samples next to S1 samples carry the limit points of the two sheets
    near_two = _neighborhood_any(grid.scatter(two, fill=False))[grid.valid]
    two = two | ((sigma == Sigma.S4) & near_two)
    uniq = kind == Kind.UNIQUE_ON_CIRCLE
    for tag, mask, br in (("envelope-plus", two, Branch.PLUS), ("envelope-minus", two, Branch.MINUS),
                          ("envelope-unique", uniq, Branch.UNIQUE)):
        pts = branch_points(mask, br)
        if pts is None:
            continue
        flat = np.full((len(uu), 3), np.nan)
        flat[mask] = pts
        comps.append(Component(tag, "envelope", pts, np.stack([uu[mask], vv[mask]], -1), grid.scatter(flat)))

    limit = 0.0
    idx = np.argwhere(grid.valid)
    seen: set = set()  # D is a set: identical circles or spheres are emitted once
    for k in np.flatnonzero(sigma == Sigma.S4):
        i, j = idx[k]
        circ = circle_at(fs, lam, uu[k], vv[k], m, tol)
        lim = np.concatenate([branch_points(np.arange(len(uu)) == k, b) for b in (Branch.PLUS, Branch.MINUS)])
        limit = max(limit, float(np.max(circ.distance(lim))))
        w = circ.normal if _first_nonzero(circ.normal) > 0 else -circ.normal
        key = ("circle",) + _key(np.r_[circ.center, w, circ.radius])
        if key in seen:
            continue
        seen.add(key)
        comps.append(Component(f"circle-{i}-{j}", "circle", circ.points,
                               np.tile([uu[k], vv[k]], (m, 1))))
    for k in np.flatnonzero(sigma == Sigma.S5):
        i, j = idx[k]
        U, V = seeds(uu[k], vv[k])
        key = ("sphere",) + _key(np.r_[fs.x(U, V).value(), abs(float(Jet2.coerce(lam(U, V)).val))])
        if key in seen:
            continue
        seen.add(key)
        comps.append(Component(f"sphere-{i}-{j}", "sphere", sphere_at(fs, lam, uu[k], vv[k], m),
                               np.tile([uu[k], vv[k]], (m, 1))))

    worst = 0.0
    for c in comps:
        if len(c.points):
            r = oracle_scaled(c.points, fs, lam, c.generators[:, 0], c.generators[:, 1])
            worst = max(worst, float(np.max(r)))
    counts = {kd: sum(1 for c in comps if c.kind == kd) for kd in ("envelope", "circle", "sphere")}
    return DiscriminantSample(comps, worst, limit, counts)


def membership_check(p, fs: FramedSurface, lam, u_start: float, v_start: float):
    """Least-squares root find of (F, F_u, F_v) in (u, v) for a fixed p.

    Returns ((u, v), |(F, F_u, F_v)|) at the solution.
    """
    lam = as_radius(lam)
    p = np.asarray(p, dtype=float)

    def fun(z):
        F, Fu, Fv = residual_oracle(p, fs, lam, z[0], z[1])
        return np.array([F, Fu, Fv], dtype=float)

    sol = least_squares(fun, np.array([u_start, v_start], dtype=float), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return (float(sol.x[0]), float(sol.x[1])), float(np.linalg.norm(fun(sol.x)))
