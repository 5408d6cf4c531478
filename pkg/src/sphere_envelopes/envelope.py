"""Envelope branches f = x + lambda nu, their verification and counting.

Branches:

* ``PLUS`` / ``MINUS``: gamma = +/- sqrt(1 - alpha^2 - beta^2).  On a chord
  (S4) the representative is the foot point of the chord, on the disk (S5)
  it is the origin, so the branch continues the rank-2 formula across rank
  drops (this is what makes the parabolic-cylinder branches smooth at u=0).
* ``UNIQUE``: gamma = 0 on S2 and S3.
* ``CUSTOM``: on S4, nu = c w + sqrt(1-c^2)(cos(theta) n + sin(theta) e) where
  w = (a s + b t)/r spans the constraint and e = (b s - a t)/r; on S5,
  nu = cos(phi) cos(theta) n + cos(phi) sin(theta) s + sin(phi) t.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from . import core
from ._parallel import map_points
from .core import DEFAULT_TOLERANCES, Jet2, Tolerances, Vec3J
from .creative import Kind, Sigma, as_radius, classify_grid, solve_arrays, DensitySummary
from .dsl import as_expr, as_vector
from .errors import (BranchUnavailableError, EnvelopeToolError, NoOpenNeighborhoodError,
                     NotCreativeError)
from .frame import (Domain, FramedSurface, InvariantData, SampleGrid, basic_invariants,
                    invariant_jets, seeds)


class Branch(Enum):
    PLUS = "plus"
    MINUS = "minus"
    UNIQUE = "unique"
    CUSTOM = "custom"


def _scalar_field(q):
    if q is None:
        return None
    if isinstance(q, (int, float)) and not isinstance(q, bool):
        c = float(q)
        return lambda U, V: Jet2(c + 0.0 * np.asarray(U.val))
    if callable(q) and not isinstance(q, str):
        return q
    return as_expr(q)


@dataclass(frozen=True)
class BranchSpec:
    """A branch choice; ``theta`` and ``phi`` parametrize the CUSTOM freedom."""

    branch: Branch
    theta: object = None
    phi: object = None
    force: bool = False  # UNIQUE only: normalized Cramer creator even off S2

    @classmethod
    def of(cls, b) -> BranchSpec:
        if isinstance(b, BranchSpec):
            return b
        if isinstance(b, str):
            b = Branch(b.lower())
        if b is Branch.CUSTOM:
            return cls(b, 0.0, 0.0)
        return cls(b)

    @property
    def tag(self) -> str:
        return self.branch.value


class IllDefinedOmegaError(EnvelopeToolError):
    pass


@dataclass(eq=False)
class CreatorJets:
    frame: object
    lam: Jet2
    res: dict
    nu: Vec3J
    alpha: Jet2
    beta: Jet2
    gamma: Jet2


def _div(a, b) -> Jet2:
    return Jet2.coerce(a) * core.reciprocal(Jet2.coerce(b), check=False)


def _zeros_like(j: Jet2) -> Jet2:
    return Jet2(np.zeros_like(np.asarray(j.val, dtype=float)))


def _sqrt_clamped(q: Jet2) -> Jet2:
    pos = np.asarray(q.val) > 0
    with np.errstate(all="ignore"):
        return Jet2.where(pos, core.sqrt(q, check=False), _zeros_like(q))


def _first(mask, u, v) -> str:
    uu, vv, mask = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float), np.asarray(mask))
    i = int(np.flatnonzero(mask)[0])
    return f"(u, v) = ({float(uu.ravel()[i])!r}, {float(vv.ravel()[i])!r})"


def creator_jets(fs: FramedSurface, lam, U: Jet2, V: Jet2, branch, tol: Tolerances | None = None) -> CreatorJets:
    """The creator nu of a branch as jets at seed points (U, V)."""
    tol = tol or fs.tol
    spec = BranchSpec.of(branch)
    lam = as_radius(lam)
    fr = fs.frame(U, V)
    inv = invariant_jets(fr)
    L = Jet2.coerce(lam(U, V))
    a1, b1, a2, b2 = inv["a1"], inv["b1"], inv["a2"], inv["b2"]
    res = solve_arrays(a1.val, b1.val, a2.val, b2.val, L.du, L.dv, tol)
    kind, sigma, rank = res["kind"], res["sigma"], res["rank"]
    lu, lv = L.partial_u(), L.partial_v()

    if np.any(kind == Kind.EMPTY) and not spec.force:
        raise NotCreativeError(f"the family is not creative at {_first(kind == Kind.EMPTY, U.val, V.val)}")

    with np.errstate(all="ignore"):
        # Cramer representative
        JF = a1 * b2 - a2 * b1
        Ja = a1 * lv - a2 * lu
        Jb = b1 * lv - b2 * lu
        ca, cb = _div(Jb, JF), -_div(Ja, JF)
        # foot point of the rank-1 solution line, per chosen row
        use1 = res["row"] == 1
        ra = Jet2.where(use1, a1, a2)
        rb = Jet2.where(use1, b1, b2)
        rc = Jet2.where(use1, lu, lv)
        r2 = ra * ra + rb * rb
        pa, pb = -_div(rc * ra, r2), -_div(rc * rb, r2)
        rank2 = rank == 2
        rank1 = rank == 1
        al = Jet2.where(rank2, ca, Jet2.where(rank1, pa, 0.0))
        be = Jet2.where(rank2, cb, Jet2.where(rank1, pb, 0.0))
        rho = al * al + be * be

        s, t, n = fr.s, fr.t, fr.n
        b = spec.branch
        if b in (Branch.PLUS, Branch.MINUS):
            ok = np.isin(kind, (Kind.TWO_BRANCH, Kind.SEGMENT, Kind.DISK)) | (
                (kind == Kind.UNIQUE_ON_CIRCLE) & (sigma == Sigma.AMBIGUOUS))
            gm = _sqrt_clamped(1.0 - rho)
            if b is Branch.MINUS:
                gm = -gm
            nu = s * al + t * be + n * gm
        elif b is Branch.UNIQUE:
            ok = (kind == Kind.UNIQUE_ON_CIRCLE) | (spec.force & rank2)
            root = core.sqrt(rho, check=False)
            al, be = _div(al, root), _div(be, root)
            gm = _zeros_like(al)
            nu = s * al + t * be
        else:
            ok = np.isin(kind, (Kind.SEGMENT, Kind.DISK))
            th = Jet2.coerce(_scalar_field(spec.theta if spec.theta is not None else 0.0)(U, V))
            ph = Jet2.coerce(_scalar_field(spec.phi if spec.phi is not None else 0.0)(U, V))
            r = core.sqrt(r2, check=False)
            cc = -_div(rc, r)
            half = _sqrt_clamped(1.0 - cc * cc)
            w3 = (s * ra + t * rb) / r
            e2 = (s * rb - t * ra) / r
            ct, st = core.cos(th), core.sin(th)
            nu4 = w3 * cc + (n * ct + e2 * st) * half
            cp, sp = core.cos(ph), core.sin(ph)
            nu5 = n * (cp * ct) + s * (cp * st) + t * sp
            nu = Vec3J.where(kind == Kind.SEGMENT, nu4, nu5)
            al, be, gm = nu.dot(s), nu.dot(t), nu.dot(n)

    if not np.all(ok):
        bad = ~np.asarray(ok)
        i = int(np.flatnonzero(np.broadcast_to(bad, np.shape(kind)).ravel())[0])
        k = Kind(int(np.ravel(kind)[i])).name
        raise BranchUnavailableError(
            f"branch {spec.tag} is unavailable at {_first(bad, U.val, V.val)} (solution set {k})")
    return CreatorJets(fr, L, res, nu, al, be, gm)


def envelope_jets(fs, lam, U, V, branch, tol=None) -> tuple[Vec3J, CreatorJets]:
    cj = creator_jets(fs, lam, U, V, branch, tol)
    return cj.frame.x + cj.nu * cj.lam, cj


@dataclass(frozen=True)
class EnvelopePoint:
    f: np.ndarray
    nu: np.ndarray
    alpha: float
    beta: float
    gamma: float
    sigma: Sigma


def envelope_at(fs: FramedSurface, lam, u0: float, v0: float, branch, tol=None) -> EnvelopePoint:
    f, cj = envelope_jets(fs, lam, *seeds(u0, v0), branch, tol)
    return EnvelopePoint(f.value(), cj.nu.value(), float(cj.alpha.val), float(cj.beta.val),
                         float(cj.gamma.val), Sigma(int(cj.res["sigma"])))


# envelope-condition residuals ------------------------------------------


class SampledMap:
    """A candidate envelope given as a numeric map (u, v) -> (..., 3).

    Its derivatives are taken by central differences with step ``h``.
    """

    def __init__(self, fn: Callable, h: float = 1e-5):
        self.fn = fn
        self.h = h

    def values_and_partials(self, u, v):
        h = self.h
        f = np.asarray(self.fn(u, v), dtype=float)
        fu = (np.asarray(self.fn(u + h, v)) - np.asarray(self.fn(u - h, v))) / (2 * h)
        fv = (np.asarray(self.fn(u, v + h)) - np.asarray(self.fn(u, v - h))) / (2 * h)
        return f, fu, fv


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Maxima of the three envelope-condition residuals.

    ``sphere`` is | |f-x|^2 - lambda^2 | / lambda^2; ``tangency_u`` is
    |f_u.(f-x)| / (1 + |f_u| |lambda|) and likewise for v.  ``raw_u`` and
    ``raw_v`` are the unnormalized maxima |f_u.(f-x)|, |f_v.(f-x)|.
    """

    sphere: float
    tangency_u: float
    tangency_v: float
    raw_u: float
    raw_v: float
    tolerance: float
    fail_fraction: float
    fail_fraction_sphere: float
    pointwise: dict

    @property
    def passed(self) -> bool:
        return max(self.sphere, self.tangency_u, self.tangency_v) <= self.tolerance

    def lines(self) -> list[str]:
        g = lambda q: format(q, ".17g")  # noqa: E731
        return [f"sphere={g(self.sphere)}", f"tangency_u={g(self.tangency_u)}",
                f"tangency_v={g(self.tangency_v)}", f"raw_u={g(self.raw_u)}", f"raw_v={g(self.raw_v)}",
                f"fail_fraction={g(self.fail_fraction)}", f"passed={str(self.passed).lower()}"]


def definition_residuals(f, fu, fv, x, lam) -> dict[str, np.ndarray]:
    d = f - x
    lam = np.asarray(lam, dtype=float)
    lam2 = lam * lam
    sph = np.abs(np.sum(d * d, -1) - lam2) / lam2
    ru = np.abs(np.sum(fu * d, -1))
    rv = np.abs(np.sum(fv * d, -1))
    tu = ru / (1 + np.linalg.norm(fu, axis=-1) * np.abs(lam))
    tv = rv / (1 + np.linalg.norm(fv, axis=-1) * np.abs(lam))
    return {"sphere": sph, "tangency_u": tu, "tangency_v": tv, "raw_u": ru, "raw_v": rv}


def _report(pw: dict, tol: float) -> ResidualReport:
    def mx(k):
        a = pw[k]
        return float(np.max(a)) if a.size else 0.0

    fail = (pw["sphere"] > tol) | (pw["tangency_u"] > tol) | (pw["tangency_v"] > tol)
    n = max(1, fail.size)
    return ResidualReport(mx("sphere"), mx("tangency_u"), mx("tangency_v"), mx("raw_u"), mx("raw_v"),
                          tol, float(fail.sum() / n), float((pw["sphere"] > tol).sum() / n), pw)


def _points(where) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(where, SampleGrid):
        return where.points()
    u, v = where
    return np.broadcast_arrays(np.asarray(u, dtype=float).ravel(), np.asarray(v, dtype=float).ravel())


def verify_envelope(candidate, fs: FramedSurface, lam, where, tol: Tolerances | None = None,
                    threads: int | None = None) -> ResidualReport:
    """Check the envelope conditions for ``candidate`` on a grid or on point arrays.

    ``candidate`` is a DSL vector expression (jets), a field of (U, V), or a
    :class:`SampledMap` (finite differences; tolerance loosened to 1e-6).
    """
    tol = tol or fs.tol
    lam = as_radius(lam)
    u, v = _points(where)
    numeric = isinstance(candidate, SampledMap)
    field = None if numeric else (as_vector(candidate) if isinstance(candidate, str) else candidate)

    def work(uc, vc):
        U, V = seeds(uc, vc)
        x = fs.x(U, V).value()
        L = np.asarray(Jet2.coerce(lam(U, V)).val, dtype=float)
        if numeric:
            f, fu, fv = candidate.values_and_partials(uc, vc)
        else:
            fj = field(U, V)
            f, fu, fv = fj.value(), fj.du_value(), fj.dv_value()
        shape = uc.shape
        f, fu, fv, x = (np.broadcast_to(a, shape + (3,)) for a in (f, fu, fv, x))
        return definition_residuals(f, fu, fv, x, np.broadcast_to(L, shape))

    pw = map_points(work, u, v, threads)
    return _report(pw, 1e-6 if numeric else tol.eps_residual)


def branch_field(fs, lam, branch, tol=None):
    """The envelope of a branch as a field of (U, V)."""
    def field(U, V):
        return envelope_jets(fs, lam, U, V, branch, tol)[0]
    return field


@dataclass(frozen=True, eq=False)
class EnvelopeBranch:
    branch: BranchSpec
    grid: SampleGrid
    f: np.ndarray  # (nu, nv, 3), NaN at excluded samples
    nu: np.ndarray
    sigma: np.ndarray
    report: ResidualReport


def sample_branch(fs: FramedSurface, lam, grid: SampleGrid, branch, tol=None,
                  threads: int | None = None) -> EnvelopeBranch:
    tol = tol or fs.tol
    lam = as_radius(lam)
    spec = BranchSpec.of(branch)
    u, v = grid.points()

    def work(uc, vc):
        U, V = seeds(uc, vc)
        f, cj = envelope_jets(fs, lam, U, V, spec, tol)
        shape = uc.shape
        fv_, fu_, fvv = f.value(), f.du_value(), f.dv_value()
        x = cj.frame.x.value()
        L = np.broadcast_to(np.asarray(cj.lam.val, dtype=float), shape)
        fv_, fu_, fvv, x = (np.broadcast_to(a, shape + (3,)) for a in (fv_, fu_, fvv, x))
        if not (np.all(np.isfinite(fu_)) and np.all(np.isfinite(fvv))):
            fu_, fvv = _fd_partials(lambda a, b: envelope_jets(fs, lam, *seeds(a, b), spec, tol)[0].value(),
                                    uc, vc)
        out = definition_residuals(fv_, fu_, fvv, x, L)
        out["f"] = fv_
        out["nu"] = np.broadcast_to(cj.nu.value(), shape + (3,))
        out["sigma"] = np.broadcast_to(cj.res["sigma"], shape)
        return out

    flat = map_points(work, u, v, threads)
    pw = {k: flat[k] for k in ("sphere", "tangency_u", "tangency_v", "raw_u", "raw_v")}
    return EnvelopeBranch(spec, grid, grid.scatter(flat["f"]), grid.scatter(flat["nu"]),
                          grid.scatter(flat["sigma"], fill=-1), _report(pw, tol.eps_residual))


def _fd_partials(fn, u, v, h: float = 1e-5):
    fu = (fn(u + h, v) - fn(u - h, v)) / (2 * h)
    fv = (fn(u, v + h) - fn(u, v - h)) / (2 * h)
    return fu, fv


# counting ------------------------------------------------------------------


class Count(Enum):
    ONE = "One"
    TWO = "Two"
    UNCOUNTABLE = "Uncountable"
    NOT_CREATIVE = "NotCreative"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True, eq=False)
class EnvelopeCount:
    count: Count
    evidence: DensitySummary


def decide_count(summary: DensitySummary) -> Count:
    if summary.any_not_creative:
        return Count.NOT_CREATIVE
    if summary.open_witness is not None:
        return Count.UNCOUNTABLE
    if summary.dense[1]:
        return Count.TWO
    if summary.dense[2] or summary.dense[3]:
        return Count.ONE
    return Count.UNDETERMINED


def envelope_count(fs: FramedSurface, lam, grid: SampleGrid, tol=None, threads=None) -> EnvelopeCount:
    """Envelope multiplicity from grid evidence.

    NotCreative if any sample is not creative; otherwise Uncountable on an
    open S4 u S5 witness, Two when S1 is dense, One when S2 or S3 is dense.
    When none of these holds (for instance S1 and S2 each filling half of the
    domain) the count is Undetermined and only the evidence is returned.
    """
    cg = classify_grid(fs, lam, grid, tol, threads)
    return EnvelopeCount(decide_count(cg.summary), cg.summary)


# the envelope's own frame --------------------------------------------------


def _omega(cj: CreatorJets, spec: BranchSpec, tol: Tolerances) -> Vec3J:
    if spec.branch is Branch.UNIQUE:
        return cj.frame.n
    al, gm = cj.alpha, cj.gamma
    q = gm * gm + al * al
    if np.any(np.asarray(q.val) <= tol.eps_zero):
        raise IllDefinedOmegaError("gamma^2 + alpha^2 vanishes; omega is undefined for this branch")
    root = core.sqrt(q, check=False)
    return (cj.frame.s * (-gm) + cj.frame.n * al) / root


def envelope_surface(fs: FramedSurface, lam, branch, tol=None) -> FramedSurface:
    """(f, nu, omega) as a framed surface whose fields are jet closures."""
    tol = tol or fs.tol
    spec = BranchSpec.of(branch)

    def f_field(U, V):
        return envelope_jets(fs, lam, U, V, spec, tol)[0]

    def nu_field(U, V):
        return creator_jets(fs, lam, U, V, spec, tol).nu

    def om_field(U, V):
        return _omega(creator_jets(fs, lam, U, V, spec, tol), spec, tol)

    return FramedSurface(f_field, nu_field, om_field, fs.domain, name=f"{fs.name}|envelope-{spec.tag}", tol=tol)


@dataclass(frozen=True, eq=False)
class EnvelopeFrame:
    f: np.ndarray
    nu: np.ndarray
    omega: np.ndarray
    mu: np.ndarray
    f_u: np.ndarray
    f_v: np.ndarray
    invariants: InvariantData
    reconstruction: dict  # |f_u - (a_f1 omega + b_f1 mu)| etc.
    finite_differences: bool


def envelope_frame(fs: FramedSurface, lam, branch, u0, v0, tol=None, h: float = 1e-5) -> EnvelopeFrame:
    """Envelope frame data at points; invariants via jets, else finite differences."""
    tol = tol or fs.tol
    spec = BranchSpec.of(branch)
    u0, v0 = np.broadcast_arrays(np.asarray(u0, dtype=float), np.asarray(v0, dtype=float))
    U, V = seeds(u0, v0)
    cj = creator_jets(fs, lam, U, V, spec, tol)
    f = cj.frame.x + cj.nu * cj.lam
    om = _omega(cj, spec, tol)
    mu = cj.nu.cross(om)
    inv = basic_invariants(envelope_surface(fs, lam, spec, tol), u0, v0, tol, check=False)
    fd = not all(np.all(np.isfinite(w)) for w in inv.as_dict().values())
    fu, fv = f.du_value(), f.dv_value()
    if fd:
        inv, fu, fv = _fd_envelope_invariants(fs, lam, spec, tol, u0, v0, h)
    omv, muv = om.value(), mu.value()

    def col(q):
        return np.asarray(q)[..., None]

    rec = {
        "f_u": np.linalg.norm(fu - (col(inv.a1) * omv + col(inv.b1) * muv), axis=-1),
        "f_v": np.linalg.norm(fv - (col(inv.a2) * omv + col(inv.b2) * muv), axis=-1),
    }
    return EnvelopeFrame(f.value(), cj.nu.value(), omv, muv, fu, fv, inv, rec, fd)


def _fd_envelope_invariants(fs, lam, spec, tol, u0, v0, h):
    def vals(u, v):
        cj = creator_jets(fs, lam, *seeds(u, v), spec, tol)
        om = _omega(cj, spec, tol)
        f = cj.frame.x + cj.nu * cj.lam
        shape = np.shape(u) + (3,)
        return tuple(np.broadcast_to(w.value(), shape) for w in (f, cj.nu, om))

    f, nu, om = vals(u0, v0)
    mu = np.cross(nu, om)
    (fu, nuu, omu) = [(p - m) / (2 * h) for p, m in zip(vals(u0 + h, v0), vals(u0 - h, v0))]
    (fv, nuv, omv) = [(p - m) / (2 * h) for p, m in zip(vals(u0, v0 + h), vals(u0, v0 - h))]
    dot = lambda a, b: np.sum(a * b, -1)  # noqa: E731
    inv = InvariantData(
        u=u0, v=v0, n=nu, s=om, t=mu,
        a1=dot(fu, om), b1=dot(fu, mu), a2=dot(fv, om), b2=dot(fv, mu),
        e1=dot(nuu, om), f1=dot(nuu, mu), g1=dot(omu, mu),
        e2=dot(nuv, om), f2=dot(nuv, mu), g2=dot(omv, mu),
    )
    return inv, fu, fv


# multiplicity witnesses ----------------------------------------------------


def bump(u0: float, v0: float, r: float):
    """Smooth bump exp(1 - 1/(1 - d^2/r^2)) inside the r-ball, 0 outside; 1 at the center."""
    def field(U, V):
        du, dv = U - u0, V - v0
        q = (du * du + dv * dv) * (1.0 / (r * r))
        inside = np.asarray(q.val) < 1.0
        with np.errstate(all="ignore"):
            b = core.exp(1.0 - core.reciprocal(1.0 - q, check=False))
        return Jet2.where(inside, b, _zeros_like(q))
    return field


@dataclass(frozen=True, eq=False)
class MultiplicityWitness:
    point: tuple[float, float]
    branch0: BranchSpec
    branch_eps: BranchSpec
    report0: ResidualReport
    report_eps: ResidualReport
    difference_at_point: float
    max_difference_outside: float
    grid: SampleGrid


def multiplicity_witness(fs: FramedSurface, lam, point, r: float = 0.5, eps: float = 1.0,
                         n: int = 21, tol=None) -> MultiplicityWitness:
    """Two creators that differ at ``point`` and agree outside its r-ball.

    nu_eps is nu_0 turned along its solution circle by eps * bump.  The
    neighborhood is sampled on an n x n grid covering the ball's bounding
    square (clipped to the domain); every sample inside the ball must lie in
    S4 u S5.
    """
    tol = tol or fs.tol
    lam = as_radius(lam)
    u0, v0 = (float(c) for c in point)
    box = Domain(u0 - r, u0 + r, v0 - r, v0 + r)
    if fs.domain is not None:
        d = fs.domain
        box = Domain(max(box.u_min, d.u_min), min(box.u_max, d.u_max),
                     max(box.v_min, d.v_min), min(box.v_max, d.v_max), d.exclude)
    grid = box.grid(n, n)
    cg = classify_grid(fs, lam, grid, tol, threads=1)
    inball = grid.valid & ((grid.UU - u0) ** 2 + (grid.VV - v0) ** 2 < r * r)
    here = solve_arrays(*(np.asarray(q) for q in _inv_at(fs, lam, u0, v0, tol)), tol)["sigma"]
    good = np.isin(cg.labels, (Sigma.S4, Sigma.S5))
    if int(here) not in (Sigma.S4, Sigma.S5) or not np.all(good[inball]) or inball.sum() < 2:
        raise NoOpenNeighborhoodError(
            f"no sampled open neighborhood of ({u0}, {v0}) of radius {r} lies in Sigma4 u Sigma5")
    b = bump(u0, v0, r)
    spec0 = BranchSpec(Branch.CUSTOM, 0.0, 0.0)
    spec_e = BranchSpec(Branch.CUSTOM, lambda U, V: b(U, V) * eps, 0.0)
    rep0 = verify_envelope(branch_field(fs, lam, spec0, tol), fs, lam, grid, tol, threads=1)
    rep_e = verify_envelope(branch_field(fs, lam, spec_e, tol), fs, lam, grid, tol, threads=1)
    p0 = envelope_at(fs, lam, u0, v0, spec0, tol).f
    pe = envelope_at(fs, lam, u0, v0, spec_e, tol).f
    uu, vv = grid.points()
    out = (uu - u0) ** 2 + (vv - v0) ** 2 >= r * r
    diff = 0.0
    if out.any():
        f0 = branch_field(fs, lam, spec0, tol)(*seeds(uu[out], vv[out])).value()
        fe = branch_field(fs, lam, spec_e, tol)(*seeds(uu[out], vv[out])).value()
        diff = float(np.max(np.linalg.norm(f0 - fe, axis=-1)))
    return MultiplicityWitness((u0, v0), spec0, spec_e, rep0, rep_e,
                               float(np.linalg.norm(p0 - pe)), diff, grid)


def _inv_at(fs, lam, u0, v0, tol):
    inv = basic_invariants(fs, u0, v0, tol, check=False)
    L = Jet2.coerce(lam(*seeds(u0, v0)))
    return inv.a1, inv.b1, inv.a2, inv.b2, L.du, L.dv
