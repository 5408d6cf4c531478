"""Framed surfaces, their basic invariants and frame manipulations.

A framed surface is a triple (x, n, s) with n a unit normal of x and s a unit
vector orthogonal to n; t = n x s completes the moving frame.  Each of x, n,
s is a *field*: a callable taking the seed jets ``U = Jet2.variable_u(u)``,
``V = Jet2.variable_v(v)`` and returning a :class:`Vec3J`.  DSL vector
expressions are fields, and so are arbitrary Python closures built from the
primitives in :mod:`sphere_envelopes.core`.

Basic invariants::

    x_u = a1 s + b1 t        n_u = e1 s + f1 t        s_u = -e1 n + g1 t
    x_v = a2 s + b2 t        n_v = e2 s + f2 t        s_v = -e2 n + g2 t
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from typing import Callable, NamedTuple

import numpy as np

from . import core
from .core import DEFAULT_TOLERANCES, Jet2, Tolerances, Vec3J
from .dsl import Expr, VecExpr, as_expr, as_vector, to_source
from .errors import DegenerateJacobianError, FramedAxiomError, SingularPointError

INVARIANT_NAMES = ("a1", "b1", "a2", "b2", "e1", "f1", "g1", "e2", "f2", "g2")


# domains and grids ---------------------------------------------------------

_INEQ_RE = re.compile(r"(<=|>=|<|>)")


@dataclass(frozen=True)
class Exclusion:
    """Points where ``lhs op rhs`` holds are removed from the domain."""

    lhs: Expr
    op: str
    rhs: Expr

    @classmethod
    def parse(cls, text: str, bindings=None) -> Exclusion:
        parts = _INEQ_RE.split(text)
        if len(parts) != 3:
            raise ValueError(f"exclusion {text!r} must have exactly one of <, <=, >, >=")
        lhs, op, rhs = parts
        return cls(as_expr(lhs.strip(), bindings), op, as_expr(rhs.strip(), bindings))

    def __str__(self) -> str:
        return f"{to_source(self.lhs)} {self.op} {to_source(self.rhs)}"

    def mask(self, u, v) -> np.ndarray:
        with np.errstate(all="ignore"):
            a = np.broadcast_to(self.lhs(u, v).val, np.shape(u))
            b = np.broadcast_to(self.rhs(u, v).val, np.shape(u))
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[self.op]


@dataclass(frozen=True)
class Domain:
    u_min: float
    u_max: float
    v_min: float
    v_max: float
    exclude: tuple[Exclusion, ...] = ()

    def __post_init__(self):
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ValueError("domain rectangle is empty")
        object.__setattr__(self, "exclude", tuple(
            e if isinstance(e, Exclusion) else Exclusion.parse(e) for e in self.exclude))

    def excluded(self, u, v) -> np.ndarray:
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        out = np.zeros(u.shape, dtype=bool)
        for e in self.exclude:
            out |= e.mask(u, v)
        return out

    def grid(self, nu: int, nv: int) -> SampleGrid:
        u = np.linspace(self.u_min, self.u_max, nu)
        v = np.linspace(self.v_min, self.v_max, nv)
        UU, VV = np.meshgrid(u, v, indexing="ij")
        return SampleGrid(u, v, UU, VV, ~self.excluded(UU, VV))

    def random_points(self, n: int, rng: np.random.Generator, margin: float = 0.0):
        """Uniform random non-excluded points, ``margin`` away from the border."""
        us, vs = [], []
        have = 0
        while have < n:
            u = rng.uniform(self.u_min + margin, self.u_max - margin, 2 * n)
            v = rng.uniform(self.v_min + margin, self.v_max - margin, 2 * n)
            keep = ~self.excluded(u, v)
            us.append(u[keep])
            vs.append(v[keep])
            have += int(keep.sum())
        return np.concatenate(us)[:n], np.concatenate(vs)[:n]


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Tensor grid in (u, v); arrays are indexed ``[i_u, i_v]``."""

    u: np.ndarray
    v: np.ndarray
    UU: np.ndarray
    VV: np.ndarray
    valid: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.UU.shape

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat arrays of the valid sample points in row-major order."""
        return self.UU[self.valid], self.VV[self.valid]

    def scatter(self, flat, fill=np.nan) -> np.ndarray:
        """Put per-valid-point values back onto the grid."""
        flat = np.asarray(flat)
        out = np.full(self.shape + flat.shape[1:], fill, dtype=flat.dtype if flat.dtype != bool else bool)
        out[self.valid] = flat
        return out


# framed surfaces -----------------------------------------------------------

Field = Callable[[Jet2, Jet2], Vec3J]


class Frame(NamedTuple):
    x: Vec3J
    n: Vec3J
    s: Vec3J
    t: Vec3J


def _as_field(f):
    if f is None or callable(f) and not isinstance(f, str):
        return f
    return as_vector(f)


def seeds(u, v) -> tuple[Jet2, Jet2]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim == 0 and v.ndim == 0:
        return Jet2.variable_u(float(u)), Jet2.variable_v(float(v))
    u, v = np.broadcast_arrays(u, v)
    return Jet2.variable_u(u), Jet2.variable_v(v)


@dataclass(frozen=True, eq=False)
class FramedSurface:
    """The maps (x, n, s) plus a parameter domain.

    ``n`` and ``s`` may be omitted at regular points; they are then derived
    pointwise as n = x_u x x_v / |x_u x x_v| and s = x_u / |x_u|.
    """

    x: Field
    n: Field | None = None
    s: Field | None = None
    domain: Domain | None = None
    name: str = ""
    tol: Tolerances = field(default=DEFAULT_TOLERANCES)

    def __post_init__(self):
        for name in ("x", "n", "s"):
            object.__setattr__(self, name, _as_field(getattr(self, name)))

    def frame(self, U: Jet2, V: Jet2) -> Frame:
        x = self.x(U, V)
        n, s = self.n, self.s
        if n is None or s is None:
            xu, xv = x.partial_u(), x.partial_v()
        if n is None:
            cr = xu.cross(xv)
            nrm = cr.norm()
            scale = np.asarray(xu.norm().val) * np.asarray(xv.norm().val)
            bad = core.near_zero(nrm.val, scale, self.tol)
            if np.any(bad):
                raise SingularPointError(
                    f"x_u x x_v vanishes at {_where(U, V, bad)}; supply n and s explicitly")
            n_vec = cr / nrm
        else:
            n_vec = n(U, V)
        if s is None:
            nrm = xu.norm()
            bad = core.near_zero(nrm.val, 0.0, self.tol)
            if np.any(bad):
                raise SingularPointError(f"x_u vanishes at {_where(U, V, bad)}; supply s explicitly")
            s_vec = xu / nrm
        else:
            s_vec = s(U, V)
        return Frame(x, n_vec, s_vec, n_vec.cross(s_vec))

    def frame_at(self, u, v) -> Frame:
        return self.frame(*seeds(u, v))


def _where(U: Jet2, V: Jet2, bad) -> str:
    uu, vv, bad = np.broadcast_arrays(np.asarray(U.val), np.asarray(V.val), np.asarray(bad))
    idx = np.flatnonzero(bad)[0]
    return f"(u, v) = ({float(uu.ravel()[idx])!r}, {float(vv.ravel()[idx])!r})"


def derive_frame(x, u0, v0, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Unit normal and tangent (n, s) of ``x`` at a regular point."""
    fr = FramedSurface(x, tol=tol).frame_at(u0, v0)
    return fr.n.value(), fr.s.value()


@dataclass(frozen=True, eq=False)
class InvariantData:
    u: np.ndarray
    v: np.ndarray
    n: np.ndarray
    s: np.ndarray
    t: np.ndarray
    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    e1: np.ndarray
    f1: np.ndarray
    g1: np.ndarray
    e2: np.ndarray
    f2: np.ndarray
    g2: np.ndarray

    @property
    def A(self) -> np.ndarray:
        return np.stack([np.stack([self.a1, self.b1], -1), np.stack([self.a2, self.b2], -1)], -2)

    def as_dict(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in INVARIANT_NAMES}

    def replace(self, **changes) -> InvariantData:
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(changes)
        return InvariantData(**vals)


def invariant_jets(fr: Frame) -> dict[str, Jet2]:
    """Basic invariants as jets (value and first partials are valid)."""
    xu, xv = fr.x.partial_u(), fr.x.partial_v()
    nu, nv = fr.n.partial_u(), fr.n.partial_v()
    su, sv = fr.s.partial_u(), fr.s.partial_v()
    s, t = fr.s, fr.t
    return {
        "a1": xu.dot(s), "b1": xu.dot(t), "a2": xv.dot(s), "b2": xv.dot(t),
        "e1": nu.dot(s), "f1": nu.dot(t), "g1": su.dot(t),
        "e2": nv.dot(s), "f2": nv.dot(t), "g2": sv.dot(t),
    }


def _vals(j: Jet2, shape) -> np.ndarray:
    out = np.broadcast_to(np.asarray(j.val, dtype=float), shape)
    return out if shape else float(out)


def framed_residuals(fs: FramedSurface, u, v) -> dict[str, np.ndarray]:
    """Absolute violations of the framed-surface conditions.

    Keys: ``n_unit``, ``s_unit`` (| |.|^2 - 1 |), ``n_dot_s``, ``xu_dot_n``,
    ``xv_dot_n``; the last two are divided by (1 + |x_u|) resp. (1 + |x_v|).
    """
    fr = fs.frame_at(u, v)
    return _framed_residuals(fr, np.shape(np.broadcast_arrays(np.asarray(u), np.asarray(v))[0]))


def _framed_residuals(fr: Frame, shape) -> dict[str, np.ndarray]:
    xu, xv = fr.x.partial_u(), fr.x.partial_v()
    n, s = fr.n, fr.s
    out = {
        "n_unit": np.abs(n.dot(n).val - 1.0),
        "s_unit": np.abs(s.dot(s).val - 1.0),
        "n_dot_s": np.abs(n.dot(s).val),
        "xu_dot_n": np.abs(xu.dot(n).val) / (1.0 + np.linalg.norm(xu.value(), axis=-1)),
        "xv_dot_n": np.abs(xv.dot(n).val) / (1.0 + np.linalg.norm(xv.value(), axis=-1)),
    }
    return {k: np.broadcast_to(np.asarray(w, dtype=float), shape) for k, w in out.items()}


def basic_invariants(fs: FramedSurface, u0, v0, tol: Tolerances | None = None,
                     check: bool = True) -> InvariantData:
    """Basic invariants at one point or at arrays of points."""
    tol = tol or fs.tol
    u0, v0 = np.broadcast_arrays(np.asarray(u0, dtype=float), np.asarray(v0, dtype=float))
    shape = u0.shape
    fr = fs.frame(*seeds(u0, v0))
    if check:
        res = _framed_residuals(fr, shape)
        worst = max(res, key=lambda k: float(np.max(res[k])) if res[k].size else 0.0)
        if res[worst].size and float(np.max(res[worst])) > tol.eps_residual:
            raise FramedAxiomError(
                f"framed-surface condition {worst} violated by {float(np.max(res[worst])):.3e}")
    inv = invariant_jets(fr)

    def vec(v3: Vec3J):
        arr = v3.value()
        return np.broadcast_to(arr, shape + (3,))

    return InvariantData(
        u=u0 if shape else float(u0), v=v0 if shape else float(v0),
        n=vec(fr.n), s=vec(fr.s), t=vec(fr.t),
        **{k: _vals(inv[k], shape) for k in INVARIANT_NAMES},
    )


def reconstruction_residuals(fs: FramedSurface, u, v) -> dict[str, np.ndarray]:
    """|x_u - (a1 s + b1 t)| and friends for the six frame equations."""
    fr = fs.frame_at(u, v)
    inv = {k: j.val for k, j in invariant_jets(fr).items()}
    n, s, t = fr.n.value(), fr.s.value(), fr.t.value()

    def comb(*pairs):
        return sum(np.asarray(c)[..., None] * w for c, w in pairs)

    def err(actual: Vec3J, model):
        return np.linalg.norm(actual.value() - model, axis=-1)

    return {
        "x_u": err(fr.x.partial_u(), comb((inv["a1"], s), (inv["b1"], t))),
        "x_v": err(fr.x.partial_v(), comb((inv["a2"], s), (inv["b2"], t))),
        "n_u": err(fr.n.partial_u(), comb((inv["e1"], s), (inv["f1"], t))),
        "n_v": err(fr.n.partial_v(), comb((inv["e2"], s), (inv["f2"], t))),
        "s_u": err(fr.s.partial_u(), comb((-np.asarray(inv["e1"]), n), (inv["g1"], t))),
        "s_v": err(fr.s.partial_v(), comb((-np.asarray(inv["e2"]), n), (inv["g2"], t))),
    }


def integrability_from(val: dict, du: dict, dv: dict) -> np.ndarray:
    """The six integrability residuals from invariant values and partials.

    Returned in the order
    (a1_v - b1 g2) - (a2_u - b2 g1),  (b1_v - a2 g1) - (b2_u - a1 g2),
    (a1 e2 + b1 f2) - (a2 e1 + b2 f1),  (e1_v - f1 g2) - (e2_u - f2 g1),
    (f1_v - e2 g1) - (f2_u - e1 g2),  (g1_v - e1 f2) - (g2_u - e2 f1).
    """
    a1, b1, a2, b2 = (val[k] for k in ("a1", "b1", "a2", "b2"))
    e1, f1, g1, e2, f2, g2 = (val[k] for k in ("e1", "f1", "g1", "e2", "f2", "g2"))
    return np.stack([
        (dv["a1"] - b1 * g2) - (du["a2"] - b2 * g1),
        (dv["b1"] - a2 * g1) - (du["b2"] - a1 * g2),
        (a1 * e2 + b1 * f2) - (a2 * e1 + b2 * f1),
        (dv["e1"] - f1 * g2) - (du["e2"] - f2 * g1),
        (dv["f1"] - e2 * g1) - (du["f2"] - e1 * g2),
        (dv["g1"] - e1 * f2) - (du["g2"] - e2 * f1),
    ])


def integrability_residuals(fs: FramedSurface, u0, v0, h: float = 1e-5) -> np.ndarray:
    """Six signed integrability residuals; invariant derivatives by central differences."""
    u0, v0 = np.broadcast_arrays(np.asarray(u0, dtype=float), np.asarray(v0, dtype=float))
    offsets = [(0.0, 0.0), (h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
    us = np.stack([u0 + du for du, _ in offsets])
    vs = np.stack([v0 + dv for _, dv in offsets])
    inv = basic_invariants(fs, us, vs, check=False).as_dict()
    val = {k: w[0] for k, w in inv.items()}
    du = {k: (w[1] - w[2]) / (2 * h) for k, w in inv.items()}
    dv = {k: (w[3] - w[4]) / (2 * h) for k, w in inv.items()}
    return integrability_from(val, du, dv)


# parameter change and frame rotation --------------------------------------


def compose_jet(g: Jet2, P: Jet2, Q: Jet2) -> Jet2:
    """Jet of g o (P, Q), given g's jet in (u, v) at (P.val, Q.val)."""
    gu, gv = g.du, g.dv
    return Jet2(
        g.val,
        gu * P.du + gv * Q.du,
        gu * P.dv + gv * Q.dv,
        g.duu * P.du * P.du + 2 * g.duv * P.du * Q.du + g.dvv * Q.du * Q.du + gu * P.duu + gv * Q.duu,
        g.duu * P.du * P.dv + g.duv * (P.du * Q.dv + P.dv * Q.du) + g.dvv * Q.du * Q.dv
        + gu * P.duv + gv * Q.duv,
        g.duu * P.dv * P.dv + 2 * g.duv * P.dv * Q.dv + g.dvv * Q.dv * Q.dv + gu * P.dvv + gv * Q.dvv,
    )


def _compose_vec(w: Vec3J, P: Jet2, Q: Jet2) -> Vec3J:
    return Vec3J(compose_jet(w.x, P, Q), compose_jet(w.y, P, Q), compose_jet(w.z, P, Q))


def compose_scalar(lam, phi_u, phi_v):
    """lambda o phi as a scalar field of the new parameters."""
    lam, phi_u, phi_v = as_expr(lam), as_expr(phi_u), as_expr(phi_v)

    def field_(P, Q):
        Pu, Pv = phi_u(P, Q), phi_v(P, Q)
        return compose_jet(lam(*seeds(Pu.val, Pv.val)), Pu, Pv)

    return field_


def reparametrize(fs: FramedSurface, phi, domain: Domain | None = None,
                  check_shape: tuple[int, int] = (21, 21)) -> FramedSurface:
    """(x, n, s) o phi, with phi = (u(p, q), v(p, q)).

    phi is a pair of expressions written in the variables u and v, which here
    stand for the new parameters p and q.
    """
    phi_u, phi_v = (as_expr(c) for c in phi)
    domain = domain or fs.domain
    if domain is not None:
        g = domain.grid(*check_shape)
        P, Q = seeds(*g.points())
        Pu, Pv = phi_u(P, Q), phi_v(P, Q)
        det = np.asarray(Pu.du * Pv.dv - Pu.dv * Pv.du, dtype=float)
        scale = np.abs(np.asarray(Pu.du)) * np.abs(np.asarray(Pv.dv)) + np.abs(np.asarray(Pu.dv)) * np.abs(np.asarray(Pv.du))
        if np.any(core.near_zero(det, scale, fs.tol)):
            raise DegenerateJacobianError("parameter change has a vanishing Jacobian on the new domain")

    def composed(which):
        def field_(P, Q):
            Pu, Pv = phi_u(P, Q), phi_v(P, Q)
            fr = fs.frame(*seeds(Pu.val, Pv.val))
            return _compose_vec(getattr(fr, which), Pu, Pv)
        return field_

    return FramedSurface(composed("x"), composed("n"), composed("s"), domain,
                         name=f"{fs.name}|reparametrized", tol=fs.tol)


def rotate_frame(fs: FramedSurface, theta) -> FramedSurface:
    """Rotate the tangent frame: s' = cos(theta) s - sin(theta) t."""
    theta = as_expr(theta) if not callable(theta) or isinstance(theta, str) else theta

    def n_field(U, V):
        return fs.frame(U, V).n

    def s_field(U, V):
        fr = fs.frame(U, V)
        th = Jet2.coerce(theta(U, V))
        return fr.s * core.cos(th) - fr.t * core.sin(th)

    return FramedSurface(fs.x, n_field, s_field, fs.domain, name=f"{fs.name}|rotated", tol=fs.tol)
