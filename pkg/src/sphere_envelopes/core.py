"""Second-order jets in (u, v), jet-valued 3-vectors and the tolerance policy.

A :class:`Jet2` carries a value together with its first and second partial
derivatives with respect to the two surface parameters.  Every component may
be a Python float or a numpy array; arrays broadcast, so a whole grid of
sample points is pushed through a formula in one pass.

Jets obtained by differentiating another jet (``partial_u``/``partial_v``)
only know their value and first partials.  Their second partials are NaN so
that any accidental use shows up instead of silently returning garbage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError

Real = Union[float, np.ndarray]

__all__ = [
    "Jet2",
    "Vec3J",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "jet_lift",
    "near_zero",
    "central_partials",
    "sin", "cos", "tan", "sqrt", "exp", "log", "atan", "power",
]


def _first_bad(mask, arg) -> str:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return repr(float(arg))
    idx = int(np.flatnonzero(mask)[0])
    return f"{float(np.asarray(arg).ravel()[idx])!r} (sample {idx})"


class Jet2:
    """Value and partials up to order two of a scalar function of (u, v)."""

    __slots__ = ("val", "du", "dv", "duu", "duv", "dvv")

    def __init__(self, val, du=0.0, dv=0.0, duu=0.0, duv=0.0, dvv=0.0):
        self.val = val
        self.du = du
        self.dv = dv
        self.duu = duu
        self.duv = duv
        self.dvv = dvv

    # construction ---------------------------------------------------------

    @classmethod
    def const(cls, c) -> Jet2:
        return cls(c)

    @classmethod
    def variable_u(cls, u0) -> Jet2:
        return cls(u0, 1.0, 0.0)

    @classmethod
    def variable_v(cls, v0) -> Jet2:
        return cls(v0, 0.0, 1.0)

    @staticmethod
    def coerce(x) -> Jet2:
        return x if isinstance(x, Jet2) else Jet2(x)

    @staticmethod
    def where(mask, a, b) -> Jet2:
        a, b = Jet2.coerce(a), Jet2.coerce(b)
        return Jet2(*(np.where(mask, p, q) for p, q in zip(a.components(), b.components())))

    def components(self) -> tuple:
        return (self.val, self.du, self.dv, self.duu, self.duv, self.dvv)

    def broadcast(self) -> tuple[np.ndarray, ...]:
        """All six components as arrays of a common shape."""
        return tuple(np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in self.components())))

    def partial_u(self) -> Jet2:
        nan = np.nan * np.asarray(self.du, dtype=float)
        return Jet2(self.du, self.duu, self.duv, nan, nan, nan)

    def partial_v(self) -> Jet2:
        nan = np.nan * np.asarray(self.dv, dtype=float)
        return Jet2(self.dv, self.duv, self.dvv, nan, nan, nan)

    def __repr__(self) -> str:
        return ("Jet2(val={!r}, du={!r}, dv={!r}, duu={!r}, duv={!r}, dvv={!r})"
                .format(*self.components()))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> Jet2:
        o = Jet2.coerce(other)
        return Jet2(self.val + o.val, self.du + o.du, self.dv + o.dv,
                    self.duu + o.duu, self.duv + o.duv, self.dvv + o.dvv)

    __radd__ = __add__

    def __neg__(self) -> Jet2:
        return Jet2(-self.val, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)

    def __pos__(self) -> Jet2:
        return self

    def __sub__(self, other) -> Jet2:
        o = Jet2.coerce(other)
        return Jet2(self.val - o.val, self.du - o.du, self.dv - o.dv,
                    self.duu - o.duu, self.duv - o.duv, self.dvv - o.dvv)

    def __rsub__(self, other) -> Jet2:
        return Jet2.coerce(other) - self

    def __mul__(self, other) -> Jet2:
        if not isinstance(other, Jet2):
            c = other
            return Jet2(self.val * c, self.du * c, self.dv * c,
                        self.duu * c, self.duv * c, self.dvv * c)
        a, b = self, other
        return Jet2(
            a.val * b.val,
            a.du * b.val + a.val * b.du,
            a.dv * b.val + a.val * b.dv,
            a.duu * b.val + 2.0 * a.du * b.du + a.val * b.duu,
            a.duv * b.val + a.du * b.dv + a.dv * b.du + a.val * b.duv,
            a.dvv * b.val + 2.0 * a.dv * b.dv + a.val * b.dvv,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> Jet2:
        if not isinstance(other, Jet2):
            return self * (1.0 / other)
        return self * reciprocal(other)

    def __rtruediv__(self, other) -> Jet2:
        return Jet2.coerce(other) * reciprocal(self)

    def __pow__(self, k) -> Jet2:
        return power(self, k)

    def chain(self, f0, f1, f2) -> Jet2:
        """Compose a scalar function with value f0, derivative f1, second derivative f2."""
        return Jet2(
            f0,
            f1 * self.du,
            f1 * self.dv,
            f2 * self.du * self.du + f1 * self.duu,
            f2 * self.du * self.dv + f1 * self.duv,
            f2 * self.dv * self.dv + f1 * self.dvv,
        )


# scalar primitives ---------------------------------------------------------


def reciprocal(x: Jet2, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    if check:
        bad = np.asarray(x.val) == 0
        if np.any(bad):
            raise DomainError("/", f"division by zero, divisor {_first_bad(bad, x.val)}")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.divide(1.0, x.val)
        return x.chain(r, -r * r, 2.0 * r * r * r)


def sin(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    s, c = np.sin(x.val), np.cos(x.val)
    return x.chain(s, c, -s)


def cos(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    s, c = np.sin(x.val), np.cos(x.val)
    return x.chain(c, -s, -c)


def tan(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    c = np.cos(x.val)
    if check:
        bad = c == 0
        if np.any(bad):
            raise DomainError("tan", f"pole at argument {_first_bad(bad, x.val)}")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.tan(x.val)
        sec2 = 1.0 + t * t
        return x.chain(t, sec2, 2.0 * t * sec2)


def sqrt(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    if check:
        bad = np.asarray(x.val) <= 0
        if np.any(bad):
            raise DomainError("sqrt", f"argument {_first_bad(bad, x.val)} is not positive")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt(x.val)
        d1 = 0.5 / r
        return x.chain(r, d1, -0.5 * d1 / x.val)


def exp(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    e = np.exp(x.val)
    return x.chain(e, e, e)


def log(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    if check:
        bad = np.asarray(x.val) <= 0
        if np.any(bad):
            raise DomainError("log", f"argument {_first_bad(bad, x.val)} is not positive")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.divide(1.0, x.val)
        return x.chain(np.log(x.val), r, -r * r)


def atan(x, *, check: bool = True) -> Jet2:
    x = Jet2.coerce(x)
    r = 1.0 / (1.0 + x.val * x.val)
    return x.chain(np.arctan(x.val), r, -2.0 * x.val * r * r)


def power(x, k, *, check: bool = True) -> Jet2:
    """x**k for a constant exponent.

    Integer k works for any base (negative k needs a nonzero base); any other
    k is evaluated as exp(k log x) and needs a positive base.
    """
    x = Jet2.coerce(x)
    k = float(k)
    if k == 0.0:
        return Jet2(np.ones_like(np.asarray(x.val, dtype=float)) if np.ndim(x.val) else 1.0)
    base = np.asarray(x.val, dtype=float)
    if k.is_integer():
        n = int(k)
        if check and n < 0:
            bad = base == 0
            if np.any(bad):
                raise DomainError("^", f"zero base {_first_bad(bad, x.val)} with negative exponent {n}")
        with np.errstate(divide="ignore", invalid="ignore"):
            f0 = base ** n
            f1 = n * base ** (n - 1) if n != 1 else np.ones_like(base)
            f2 = n * (n - 1) * base ** (n - 2) if n not in (0, 1) else np.zeros_like(base)
    else:
        if check:
            bad = base <= 0
            if np.any(bad):
                raise DomainError("^", f"non-integer exponent {k!r} needs a positive base, got {_first_bad(bad, x.val)}")
        with np.errstate(divide="ignore", invalid="ignore"):
            f0 = np.exp(k * np.log(base))
            f1 = k * f0 / base
            f2 = k * (k - 1.0) * f0 / (base * base)
    if np.ndim(f0) == 0:
        f0, f1, f2 = float(f0), float(f1), float(f2)
    return x.chain(f0, f1, f2)


# vectors -------------------------------------------------------------------


class Vec3J:
    """A 3-vector whose components are jets."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x, y, z):
        self.x = Jet2.coerce(x)
        self.y = Jet2.coerce(y)
        self.z = Jet2.coerce(z)

    @classmethod
    def const(cls, v) -> Vec3J:
        v = np.asarray(v, dtype=float)
        return cls(Jet2(v[..., 0]), Jet2(v[..., 1]), Jet2(v[..., 2]))

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __repr__(self) -> str:
        return f"Vec3J({self.x!r}, {self.y!r}, {self.z!r})"

    def __add__(self, o: Vec3J) -> Vec3J:
        return Vec3J(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: Vec3J) -> Vec3J:
        return Vec3J(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self) -> Vec3J:
        return Vec3J(-self.x, -self.y, -self.z)

    def __mul__(self, c) -> Vec3J:
        return Vec3J(self.x * c, self.y * c, self.z * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> Vec3J:
        if isinstance(c, Jet2):
            r = reciprocal(c, check=False)
            return self * r
        return self * (1.0 / c)

    def dot(self, o: Vec3J) -> Jet2:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o: Vec3J) -> Vec3J:
        return Vec3J(self.y * o.z - self.z * o.y,
                     self.z * o.x - self.x * o.z,
                     self.x * o.y - self.y * o.x)

    def norm(self) -> Jet2:
        return sqrt(self.dot(self), check=False)

    def normalized(self) -> Vec3J:
        return self / self.norm()

    def partial_u(self) -> Vec3J:
        return Vec3J(self.x.partial_u(), self.y.partial_u(), self.z.partial_u())

    def partial_v(self) -> Vec3J:
        return Vec3J(self.x.partial_v(), self.y.partial_v(), self.z.partial_v())

    def value(self) -> np.ndarray:
        """Values as an array of shape (..., 3)."""
        return np.stack(np.broadcast_arrays(*(np.asarray(c.val, dtype=float) for c in self)), axis=-1)

    def du_value(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*(np.asarray(c.du, dtype=float) for c in self)), axis=-1)

    def dv_value(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*(np.asarray(c.dv, dtype=float) for c in self)), axis=-1)

    @staticmethod
    def where(mask, a: Vec3J, b: Vec3J) -> Vec3J:
        return Vec3J(Jet2.where(mask, a.x, b.x), Jet2.where(mask, a.y, b.y), Jet2.where(mask, a.z, b.z))


# tolerance policy ----------------------------------------------------------


@dataclass(frozen=True)
class Tolerances:
    eps_zero: float = 1e-9
    eps_class: float = 1e-8
    eps_residual: float = 1e-8

    def __post_init__(self):
        for name in ("eps_zero", "eps_class", "eps_residual"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.eps_zero > self.eps_class:
            raise ValueError("eps_zero must not exceed eps_class")


DEFAULT_TOLERANCES = Tolerances()


def near_zero(q, scale, tol: Tolerances = DEFAULT_TOLERANCES):
    """Scale-relative zero test |q| <= eps_zero * (1 + scale).

    Works elementwise on arrays.
    """
    if np.any(np.asarray(scale) < 0):
        raise ValueError("scale must be non-negative")
    return np.abs(q) <= tol.eps_zero * (1.0 + np.asarray(scale))


def jet_lift(f: Callable[[Jet2, Jet2], Jet2], u0, v0) -> Jet2:
    """Value and partials of ``f`` at (u0, v0) by jet propagation."""
    U, V = Jet2.variable_u(u0), Jet2.variable_v(v0)
    try:
        out = f(U, V)
    except DomainError as exc:
        if exc.point is not None:
            raise
        raise DomainError(exc.primitive, exc.message, exc.offset,
                          (float(np.ravel(u0)[0]), float(np.ravel(v0)[0]))) from None
    return Jet2.coerce(out)


def central_partials(g: Callable, u, v, h: float = 1e-5):
    """Central differences (g_u, g_v) of a numeric function of (u, v)."""
    gu = (np.asarray(g(u + h, v)) - np.asarray(g(u - h, v))) / (2.0 * h)
    gv = (np.asarray(g(u, v + h)) - np.asarray(g(u, v - h))) / (2.0 * h)
    return gu, gv
