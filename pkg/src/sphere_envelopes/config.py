"""Family configuration files.

A config is an INI-style text file read with :mod:`configparser`
(interpolation off, keys case-sensitive, full-line comments with # or ;).
Values may be wrapped in double quotes.  Grammar::

    [surface]     fixture = <name>            start from a built-in fixture
                  x = "(cx, cy, cz)"          DSL vector expressions in u, v
                  n = "(...)"  s = "(...)"    optional; derived at regular points
    [radius]      lambda = "<expr>"
    [domain]      u_min, u_max, v_min, v_max  constant DSL expressions (pi allowed)
                  exclude = "<ineq>; <ineq>"  e.g. "u^2 + v^2 < 1e-12; v <= 0"
    [grid]        nu, nv                      samples per axis
                  m                           points per circle / sphere (default 64)
    [tolerances]  eps_zero, eps_class, eps_residual
    [bindings]    <name> = <number>           extra named constants for every expression
    [branch]      theta, phi                  custom-branch closures (DSL expressions)

Unknown sections or keys are rejected.  Without [surface] fixture, the keys
x, lambda and the four domain bounds are required.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import DEFAULT_TOLERANCES, Tolerances
from .dsl import RESERVED, _fold_constant, as_expr, as_vector
from .errors import ConfigError, DomainError, DslSyntaxError
from .fixtures import FIXTURES
from .frame import Domain, Exclusion, FramedSurface, SampleGrid

ALLOWED = {
    "surface": {"fixture", "x", "n", "s"},
    "radius": {"lambda"},
    "domain": {"u_min", "u_max", "v_min", "v_max", "exclude"},
    "grid": {"nu", "nv", "m"},
    "tolerances": {"eps_zero", "eps_class", "eps_residual"},
    "bindings": None,  # any identifier
    "branch": {"theta", "phi"},
}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


@dataclass(frozen=True)
class FamilyConfig:
    x: str
    n: str | None
    s: str | None
    lam: str
    domain: Domain
    nu: int
    nv: int
    m: int = 64
    tol: Tolerances = DEFAULT_TOLERANCES
    bindings: dict = field(default_factory=dict)
    theta: str | None = None
    phi: str | None = None
    fixture: str | None = None

    def surface(self) -> FramedSurface:
        b = self.bindings
        return FramedSurface(as_vector(self.x, b), self.n and as_vector(self.n, b),
                             self.s and as_vector(self.s, b), self.domain,
                             name=self.fixture or "custom", tol=self.tol)

    def radius(self):
        return as_expr(self.lam, self.bindings)

    def grid(self) -> SampleGrid:
        return self.domain.grid(self.nu, self.nv)

    def custom_closures(self):
        th = self.theta if self.theta is not None else ("theta" if "theta" in self.bindings else "0")
        ph = self.phi if self.phi is not None else ("phi" if "phi" in self.bindings else "0")
        return as_expr(th, self.bindings), as_expr(ph, self.bindings)


def _unquote(v: str) -> str:
    v = v.strip()
    if len(v) >= 2 and v[0] == v[-1] == '"':
        v = v[1:-1]
    return v.strip()


def _const(text: str, bindings, where: str) -> float:
    try:
        node = as_expr(text, bindings)
    except (DslSyntaxError, DomainError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    val = _fold_constant(node)
    if val is None:
        raise ConfigError(f"{where}: {text!r} must be a constant expression")
    return float(val)


def _int(text: str, where: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise ConfigError(f"{where}: {text!r} is not an integer") from None
    if k < 2:
        raise ConfigError(f"{where}: needs at least 2 samples")
    return k


def parse_config(text: str, source: str = "<config>") -> FamilyConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    sec: dict[str, dict[str, str]] = {}
    for name in cp.sections():
        if name not in ALLOWED:
            raise ConfigError(f"{source}: unknown section [{name}]")
        keys = {k: _unquote(v) for k, v in cp.items(name)}
        allowed = ALLOWED[name]
        for k in keys:
            if allowed is not None and k not in allowed:
                raise ConfigError(f"{source}: unknown key {k!r} in [{name}]")
        sec[name] = keys

    bindings: dict[str, float] = {}
    for k, v in sec.get("bindings", {}).items():
        if not _IDENT.match(k) or k in RESERVED:
            raise ConfigError(f"[bindings] {k!r} is not a usable constant name")
        try:
            bindings[k] = float(v)
        except ValueError:
            raise ConfigError(f"[bindings] {k} = {v!r} is not a numeric literal") from None

    surf = sec.get("surface", {})
    fx = None
    if "fixture" in surf:
        try:
            fx = FIXTURES[surf["fixture"]]
        except KeyError:
            raise ConfigError(f"[surface] unknown fixture {surf['fixture']!r}; "
                              f"known: {', '.join(sorted(FIXTURES))}") from None
    x = surf.get("x", fx.x if fx else None)
    n = surf.get("n", fx.n if fx else None)
    s = surf.get("s", fx.s if fx else None)
    lam = sec.get("radius", {}).get("lambda", fx.lam if fx else None)
    if x is None:
        raise ConfigError("[surface] x is required without a fixture")
    if lam is None:
        raise ConfigError("[radius] lambda is required without a fixture")
    # parse everything now so syntax errors surface as config errors
    for where, src, vec in (("[surface] x", x, True), ("[surface] n", n, True),
                            ("[surface] s", s, True), ("[radius] lambda", lam, False)):
        if src is None:
            continue
        try:
            (as_vector if vec else as_expr)(src, bindings)
        except (DslSyntaxError, DomainError) as exc:
            raise ConfigError(f"{where}: {exc}") from None

    dom = sec.get("domain", {})
    bounds = []
    for i, key in enumerate(("u_min", "u_max", "v_min", "v_max")):
        if key in dom:
            bounds.append(_const(dom[key], bindings, f"[domain] {key}"))
        elif fx:
            bounds.append(fx.domain[i])
        else:
            raise ConfigError(f"[domain] {key} is required without a fixture")
    if "exclude" in dom:
        excl = tuple(e.strip() for e in dom["exclude"].split(";") if e.strip())
    else:
        excl = fx.exclude if fx else ()
    try:
        domain = Domain(*bounds, exclude=tuple(Exclusion.parse(e, bindings) for e in excl))
    except (ValueError, DslSyntaxError) as exc:
        raise ConfigError(f"[domain] {exc}") from None

    g = sec.get("grid", {})
    nu = _int(g["nu"], "[grid] nu") if "nu" in g else (fx.grid[0] if fx else 41)
    nv = _int(g["nv"], "[grid] nv") if "nv" in g else (fx.grid[1] if fx else 41)
    m = _int(g["m"], "[grid] m") if "m" in g else 64

    t = sec.get("tolerances", {})
    try:
        tol = Tolerances(**{k: float(v) for k, v in t.items()})
    except ValueError as exc:
        raise ConfigError(f"[tolerances] {exc}") from None

    br = sec.get("branch", {})
    for k, v in br.items():
        try:
            as_expr(v, bindings)
        except (DslSyntaxError, DomainError) as exc:
            raise ConfigError(f"[branch] {k}: {exc}") from None
    return FamilyConfig(x, n, s, lam, domain, nu, nv, m, tol, bindings,
                        br.get("theta"), br.get("phi"), fx.name if fx else None)


def load_config(path) -> FamilyConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(p)!r}: {exc.strerror}") from None
    return parse_config(text, str(p))
