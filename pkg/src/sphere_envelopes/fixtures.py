"""Named sphere families used throughout the tests, demos and CLI.

Every fixture is written in the surface DSL so the CLI can print, override
and re-parse it.  Domains are rectangles with half-open exclusions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .creative import as_radius
from .frame import Domain, FramedSurface, SampleGrid


@dataclass(frozen=True)
class Fixture:
    name: str
    x: str
    n: str | None
    s: str | None
    lam: str
    domain: tuple[float, float, float, float]
    exclude: tuple[str, ...] = ()
    grid: tuple[int, int] = (41, 41)
    note: str = ""

    def make_domain(self) -> Domain:
        return Domain(*self.domain, exclude=self.exclude)

    def surface(self) -> FramedSurface:
        return FramedSurface(self.x, self.n, self.s, self.make_domain(), name=self.name)

    def radius(self):
        return as_radius(self.lam)

    def sample_grid(self, nu: int | None = None, nv: int | None = None) -> SampleGrid:
        return self.make_domain().grid(nu or self.grid[0], nv or self.grid[1])


_SPHERE_N = "(cos(u)*cos(v), cos(u)*sin(v), sin(u))"
_SPHERE_S = "(-sin(u)*cos(v), -sin(u)*sin(v), cos(u))"
_TWO_PI = 6.283185307179586

FIXTURES: dict[str, Fixture] = {f.name: f for f in (
    Fixture("parabolic-cylinder", "(u^2, u^3, v)", "(-3*u/sqrt(9*u^2 + 4), 2/sqrt(9*u^2 + 4), 0)",
            "(0, 0, 1)", "1", (-1.0, 1.0, -1.0, 1.0), grid=(101, 101),
            note="unit spheres along a cuspidal cylinder; Sigma1 off u=0, Sigma4 on u=0"),
    Fixture("cone-distance", "(u, v, 0)", "(0, 0, 1)", "(1, 0, 0)", "sqrt(u^2 + v^2)",
            (-1.0, 1.0, -1.0, 1.0), ("u^2 + v^2 < 1e-12",),
            note="spheres through the origin centred on a plane; unique envelope f = 0"),
    Fixture("translated-planes", "(u, v, 0)", "(0, 0, 1)", "(1, 0, 0)", "1", (-1.0, 1.0, -1.0, 1.0),
            note="unit spheres centred on a plane; envelopes z = +1 and z = -1"),
    Fixture("fixed-sphere", "(0, 0, 0)", "(0, 0, 1)", "(1, 0, 0)", "1", (-1.0, 1.0, -1.0, 1.0),
            grid=(21, 21), note="one fixed unit sphere; every unit field creates an envelope"),
    Fixture("concentric", "(0, 0, 0)", "(0, 0, 1)", "(1, 0, 0)", "sqrt(u^2 + v^2)",
            (-1.0, 1.0, -1.0, 1.0), ("u^2 + v^2 < 1e-12",), grid=(21, 21),
            note="concentric spheres; not creative"),
    Fixture("axis-full", "(0, 0, v)", "(1, 0, 0)", "(0, 1, 0)", "v", (-1.0, 1.0, -2.0, 2.0),
            ("v <= 0",), note="spheres tangent to a point at the origin; Sigma3"),
    Fixture("axis-half", "(0, 0, v)", "(1, 0, 0)", "(0, 1, 0)", "v/2", (-1.0, 1.0, -2.0, 2.0),
            ("v <= 0",), note="spheres cut by a cone; Sigma4, uncountably many envelopes"),
    Fixture("sphere-through-origin", "(cos(u)*cos(v), cos(u)*sin(v), 1 + sin(u))",
            _SPHERE_N, _SPHERE_S, "sqrt(2 + 2*sin(u))", (-1.2, 1.2, 0.0, _TWO_PI), ("v >= 2*pi",),
            note="spheres through the origin centred on a unit sphere; one envelope is the origin"),
    Fixture("sphere-geodesic", "(2*cos(u)*cos(v), 2*cos(u)*sin(v), 2 + 2*sin(u))", _SPHERE_N, _SPHERE_S,
            "2*(pi/2 - u)", (-1.2, 1.2, 0.0, _TWO_PI), ("v >= 2*pi",),
            note="radius = distance to the north pole along the sphere; x is an evolute of its envelope"),
    Fixture("unit-sphere", "(cos(u)*cos(v), cos(u)*sin(v), sin(u))", _SPHERE_N, _SPHERE_S, "1",
            (-1.2, 1.2, 0.0, _TWO_PI), ("v >= 2*pi",), note="unit sphere with outward normal"),
    Fixture("plane-z1", "(u, v, 1)", "(0, 0, 1)", "(1, 0, 0)", "1", (-1.0, 1.0, -1.0, 1.0),
            note="the plane z = 1"),
)}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None
