"""Deterministic OBJ and CSV writers.

Floats are printed with 17 significant digits and negative zero is written
as 0, so identical inputs give byte-identical files.  OBJ files hold "v"
lines, "f" quads (1-based) and "o <tag>" object lines; CSV files use a
header row, commas and LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0
    if np.isnan(x):
        return "nan"
    return format(x, ".17g")


def csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header: list[str], rows) -> Path:
    path = Path(path)
    path.write_bytes(csv_text(header, rows).encode())
    return path


@dataclass
class Mesh:
    """Vertices and quad faces of a sampled grid map.

    Vertices are the finite samples in row-major order; a quad is emitted for
    each grid cell whose four corners are all finite, so no face spans an
    excluded or invalid sample.  ``vertex_index`` maps grid positions to
    0-based vertex numbers (-1 where absent).
    """

    vertices: np.ndarray
    faces: list[tuple[int, int, int, int]]
    vertex_index: np.ndarray
    attributes: dict = field(default_factory=dict)

    @classmethod
    def from_grid(cls, values: np.ndarray, attributes: dict | None = None) -> Mesh:
        ok = np.all(np.isfinite(values), axis=-1)
        index = np.full(ok.shape, -1)
        index[ok] = np.arange(int(ok.sum()))
        faces = []
        nu, nv = ok.shape
        for i in range(nu - 1):
            for j in range(nv - 1):
                q = (index[i, j], index[i + 1, j], index[i + 1, j + 1], index[i, j + 1])
                if min(q) >= 0:
                    faces.append(tuple(int(k) for k in q))
        attrs = {k: np.asarray(a)[ok] for k, a in (attributes or {}).items()}
        return cls(values[ok], faces, index, attrs)

    @classmethod
    def points(cls, pts: np.ndarray) -> Mesh:
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        return cls(pts, [], np.arange(len(pts)))


def obj_text(components: list[tuple[str, Mesh]]) -> str:
    lines = []
    base = 1
    for tag, mesh in components:
        lines.append(f"o {tag}")
        lines += [f"v {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}" for p in mesh.vertices]
        lines += ["f " + " ".join(str(base + k) for k in q) for q in mesh.faces]
        base += len(mesh.vertices)
    return "\n".join(lines) + "\n"


def write_obj(path, components: list[tuple[str, Mesh]]) -> Path:
    path = Path(path)
    path.write_bytes(obj_text(components).encode())
    return path


def read_obj(path) -> dict[str, dict]:
    """Parse an OBJ written by :func:`write_obj` (for tests and round trips)."""
    out: dict[str, dict] = {}
    cur = None
    verts: list[list[float]] = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("o "):
            cur = line[2:]
            out[cur] = {"v": [], "f": []}
        elif line.startswith("v "):
            p = [float(c) for c in line.split()[1:]]
            verts.append(p)
            out[cur]["v"].append(p)
        elif line.startswith("f "):
            out[cur]["f"].append([int(c) for c in line.split()[1:]])
    for d in out.values():
        d["v"] = np.array(d["v"], dtype=float).reshape(-1, 3)
    out["_all_vertices"] = {"v": np.array(verts, dtype=float).reshape(-1, 3), "f": []}
    return out
