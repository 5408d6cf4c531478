"""envelope-tool: batch front end for sphere-family computations.

    envelope-tool <classify|envelope|discriminant|evolute|pedal|verify>
                  --config PATH [--branch plus|minus|unique|custom] [--out DIR]
                  [--point X,Y,Z] [--candidate "(fx, fy, fz)"]

Exit codes: 0 ok, 1 verification failed, 2 config or parse error,
3 not creative, 4 branch unavailable, 5 hypothesis not met.
ENVELOPE_TOOL_THREADS caps the worker threads used for grid sweeps.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import applications as app
from .config import FamilyConfig, load_config
from .creative import Sigma, classify_grid
from .discriminant import decompose_d
from .envelope import Branch, BranchSpec, decide_count, sample_branch, verify_envelope
from .errors import (BranchUnavailableError, ConfigError, DomainError, DslSyntaxError,
                     EnvelopeToolError, FramedAxiomError, HypothesisNotMetError, NotCreativeError,
                     SingularPointError)
from .export import Mesh, fmt, write_csv, write_obj

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NOT_CREATIVE, EXIT_BRANCH, EXIT_HYPOTHESIS = 0, 1, 2, 3, 4, 5
COMMANDS = ("classify", "envelope", "discriminant", "evolute", "pedal", "verify")


def _label(code) -> str:
    return Sigma(int(code)).label if int(code) >= 1 else "Excluded"


def _rows(grid, *cols):
    """Row-major rows (u, v, *cols) over the valid samples."""
    uu, vv = grid.points()
    cols = [np.asarray(c)[grid.valid] if np.shape(c)[:2] == grid.shape else np.asarray(c) for c in cols]
    for k in range(len(uu)):
        yield [uu[k], vv[k]] + [c[k] for c in cols]


def _emit(out: Path, name: str, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    (out / name).write_bytes(text.encode())
    sys.stdout.write(text)


# commands ------------------------------------------------------------------


def cmd_classify(cfg: FamilyConfig, out: Path, args) -> int:
    fs, lam, grid = cfg.surface(), cfg.radius(), cfg.grid()
    cg = classify_grid(fs, lam, grid, cfg.tol)
    labels = [_label(c) for c in cg.labels[grid.valid]]
    d = cg.data
    rows = [[u, v, lab, jf, ja, jb, a, b] for (u, v, jf, ja, jb, a, b), lab in
            zip(_rows(grid, d["J_F"], d["J_a"], d["J_b"], d["alpha"], d["beta"]), labels)]
    write_csv(out / "classify.csv", ["u", "v", "sigma", "J_F", "J_a", "J_b", "alpha", "beta"], rows)
    count = decide_count(cg.summary)
    _emit(out, "classify-summary.txt", cg.summary.lines() + [f"count={count.value}"])
    return EXIT_NOT_CREATIVE if cg.summary.any_not_creative else EXIT_OK


def _branch_specs(cfg: FamilyConfig, name: str | None, fs, lam, grid) -> list[BranchSpec]:
    if name == "custom":
        th, ph = cfg.custom_closures()
        return [BranchSpec(Branch.CUSTOM, th, ph)]
    if name is not None:
        return [BranchSpec(Branch(name))]
    try:
        sample_branch(fs, lam, grid, Branch.PLUS, cfg.tol)
        return [BranchSpec(Branch.PLUS), BranchSpec(Branch.MINUS)]
    except BranchUnavailableError:
        return [BranchSpec(Branch.UNIQUE)]


def cmd_envelope(cfg: FamilyConfig, out: Path, args) -> int:
    fs, lam, grid = cfg.surface(), cfg.radius(), cfg.grid()
    lines = []
    for spec in _branch_specs(cfg, args.branch, fs, lam, grid):
        eb = sample_branch(fs, lam, grid, spec, cfg.tol)
        write_obj(out / f"envelope-{spec.tag}.obj", [(f"envelope-{spec.tag}", Mesh.from_grid(eb.f))])
        pw = eb.report.pointwise
        f = eb.f[grid.valid]
        rows = [[u, v, *f[k], pw["sphere"][k], pw["tangency_u"][k], pw["tangency_v"][k]]
                for k, (u, v) in enumerate(zip(*grid.points()))]
        write_csv(out / f"envelope-{spec.tag}-residuals.csv",
                  ["u", "v", "fx", "fy", "fz", "sphere", "tangency_u", "tangency_v"], rows)
        lines += [f"[{spec.tag}]"] + eb.report.lines()
    _emit(out, "envelope-summary.txt", lines)
    return EXIT_OK


def cmd_discriminant(cfg: FamilyConfig, out: Path, args) -> int:
    fs, lam, grid = cfg.surface(), cfg.radius(), cfg.grid()
    ds = decompose_d(fs, lam, grid, cfg.m, cfg.tol)
    comps = []
    for c in ds.components:
        mesh = Mesh.from_grid(c.grid_values) if c.grid_values is not None else Mesh.points(c.points)
        comps.append((c.tag, mesh))
    write_obj(out / "discriminant.obj", comps)
    lines = [f"components[{k}]={v}" for k, v in ds.counts.items()]
    lines += [f"points={sum(len(c.points) for c in ds.components)}",
              f"max_residual={fmt(ds.max_residual)}", f"limit_distance={fmt(ds.limit_distance)}"]
    _emit(out, "discriminant-summary.txt", lines)
    return EXIT_OK


def cmd_evolute(cfg: FamilyConfig, out: Path, args) -> int:
    fs, grid = cfg.surface(), cfg.grid()
    eg = app.evolute_grid(fs, grid, tol=cfg.tol)
    uu, vv = grid.points()
    fr = fs.frame_at(uu, vv)
    x, n = fr.x.value(), fr.n.value()
    comps = []
    for k in range(2):
        d = eg.delta[..., k][grid.valid]
        pts = np.full(grid.shape + (3,), np.nan)
        pts[grid.valid] = x + d[:, None] * n
        mesh = Mesh.from_grid(pts)
        if len(mesh.vertices):
            comps.append((f"evolute-{k}", mesh))
    write_obj(out / "evolute.obj", comps)
    rows = _rows(grid, eg.count, eg.delta[..., 0], eg.theta[..., 0], eg.delta[..., 1], eg.theta[..., 1])
    write_csv(out / "evolute.csv", ["u", "v", "roots", "delta0", "theta0", "delta1", "theta1"], rows)
    cnt = eg.count[grid.valid]
    lines = [f"samples={cnt.size}", f"degenerate={int((cnt == -1).sum())}",
             f"no_root={int((cnt == 0).sum())}", f"discontinuities={len(eg.discontinuities)}"]
    _emit(out, "evolute-summary.txt", lines)
    return EXIT_OK


def _point(text: str | None) -> np.ndarray:
    if text is None:
        return np.zeros(3)
    try:
        p = [float(c) for c in text.split(",")]
    except ValueError:
        raise ConfigError(f"--point {text!r} must be three comma-separated numbers") from None
    if len(p) != 3:
        raise ConfigError(f"--point {text!r} must have three components")
    return np.array(p)


def cmd_pedal(cfg: FamilyConfig, out: Path, args) -> int:
    fs, lam, grid = cfg.surface(), cfg.radius(), cfg.grid()
    P = _point(args.point)
    uu, vv = grid.points()
    pp = app.pedal_at(fs, P, uu, vv)
    pts = np.full(grid.shape + (3,), np.nan)
    pts[grid.valid] = pp.pe
    write_obj(out / "pedal.obj", [("pedal", Mesh.from_grid(pts))])
    write_csv(out / "pedal.csv", ["u", "v", "pe_x", "pe_y", "pe_z", "height"],
              ([u, v, *pp.pe[k], pp.height[k]] for k, (u, v) in enumerate(zip(uu, vv))))
    lines = [f"point={fmt(P[0])},{fmt(P[1])},{fmt(P[2])}", f"samples={len(uu)}"]
    try:
        chk = app.verify_pedal(fs, lam, grid, cfg.tol)
    except (HypothesisNotMetError, NotCreativeError) as exc:
        lines.append(f"theorem=skipped ({exc})")
    else:
        f1 = chk.detail["f1"]
        other = sample_branch(fs, lam, grid, Branch(chk.detail["other_branch"]), cfg.tol).f[grid.valid]
        model = app.pedal_at(fs, f1, uu, vv)
        # Pe_{f1}[2x - f1] relative to f1 equals 2((x - f1).n) n
        m2 = 2 * model.pe
        write_csv(out / "pedal-theorem.csv", ["u", "v", "f2_x", "f2_y", "f2_z", "model_x", "model_y", "model_z"],
                  ([u, v, *(other[k] - f1), *m2[k]] for k, (u, v) in enumerate(zip(uu, vv))))
        lines += [f"theorem_constant_branch={chk.detail['constant_branch']}"] + chk.lines()
    _emit(out, "pedal-summary.txt", lines)
    return EXIT_OK


def cmd_verify(cfg: FamilyConfig, out: Path, args) -> int:
    if not args.candidate:
        raise ConfigError("verify needs --candidate \"(fx, fy, fz)\"")
    from .dsl import as_vector
    try:
        cand = as_vector(args.candidate, cfg.bindings)
    except (DslSyntaxError, DomainError) as exc:
        raise ConfigError(f"--candidate: {exc}") from None
    fs, lam, grid = cfg.surface(), cfg.radius(), cfg.grid()
    rep = verify_envelope(cand, fs, lam, grid, cfg.tol)
    pw = rep.pointwise
    write_csv(out / "verify.csv", ["u", "v", "sphere", "tangency_u", "tangency_v", "raw_u", "raw_v"],
              _rows(grid, pw["sphere"], pw["tangency_u"], pw["tangency_v"], pw["raw_u"], pw["raw_v"]))
    _emit(out, "verify-report.txt", [f"candidate={args.candidate}"] + rep.lines()
          + ["result=" + ("PASS" if rep.passed else "FAIL")])
    return EXIT_OK if rep.passed else EXIT_FAIL


HANDLERS = {"classify": cmd_classify, "envelope": cmd_envelope, "discriminant": cmd_discriminant,
            "evolute": cmd_evolute, "pedal": cmd_pedal, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="envelope-tool", description="Envelopes of sphere families.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="family config file")
    p.add_argument("--branch", choices=[b.value for b in Branch], default=None)
    p.add_argument("--out", default=".", help="output directory (created if missing)")
    p.add_argument("--point", default=None, help="base point x,y,z for pedal (default origin)")
    p.add_argument("--candidate", default=None, help="candidate envelope for verify")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[args.command](cfg, out, args)
    except (ConfigError, DslSyntaxError, DomainError, SingularPointError, FramedAxiomError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotCreativeError as exc:
        print(f"not creative: {exc}", file=sys.stderr)
        return EXIT_NOT_CREATIVE
    except BranchUnavailableError as exc:
        print(f"branch unavailable: {exc}", file=sys.stderr)
        return EXIT_BRANCH
    except HypothesisNotMetError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except EnvelopeToolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
