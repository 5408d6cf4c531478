import csv

import numpy as np
import pytest

from sphere_envelopes.cli import main
from sphere_envelopes.config import load_config, parse_config
from sphere_envelopes.errors import ConfigError
from sphere_envelopes.export import Mesh, csv_text, fmt, read_obj, write_obj
from sphere_envelopes.fixtures import FIXTURES


def cfg_file(tmp_path, text, name="family.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def fixture_cfg(tmp_path, name, extra=""):
    return cfg_file(tmp_path, f"[surface]\nfixture = {name}\n{extra}", f"{name}.ini")


def run(tmp_path, *argv, out="out"):
    d = tmp_path / out
    return main([*argv, "--out", str(d)]), d


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# export ----------------------------------------------------------------------


def test_fmt():
    assert fmt(-0.0) == "0" and fmt(0.1) == "0.10000000000000001" and fmt(3) == "3"
    assert fmt(float("nan")) == "nan" and fmt(True) == "true" and fmt("S1") == "S1"
    assert float(fmt(np.pi)) == np.pi


def test_csv_uses_lf():
    text = csv_text(["a", "b"], [[1, -0.0], [2.5, "x"]])
    assert text == "a,b\n1,0\n2.5,x\n"


def test_obj_round_trip_skips_faces_with_missing_corners(tmp_path):
    vals = np.arange(3 * 3 * 3, dtype=float).reshape(3, 3, 3) / 7
    vals[2, 2] = np.nan
    mesh = Mesh.from_grid(vals)
    assert len(mesh.vertices) == 8 and len(mesh.faces) == 3
    path = write_obj(tmp_path / "m.obj", [("a", mesh), ("b", Mesh.points([[1, 2, 3]]))])
    back = read_obj(path)
    assert np.array_equal(back["a"]["v"], mesh.vertices)
    assert back["b"]["v"].tolist() == [[1, 2, 3]]
    assert back["a"]["f"][0] == [1, 4, 5, 2]
    assert max(max(f) for f in back["a"]["f"]) <= 8


# config ----------------------------------------------------------------------


def test_custom_config_round_trip():
    cfg = parse_config('[surface]\nx = "(u, v, 0)"\n[radius]\nlambda = "k"\n[bindings]\nk = 2\n'
                       "[domain]\nu_min = -1\nu_max = 1\nv_min = 0\nv_max = pi\nexclude = v <= 0\n"
                       "[grid]\nnu = 3\nnv = 4\n")
    assert cfg.grid().shape == (3, 4) and cfg.domain.v_max == np.pi
    assert float(cfg.radius()(0.0, 0.0).val) == 2.0
    assert not cfg.grid().valid[:, 0].any()


def test_fixture_config_with_override():
    cfg = parse_config("[surface]\nfixture = cone-distance\n[grid]\nnu = 5\nnv = 7\n")
    assert cfg.grid().shape == (5, 7) and cfg.fixture == "cone-distance"


@pytest.mark.parametrize("text", [
    "[surface]\nfixture = nope\n",
    "[surface]\nfixture = cone-distance\n[extra]\na = 1\n",
    "[surface]\nfixture = cone-distance\ncolour = red\n",
    "[surface]\nx = \"(u, v, 0)\"\n",
    "[surface]\nfixture = cone-distance\n[grid]\nnu = 1\n",
    "[surface]\nfixture = cone-distance\n[grid]\nnu = many\n",
    "[surface]\nfixture = cone-distance\n[bindings]\nu = 1\n",
    "[surface]\nfixture = cone-distance\n[bindings]\nk = 1 + 1\n",
    "[surface]\nfixture = cone-distance\n[domain]\nu_min = v\n",
    "[surface]\nfixture = cone-distance\n[branch]\ntheta = (u\n",
    "no section\n",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_shipped_configs_load():
    from pathlib import Path
    configs = sorted((Path(__file__).parent.parent / "configs").glob("*.ini"))
    assert len(configs) >= len(FIXTURES)
    for p in configs:
        load_config(p)


# cli -------------------------------------------------------------------------


def test_classify_translated_planes(tmp_path):
    code, out = run(tmp_path, "classify", "--config", fixture_cfg(tmp_path, "translated-planes"))
    assert code == 0
    rows = read_csv(out / "classify.csv")
    assert rows and all(r["sigma"] == "Sigma1" for r in rows)
    assert "count=Two" in (out / "classify-summary.txt").read_text().splitlines()
    assert b"\r" not in (out / "classify.csv").read_bytes()


def test_classify_cone_counts_one(tmp_path):
    code, out = run(tmp_path, "classify", "--config", fixture_cfg(tmp_path, "cone-distance"))
    assert code == 0 and "count=One" in (out / "classify-summary.txt").read_text()


def test_not_creative_exit_code(tmp_path):
    cfg = fixture_cfg(tmp_path, "concentric")
    assert run(tmp_path, "classify", "--config", cfg)[0] == 3
    assert run(tmp_path, "envelope", "--config", cfg, out="o2")[0] == 3


def test_branch_unavailable_exit_code(tmp_path):
    assert run(tmp_path, "envelope", "--config", fixture_cfg(tmp_path, "axis-full"), "--branch", "plus")[0] == 4


def test_envelope_two_branches(tmp_path):
    code, out = run(tmp_path, "envelope", "--config", fixture_cfg(tmp_path, "translated-planes", "[grid]\nnu = 5\nnv = 5\n"))
    assert code == 0
    for tag, z in (("plus", 1.0), ("minus", -1.0)):
        obj = read_obj(out / f"envelope-{tag}.obj")[f"envelope-{tag}"]
        assert np.all(obj["v"][:, 2] == z) and len(obj["f"]) == 16


def test_custom_branch_from_bindings(tmp_path):
    cfg = fixture_cfg(tmp_path, "axis-half", "[bindings]\ntheta = 0\n[grid]\nnu = 3\nnv = 5\n")
    code, out = run(tmp_path, "envelope", "--config", cfg, "--branch", "custom")
    assert code == 0
    rows = read_csv(out / "envelope-custom-residuals.csv")
    for r in rows:
        v = float(r["v"])
        assert float(r["fx"]) == pytest.approx(np.sqrt(3) / 4 * v, abs=1e-12)
        assert float(r["fy"]) == pytest.approx(0, abs=1e-12)
        assert float(r["fz"]) == pytest.approx(0.75 * v, abs=1e-12)


def test_discriminant_fixed_sphere(tmp_path):
    code, out = run(tmp_path, "discriminant", "--config", fixture_cfg(tmp_path, "fixed-sphere", "[grid]\nm = 50\n"))
    assert code == 0
    summary = (out / "discriminant-summary.txt").read_text().splitlines()
    assert "components[sphere]=1" in summary and "points=50" in summary
    (tag,) = [k for k in read_obj(out / "discriminant.obj") if not k.startswith("_")]
    assert np.allclose(np.linalg.norm(read_obj(out / "discriminant.obj")[tag]["v"], axis=1), 1)


def test_pedal_csv_is_normal_projection(tmp_path):
    code, out = run(tmp_path, "pedal", "--config", fixture_cfg(tmp_path, "sphere-through-origin"), "--point", "0.1,0.2,-0.3")
    assert code == 0
    P = np.array([0.1, 0.2, -0.3])
    fs = FIXTURES["sphere-through-origin"].surface()
    rows = read_csv(out / "pedal.csv")
    u = np.array([float(r["u"]) for r in rows])
    v = np.array([float(r["v"]) for r in rows])
    pe = np.array([[float(r[k]) for k in ("pe_x", "pe_y", "pe_z")] for r in rows])
    fr = fs.frame_at(u, v)
    x, n = fr.x.value(), fr.n.value()
    # ((x - P).n) n, stored relative to P
    expect = np.sum((x - P) * n, axis=-1, keepdims=True) * n
    assert np.max(np.abs(pe - expect)) <= 1e-12
    thm = read_csv(out / "pedal-theorem.csv")
    err = max(abs(float(r[f"f2_{c}"]) - float(r[f"model_{c}"])) for r in thm for c in "xyz")
    assert err <= 1e-8


def test_pedal_theorem_csv_at_origin(tmp_path):
    # the constant branch is f1 = 0, so the model columns are 2 (x.n) n
    code, out = run(tmp_path, "pedal", "--config", fixture_cfg(tmp_path, "sphere-through-origin"))
    assert code == 0
    rows = read_csv(out / "pedal-theorem.csv")
    u = np.array([float(r["u"]) for r in rows])
    v = np.array([float(r["v"]) for r in rows])
    fr = FIXTURES["sphere-through-origin"].surface().frame_at(u, v)
    x, n = fr.x.value(), fr.n.value()
    expect = 2 * np.sum(x * n, axis=-1, keepdims=True) * n
    for k, c in enumerate("xyz"):
        f2 = np.array([float(r[f"f2_{c}"]) for r in rows])
        model = np.array([float(r[f"model_{c}"]) for r in rows])
        assert np.max(np.abs(f2 - expect[:, k])) <= 1e-8
        assert np.max(np.abs(model - expect[:, k])) <= 1e-12


def test_pedal_bad_point(tmp_path):
    assert run(tmp_path, "pedal", "--config", fixture_cfg(tmp_path, "plane-z1"), "--point", "1,2")[0] == 2


def test_verify_fail_exit_code(tmp_path):
    cfg = fixture_cfg(tmp_path, "translated-planes")
    code, out = run(tmp_path, "verify", "--config", cfg, "--candidate", "(u + 1, v, 0)")
    assert code == 1
    assert (out / "verify-report.txt").read_text().rstrip().endswith("result=FAIL")
    code, out = run(tmp_path, "verify", "--config", cfg, "--candidate", "(u, v, 1)", out="ok")
    assert code == 0


def test_verify_needs_candidate(tmp_path):
    assert run(tmp_path, "verify", "--config", fixture_cfg(tmp_path, "plane-z1"))[0] == 2
    assert run(tmp_path, "verify", "--config", fixture_cfg(tmp_path, "plane-z1"), "--candidate", "(u,", out="b")[0] == 2


def test_usage_and_config_errors(tmp_path, capsys):
    assert main(["bogus", "--config", "x"]) == 2
    assert run(tmp_path, "classify", "--config", str(tmp_path / "absent.ini"))[0] == 2
    assert run(tmp_path, "classify", "--config", cfg_file(tmp_path, "[surface]\nfixture = nope\n"))[0] == 2
    assert "error:" in capsys.readouterr().err


def test_singular_point_is_config_error(tmp_path):
    cfg = cfg_file(tmp_path, '[surface]\nx = "(u^2, u^3, v)"\n[radius]\nlambda = "1"\n'
                   "[domain]\nu_min = -1\nu_max = 1\nv_min = -1\nv_max = 1\n[grid]\nnu = 5\nnv = 5\n")
    assert run(tmp_path, "classify", "--config", cfg)[0] == 2


@pytest.mark.parametrize("command", ["classify", "envelope", "discriminant", "evolute", "pedal"])
def test_outputs_are_byte_identical(tmp_path, command, monkeypatch):
    cfg = fixture_cfg(tmp_path, "parabolic-cylinder", "[grid]\nnu = 21\nnv = 9\n")
    monkeypatch.setenv("ENVELOPE_TOOL_THREADS", "1")
    _, a = run(tmp_path, command, "--config", cfg, out="a")
    monkeypatch.setenv("ENVELOPE_TOOL_THREADS", "4")
    _, b = run(tmp_path, command, "--config", cfg, out="b")
    names = sorted(p.name for p in a.iterdir())
    assert names and names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_readme_config_examples_parse():
    import re
    from pathlib import Path
    text = (Path(__file__).parent.parent / "README.md").read_text()
    blocks = re.findall(r"```ini\n(.*?)```", text, re.S)
    assert len(blocks) == 2
    for b in blocks:
        parse_config(b)
