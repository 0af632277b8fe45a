import csv
import json

import numpy as np
import pytest

from dkglab import cli, estimates, fieldio
from dkglab.feasibility import p2_predicate

SMALL_SIM = ["simulate", "--N", "64", "--T", "0.08", "--dt", "0.005", "--k0", "4", "--save-every", "2"]


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def manifest(path):
    return json.loads((path / "manifest.json").read_text())


def test_simulate_outputs(tmp_path):
    out = tmp_path / "run"
    assert cli.run(SMALL_SIM + ["--out", str(out)]) == 0
    rows = read_csv(out / "diagnostics.csv")
    assert list(rows[0]) == ["t", "charge", "phi_energy_proxy", "max_abs_coeff"]
    assert len(rows) == 17
    assert (out / "diagnostics.csv").read_text().startswith("# manifest: manifest.json\n")
    m = manifest(out)
    assert m["subcommand"] == "simulate" and m["params"]["N"] == 64
    assert m["summary"]["charge_drift"] < 1e-8
    assert len(m["summary"]["snapshots"]) == 9
    snap = out / m["summary"]["snapshots"][1]["file"]
    _, t, _, meta = fieldio.unpack_binary(snap.read_bytes(), with_meta=True)
    assert meta == {"manifest": "manifest.json"} and t == pytest.approx(0.01)
    assert {"version", "inputs", "outputs", "wall_clock_s", "seed"} <= set(m)


def test_outputs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert cli.run(SMALL_SIM + ["--out", str(tmp_path / name)]) == 0
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    for rel in files:
        a, b = (tmp_path / "a" / rel).read_bytes(), (tmp_path / "b" / rel).read_bytes()
        if rel.name == "manifest.json":
            ma, mb = json.loads(a), json.loads(b)
            ma.pop("wall_clock_s"), mb.pop("wall_clock_s")
            ma["params"].pop("out"), mb["params"].pop("out")
            assert ma == mb
        else:
            assert a == b, rel


def test_csv_snapshots_and_norms(tmp_path):
    run_dir = tmp_path / "sim"
    assert cli.run(SMALL_SIM + ["--format", "csv", "--out", str(run_dir)]) == 0
    first = (run_dir / "snapshots" / "snap_000000.csv").read_text()
    assert first.startswith("# manifest: manifest.json\n")
    assert cli.run(["norms", "--run", str(run_dir), "--out", str(tmp_path / "n"), "--b", "0.3"]) == 0
    rep = json.loads((tmp_path / "n" / "norms.json").read_text())
    assert rep["manifest"] == "manifest.json"
    assert set(rep["reports"]) == {"psi_plus", "psi_minus", "phi_plus", "phi_minus"}
    assert rep["reports"]["phi_plus"]["phase"]["label"] == "Y+"
    assert rep["reports"]["psi_plus"]["grid"]["N_t"] == 8
    m = manifest(tmp_path / "n")
    assert m["inputs"][0].endswith("manifest.json") and len(m["inputs"]) == 10


def test_norms_needs_enough_snapshots(tmp_path):
    argv = ["simulate", "--N", "32", "--T", "0.02", "--dt", "0.005", "--k0", "2", "--save-every", "1"]
    assert cli.run(argv + ["--out", str(tmp_path / "s")]) == 0
    assert cli.run(["norms", "--run", str(tmp_path / "s"), "--out", str(tmp_path / "n")]) == 1
    assert cli.run(["norms", "--run", str(tmp_path / "missing")]) == 1


def test_picard_table(tmp_path):
    assert cli.run(["picard", "--iterations", "6", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "residuals.csv")
    res = [float(r["residual"]) for r in rows]
    assert len(res) == 6 and all(b < 0.5 * a for a, b in zip(res, res[1:]))
    assert rows[0]["ratio"] == "" and not manifest(tmp_path)["summary"]["diverged"]


def test_verify_exact(tmp_path, capsys):
    assert cli.run(["verify", "--suite", "exact", "--seed", "7", "--out", str(tmp_path)]) == 0
    m = manifest(tmp_path)
    assert m["seed"] == 7 and m["summary"]["exact_violations"] == 0
    names = set(m["summary"]["reports"])
    assert names == {"algebra", "null-structure", "lemma21", "prop22"}
    for info in m["summary"]["reports"].values():
        rep = json.loads((tmp_path / info["file"]).read_text())
        assert rep["violations"] == 0 and rep["manifest"] == "manifest.json"
    assert "violations=0" in capsys.readouterr().out


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("DKGLAB_SEED", "11")
    assert cli.run(["verify", "--suite", "algebra", "--out", str(tmp_path)]) == 0
    assert manifest(tmp_path)["seed"] == 11
    monkeypatch.setenv("DKGLAB_SEED", "x")
    assert cli.run(["verify", "--suite", "algebra", "--out", str(tmp_path)]) == 1


def test_verify_exit_code_on_violation(tmp_path, monkeypatch):
    def broken(*a, **k):
        return estimates.RatioReport("lemma21", 2.0, {}, 3, True, [1, 0, 0, 0, 0])

    monkeypatch.setattr(estimates, "check_lemma21", broken)
    assert cli.run(["verify", "--suite", "lemma21", "--out", str(tmp_path)]) == 2


def test_verify_statistical_subset(tmp_path):
    argv = ["verify", "--suite", "cor21,bilinear", "--count", "1", "--resolutions", "16,32",
            "--out", str(tmp_path)]
    assert cli.run(argv) == 0
    reps = manifest(tmp_path)["summary"]["reports"]
    assert {"corollary21", "bilinear *1", "bilinear **2"} <= set(reps)
    assert (tmp_path / "reports" / "bilinear_s1.json").exists()


def test_region_matches_p2_predicate(tmp_path):
    assert cli.run(["region", "--p", "2", "--resolution", "200", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "region.csv")
    assert len(rows) == 200 * 200
    for row in rows:
        assert (row["admissible"] == "1") == p2_predicate(float(row["s"]), float(row["r"]))
    bnd = read_csv(tmp_path / "boundary.csv")
    assert {r["segment"] for r in bnd} >= {"s = -1/2 + 1/(2p)", "r = 1 + s"}


def test_region_with_sweep(tmp_path):
    assert cli.run(["region", "--p", "1.5", "--resolution", "16", "--sweep", "8", "--out", str(tmp_path)]) == 0
    sweep = json.loads((tmp_path / "sweep.json").read_text())
    assert sweep["success_rate"] == 1.0 and sweep["manifest"] == "manifest.json"


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# region settings\nresolution = 20\np = 1.5\n")
    out = tmp_path / "o"
    assert cli.run(["region", "--config", str(cfg), "--p", "2", "--out", str(out)]) == 0
    params = manifest(out)["params"]
    assert params["resolution"] == 20 and params["p"] == 2.0
    # defaults restored for later parses
    assert cli.build_parser().parse_args(["region"]).resolution == 200


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["region", "--bogus", "1"],
    ["region", "--p", "3"],
    ["verify", "--suite", "nonsense"],
    ["verify", "--resolutions", "7,9"],
    ["simulate", "--T", "0.1", "--dt", "0.03", "--N", "32", "--k0", "2"],
    ["simulate", "--N", "32", "--k0", "20"],
    [],
])
def test_usage_errors(argv, tmp_path):
    assert cli.run(argv + (["--out", str(tmp_path)] if len(argv) > 1 and "--bogus" not in argv else [])) == 1


def test_malformed_config(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense\n")
    assert cli.run(["region", "--config", str(bad)]) == 1
    bad.write_text("colour = red\n")
    assert cli.run(["region", "--config", str(bad)]) == 1
    bad.write_text("resolution = many\n")
    assert cli.run(["region", "--config", str(bad)]) == 1
    assert cli.run(["region", "--config", str(tmp_path / "absent.cfg")]) == 1


def test_help_and_version(capsys):
    assert cli.run(["--help"]) == 0
    assert cli.run(["--version"]) == 0
    assert "dkglab" in capsys.readouterr().out


def test_full_precision_cells():
    assert cli._cell(0.1) == "0.10000000000000001" and cli._cell(True) == "1" and cli._cell(None) == ""
    assert float(cli._cell(np.float64(1 / 3))) == 1 / 3
