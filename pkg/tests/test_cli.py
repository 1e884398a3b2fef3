import io
import json
import subprocess
import sys
import time

import pytest

from gomboc.cli import ShapeConfig, ConfigError, main, parse_phase
from gomboc.surface import CosineCubic, LinearWrap


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def load(path):
    d = json.loads(path.read_text())
    d.pop("timings")
    return d


class TestExitCodes:
    def test_convex_amplitude_passes(self):
        assert run("verify", "--preset", "g1", "--beta", "0.03")[0] == 0

    def test_nonconvex_preset_is_verdict_fail(self):
        code, text = run("verify", "--preset", "g1")
        assert code == 1 and "is_gomboc  False" in text

    def test_counter_case_fails_com(self):
        code, text = run("verify", "--phase", "linear:3", "--beta", "0.03")
        assert code == 1 and "[FAIL]" in text.splitlines()[2]

    def test_degenerate_is_numeric(self, capsys):
        assert run("equilibria", "--beta", "1e-12")[0] == 3
        assert "DegenerateShapeError" in capsys.readouterr().err

    def test_bad_bracket_is_usage(self):
        assert run("beta-max", "--preset", "g2", "--bracket", "0.01", "0.02")[0] == 2

    def test_coarse_mesh_is_usage(self, tmp_path):
        assert run("mesh", "--ntheta", "2", "-o", str(tmp_path / "m.stl"))[0] == 2

    def test_coarse_scan_is_usage(self):
        assert run("equilibria", "--ntheta", "8")[0] == 2

    @pytest.mark.parametrize("args", [
        ("verify", "--beta", "0.3"),
        ("verify", "--phase", "linear-wrap:4"),
        ("verify", "--phase", "spiral"),
        ("verify", "--phase", "linear:3"),
        ("verify", "--scale", "-1"),
    ])
    def test_bad_shape_is_usage(self, args):
        assert run(*args)[0] == 2

    def test_argparse_errors(self):
        with pytest.raises(SystemExit) as info:
            main(["bogus"])
        assert info.value.code == 2

    def test_unwritable_mesh(self, tmp_path):
        assert run("mesh", "--ntheta", "8", "--nphi", "16", "-o", str(tmp_path / "no" / "m.stl"))[0] == 2


class TestReports:
    def test_verify_json(self, tmp_path):
        path = tmp_path / "r.json"
        run("verify", "--preset", "g2", "--json", str(path))
        d = json.loads(path.read_text())
        assert d["schema"] == 1 and d["command"] == "verify"
        assert d["moments"]["grid"] == {"n_theta": 64, "n_phi": 128}
        assert d["equilibria"]["counts"] == {"Stable": 1, "Unstable": 1, "Saddle": 0}
        assert d["verdict"] == {"com_ok": True, "is_mono_monostatic": True, "is_convex": False, "is_gomboc": False}
        assert set(d["timings"]) == {"moments", "equilibria", "convexity"}

    @pytest.mark.parametrize("cmd", [
        ("verify", "--preset", "g1"),
        ("equilibria", "--preset", "g2"),
        ("convexity", "--preset", "g1", "--beta", "0.03"),
    ])
    def test_deterministic(self, tmp_path, cmd):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(*cmd, "--json", str(a))
        run(*cmd, "--json", str(b))
        assert load(a) == load(b)
        ta = a.read_text().split('"timings"')[0]
        tb = b.read_text().split('"timings"')[0]
        assert ta == tb

    def test_ntheta_targets_subcommand_grid(self, tmp_path):
        path = tmp_path / "r.json"
        run("verify", "--ntheta", "32", "--nphi", "64", "--json", str(path))
        d = json.loads(path.read_text())
        assert d["moments"]["grid"] == {"n_theta": 32, "n_phi": 64}
        assert d["equilibria"]["scan"] == {"n_theta": 128, "n_phi": 256}
        run("equilibria", "--ntheta", "64", "--nphi", "128", "--json", str(path))
        assert json.loads(path.read_text())["equilibria"]["scan"] == {"n_theta": 64, "n_phi": 128}

    def test_report_is_detailed(self):
        code, text = run("report", "--preset", "g1", "--beta", "0.03")
        assert code == 0 and "grids" in text and "Stable" in text

    def test_beta_max_report(self, tmp_path):
        path = tmp_path / "b.json"
        code, text = run("beta-max", "--preset", "g1", "--tol", "1e-3", "--ntheta", "128", "--nphi", "256",
                         "--json", str(path))
        assert code == 0
        d = json.loads(path.read_text())["beta_max"]
        assert d["bracket"][0] < d["beta_max"] < d["bracket"][1]
        assert d["verification_grid"] == {"n_theta": 256, "n_phi": 512}


class TestMeshCommand:
    @pytest.mark.parametrize("fmt,suffix", [("stl-bin", "stl"), ("stl-ascii", "stl"), ("obj", "obj")])
    def test_formats(self, tmp_path, fmt, suffix):
        out = tmp_path / f"m.{suffix}"
        js = tmp_path / "m.json"
        code, _ = run("mesh", "--preset", "g2", "--ntheta", "16", "--nphi", "32", "--format", fmt,
                      "-o", str(out), "--json", str(js))
        assert code == 0 and out.exists()
        d = json.loads(js.read_text())["mesh"]
        assert d["triangles"] == 2 * 32 * 15 and d["watertight"] and d["outward"]
        if fmt == "stl-bin":
            assert out.stat().st_size == 84 + 50 * d["triangles"]

    def test_scale(self, tmp_path):
        js = tmp_path / "m.json"
        run("mesh", "--scale", "2", "--ntheta", "16", "--nphi", "32", "-o", str(tmp_path / "a.stl"), "--json", str(js))
        v2 = json.loads(js.read_text())["mesh"]["volume"]
        run("mesh", "--ntheta", "16", "--nphi", "32", "-o", str(tmp_path / "b.stl"), "--json", str(js))
        v1 = json.loads(js.read_text())["mesh"]["volume"]
        assert v2 == pytest.approx(8 * v1, rel=1e-12)

    def test_needs_output(self):
        assert run("mesh", "--ntheta", "8", "--nphi", "16")[0] == 2


class TestConfig:
    def test_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"schema": 1, "preset": "g1", "beta": 0.03, "quadrature": {"n_theta": 32, "n_phi": 64}}))
        js = tmp_path / "r.json"
        assert run("verify", "--config", str(cfg), "--json", str(js))[0] == 0
        d = json.loads(js.read_text())
        assert d["shape"]["beta"] == 0.03 and d["moments"]["grid"]["n_theta"] == 32
        assert run("verify", "--config", str(cfg), "--beta", "0.15", "--json", str(js))[0] == 1
        assert json.loads(js.read_text())["shape"]["beta"] == 0.15

    def test_phase_object(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"beta": 0.02, "phase": {"kind": "linear-wrap", "params": {"n": 7}}}))
        assert run("equilibria", "--config", str(cfg))[0] == 0

    @pytest.mark.parametrize("doc", [
        {"betta": 0.1},
        {"phase": {"kind": "linear-wrap", "params": {"m": 7}}},
        {"quadrature": {"n_theta": 32}},
        {"beta": "high"},
        [1, 2],
    ])
    def test_invalid_documents(self, tmp_path, doc):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(doc))
        assert run("verify", "--config", str(cfg))[0] == 2

    def test_unreadable_config(self, tmp_path):
        assert run("verify", "--config", str(tmp_path / "missing.json"))[0] == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert run("verify", "--config", str(bad))[0] == 2

    def test_from_dict_unknown_field(self):
        with pytest.raises(ConfigError):
            ShapeConfig.from_dict({"nope": 1})

    def test_parse_phase(self):
        assert parse_phase("linear-wrap:7") == LinearWrap(7)
        assert isinstance(parse_phase("cosine-cubic"), CosineCubic)
        assert parse_phase("linear:3").value(1.0) == pytest.approx(3.0)


@pytest.mark.parametrize("preset", ["g1", "g2"])
def test_verify_runtime(preset):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "gomboc", "verify", "--preset", preset],
                          capture_output=True, text=True)
    assert time.perf_counter() - t0 < 60
    assert proc.returncode in (0, 1)
    assert "is_gomboc" in proc.stdout
