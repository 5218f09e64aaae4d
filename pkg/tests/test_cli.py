import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravelast.cli import main
from gravelast.io import (
    fmt,
    parse_model_spec,
    read_config,
    read_float_columns,
    sha256_of,
)


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def solved_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("solved") / "run"
    code = run("solve", "--model", "builtin:kappa=3100", "--mu", "0",
               "--G", "1", "--N", "128", "--out", out)
    assert code == 0
    return out


class TestSolve:
    def test_happy_path_files(self, solved_dir):
        assert (solved_dir / "profile.csv").exists()
        assert (solved_dir / "manifest.json").exists()
        manifest = json.loads((solved_dir / "manifest.json").read_text())
        assert manifest["model"] == "builtin:kappa=3100"
        assert manifest["files"]["profile.csv"]["sha256"] == sha256_of(
            solved_dir / "profile.csv"
        )
        assert abs(manifest["results"]["boundary_residual"]) <= 1e-10

    def test_profile_columns_and_header(self, solved_dir):
        text = (solved_dir / "profile.csv").read_text().splitlines()
        assert text[0].startswith("# units:")
        assert text[1] == "R,zeta,f,fprime,lambda,y,c1,c2,rho_t0"
        assert len(text) == 2 + 129

    def test_mu_outside_range(self, tmp_path, capsys):
        code = run("solve", "--mu", "1.0", "--N", "64", "--out", tmp_path / "x")
        assert code == 3
        assert "mu outside proven range" in capsys.readouterr().err

    def test_odd_grid_rejected(self, tmp_path):
        assert run("solve", "--N", "15", "--out", tmp_path / "x") == 2

    def test_reproducible_hashes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("solve", "--N", "64", "--out", a) == 0
        assert run("solve", "--N", "64", "--out", b) == 0
        assert sha256_of(a / "profile.csv") == sha256_of(b / "profile.csv")

    def test_round_trip_exact(self, solved_dir):
        cols = read_float_columns(solved_dir / "profile.csv", ("R", "f", "zeta"))
        n = 128
        grid = np.arange(n + 1) / n
        assert np.array_equal(cols["R"], grid)
        assert abs(cols["f"][-1] - 1.0) <= 1e-15

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("model = builtin:kappa=3100\nN = 64\nG = 1.0\n")
        out = tmp_path / "cfgrun"
        assert run("solve", "--config", cfg, "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["N"] == 64

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("N = 64\n")
        out = tmp_path / "ovr"
        assert run("solve", "--config", cfg, "--N", "96", "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["N"] == 96

    def test_config_supplies_mu(self, tmp_path):
        cfg = tmp_path / "mu.cfg"
        cfg.write_text("mu = 5e-4\nN = 64\n")
        out = tmp_path / "cfgmu"
        assert run("solve", "--config", cfg, "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["mu"] == 5e-4

    def test_boundary_tolerance_flag(self, tmp_path):
        out = tmp_path / "loose"
        assert run("solve", "--N", "64", "--tol-bc", "1e-6", "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["tolerances"]["bc"] == 1e-6
        assert abs(manifest["results"]["boundary_residual"]) <= 1e-6

    def test_version_flag(self, capsys):
        assert run("--version") == 0
        assert "gravelast" in capsys.readouterr().out


class TestSweep:
    def test_five_rows(self, tmp_path):
        out = tmp_path / "sw"
        code = run("sweep", "--mu-min", "-1e-3", "--mu-max", "1e-3",
                   "--steps", "5", "--N", "64", "--out", out)
        assert code == 0
        rows = (out / "sweep.csv").read_text().splitlines()
        assert len(rows) == 2 + 5

    def test_middle_row_matches_solve(self, tmp_path):
        out_sw = tmp_path / "sw"
        out_sv = tmp_path / "sv"
        run("sweep", "--mu-min", "-1e-3", "--mu-max", "1e-3",
            "--steps", "5", "--N", "64", "--out", out_sw)
        run("solve", "--mu", "0", "--N", "64", "--out", out_sv)
        rows = (out_sw / "sweep.csv").read_text().splitlines()
        middle = rows[2 + 2].split(",")
        manifest = json.loads((out_sv / "manifest.json").read_text())
        assert float(middle[0]) == 0.0
        assert float(middle[1]) == manifest["results"]["brho0"]
        assert float(middle[2]) == manifest["results"]["y1"]

    def test_zero_steps(self, tmp_path):
        out = tmp_path / "sw0"
        code = run("sweep", "--mu-min", "0", "--mu-max", "0", "--steps", "0",
                   "--N", "64", "--out", out)
        assert code == 0
        rows = (out / "sweep.csv").read_text().splitlines()
        assert len(rows) == 2

    def test_all_rows_failing(self, tmp_path):
        code = run("sweep", "--mu-min", "0.1", "--mu-max", "0.2", "--steps", "2",
                   "--N", "64", "--out", tmp_path / "swbad")
        assert code == 4

    def test_jobs_flag_deterministic(self, tmp_path):
        outs = []
        for name, jobs in (("j1", "1"), ("j3", "3")):
            out = tmp_path / name
            assert run("sweep", "--mu-min", "-1e-3", "--mu-max", "1e-3",
                       "--steps", "3", "--N", "64", "--jobs", jobs,
                       "--out", out) == 0
            outs.append(sha256_of(out / "sweep.csv"))
        assert outs[0] == outs[1]


class TestEvolve:
    def test_stationary(self, tmp_path):
        out = tmp_path / "ev"
        assert run("evolve", "--mu", "0", "--qdot0", "0", "--t-end", "1",
                   "--out", out) == 0
        cols = read_float_columns(out / "temporal.csv", ("t", "q"))
        assert np.all(cols["q"] == 1.0)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["results"]["regime"] == "stationary"

    def test_collapsing_manifest(self, tmp_path):
        out = tmp_path / "evc"
        assert run("evolve", "--mu", "-0.0008", "--qdot0", "-0.04",
                   "--t-end", "20", "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["results"]["regime"] == "collapsing"
        assert manifest["results"]["collapse"]["T"] == pytest.approx(
            50.0 / 3.0, rel=1e-6
        )

    def test_negative_t_end(self, tmp_path):
        assert run("evolve", "--mu", "0", "--qdot0", "0", "--t-end", "-1",
                   "--out", tmp_path / "x") == 2

    def test_snapshots_from_profile(self, tmp_path, solved_dir):
        out = tmp_path / "evs"
        code = run("evolve", "--profile", solved_dir, "--qdot0", "0.5",
                   "--t-end", "2", "--dt", "0.01",
                   "--snapshot-times", "0,2", "--out", out)
        assert code == 0
        snap = read_float_columns(out / "snapshot_001.csv", ("R", "phi", "u", "rho"))
        manifest = json.loads((out / "manifest.json").read_text())
        solved = json.loads((solved_dir / "manifest.json").read_text())["results"]
        # rho(0) = brho0 / (q^3 fprime0^3) at q = 2
        expected = solved["brho0"] / (8.0 * solved["fprime0"] ** 3)
        assert snap["rho"][0] == pytest.approx(expected, rel=1e-10)
        assert manifest["results"]["snapshots"]["snapshot_001.csv"][
            "mass"
        ] == pytest.approx(4 * math.pi / 3 * solved["brho0"], rel=1e-9)

    def test_mu_conflict_with_profile(self, tmp_path, solved_dir):
        assert run("evolve", "--profile", solved_dir, "--mu", "1e-4",
                   "--t-end", "1", "--out", tmp_path / "x") == 2

    def test_snapshots_with_inline_solve(self, tmp_path):
        out = tmp_path / "evi"
        code = run("evolve", "--mu", "0", "--qdot0", "0", "--t-end", "1",
                   "--N", "64", "--snapshot-times", "0.5", "--out", out)
        assert code == 0
        assert (out / "snapshot_000.csv").exists()
        snap = read_float_columns(out / "snapshot_000.csv", ("R", "rho"))
        assert np.all(snap["rho"] > 0)


class TestVerify:
    def test_fresh_solve_passes(self, tmp_path, solved_dir):
        out = tmp_path / "ver"
        assert run("verify", "--profile", solved_dir, "--out", out) == 0
        report = (out / "report.txt").read_text()
        assert "verdict = pass" in report

    def test_scaled_f_column_fails(self, tmp_path, solved_dir):
        broken = tmp_path / "broken"
        broken.mkdir()
        (broken / "manifest.json").write_text(
            (solved_dir / "manifest.json").read_text()
        )
        lines = (solved_dir / "profile.csv").read_text().splitlines()
        head, rows = lines[:2], lines[2:]
        out_rows = []
        for row in rows:
            parts = row.split(",")
            parts[2] = fmt(1.01 * float(parts[2]))
            out_rows.append(",".join(parts))
        (broken / "profile.csv").write_text("\n".join(head + out_rows) + "\n")
        assert run("verify", "--profile", broken, "--out", tmp_path / "vb") == 5

    def test_missing_manifest(self, tmp_path, solved_dir):
        partial = tmp_path / "partial"
        partial.mkdir()
        (partial / "profile.csv").write_text((solved_dir / "profile.csv").read_text())
        assert run("verify", "--profile", partial, "--out", tmp_path / "vm") == 2

    def test_missing_directory(self, tmp_path):
        assert run("verify", "--profile", tmp_path / "nope",
                   "--out", tmp_path / "vn") == 2

    def test_corrupt_manifest_n(self, tmp_path, solved_dir):
        broken = tmp_path / "badn"
        broken.mkdir()
        manifest = json.loads((solved_dir / "manifest.json").read_text())
        manifest["N"] = 15
        (broken / "manifest.json").write_text(json.dumps(manifest))
        (broken / "profile.csv").write_text((solved_dir / "profile.csv").read_text())
        assert run("verify", "--profile", broken, "--out", tmp_path / "vbn") == 2

    def test_corrupt_zeta_column_fails(self, tmp_path, solved_dir):
        broken = tmp_path / "zbroken"
        broken.mkdir()
        (broken / "manifest.json").write_text(
            (solved_dir / "manifest.json").read_text()
        )
        lines = (solved_dir / "profile.csv").read_text().splitlines()
        head, rows = lines[:2], lines[2:]
        out_rows = []
        for row in rows:
            parts = row.split(",")
            parts[1] = fmt(float(parts[1]) + 1e-4)  # columns stay consistent
            out_rows.append(",".join(parts))
        (broken / "profile.csv").write_text("\n".join(head + out_rows) + "\n")
        assert run("verify", "--profile", broken, "--out", tmp_path / "vz") == 5


class TestIoHelpers:
    def test_parse_model_spec(self):
        m = parse_model_spec("builtin:kappa=3100")
        assert m.kappa == 3100.0
        for bad in ("builtin", "builtin:k=1", "poly:kappa=1", "builtin:kappa=x"):
            with pytest.raises(ValueError):
                parse_model_spec(bad)

    def test_read_config_comments(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("# comment\nN = 64  # trailing\n\nmodel = builtin:kappa=1\n")
        cfg = read_config(p)
        assert cfg == {"N": "64", "model": "builtin:kappa=1"}

    @settings(max_examples=200, deadline=None)
    @given(x=st.floats(allow_nan=False, allow_infinity=False))
    def test_fmt_round_trips(self, x):
        assert float(fmt(x)) == x
