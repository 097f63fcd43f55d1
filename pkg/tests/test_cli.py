import json

import numpy as np
import pytest

from gaussbounds.cli import main
from gaussbounds.models import dump_jet, load_jet

from conftest import random_jet


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBoundsCommand:
    def test_phase_loss_coherent_json(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "bounds",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0",
            "--at", "phi=0,eta=0.5",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["CH"] == pytest.approx(2.0 / 0.09, rel=1e-4)
        assert payload["CS"] == pytest.approx(1.0 / 0.09, rel=1e-4)
        assert payload["status"] == "optimal"

    def test_disp_squeeze_table(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "bounds",
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0,alpha_im=0,r=0",
            "--format", "table",
        )
        assert code == 0
        chbar = [ln for ln in out.splitlines() if ln.startswith("CHbar")][0]
        assert float(chbar.split()[1]) == pytest.approx(1.8125, rel=1e-6)

    def test_identity_weight_default(self, capsys):
        # omitted --weight behaves exactly like an explicit identity file
        code, out, _ = run_cli(
            capsys,
            "bounds",
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0.1,alpha_im=0,r=0.2",
        )
        assert code == 0

    def test_explicit_weight_file(self, capsys, tmp_path):
        wpath = tmp_path / "w.json"
        wpath.write_text(json.dumps(np.diag([1.0, 2.0]).tolist()))
        code, out, _ = run_cli(
            capsys,
            "bounds",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0",
            "--at", "phi=0,eta=0.5",
            "--weight", str(wpath),
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["CS"] == pytest.approx(3.0 / (2.0 * 0.09), rel=1e-4)

    def test_dump_jet_round_trips(self, capsys, tmp_path):
        path = tmp_path / "jet.json"
        code, _, _ = run_cli(
            capsys,
            "bounds",
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0.1,alpha_im=0.2,r=0.3",
            "--dump-jet", str(path),
        )
        assert code == 0
        jet = load_jet(path)
        assert jet.modes == 1 and jet.p == 3
        assert jet.names == ("alpha_re", "alpha_im", "r")

    def test_jet_file_input(self, capsys, tmp_path, rng):
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=2), path)
        code, out, _ = run_cli(capsys, "bounds", "--jet", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["chain_ok"] is True

    def test_model_and_jet_mutually_exclusive(self, capsys, tmp_path, rng):
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=1), path)
        code, _, err = run_cli(
            capsys, "bounds", "--model", "phase-loss", "--jet", str(path)
        )
        assert code == 1
        assert "exactly one" in err

    def test_missing_parameter_assignment(self, capsys):
        code, _, err = run_cli(
            capsys,
            "bounds",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0",
            "--at", "phi=0",
        )
        assert code == 1
        assert "eta" in err

    def test_unknown_at_name(self, capsys):
        code, _, err = run_cli(
            capsys,
            "bounds",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0",
            "--at", "phi=0,eta=0.5,zeta=1",
        )
        assert code == 1
        assert "zeta" in err

    def test_malformed_assignment(self, capsys):
        code, _, err = run_cli(
            capsys,
            "bounds",
            "--model", "phase-loss",
            "--fixed", "alpha_re:0.3",
            "--at", "phi=0,eta=0.5",
        )
        assert code == 1
        assert "name=value" in err


class TestSweepCommand:
    def test_two_point_sweep(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "sweep",
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0,alpha_im=0",
            "--axis", "r:0.1:0.5:2",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "theta,CS,CR,CHbar,CH,R,status"
        assert len(lines) == 3

    def test_output_is_deterministic(self, capsys):
        argv = [
            "sweep",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0.2",
            "--at", "phi=0",
            "--axis", "eta:0.3:0.7:3",
        ]
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second

    def test_jobs_preserve_order(self, capsys):
        argv_tail = [
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0.1,alpha_im=0",
            "--axis", "r:0.1:0.9:4",
        ]
        _, serial, _ = run_cli(capsys, "sweep", *argv_tail)
        _, parallel, _ = run_cli(capsys, "sweep", *argv_tail, "--jobs", "3")
        assert serial == parallel

    def test_csv_file_and_svg(self, capsys, tmp_path):
        csv_path = tmp_path / "out.csv"
        svg_path = tmp_path / "out.svg"
        code, _, _ = run_cli(
            capsys,
            "sweep",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0.2",
            "--at", "phi=0",
            "--axis", "eta:0.2:0.8:3",
            "--out", str(csv_path),
            "--svg", str(svg_path),
        )
        assert code == 0
        rows = csv_path.read_text().strip().splitlines()
        assert len(rows) == 4
        svg = svg_path.read_text()
        assert svg.startswith("<svg") and "polyline" in svg
        import xml.etree.ElementTree as ET

        ET.fromstring(svg)

    def test_axis_validation(self, capsys):
        code, _, err = run_cli(
            capsys,
            "sweep",
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0,alpha_im=0",
            "--axis", "r:0:1:1",
        )
        assert code == 1 and "at least 2" in err

    def test_unknown_axis(self, capsys):
        code, _, err = run_cli(
            capsys,
            "sweep",
            "--model", "disp-squeeze-1",
            "--fixed", "n=0.5",
            "--at", "alpha_re=0,alpha_im=0",
            "--axis", "zeta:0:1:3",
        )
        assert code == 1 and "zeta" in err

    def test_sweep_requires_model(self, capsys, tmp_path, rng):
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=1), path)
        code, _, err = run_cli(capsys, "sweep", "--jet", str(path), "--axis", "a:0:1:2")
        assert code == 1 and "requires --model" in err


class TestCheckCommand:
    def test_jet_file_check_passes(self, capsys, tmp_path, rng):
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=2), path)
        code, out, _ = run_cli(capsys, "check", "--jet", str(path))
        assert code == 0
        assert "passed" in out

    def test_tampered_jet_file(self, capsys, tmp_path, rng):
        path = tmp_path / "jet.json"
        jet = random_jet(rng, m=1, p=1)
        data = json.loads(json.dumps(__import__("gaussbounds.models", fromlist=["jet_to_dict"]).jet_to_dict(jet)))
        data["dsigma"][0][0][1] += 0.5  # break the symmetry
        path.write_text(json.dumps(data))
        code, _, err = run_cli(capsys, "check", "--jet", str(path))
        assert code == 1
        assert "asymmetric" in err

    def test_unphysical_jet_file(self, capsys, tmp_path):
        path = tmp_path / "jet.json"
        payload = {
            "modes": 1,
            "params": ["a"],
            "d": [0.0, 0.0],
            "sigma": [[1.0, 0.0], [0.0, 0.5]],
            "dd": [[1.0, 0.0]],
            "dsigma": [[[0.0, 0.0], [0.0, 0.0]]],
        }
        path.write_text(json.dumps(payload))
        code, _, err = run_cli(capsys, "check", "--jet", str(path))
        assert code == 1
        assert "uncertainty" in err


class TestOptions:
    def test_solver_tol_env_override(self, capsys, monkeypatch, rng, tmp_path):
        calls = {}
        from gaussbounds import report as report_mod
        from gaussbounds.sdp import solve_hcrb as real_solve

        def spy(jet, w, options=None):
            calls["tol"] = options.solver_tol
            return real_solve(jet, w, options)

        monkeypatch.setattr(report_mod, "solve_hcrb", spy)
        monkeypatch.setenv("GAUSSBOUNDS_SOLVER_TOL", "1e-7")
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=1), path)
        code, _, _ = run_cli(capsys, "bounds", "--jet", str(path))
        assert code == 0
        assert calls["tol"] == 1e-7

    def test_extrapolate_flag(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "bounds",
            "--model", "phase-loss",
            "--fixed", "alpha_re=0.3,alpha_im=0,r=0",
            "--at", "phi=0,eta=0.5",
            "--extrapolate",
        )
        assert code == 0
        payload = json.loads(out)
        # extrapolation lands closer to the analytic value than single-eps
        assert abs(payload["CH"] - 2.0 / 0.09) < 1e-6 * (2.0 / 0.09)


class TestExitCodes:
    def test_solver_error_maps_to_one(self, capsys, monkeypatch, rng, tmp_path):
        from gaussbounds import report as report_mod
        from gaussbounds.sdp import HcrbSolution, BoundKind, SolveStatus

        def fake_solve(jet, w, options=None):
            return HcrbSolution(
                value=float("nan"),
                kind=BoundKind.HOLEVO,
                status=SolveStatus.SOLVER_ERROR,
                v_opt=None,
                x_opt=None,
                gap=float("nan"),
                epsilon=0.0,
                solver_tol=1e-9,
            )

        monkeypatch.setattr(report_mod, "solve_hcrb", fake_solve)
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=1), path)
        code, _, _ = run_cli(capsys, "bounds", "--jet", str(path))
        assert code == 1

    def test_inaccurate_maps_to_two(self, capsys, monkeypatch, rng, tmp_path):
        from gaussbounds import report as report_mod
        from gaussbounds.sdp import solve_hcrb as real_solve
        from dataclasses import replace

        def degraded(jet, w, options=None):
            sol = real_solve(jet, w, options)
            return replace(sol, status=__import__("gaussbounds.sdp", fromlist=["SolveStatus"]).SolveStatus.INACCURATE)

        monkeypatch.setattr(report_mod, "solve_hcrb", degraded)
        path = tmp_path / "jet.json"
        dump_jet(random_jet(rng, m=1, p=1), path)
        code, _, _ = run_cli(capsys, "bounds", "--jet", str(path))
        assert code == 2
