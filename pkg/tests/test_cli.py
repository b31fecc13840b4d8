import json
from pathlib import Path

import numpy as np

from netsteer.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


def test_analyze_writes_report(tmp_path, capsys):
    code = run_cli("analyze", "--config", CONFIG_DIR / "integrator.json", "--out", tmp_path)
    assert code == 0
    report_path = tmp_path / "integrator-report.json"
    assert report_path.is_file()
    report = json.loads(report_path.read_text())
    assert report["controllable"] is True
    assert report["kalman_rank"] == 1
    assert report["steering"] is None
    out = capsys.readouterr().out
    assert "controllable: yes" in out
    assert "report:" in out


def test_analyze_report_is_deterministic(tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    for out_dir in (first, second):
        assert run_cli("analyze", "--config", CONFIG_DIR / "coupled_sine.json", "--out", out_dir) == 0
    assert (first / "coupled-report.json").read_bytes() == (second / "coupled-report.json").read_bytes()


def test_analyze_quadrature_check_flag(tmp_path):
    assert (
        run_cli(
            "analyze",
            "--config",
            CONFIG_DIR / "integrator.json",
            "--out",
            tmp_path,
            "--quadrature-check",
        )
        == 0
    )
    report = json.loads((tmp_path / "integrator-report.json").read_text())
    assert report["quadrature_drift"] is not None
    assert report["quadrature_drift"] < 1e-6


def test_steer_integrator_outputs(tmp_path, capsys):
    code = run_cli("steer", "--config", CONFIG_DIR / "integrator.json", "--out", tmp_path)
    assert code == 0
    header, traj = read_csv(tmp_path / "integrator-trajectory.csv")
    assert header == ["time", "x1"]
    assert traj.shape == (201, 2)
    assert traj[0, 0] == 0.0 and traj[0, 1] == 0.0
    assert abs(traj[-1, 0] - 1.0) < 1e-12
    assert abs(traj[-1, 1] - 1.0) < 1e-6
    # the minimum-energy control for a scalar integrator over a unit
    # horizon is the constant 1, so the trajectory is the line x = t
    header, ctrl = read_csv(tmp_path / "integrator-control.csv")
    assert header == ["time", "u1"]
    assert np.max(np.abs(ctrl[:, 1] - 1.0)) < 1e-6
    assert np.max(np.abs(traj[:, 1] - traj[:, 0])) < 1e-6
    out = capsys.readouterr().out
    assert "steering converged" in out
    assert "trajectory:" in out
    assert "control:" in out


def test_steer_double_integrator_control_matches_closed_form(tmp_path):
    code = run_cli("steer", "--config", CONFIG_DIR / "double_integrator.json", "--out", tmp_path)
    assert code == 0
    _, ctrl = read_csv(tmp_path / "control.csv")
    expected = 12.0 * (1.0 - ctrl[:, 0]) - 6.0
    assert np.max(np.abs(ctrl[:, 1] - expected)) < 1e-6
    _, traj = read_csv(tmp_path / "trajectory.csv")
    assert np.max(np.abs(traj[-1, 1:] - np.array([1.0, 0.0]))) < 1e-9


def test_steer_writes_plot_data(tmp_path):
    assert run_cli("steer", "--config", CONFIG_DIR / "double_integrator.json", "--out", tmp_path) == 0
    plots = tmp_path / "plots"
    for name in ("states.dat", "controls.dat", "deltas.dat"):
        assert (plots / name).is_file()
    states_lines = (plots / "states.dat").read_text().strip().splitlines()
    assert states_lines[0].startswith("# ")
    assert len(states_lines) == 1 + 201
    deltas_lines = (plots / "deltas.dat").read_text().strip().splitlines()
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(deltas_lines) == 1 + report["steering"]["iterations"]


def test_steer_uncontrollable_is_verdict_not_error(tmp_path, capsys):
    cfg = json.loads((CONFIG_DIR / "integrator.json").read_text())
    cfg["topology"]["delta"] = [0]
    cfg_path = tmp_path / "off.json"
    cfg_path.write_text(json.dumps(cfg))
    code = run_cli("steer", "--config", cfg_path, "--out", tmp_path / "out")
    assert code == 0
    out = capsys.readouterr().out
    assert "controllable: no" in out
    assert "no trajectory written" in out
    report = json.loads((tmp_path / "out" / "integrator-report.json").read_text())
    assert report["controllable"] is False
    assert not (tmp_path / "out" / "integrator-trajectory.csv").exists()


def test_malformed_json_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code = run_cli("analyze", "--config", bad)
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_missing_config_file_exits_1(tmp_path, capsys):
    code = run_cli("analyze", "--config", tmp_path / "absent.json")
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_schema_violation_exits_1(tmp_path, capsys):
    cfg = json.loads((CONFIG_DIR / "integrator.json").read_text())
    cfg["horizon"]["K"] = 7
    cfg_path = tmp_path / "odd.json"
    cfg_path.write_text(json.dumps(cfg))
    code = run_cli("analyze", "--config", cfg_path)
    assert code == 1
    err = capsys.readouterr().err
    assert "horizon" in err
    assert "even" in err


def test_dimension_mismatch_exits_2(tmp_path, capsys):
    cfg = json.loads((CONFIG_DIR / "integrator.json").read_text())
    cfg["steering"]["x0"] = [0.0, 0.0]
    cfg_path = tmp_path / "dims.json"
    cfg_path.write_text(json.dumps(cfg))
    code = run_cli("steer", "--config", cfg_path, "--out", tmp_path)
    assert code == 2
    err = capsys.readouterr().err
    assert "validation failed" in err
    assert "x0" in err


def test_missing_argument_exits_1(capsys):
    assert run_cli("analyze") == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_subcommand_exits_1(capsys):
    assert run_cli("frobnicate") == 1
    capsys.readouterr()


def test_version_flag_exits_0(capsys):
    assert run_cli("--version") == 0
    assert "netsteer" in capsys.readouterr().out


def test_dump_config_round_trips(tmp_path, capsys):
    assert run_cli("dump-config", "--config", CONFIG_DIR / "integrator.json") == 0
    first = capsys.readouterr().out
    normalized = json.loads(first)
    assert normalized["horizon"]["K"] == 200
    assert normalized["outputs"]["report"] == "integrator-report.json"
    cfg_path = tmp_path / "normalized.json"
    cfg_path.write_text(first)
    assert run_cli("dump-config", "--config", cfg_path) == 0
    second = capsys.readouterr().out
    assert second == first


def test_dump_config_to_directory(tmp_path):
    assert run_cli("dump-config", "--config", CONFIG_DIR / "integrator.json", "--out", tmp_path) == 0
    dumped = json.loads((tmp_path / "config.json").read_text())
    assert dumped["nodes"][0]["A"] == [[0.0]]


def test_check_contraction_writes_report(tmp_path, capsys):
    code = run_cli(
        "check-contraction",
        "--config",
        CONFIG_DIR / "coupled_sine.json",
        "--out",
        tmp_path,
        "--pairs",
        "20",
        "--seed",
        "5",
    )
    assert code == 0
    report = json.loads((tmp_path / "contraction.json").read_text())
    assert report["pairs"] == 20
    assert report["seed"] == 5
    assert report["within_bound"] is True
    assert report["max_ratio_sup"] <= 1.05 * report["m"]
    assert "bound M" in capsys.readouterr().out


def test_check_contraction_stdout_is_json(capsys):
    code = run_cli("check-contraction", "--config", CONFIG_DIR / "coupled_sine.json", "--pairs", "5")
    assert code == 0
    out = capsys.readouterr().out
    body, verdict = out.rsplit("\n", 2)[0], out.rsplit("\n", 2)[1]
    report = json.loads(body)
    assert report["pairs"] == 5
    assert "bound M" in verdict
