"""End-to-end CLI behaviour: CSV schemas, metadata sidecars, exit codes."""

import numpy as np
import pytest

from spinfilter.cli import main
from spinfilter.config import parse_config
from spinfilter.sde import simulate

CFG_TEXT = """
model.kind = spin_j
model.N = 3
params.omega = 0.3
params.eta = 0.5
controller.kind = population
controller.alpha = 5
controller.beta = 2
controller.nbar = 0
initial.rho = diag:0.2,0.2,0.6
initial.rho_hat = diag:0.8,0.1,0.1
integrator.dt = 1e-2
integrator.T = 2
integrator.record_stride = 10
seed = 101
"""


def _write_cfg(tmp_path, text=CFG_TEXT):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return path


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def _column(header, rows, name, convert=float):
    i = header.index(name)
    return np.array([convert(r[i]) for r in rows])


def test_simulate_csv_and_meta_round_trip(tmp_path, capsys):
    cfg_path = _write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert "trajectory.csv" in capsys.readouterr().out

    cfg = parse_config(CFG_TEXT)
    header, rows = _read_csv(out / "trajectory.csv")
    assert header == ["t"] + list(cfg.metrics)
    assert len(rows) == 21  # 200 steps / stride 10, plus t = 0

    # 17-significant-digit floats reproduce the doubles bit-for-bit
    traj = simulate(cfg)
    np.testing.assert_array_equal(_column(header, rows, "t"), traj.times)
    for m in cfg.metrics:
        np.testing.assert_array_equal(_column(header, rows, m), traj.metrics[m])

    meta = (out / "trajectory.meta.txt").read_text()
    assert "seed = 101" in meta
    serialized = meta.split("\n\n", 1)[1]
    assert parse_config(serialized) == cfg


def test_simulate_overrides_recorded(tmp_path):
    cfg_path = _write_cfg(tmp_path)
    out = tmp_path / "out"
    code = main(["simulate", "--config", str(cfg_path), "--out", str(out),
                 "--seed", "9", "--dt", "0.02", "--T", "1"])
    assert code == 0
    meta = (out / "trajectory.meta.txt").read_text()
    assert "seed = 9" in meta
    assert "integrator.dt = 0.02" in meta
    assert "integrator.T = 1" in meta
    header, rows = _read_csv(out / "trajectory.csv")
    assert _column(header, rows, "t")[-1] == pytest.approx(1.0)


def test_ensemble_csv_and_report(tmp_path):
    cfg_path = _write_cfg(tmp_path)
    out = tmp_path / "out"
    code = main(["ensemble", "--config", str(cfg_path), "--out", str(out),
                 "--n-traj", "5"])
    assert code == 0
    header, rows = _read_csv(out / "ensemble.csv")
    assert header == ["time", "metric", "mean", "var", "q05", "q50", "q95"]
    cfg = parse_config(CFG_TEXT)
    assert len(rows) == len(cfg.metrics) * 21
    metrics_seen = {r[1] for r in rows}
    assert metrics_seen == set(cfg.metrics)
    report = (out / "ensemble_report.txt").read_text()
    assert "trajectories: 5 (kept 5, diverged 0)" in report
    assert "skipped" in report  # submartingale check needs >= 100 members
    assert "terminal classification" in report
    meta = (out / "ensemble.meta.txt").read_text()
    assert "n_traj = 5" in meta and "base_seed = 101" in meta


def test_check_command_passes(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    assert "checks passed" in out
    assert "FAIL" not in out


def test_reproduce_fig1_schema(tmp_path):
    out = tmp_path / "fig"
    code = main(["reproduce", "fig1", "--out", str(out), "--T", "2", "--dt", "0.01"])
    assert code == 0
    header, rows = _read_csv(out / "fig1.csv")
    assert header == ["t"] + [f"sample_{i}" for i in range(1, 11)] + ["mean"]
    samples = np.array([[float(v) for v in r[1:11]] for r in rows])
    mean = _column(header, rows, "mean")
    np.testing.assert_allclose(samples.mean(axis=1), mean, atol=1e-15)
    assert np.all((samples >= 0) & (samples <= 1 + 1e-12))
    meta = (out / "fig1.meta.txt").read_text()
    assert "model.kind = spin_half" in meta
    assert "params.eta = 0.29999999999999999" in meta


def test_reproduce_fig2_schema(tmp_path):
    out = tmp_path / "fig"
    code = main(["reproduce", "fig2", "--out", str(out), "--T", "1", "--dt", "0.01"])
    assert code == 0
    header, rows = _read_csv(out / "fig2.csv")
    assert header == ["t", "x", "y", "z", "x_hat", "y_hat", "z_hat"]
    v = np.array([[float(x) for x in r[1:4]] for r in rows])
    assert np.all(np.linalg.norm(v, axis=1) <= 1 + 1e-9)


def test_reproduce_fig3_reference_curves(tmp_path):
    out = tmp_path / "fig"
    code = main(["reproduce", "fig3", "--out", str(out), "--T", "2",
                 "--dt", "0.01", "--n-traj", "3"])
    assert code == 0
    header, rows = _read_csv(out / "fig3.csv")
    expected = (["t"] + [f"v0_sample_{i}" for i in (1, 2, 3)] + ["v0_mean"]
                + [f"db_sample_{i}" for i in (1, 2, 3)] + ["db_mean"]
                + ["ref_eta_m", "ref_eta_m_half"])
    assert header == expected
    t = _column(header, rows, "t")
    np.testing.assert_allclose(_column(header, rows, "ref_eta_m"),
                               np.exp(-0.3 * t), atol=1e-12)
    np.testing.assert_allclose(_column(header, rows, "ref_eta_m_half"),
                               np.exp(-0.15 * t), atol=1e-12)


def test_reproduce_fig4_reference_curve(tmp_path):
    out = tmp_path / "fig"
    code = main(["reproduce", "fig4", "--out", str(out), "--T", "2",
                 "--dt", "0.01", "--n-traj", "2"])
    assert code == 0
    header, rows = _read_csv(out / "fig4.csv")
    assert header == ["t", "v1_sample_1", "v1_sample_2", "v1_mean",
                      "ref_eta_m_half"]
    t = _column(header, rows, "t")
    np.testing.assert_allclose(_column(header, rows, "ref_eta_m_half"),
                               np.exp(-0.15 * t), atol=1e-12)
    meta = (out / "fig4.meta.txt").read_text()
    assert "controller.kind = expectation" in meta
    cfg = parse_config(meta.split("\n\n", 1)[1])
    assert cfg.initial_rho.values == pytest.approx((0.2, 0.2, 0.6))
    assert cfg.controller.nbar == 1


def test_exit_code_1_on_invalid_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("params.eta = 3\nmodel.N = 1\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "configuration invalid" in err
    assert "eta" in err


def test_exit_code_1_on_missing_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path)]) == 1


def test_exit_code_1_on_bad_usage(capsys):
    assert main(["simulate"]) == 1  # --config is required
    assert main(["frobnicate"]) == 1
    assert main(["reproduce", "fig9"]) == 1
    capsys.readouterr()


def test_exit_code_2_on_divergence(tmp_path, capsys):
    blow = tmp_path / "blow.cfg"
    blow.write_text("model.kind = spin_half\n"
                    "controller.kind = constant\ncontroller.c = 1e4\n"
                    "integrator.dt = 1e-2\nintegrator.T = 5\nseed = 3\n")
    assert main(["simulate", "--config", str(blow), "--out", str(tmp_path)]) == 2
    assert "divergence" in capsys.readouterr().err
