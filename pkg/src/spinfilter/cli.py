"""Command-line interface: simulate | ensemble | check | reproduce.

Exit codes: 0 success, 1 validation error, 2 integration/ensemble
divergence, 3 property-test failure.  All CSVs carry a self-describing
header row and 17-significant-digit floats (round-trip exact for doubles);
run metadata (full serialized configuration, seeds) goes to a ``.meta.txt``
sidecar next to each CSV.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import checks
from .config import SimConfig, parse_config, serialize_config
from .ensemble import run_ensemble, submartingale_test
from .errors import ConfigError, EnsembleError, IntegrationDivergedError, SpinFilterError
from .operators import density_to_bloch
from .sde import simulate

_FLOAT_FMT = "{:.17g}"


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad usage; remap to 1 (validation)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _write_csv(path: Path, header, columns) -> None:
    """Write columns (same length) as CSV with 17-significant-digit floats."""
    columns = [np.asarray(c) for c in columns]
    n = columns[0].shape[0]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(_FLOAT_FMT.format(float(c[i])) for c in columns))
            fh.write("\n")


def _write_meta(path: Path, cfg: SimConfig, extra: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write("# run metadata\n")
        for key, val in (extra or {}).items():
            fh.write(f"{key} = {val}\n")
        fh.write("\n")
        fh.write(serialize_config(cfg))


def _load_config(args) -> SimConfig:
    text = Path(args.config).read_text()
    cfg = parse_config(text)
    return cfg.with_overrides(seed=args.seed, dt=args.dt, T=args.T)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    traj = simulate(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = ["t"] + list(cfg.metrics)
    columns = [traj.times] + [traj.metrics[m] for m in cfg.metrics]
    _write_csv(out / "trajectory.csv", header, columns)
    _write_meta(out / "trajectory.meta.txt", cfg, {"seed": cfg.seed})
    print(f"wrote {out / 'trajectory.csv'} "
          f"({traj.times.size} rows, {len(header)} columns)")
    return 0


def cmd_ensemble(args) -> int:
    cfg = _load_config(args)
    stats = run_ensemble(cfg, args.n_traj)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = {"time": [], "metric": [], "mean": [], "var": [],
            "q05": [], "q50": [], "q95": []}
    for metric in cfg.metrics:
        st = stats.stats[metric]
        for i, t in enumerate(stats.times):
            rows["time"].append(t)
            rows["metric"].append(metric)
            rows["mean"].append(st["mean"][i])
            rows["var"].append(st["var"][i])
            rows["q05"].append(st["q05"][i])
            rows["q50"].append(st["q50"][i])
            rows["q95"].append(st["q95"][i])
    path = out / "ensemble.csv"
    with open(path, "w") as fh:
        fh.write("time,metric,mean,var,q05,q50,q95\n")
        for i in range(len(rows["time"])):
            fh.write(_FLOAT_FMT.format(rows["time"][i]) + "," + rows["metric"][i])
            for key in ("mean", "var", "q05", "q50", "q95"):
                fh.write("," + _FLOAT_FMT.format(float(rows[key][i])))
            fh.write("\n")

    report_lines = [
        f"trajectories: {stats.n_traj} (kept {stats.n_kept}, "
        f"diverged {len(stats.diverged)})",
        f"base seed: {stats.base_seed}",
    ]
    if "fidelity" in stats.series:
        if stats.n_kept >= 100:
            report_lines.append(str(submartingale_test(stats.times,
                                                       stats.series["fidelity"])))
        else:
            report_lines.append(
                "submartingale test skipped (needs >= 100 trajectories)")
    counts = np.bincount(stats.terminal_class, minlength=cfg.N)
    report_lines.append("terminal classification (largest population): "
                        + ", ".join(f"n={n}: {c}" for n, c in enumerate(counts)))
    (out / "ensemble_report.txt").write_text("\n".join(report_lines) + "\n")
    _write_meta(out / "ensemble.meta.txt", cfg,
                {"n_traj": stats.n_traj, "base_seed": stats.base_seed})
    print(f"wrote {path} and ensemble_report.txt")
    return 0


def cmd_check(args) -> int:
    results = checks.run_all()
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, ok, detail in results:
        status = "ok" if ok else "FAIL"
        print(f"{name:<{width}}  {status:<4}  {detail}")
        failed += 0 if ok else 1
    print(f"\n{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 3


# --- figure reproductions ---------------------------------------------------

_FIG_SEED = 20240 + 1


def _fig1_config(dt, T) -> SimConfig:
    return parse_config(
        "model.kind = spin_half\n"
        "params.omega = 0.3\nparams.eta = 0.3\nparams.M = 1\n"
        "controller.kind = constant\ncontroller.c = 1\n"
        "initial.rho = basis:1\ninitial.rho_hat = basis:0\n"
        f"integrator.dt = {dt}\nintegrator.T = {T}\n"
        f"integrator.record_stride = {max(1, round(0.1 / dt))}\n"
        f"seed = {_FIG_SEED}\n")


def _fig34_config(law: str, dt, T) -> SimConfig:
    if law == "population":
        ctrl = ("controller.kind = population\ncontroller.alpha = 5\n"
                "controller.beta = 2\ncontroller.nbar = 0\n")
        init = "initial.rho = basis:2\ninitial.rho_hat = basis:1\n"
    else:
        ctrl = ("controller.kind = expectation\ncontroller.alpha = 2\n"
                "controller.beta = 2\ncontroller.nbar = 1\n")
        init = ("initial.rho = diag:0.2,0.2,0.6\n"
                "initial.rho_hat = diag:0.8,0.1,0.1\n")
    return parse_config(
        "model.kind = spin_j\nmodel.N = 3\n"
        "params.omega = 0.3\nparams.eta = 0.3\nparams.M = 1\n"
        + ctrl + init +
        f"integrator.dt = {dt}\nintegrator.T = {T}\n"
        f"integrator.record_stride = {max(1, round(0.1 / dt))}\n"
        f"seed = {_FIG_SEED}\n")


def _sample_columns(prefix: str, series: np.ndarray):
    """Header names and columns for the first 10 samples plus their mean."""
    n = series.shape[0]
    header = [f"{prefix}sample_{i + 1}" for i in range(n)] + [f"{prefix}mean"]
    cols = [series[i] for i in range(n)] + [np.mean(series, axis=0)]
    return header, cols


def cmd_reproduce(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dt = args.dt if args.dt is not None else 1e-3
    n_traj = args.n_traj if args.n_traj is not None else 10
    seed = args.seed

    if args.figure == "fig1":
        cfg = _fig1_config(dt, args.T if args.T is not None else 30.0)
        if seed is not None:
            cfg = cfg.with_overrides(seed=seed)
        stats = run_ensemble(cfg, n_traj, metrics=("fidelity",))
        header, cols = _sample_columns("", stats.series["fidelity"])
        _write_csv(out / "fig1.csv", ["t"] + header, [stats.times] + cols)
        _write_meta(out / "fig1.meta.txt", cfg,
                    {"n_traj": n_traj, "base_seed": stats.base_seed})
        print(f"wrote {out / 'fig1.csv'}")
        return 0

    if args.figure == "fig2":
        cfg = _fig1_config(dt, args.T if args.T is not None else 30.0)
        if seed is not None:
            cfg = cfg.with_overrides(seed=seed)
        traj = simulate(cfg)
        v = np.array([density_to_bloch(r) for r in traj.rhos])
        vh = np.array([density_to_bloch(r) for r in traj.rho_hats])
        _write_csv(out / "fig2.csv",
                   ["t", "x", "y", "z", "x_hat", "y_hat", "z_hat"],
                   [traj.times, v[:, 0], v[:, 1], v[:, 2],
                    vh[:, 0], vh[:, 1], vh[:, 2]])
        _write_meta(out / "fig2.meta.txt", cfg, {"seed": cfg.seed})
        print(f"wrote {out / 'fig2.csv'}")
        return 0

    if args.figure == "fig3":
        cfg = _fig34_config("population", dt, args.T if args.T is not None else 20.0)
        if seed is not None:
            cfg = cfg.with_overrides(seed=seed)
        stats = run_ensemble(cfg, n_traj, metrics=("v0", "bures_coupled"))
        eta_m = cfg.params.eta * cfg.params.M
        h1, c1 = _sample_columns("v0_", stats.series["v0"])
        h2, c2 = _sample_columns("db_", stats.series["bures_coupled"])
        refs = [np.exp(-eta_m * stats.times), np.exp(-eta_m / 2 * stats.times)]
        _write_csv(out / "fig3.csv",
                   ["t"] + h1 + h2 + ["ref_eta_m", "ref_eta_m_half"],
                   [stats.times] + c1 + c2 + refs)
        _write_meta(out / "fig3.meta.txt", cfg,
                    {"n_traj": n_traj, "base_seed": stats.base_seed})
        print(f"wrote {out / 'fig3.csv'}")
        return 0

    # fig4
    cfg = _fig34_config("expectation", dt, args.T if args.T is not None else 20.0)
    if seed is not None:
        cfg = cfg.with_overrides(seed=seed)
    stats = run_ensemble(cfg, n_traj, metrics=("v1",))
    eta_m = cfg.params.eta * cfg.params.M
    h1, c1 = _sample_columns("v1_", stats.series["v1"])
    _write_csv(out / "fig4.csv", ["t"] + h1 + ["ref_eta_m_half"],
               [stats.times] + c1 + [np.exp(-eta_m / 2 * stats.times)])
    _write_meta(out / "fig4.meta.txt", cfg,
                {"n_traj": n_traj, "base_seed": stats.base_seed})
    print(f"wrote {out / 'fig4.csv'}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="spinfilter",
                     description="Coupled stochastic master equation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--T", type=float, default=None)

    p_sim = sub.add_parser("simulate", help="run one trajectory, write CSV")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ens = sub.add_parser("ensemble", help="run an ensemble, write CSV + report")
    add_common(p_ens)
    p_ens.add_argument("--n-traj", type=int, default=100)
    p_ens.set_defaults(func=cmd_ensemble)

    p_chk = sub.add_parser("check", help="run the invariant suite")
    p_chk.set_defaults(func=cmd_check)

    p_rep = sub.add_parser("reproduce", help="write figure-experiment CSVs")
    p_rep.add_argument("figure", choices=("fig1", "fig2", "fig3", "fig4"))
    add_common(p_rep, config_required=False)
    p_rep.add_argument("--n-traj", type=int, default=None)
    p_rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("configuration invalid:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return 1
    except (IntegrationDivergedError, EnsembleError) as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 2
    except (OSError, SpinFilterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
