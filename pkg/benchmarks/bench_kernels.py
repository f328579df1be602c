"""Benchmark the compiled stepping kernel against the NumPy fallback.

Usage::

    python benchmarks/bench_kernels.py [--n-traj 64] [--repeat 3]

Reports wall time per backend for (a) a single long trajectory and (b) a
batch of trajectories, at several Hilbert-space dimensions.  The compiled
kernel advances one trajectory at a time; the fallback amortizes Python
overhead by stepping the whole batch through vectorized NumPy ops, so the
gap narrows as the batch grows.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import spinfilter as sf
from spinfilter import backend


def _config(N: int, T: float) -> sf.SimConfig:
    kind = "spin_half" if N == 2 else "spin_j"
    model = f"model.kind = {kind}\n" if N == 2 else f"model.kind = spin_j\nmodel.N = {N}\n"
    return sf.parse_config(
        model
        + "params.omega = 0.3\nparams.eta = 0.3\nparams.M = 1\n"
        "controller.kind = population\ncontroller.alpha = 5\n"
        "controller.beta = 2\ncontroller.nbar = 0\n"
        "initial.rho = maximally_mixed\n"
        f"initial.rho_hat = basis:{N - 1}\n"
        f"integrator.dt = 1e-3\nintegrator.T = {T}\n"
        "integrator.record_stride = 100\nseed = 7\n")


def _time(fn, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-traj", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--T", type=float, default=5.0)
    args = ap.parse_args()

    if "compiled" not in backend.available_backends():
        raise SystemExit("compiled backend not built; nothing to compare")

    print(f"{'case':<28}{'compiled':>12}{'python':>12}{'speedup':>10}")
    for N in (2, 3, 5):
        cfg = _config(N, args.T)
        times = {}
        for name in ("compiled", "python"):
            backend.set_backend(name)
            times[name] = _time(lambda: sf.simulate(cfg), args.repeat)
        print(f"{f'single traj N={N}':<28}{times['compiled']:>10.3f}s"
              f"{times['python']:>10.3f}s"
              f"{times['python'] / times['compiled']:>9.1f}x")

        for name in ("compiled", "python"):
            backend.set_backend(name)
            times[name] = _time(
                lambda: sf.run_ensemble(cfg, args.n_traj, metrics=("fidelity",)),
                args.repeat)
        print(f"{f'batch x{args.n_traj} N={N}':<28}{times['compiled']:>10.3f}s"
              f"{times['python']:>10.3f}s"
              f"{times['python'] / times['compiled']:>9.1f}x")
    backend.set_backend("compiled")


if __name__ == "__main__":
    main()
