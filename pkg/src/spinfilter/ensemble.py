"""Monte-Carlo trajectory ensembles, rate fits, and hypothesis checks.

Trajectory i always uses seed ``base_seed + i``, so ensembles are
reproducible and disjoint seed ranges are independent.  Aggregation uses
``np.mean``/``np.quantile`` over the per-trajectory metric series (NumPy's
pairwise summation bounds the floating-point error of the mean) and is
independent of execution order.  Diverged trajectories are excluded from the
statistics and reported; more than 10% of them aborts the ensemble.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .config import SimConfig
from .errors import EnsembleError, InsufficientDataError
from .metrics import METRIC_NAMES
from .sde import _CTRL_CODE, compute_metric_series, generate_wiener, make_operators
from .operators import check_density_matrix

#: Ensemble fraction of diverged trajectories tolerated before aborting.
MAX_DIVERGED_FRACTION = 0.10

#: Series values at or below this floor are excluded from rate fits.
RATE_FIT_FLOOR = 1e-8

_CHUNK = 128


@dataclass
class EnsembleStats:
    """Aggregated ensemble output.

    ``series`` maps metric name -> (n_kept, R+1) per-trajectory series;
    ``stats`` maps metric name -> dict with mean/var/q05/q50/q95 arrays.
    """

    n_traj: int
    base_seed: int
    times: np.ndarray
    stats: dict
    series: dict
    terminal_class: np.ndarray
    terminal_rho: np.ndarray
    terminal_rho_hat: np.ndarray
    diverged: list = field(default_factory=list)

    @property
    def n_kept(self) -> int:
        return self.n_traj - len(self.diverged)


def run_ensemble(config: SimConfig, n_traj: int, base_seed: int | None = None,
                 metrics=None) -> EnsembleStats:
    """Run ``n_traj`` independent trajectories and aggregate their metrics.

    Parameters
    ----------
    config : SimConfig
        Trajectory configuration; its integrator settings and model apply to
        every member.
    n_traj : int
        Ensemble size (>= 1).
    base_seed : int, optional
        Defaults to ``config.seed``; member i is seeded with ``base_seed + i``.
    metrics : sequence of str, optional
        Metric channels to record (defaults to the config's list).

    Raises
    ------
    EnsembleError
        If more than 10% of the members diverge.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    if base_seed is None:
        base_seed = config.seed
    names = tuple(metrics) if metrics is not None else config.metrics
    ops = make_operators(config)
    rho0, rhohat0 = config.initial_states()
    check_density_matrix(rho0)
    check_density_matrix(rhohat0)
    integ = config.integrator
    ctrl = config.controller
    p = config.params
    jz_diag = np.real(np.diag(ops.jz))
    n_steps = integ.n_steps
    n_rec = n_steps // integ.record_stride

    series = {m: np.empty((n_traj, n_rec + 1)) for m in names}
    term_rho = np.empty((n_traj, config.N, config.N), dtype=complex)
    term_hat = np.empty_like(term_rho)
    diverged: list[tuple[int, int]] = []

    for start in range(0, n_traj, _CHUNK):
        idx = range(start, min(start + _CHUNK, n_traj))
        dw = np.stack([
            generate_wiener(base_seed + i, integ.dt, integ.T).increments
            for i in idx])
        B = dw.shape[0]
        rhos, rho_hats, _, f_rho, f_hat, div = backend.run_ensemble_batch(
            np.broadcast_to(rho0, (B, *rho0.shape)).copy(),
            np.broadcast_to(rhohat0, (B, *rhohat0.shape)).copy(),
            dw, integ.dt, p.omega, p.M, p.eta, ops.a_diag, ops.b, jz_diag,
            ops.j, _CTRL_CODE[ctrl.kind], ctrl.alpha, ctrl.beta, ctrl.nbar,
            ctrl.c, integ.record_stride)
        chunk_metrics = compute_metric_series(rhos, rho_hats, ops, ctrl, names)
        for m in names:
            series[m][start:start + B] = chunk_metrics[m]
        term_rho[start:start + B] = f_rho
        term_hat[start:start + B] = f_hat
        for j in np.flatnonzero(div >= 0):
            diverged.append((start + int(j), int(div[j])))

    if len(diverged) > MAX_DIVERGED_FRACTION * n_traj:
        raise EnsembleError(
            f"{len(diverged)} of {n_traj} trajectories diverged "
            f"(> {MAX_DIVERGED_FRACTION:.0%})")

    keep = np.ones(n_traj, dtype=bool)
    for i, _ in diverged:
        keep[i] = False
    series = {m: s[keep] for m, s in series.items()}
    term_rho, term_hat = term_rho[keep], term_hat[keep]

    stats = {}
    for m, s in series.items():
        stats[m] = {
            "mean": np.mean(s, axis=0),
            "var": np.var(s, axis=0, ddof=1) if s.shape[0] > 1
                   else np.zeros(s.shape[1]),
            "q05": np.quantile(s, 0.05, axis=0),
            "q50": np.quantile(s, 0.50, axis=0),
            "q95": np.quantile(s, 0.95, axis=0),
        }

    # terminal classification: nearest basis projector by fidelity, which for
    # pure targets is just the largest population
    populations = np.real(np.diagonal(term_rho, axis1=-2, axis2=-1))
    terminal_class = np.argmax(populations, axis=-1) if populations.size else \
        np.empty(0, dtype=int)

    times = np.arange(n_rec + 1) * (integ.record_stride * integ.dt)
    return EnsembleStats(n_traj=n_traj, base_seed=base_seed, times=times,
                         stats=stats, series=series,
                         terminal_class=np.asarray(terminal_class),
                         terminal_rho=term_rho, terminal_rho_hat=term_hat,
                         diverged=diverged)


@dataclass(frozen=True)
class RateFit:
    """Least-squares exponential rate of a positive series."""

    slope: float
    intercept: float
    window: tuple
    residual_rms: float


def fit_rate(times, series, window=None) -> RateFit:
    """Least-squares slope of log(series) vs t on a time window.

    Points where the series is at or below the 1e-8 floor are dropped.  The
    window defaults to [0.2 T, 0.9 T] to skip the initial transient and the
    floor-dominated tail; fewer than 10 usable points raises
    :class:`InsufficientDataError`.
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if times.shape != series.shape:
        raise ValueError("times and series must have matching shapes")
    if window is None:
        window = (0.2 * times[-1], 0.9 * times[-1])
    t_a, t_b = float(window[0]), float(window[1])
    sel = (times >= t_a) & (times <= t_b) & (series > RATE_FIT_FLOOR)
    if int(sel.sum()) < 10:
        raise InsufficientDataError(
            f"only {int(sel.sum())} usable points in window [{t_a:g}, {t_b:g}]")
    t = times[sel]
    logy = np.log(series[sel])
    slope, intercept = np.polyfit(t, logy, 1)
    resid = logy - (slope * t + intercept)
    return RateFit(slope=float(slope), intercept=float(intercept),
                   window=(t_a, t_b),
                   residual_rms=float(np.sqrt(np.mean(resid ** 2))))


@dataclass
class SubmartingaleReport:
    """Result of the sub-martingale hypothesis check on fidelity paths."""

    passed: bool
    n_traj: int
    n_times: int
    violations: list  # (t, mean, z) triples beyond 3 sigma
    min_z: float

    def __str__(self):
        head = "submartingale check: " + ("PASS" if self.passed else "FAIL")
        lines = [head + f" ({self.n_traj} trajectories, {self.n_times} grid "
                        f"points, min z = {self.min_z:.2f})"]
        for t, mean, z in self.violations:
            lines.append(f"  violation at t={t:g}: mean={mean:.6g}, z={z:.2f}")
        return "\n".join(lines)


def submartingale_test(times, fidelity_series) -> SubmartingaleReport:
    """Check E[F(t)] >= F(0) - 3 SE(t) at every grid point.

    ``fidelity_series`` is (n_traj, R+1).  A grid point violates when the
    ensemble mean falls more than three standard errors below the initial
    fidelity (with an absolute guard of 1e-12 for degenerate zero-variance
    ensembles, e.g. identical initial states giving F = 1 identically).
    """
    f = np.asarray(fidelity_series, dtype=float)
    times = np.asarray(times, dtype=float)
    if f.ndim != 2 or f.shape[1] != times.size:
        raise ValueError("fidelity_series must be (n_traj, len(times))")
    n = f.shape[0]
    if n < 100:
        raise ValueError(f"submartingale test needs >= 100 trajectories, got {n}")
    f0 = float(np.mean(f[:, 0]))
    mean = np.mean(f, axis=0)
    se = np.std(f, axis=0, ddof=1) / np.sqrt(n)
    deficit = f0 - mean
    tol = np.maximum(3.0 * se, 1e-12)
    bad = deficit > tol
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (mean - f0) / se, 0.0)
    violations = [(float(times[i]), float(mean[i]), float(z[i]))
                  for i in np.flatnonzero(bad)]
    return SubmartingaleReport(passed=not violations, n_traj=n,
                               n_times=int(times.size), violations=violations,
                               min_z=float(np.min(z)))


@dataclass
class QndReport:
    """Result of the eigenstate-convergence check for unmonitored feedback."""

    n_traj: int
    classified_fraction: float
    hit_counts: np.ndarray
    expected_probs: np.ndarray
    within_3sigma: np.ndarray
    passed: bool

    def __str__(self):
        lines = [f"QND convergence: {self.classified_fraction:.1%} of "
                 f"{self.n_traj} trajectories reached an eigenstate pair"]
        for n, (count, p, ok) in enumerate(zip(self.hit_counts,
                                               self.expected_probs,
                                               self.within_3sigma)):
            lines.append(f"  n={n}: {count} hits, expected p={p:.4f} "
                         f"({'ok' if ok else 'OUTSIDE 3 sigma'})")
        return "\n".join(lines)


def qnd_convergence_test(config: SimConfig, n_traj: int = 500,
                         base_seed: int | None = None,
                         fidelity_threshold: float = 0.99) -> QndReport:
    """Classify terminal states of an undriven, efficient measurement run.

    Requires u = 0 and eta = 1.  A trajectory counts as classified when its
    largest eigenstate population reaches ``fidelity_threshold`` and the
    actual/estimated fidelity does too.  Hit frequencies are compared with
    the initial populations (populations are bounded martingales when u = 0,
    so by optional stopping the hit probability of eigenstate n equals the
    initial population Tr(rho_0 rho_n)) within 3-sigma binomial bands.
    """
    if config.controller.kind != "off":
        raise ValueError("qnd_convergence_test requires controller.kind=off")
    if config.params.eta != 1.0:
        raise ValueError("qnd_convergence_test requires eta=1")
    stats = run_ensemble(config, n_traj, base_seed,
                         metrics=("fidelity",))
    rho0, _ = config.initial_states()
    expected = np.clip(np.real(np.diag(rho0)), 0.0, None)

    populations = np.real(np.diagonal(stats.terminal_rho, axis1=-2, axis2=-1))
    best = np.max(populations, axis=-1)
    mutual = stats.series["fidelity"][:, -1]
    classified = (best >= fidelity_threshold) & (mutual >= fidelity_threshold)
    frac = float(np.mean(classified))

    hits = stats.terminal_class[classified]
    counts = np.bincount(hits, minlength=config.N)
    n_cls = int(classified.sum())
    mu = n_cls * expected
    sigma = np.sqrt(n_cls * expected * (1.0 - expected))
    within = np.abs(counts - mu) <= 3.0 * sigma + 1e-9
    return QndReport(n_traj=stats.n_kept, classified_fraction=frac,
                     hit_counts=counts, expected_probs=expected,
                     within_3sigma=within, passed=bool(np.all(within)))
