"""Euler-Maruyama integration of the coupled filtering equations.

The scheme is explicit Euler-Maruyama with a post-step physicality
projection: each tentative state is hermitized, its negative eigenvalues are
clipped to zero, and the trace is renormalized.  The exact flow preserves
the state space, so the projection only absorbs O(dt) discretization leaks;
a pre-clip eigenvalue below -0.1 is treated as divergence rather than
round-off.  Both equations are driven by one shared Wiener path, and the
feedback u is evaluated on the estimated state at the start of each step
(Ito convention).

The heavy stepping loop runs on the active backend (compiled Cython kernel
or vectorized NumPy fallback); see :mod:`spinfilter.backend`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from ._core_py import DIVERGENCE_TOL, control_values
from .config import IntegratorConfig, SimConfig
from .control import Controller, evaluate
from .dynamics import CoupledState, PhysicalParams, bloch_diffusion, bloch_drift, coupled_drift, diffusion_term
from .errors import ConfigError, DimensionError, IntegrationDivergedError
from .metrics import METRIC_NAMES, MetricSample, purity_deficit
from .operators import SpinOperators, check_density_matrix, density_to_bloch, make_sigma_operators, make_spin_operators

_CTRL_CODE = {"off": 0, "constant": 1, "population": 2, "expectation": 3}


@dataclass(frozen=True)
class WienerPath:
    """Pre-generated Wiener increments, reproducible from the seed."""

    seed: int
    dt: float
    increments: np.ndarray = field(repr=False)

    @property
    def n_steps(self) -> int:
        return self.increments.shape[0]

    def cumulative(self) -> np.ndarray:
        """W_t on the step grid, starting at W_0 = 0."""
        return np.concatenate(([0.0], np.cumsum(self.increments)))


def generate_wiener(seed: int, dt: float, T: float) -> WienerPath:
    """ceil(T/dt) i.i.d. Normal(0, dt) increments, deterministic in ``seed``."""
    if not dt > 0:
        raise ConfigError([f"dt must be > 0, got {dt}"])
    if not T >= dt:
        raise ConfigError([f"T must be >= dt, got T={T}, dt={dt}"])
    n = int(math.ceil(T / dt - 1e-9))
    rng = np.random.default_rng(seed)
    return WienerPath(seed=int(seed), dt=float(dt),
                      increments=rng.normal(0.0, math.sqrt(dt), n))


def project_to_physical(m: np.ndarray, div_tol: float = DIVERGENCE_TOL) -> np.ndarray:
    """Hermitize, clip negative eigenvalues to zero, renormalize the trace.

    Acts as the identity (to round-off) on valid density matrices.  Raises
    :class:`IntegrationDivergedError` if an eigenvalue lies below
    ``-div_tol`` — that magnitude signals integrator blow-up, not the small
    O(dt) boundary leakage the projection exists to absorb.
    """
    m = np.asarray(m, dtype=complex)
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    if w[0] < -div_tol:
        raise IntegrationDivergedError(
            f"eigenvalue {w[0]:.4g} below divergence threshold -{div_tol:g}")
    wc = np.clip(w, 0.0, None)
    tr = float(wc.sum())
    if tr <= 0.0:
        raise IntegrationDivergedError("projected state has zero trace")
    return (v * (wc / tr)) @ v.conj().T


def step(s: CoupledState, u: float, dW: float, cfg: IntegratorConfig,
         p: PhysicalParams, ops: SpinOperators) -> CoupledState:
    """One Euler-Maruyama step of the coupled pair under a shared dW."""
    if not np.isfinite(dW):
        raise ValueError("dW must be finite")
    drift, drift_hat = coupled_drift(s, u, p, ops)
    g = diffusion_term(s.rho, p, ops)
    g_hat = diffusion_term(s.rho_hat, p, ops)
    rho = s.rho + drift * cfg.dt + g * dW
    rho_hat = s.rho_hat + drift_hat * cfg.dt + g_hat * dW
    if cfg.projection == "clip":
        rho = project_to_physical(rho)
        rho_hat = project_to_physical(rho_hat)
    return CoupledState(rho, rho_hat)


@dataclass
class Trajectory:
    """Recorded output of one simulation run.

    ``rhos``/``rho_hats`` hold the states on the record grid (shape
    (R+1, N, N)); ``metrics`` maps channel names to (R+1,) series.
    """

    times: np.ndarray
    rhos: np.ndarray
    rho_hats: np.ndarray
    controls: np.ndarray
    wiener: np.ndarray
    observation: np.ndarray
    metrics: dict
    config: SimConfig

    def state(self, i: int) -> CoupledState:
        return CoupledState(self.rhos[i], self.rho_hats[i])

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(self.times.size)]

    def metric_sample(self, i: int) -> MetricSample:
        m = self.metrics
        nan = float("nan")

        def get(name):
            return float(m[name][i]) if name in m else nan

        return MetricSample(
            t=float(self.times[i]),
            fidelity=get("fidelity"),
            purity_actual=get("purity_rho"),
            purity_estimate=get("purity_rhohat"),
            bures_sum=get("bures_coupled"),
            lyapunov=get("v0"),
            control=float(self.controls[i]),
        )


def make_operators(config: SimConfig) -> SpinOperators:
    """Operator set selected by the model kind (no implicit conversion)."""
    if config.model_kind == "spin_half":
        return make_sigma_operators()
    return make_spin_operators(config.N)


def compute_metric_series(rhos, rho_hats, ops: SpinOperators, ctrl: Controller,
                          names=METRIC_NAMES) -> dict:
    """Vectorized metric channels over recorded states.

    Works for any leading shape: (..., N, N) states give (...,) series.
    """
    rhos = np.asarray(rhos, dtype=complex)
    rho_hats = np.asarray(rho_hats, dtype=complex)
    N = rhos.shape[-1]
    diag_r = np.clip(np.real(np.diagonal(rhos, axis1=-2, axis2=-1)), 0.0, None)
    diag_h = np.clip(np.real(np.diagonal(rho_hats, axis1=-2, axis2=-1)), 0.0, None)
    target = ctrl.target
    jz_diag = np.real(np.diag(ops.jz))
    out = {}
    for name in names:
        if name == "fidelity":
            if N == 2:
                cross = np.real(np.einsum("...ij,...ji->...", rhos, rho_hats))
                det_r = np.real(rhos[..., 0, 0] * rhos[..., 1, 1]
                                - rhos[..., 0, 1] * rhos[..., 1, 0])
                det_h = np.real(rho_hats[..., 0, 0] * rho_hats[..., 1, 1]
                                - rho_hats[..., 0, 1] * rho_hats[..., 1, 0])
                f = cross + 2.0 * np.sqrt(np.clip(det_r * det_h, 0.0, None))
            else:
                w, v = np.linalg.eigh(rhos)
                sq = np.einsum("...ij,...j,...kj->...ik", v,
                               np.sqrt(np.clip(w, 0.0, None)), np.conj(v))
                inner = sq @ rho_hats @ sq
                wi = np.linalg.eigvalsh(0.5 * (inner + np.conj(np.swapaxes(inner, -1, -2))))
                f = np.sum(np.sqrt(np.clip(wi, 0.0, None)), axis=-1) ** 2
            out[name] = np.minimum(f, 1.0)
        elif name == "purity_rho":
            out[name] = 1.0 - np.real(np.einsum("...ij,...ji->...", rhos, rhos))
        elif name == "purity_rhohat":
            out[name] = 1.0 - np.real(np.einsum("...ij,...ji->...", rho_hats, rho_hats))
        elif name == "bures_coupled":
            p = np.clip(diag_r[..., target], 0.0, 1.0)
            ph = np.clip(diag_h[..., target], 0.0, 1.0)
            out[name] = (np.sqrt(2.0 * (1.0 - np.sqrt(p)))
                         + np.sqrt(2.0 * (1.0 - np.sqrt(ph))))
        elif name == "v0":
            out[name] = np.sqrt(np.clip(1.0 - diag_r[..., target] * diag_h[..., target],
                                        0.0, None))
        elif name == "v1":
            mask = np.arange(N) != target
            out[name] = (np.sum(np.sqrt(diag_r[..., mask]), axis=-1)
                         + np.sum(np.sqrt(diag_h[..., mask]), axis=-1))
        elif name == "u":
            out[name] = np.asarray(control_values(
                _CTRL_CODE[ctrl.kind], diag_h, jz_diag, ops.j,
                ctrl.alpha, ctrl.beta, ctrl.nbar, ctrl.c))
        elif name == "jz_expect_rho":
            out[name] = diag_r @ jz_diag
        elif name == "jz_expect_rhohat":
            out[name] = diag_h @ jz_diag
        else:
            raise ValueError(f"unknown metric {name!r}")
    return out


def _check_wiener(wiener: WienerPath, integ: IntegratorConfig) -> None:
    if abs(wiener.dt - integ.dt) > 1e-15 * max(1.0, integ.dt):
        raise ValueError(f"wiener dt {wiener.dt} != integrator dt {integ.dt}")
    if wiener.n_steps != integ.n_steps:
        raise ValueError(
            f"wiener path has {wiener.n_steps} increments, need {integ.n_steps}")


def simulate(config: SimConfig, wiener: WienerPath | None = None) -> Trajectory:
    """Integrate one trajectory of the coupled pair from a configuration.

    The feedback is evaluated on the estimate only; the observation channel
    is accumulated from the actual state.  Identical configurations (and
    backend) give bit-identical trajectories.
    """
    ops = make_operators(config)
    rho0, rhohat0 = config.initial_states()
    check_density_matrix(rho0)
    check_density_matrix(rhohat0)
    integ = config.integrator
    if wiener is None:
        wiener = generate_wiener(config.seed, integ.dt, integ.T)
    _check_wiener(wiener, integ)
    ctrl = config.controller
    stride = integ.record_stride

    if integ.projection == "none":
        rhos, rho_hats, ys = _run_unprojected(rho0, rhohat0, wiener.increments,
                                              integ, config.params, ops, ctrl)
    else:
        rhos, rho_hats, ys, f_rho, f_hat, div = backend.run_trajectory(
            rho0, rhohat0, wiener.increments, integ.dt, config.params.omega,
            config.params.M, config.params.eta, ops.a_diag, ops.b,
            np.real(np.diag(ops.jz)), ops.j, _CTRL_CODE[ctrl.kind],
            ctrl.alpha, ctrl.beta, ctrl.nbar, ctrl.c, stride)
        if div >= 0:
            t = div * integ.dt
            u = evaluate(ctrl, f_hat, ops)
            s = purity_deficit(f_rho)
            raise IntegrationDivergedError(
                f"integration diverged at step {div} (t={t:.6g}, u={u:.6g}, "
                f"S(rho)={s:.6g})", step=div, t=t, u=u, purity_deficit=s)

    n_rec = integ.n_steps // stride
    times = np.arange(n_rec + 1) * (stride * integ.dt)
    cs = np.cumsum(wiener.increments)
    w_rec = np.concatenate(([0.0], cs[stride - 1::stride]))
    metrics = compute_metric_series(rhos, rho_hats, ops, ctrl, config.metrics)
    controls = compute_metric_series(rhos, rho_hats, ops, ctrl, ("u",))["u"]
    return Trajectory(times=times, rhos=rhos, rho_hats=rho_hats,
                      controls=controls, wiener=w_rec, observation=ys,
                      metrics=metrics, config=config)


def _run_unprojected(rho0, rhohat0, dw, integ, params, ops, ctrl):
    """Reference loop without the physicality projection (analysis only)."""
    stride = integ.record_stride
    n = dw.shape[0]
    n_rec = n // stride
    N = ops.dim
    rhos = np.empty((n_rec + 1, N, N), dtype=complex)
    rho_hats = np.empty_like(rhos)
    ys = np.zeros(n_rec + 1)
    s = CoupledState(rho0, rhohat0)
    rhos[0], rho_hats[0] = s.rho, s.rho_hat
    sqem = np.sqrt(params.eta * params.M)
    y = 0.0
    cfg_noproj = IntegratorConfig(dt=integ.dt, T=integ.T, projection="none",
                                  record_stride=stride)
    for k in range(n):
        u = evaluate(ctrl, s.rho_hat, ops)
        tr_a = float(np.sum(ops.a_diag * np.real(np.diag(s.rho))))
        s = step(s, u, float(dw[k]), cfg_noproj, params, ops)
        if not np.all(np.isfinite(s.rho)) or not np.all(np.isfinite(s.rho_hat)):
            raise IntegrationDivergedError(
                f"non-finite state at step {k} with projection disabled", step=k)
        y += float(dw[k]) + 2.0 * sqem * tr_a * integ.dt
        if (k + 1) % stride == 0:
            r = (k + 1) // stride
            rhos[r], rho_hats[r] = s.rho, s.rho_hat
            ys[r] = y
    return rhos, rho_hats, ys


@dataclass
class BlochTrajectory:
    """Bloch-coordinate run of the two-level system (J_z = sigma_z/2 form)."""

    times: np.ndarray
    v: np.ndarray
    v_hat: np.ndarray
    controls: np.ndarray


def simulate_bloch(config: SimConfig, wiener: WienerPath | None = None) -> BlochTrajectory:
    """Integrate the six coupled Bloch SDEs for a ``spin_j`` N = 2 model.

    Shares :func:`generate_wiener` seeds with :func:`simulate`, so the same
    configuration drives both representations with the same noise.  Models in
    the ``spin_half`` (sigma_z) parameterization are refused rather than
    converted; their Bloch form is this system under (omega, u, M) ->
    (2 omega, 2 u, 4 M).
    """
    if config.model_kind != "spin_j" or config.N != 2:
        raise DimensionError("simulate_bloch requires model.kind=spin_j, N=2")
    ops = make_operators(config)
    rho0, rhohat0 = config.initial_states()
    check_density_matrix(rho0)
    check_density_matrix(rhohat0)
    v = density_to_bloch(rho0)
    vh = density_to_bloch(rhohat0)
    integ = config.integrator
    if wiener is None:
        wiener = generate_wiener(config.seed, integ.dt, integ.T)
    _check_wiener(wiener, integ)
    p, ctrl = config.params, config.controller
    dw = wiener.increments
    stride = integ.record_stride
    n = integ.n_steps
    n_rec = n // stride
    vs = np.empty((n_rec + 1, 3))
    vhs = np.empty((n_rec + 1, 3))
    us = np.empty(n_rec + 1)

    def ctrl_value(vh_now):
        # populations of a two-level diagonal readout: ((1+z)/2, (1-z)/2)
        diag = np.array([(1.0 + vh_now[2]) / 2.0, (1.0 - vh_now[2]) / 2.0])
        return float(control_values(_CTRL_CODE[ctrl.kind], diag,
                                    np.array([0.5, -0.5]), 0.5,
                                    ctrl.alpha, ctrl.beta, ctrl.nbar, ctrl.c))

    vs[0], vhs[0], us[0] = v, vh, ctrl_value(vh)
    for k in range(n):
        u = ctrl_value(vh)
        a, ah = bloch_drift(v, vh, u, p)
        g, gh = bloch_diffusion(v, vh, p)
        v = v + a * integ.dt + g * dw[k]
        vh = vh + ah * integ.dt + gh * dw[k]
        if integ.projection == "clip":
            r = float(np.sqrt(v @ v))
            if r > 1.0:
                v = v / r
            rh = float(np.sqrt(vh @ vh))
            if rh > 1.0:
                vh = vh / rh
        if (k + 1) % stride == 0:
            idx = (k + 1) // stride
            vs[idx], vhs[idx] = v, vh
            us[idx] = ctrl_value(vh)
    times = np.arange(n_rec + 1) * (stride * integ.dt)
    return BlochTrajectory(times=times, v=vs, v_hat=vhs, controls=us)
