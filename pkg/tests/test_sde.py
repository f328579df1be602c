"""Wiener paths, projection, stepping, and the coupled simulate loop."""

import numpy as np
import pytest

from spinfilter.config import IntegratorConfig, parse_config
from spinfilter.dynamics import CoupledState, PhysicalParams
from spinfilter.errors import (
    ConfigError,
    DimensionError,
    IntegrationDivergedError,
)
from spinfilter.operators import basis_projector, density_to_bloch, maximally_mixed
from spinfilter.sde import (
    compute_metric_series,
    generate_wiener,
    make_operators,
    project_to_physical,
    simulate,
    simulate_bloch,
    step,
)
from spinfilter.control import Controller, evaluate
from spinfilter.metrics import fidelity_general, jz_expectation, lyapunov_v0

from conftest import random_density


# ---------------------------------------------------------------- Wiener path

def test_wiener_deterministic_in_seed():
    a = generate_wiener(7, 1e-3, 2.0)
    b = generate_wiener(7, 1e-3, 2.0)
    np.testing.assert_array_equal(a.increments, b.increments)
    c = generate_wiener(8, 1e-3, 2.0)
    assert not np.array_equal(a.increments, c.increments)


def test_wiener_shape_and_moments():
    w = generate_wiener(5, 1e-3, 1000.0)
    assert w.n_steps == 1_000_000
    assert abs(np.var(w.increments) - 1e-3) < 0.05 * 1e-3
    assert abs(np.mean(w.increments)) < 5 * np.sqrt(1e-3 / w.n_steps)


def test_wiener_cumulative_grid():
    w = generate_wiener(1, 0.1, 1.0)
    cum = w.cumulative()
    assert cum.shape == (11,)
    assert cum[0] == 0.0
    np.testing.assert_allclose(np.diff(cum), w.increments, atol=1e-15)


def test_wiener_rejects_bad_grid():
    with pytest.raises(ConfigError):
        generate_wiener(0, 0.0, 1.0)
    with pytest.raises(ConfigError):
        generate_wiener(0, -1e-3, 1.0)
    with pytest.raises(ConfigError):
        generate_wiener(0, 0.5, 0.1)


# ----------------------------------------------------------------- projection

def test_projection_identity_on_valid_states(rng):
    for n in (2, 3, 5):
        rho = random_density(rng, n)
        np.testing.assert_allclose(project_to_physical(rho), rho, atol=1e-12)


def test_projection_clips_and_renormalizes():
    m = np.array([[0.5, 1.0], [1.0, 0.5]])
    out = project_to_physical(m, div_tol=np.inf)
    np.testing.assert_allclose(out, np.full((2, 2), 0.5), atol=1e-12)
    # the same matrix trips the strict default threshold (eigenvalue -0.5)
    with pytest.raises(IntegrationDivergedError):
        project_to_physical(m)


def test_projection_divergence_threshold():
    assert project_to_physical(np.diag([1.05, -0.05]))[1, 1] == pytest.approx(0.0)
    with pytest.raises(IntegrationDivergedError, match="threshold"):
        project_to_physical(np.diag([1.2, -0.2]))


def test_projection_zero_trace_rejected():
    with pytest.raises(IntegrationDivergedError, match="zero trace"):
        project_to_physical(-np.eye(2), div_tol=np.inf)


def test_projection_hermitizes():
    m = np.array([[0.6, 0.2 + 0.1j], [0.1 - 0.1j, 0.4]])
    out = project_to_physical(m)
    np.testing.assert_allclose(out, out.conj().T, atol=1e-14)


# ----------------------------------------------------------------- single step

def _sigma_cfg():
    ops = make_operators(parse_config(""))
    return IntegratorConfig(dt=1e-3, T=1.0), PhysicalParams(omega=0.0, eta=1.0, M=1.0), ops


def test_step_fixes_eigenprojectors():
    cfg, p, ops = _sigma_cfg()
    for n in (0, 1):
        rho = basis_projector(2, n)
        s = step(CoupledState(rho, rho), 0.0, 0.3, cfg, p, ops)
        np.testing.assert_allclose(s.rho, rho, atol=1e-12)
        np.testing.assert_allclose(s.rho_hat, rho, atol=1e-12)


def test_step_trace_exactly_renormalized(rng):
    cfg, p, ops = _sigma_cfg()
    for _ in range(50):
        s = CoupledState(random_density(rng, 2), random_density(rng, 2))
        out = step(s, rng.uniform(-1, 1), rng.normal(0, np.sqrt(cfg.dt)), cfg, p, ops)
        assert abs(np.trace(out.rho).real - 1.0) < 1e-12
        assert abs(np.trace(out.rho_hat).real - 1.0) < 1e-12
        np.testing.assert_allclose(out.rho, out.rho.conj().T, atol=1e-14)


def test_step_rejects_nonfinite_noise():
    cfg, p, ops = _sigma_cfg()
    s = CoupledState(maximally_mixed(2), maximally_mixed(2))
    with pytest.raises(ValueError):
        step(s, 0.0, np.nan, cfg, p, ops)


# ------------------------------------------------------------------- simulate

FILTER_CFG = """
model.kind = spin_j
model.N = 3
params.omega = 0.3
params.eta = 0.5
params.M = 1
controller.kind = population
controller.alpha = 5
controller.beta = 2
controller.nbar = 0
initial.rho = diag:0.2,0.2,0.6
initial.rho_hat = diag:0.8,0.1,0.1
integrator.dt = 1e-3
integrator.T = 2
integrator.record_stride = 10
seed = 101
"""


def test_simulate_bit_identical_reruns():
    cfg = parse_config(FILTER_CFG)
    a, b = simulate(cfg), simulate(cfg)
    np.testing.assert_array_equal(a.rhos, b.rhos)
    np.testing.assert_array_equal(a.rho_hats, b.rho_hats)
    np.testing.assert_array_equal(a.observation, b.observation)
    np.testing.assert_array_equal(a.controls, b.controls)


def test_simulate_record_grid():
    cfg = parse_config(FILTER_CFG)
    traj = simulate(cfg)
    assert traj.times.shape == (201,)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(2.0)
    assert traj.rhos.shape == (201, 3, 3)
    for key in cfg.metrics:
        assert traj.metrics[key].shape == (201,)
    # recorded Wiener matches the cumulative path on the same grid
    w = generate_wiener(cfg.seed, 1e-3, 2.0)
    np.testing.assert_allclose(traj.wiener, w.cumulative()[::10], atol=1e-14)


def test_identical_initial_states_stay_identical():
    """rho_0 = rhohat_0 makes the innovation vanish exactly, forever."""
    text = FILTER_CFG.replace("initial.rho_hat = diag:0.8,0.1,0.1",
                              "initial.rho_hat = diag:0.2,0.2,0.6")
    traj = simulate(parse_config(text))
    np.testing.assert_array_equal(traj.rhos, traj.rho_hats)


def test_observation_carries_measurement_signal():
    """dY - dW = 2 sqrt(eta M) <A>_rho dt at every recorded step."""
    cfg = parse_config(FILTER_CFG.replace("integrator.record_stride = 10",
                                          "integrator.record_stride = 1"))
    traj = simulate(cfg)
    ops = make_operators(cfg)
    sqem = np.sqrt(cfg.params.eta * cfg.params.M)
    tra = np.real(np.diagonal(traj.rhos, axis1=-2, axis2=-1)) @ ops.a_diag
    expected = 2.0 * sqem * tra[:-1] * cfg.integrator.dt
    got = np.diff(traj.observation) - np.diff(traj.wiener)
    np.testing.assert_allclose(got, expected, atol=1e-12)


def test_observation_reduces_to_noise_when_blind():
    cfg = parse_config("params.eta = 0\nintegrator.T = 1")
    traj = simulate(cfg)
    np.testing.assert_allclose(traj.observation, traj.wiener, atol=1e-14)


def test_unprojected_branch_matches_clip_in_the_interior():
    base = parse_config(FILTER_CFG).with_overrides(T=0.2)
    none_cfg = parse_config(FILTER_CFG.replace(
        "integrator.T = 2",
        "integrator.T = 0.2\nintegrator.projection = none"))
    a, b = simulate(base), simulate(none_cfg)
    np.testing.assert_allclose(a.rhos, b.rhos, atol=1e-10)
    np.testing.assert_allclose(a.rho_hats, b.rho_hats, atol=1e-10)


def test_eta_one_keeps_eigenstate_pure():
    cfg = parse_config("""
model.kind = spin_j
model.N = 3
params.omega = 0.3
params.eta = 1
initial.rho = basis:1
initial.rho_hat = basis:1
integrator.dt = 1e-3
integrator.T = 10
integrator.record_stride = 100
seed = 2
""")
    traj = simulate(cfg)
    assert np.max(traj.metrics["purity_rho"]) <= 1e-6


def test_divergence_error_reports_context():
    cfg = parse_config("""
model.kind = spin_half
controller.kind = constant
controller.c = 1e4
integrator.dt = 1e-2
integrator.T = 5
seed = 3
""")
    with pytest.raises(IntegrationDivergedError) as err:
        simulate(cfg)
    e = err.value
    assert e.step == 0
    assert e.t == pytest.approx(0.0)
    assert e.u == pytest.approx(1e4)
    assert e.purity_deficit == pytest.approx(0.0, abs=1e-12)
    msg = str(e)
    assert "step 0" in msg and "u=" in msg


def test_simulate_checks_supplied_wiener():
    cfg = parse_config(FILTER_CFG)
    with pytest.raises(ValueError, match="dt"):
        simulate(cfg, wiener=generate_wiener(0, 1e-2, 2.0))
    with pytest.raises(ValueError, match="increments"):
        simulate(cfg, wiener=generate_wiener(0, 1e-3, 1.0))


# ------------------------------------------------------------- metric channels

def test_metric_series_matches_scalar_routes(rng):
    ops = make_operators(parse_config("model.kind = spin_j\nmodel.N = 3"))
    ctrl = Controller(kind="population", alpha=5.0, beta=2.0, nbar=0)
    rhos = np.array([random_density(rng, 3) for _ in range(20)])
    hats = np.array([random_density(rng, 3) for _ in range(20)])
    out = compute_metric_series(rhos, hats, ops, ctrl)
    jz_diag = np.real(np.diag(ops.jz))
    for i in range(20):
        assert out["fidelity"][i] == pytest.approx(
            fidelity_general(rhos[i], hats[i]), abs=1e-10)
        assert out["v0"][i] == pytest.approx(
            lyapunov_v0(rhos[i], hats[i], 0), abs=1e-12)
        assert out["jz_expect_rho"][i] == pytest.approx(
            jz_expectation(rhos[i], jz_diag), abs=1e-12)
        assert out["u"][i] == pytest.approx(
            evaluate(ctrl, hats[i], ops), abs=1e-12)


# ------------------------------------------------------------------ bloch form

def test_simulate_bloch_refuses_sigma_convention():
    with pytest.raises(DimensionError):
        simulate_bloch(parse_config("model.kind = spin_half"))


BLOCH_CFG = """
model.kind = spin_j
model.N = 2
params.omega = 0.3
params.eta = 0.4
params.M = 1
controller.kind = expectation
controller.alpha = 1
controller.beta = 1
controller.nbar = 0
initial.rho = bloch:0.3,0.2,0.4
initial.rho_hat = bloch:0,0,0
integrator.dt = 1e-3
integrator.T = 1
seed = 11
"""


def test_bloch_and_matrix_runs_agree():
    cfg = parse_config(BLOCH_CFG)
    traj = simulate(cfg)
    bt = simulate_bloch(cfg)
    np.testing.assert_array_equal(bt.times, traj.times)
    vd = np.array([density_to_bloch(r) for r in traj.rhos])
    vhd = np.array([density_to_bloch(r) for r in traj.rho_hats])
    assert np.max(np.abs(vd - bt.v)) < 1e-10
    assert np.max(np.abs(vhd - bt.v_hat)) < 1e-10
    np.testing.assert_allclose(bt.controls, traj.controls, atol=1e-10)


def test_bloch_run_deterministic():
    cfg = parse_config(BLOCH_CFG)
    a, b = simulate_bloch(cfg), simulate_bloch(cfg)
    np.testing.assert_array_equal(a.v, b.v)
    np.testing.assert_array_equal(a.v_hat, b.v_hat)
