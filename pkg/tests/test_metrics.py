"""Fidelity routes, purity, Bures distance, Lyapunov functions, generator."""

import numpy as np
import pytest

from spinfilter.errors import SingularStateError, StateError
from spinfilter.metrics import (
    bures_coupled,
    bures_distance,
    fidelity_bloch,
    fidelity_general,
    fidelity_qubit,
    generator_fidelity_qubit,
    jz_expectation,
    lyapunov_v0,
    lyapunov_v1,
    purity_deficit,
)
from spinfilter.operators import (
    basis_projector,
    bloch_to_density,
    density_to_bloch,
    make_spin_operators,
    maximally_mixed,
)

from conftest import random_density

# sum of sqrt populations off the n=1 target for diag(0.2,0.2,0.6) and
# diag(0.8,0.1,0.1): sqrt(.2)+sqrt(.6)+sqrt(.8)+sqrt(.1)
V1_PAPER_STARTS = 2.432465221758195


def test_fidelity_basic_values(rng):
    rho = random_density(rng, 4)
    assert fidelity_general(rho, rho) == pytest.approx(1.0, abs=1e-12)
    assert fidelity_general(basis_projector(2, 0),
                            basis_projector(2, 1)) == pytest.approx(0.0)
    assert fidelity_general(maximally_mixed(2),
                            maximally_mixed(2)) == pytest.approx(1.0)
    # closed qubit form on the same input: Tr = 1/2 plus 2 sqrt(1/16)
    assert fidelity_qubit(maximally_mixed(2),
                          maximally_mixed(2)) == pytest.approx(1.0)


def test_fidelity_symmetry(rng):
    a, b = random_density(rng, 3), random_density(rng, 3)
    assert fidelity_general(a, b) == pytest.approx(fidelity_general(b, a),
                                                   abs=1e-12)


def test_fidelity_three_routes_agree(rng):
    for _ in range(500):
        a, b = random_density(rng, 2), random_density(rng, 2)
        f1 = fidelity_general(a, b)
        f2 = fidelity_qubit(a, b)
        f3 = fidelity_bloch(density_to_bloch(a), density_to_bloch(b))
        assert abs(f1 - f2) < 1e-10
        assert abs(f1 - f3) < 1e-10


def test_fidelity_bloch_values():
    assert fidelity_bloch([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]) <= 1.0 + 1e-12
    v = np.array([0.0, 0.6, 0.8])
    assert fidelity_bloch(v, v) == pytest.approx(1.0)
    assert fidelity_bloch(v, -v) == pytest.approx(0.0)
    assert fidelity_bloch([0, 0, 1], [0, 0, 0]) == pytest.approx(0.5)


def test_fidelity_rejects_unphysical_estimate():
    with pytest.raises(StateError):
        fidelity_general(maximally_mixed(2), np.diag([1.001, -0.001]))


def test_purity_deficit_values():
    assert purity_deficit(basis_projector(3, 1)) == pytest.approx(0.0)
    assert purity_deficit(maximally_mixed(2)) == pytest.approx(0.5)
    assert purity_deficit(np.diag([0.8, 0.1, 0.1])) == pytest.approx(0.34)


def test_bures_distance_values(rng):
    rho = random_density(rng, 3)
    assert bures_distance(rho, rho) == pytest.approx(0.0, abs=1e-7)
    assert bures_distance(basis_projector(2, 0),
                          basis_projector(2, 1)) == pytest.approx(np.sqrt(2))


def test_lyapunov_v0_values():
    t0 = basis_projector(3, 0)
    assert lyapunov_v0(t0, t0, 0) == pytest.approx(0.0)
    assert lyapunov_v0(basis_projector(3, 2), basis_projector(3, 1),
                       0) == pytest.approx(1.0)
    m = maximally_mixed(3)
    assert lyapunov_v0(m, m, 0) == pytest.approx(np.sqrt(8.0) / 3.0)


def test_lyapunov_v1_values():
    t1 = basis_projector(3, 1)
    assert lyapunov_v1(t1, t1, 1) == pytest.approx(0.0)
    rho = np.diag([0.2, 0.2, 0.6]).astype(complex)
    rho_hat = np.diag([0.8, 0.1, 0.1]).astype(complex)
    assert lyapunov_v1(rho, rho_hat, 1) == pytest.approx(V1_PAPER_STARTS,
                                                         abs=1e-12)


def test_bures_lyapunov_lower_bounds(rng):
    """(sqrt2/4) V_0 and (sqrt2/2) V_1 bound the coupled Bures from below."""
    t0, t1 = basis_projector(3, 0), basis_projector(3, 1)
    for i in range(300):
        if i % 2:
            rho, rho_hat = random_density(rng, 3), random_density(rng, 3)
        else:
            eps = 10 ** rng.uniform(-6, -0.5)
            rho = (1 - eps) * t0 + eps * random_density(rng, 3)
            rho_hat = (1 - eps) * t0 + eps * random_density(rng, 3)
        db0 = bures_coupled(rho, rho_hat, t0)
        db1 = bures_coupled(rho, rho_hat, t1)
        assert db0 >= np.sqrt(2) / 4 * lyapunov_v0(rho, rho_hat, 0) - 1e-9
        assert db1 >= np.sqrt(2) / 2 * lyapunov_v1(rho, rho_hat, 1) - 1e-9
        # upper counterpart for V_1
        assert db1 <= np.sqrt(2) * lyapunov_v1(rho, rho_hat, 1) + 1e-9


def test_bures_v0_upper_bound_counterexample():
    """sqrt(2) V_0 does NOT dominate the coupled Bures distance.

    At rho = rho_hat = diag(1/2, 1/2, 0) with target rho_0, the coupled
    distance is 2 sqrt(2 (1 - sqrt(1/2))) = 1.5307... while
    sqrt(2) V_0 = sqrt(2) sqrt(3)/2 = 1.2247...; the claimed upper sandwich
    fails, so it is pinned here as a counterexample rather than asserted.
    """
    rho = np.diag([0.5, 0.5, 0.0]).astype(complex)
    t0 = basis_projector(3, 0)
    db = bures_coupled(rho, rho, t0)
    v0 = lyapunov_v0(rho, rho, 0)
    assert db == pytest.approx(1.530733729460359, abs=1e-12)
    assert np.sqrt(2) * v0 == pytest.approx(1.2247448713915892, abs=1e-12)
    assert db > np.sqrt(2) * v0 + 0.3


def test_generator_zero_when_states_agree(rng):
    for _ in range(20):
        v = rng.normal(size=3)
        v *= rng.uniform(0.05, 0.9) / np.linalg.norm(v)
        rho = bloch_to_density(v)
        assert generator_fidelity_qubit(rho, rho, 0.4, 1.0) == pytest.approx(
            0.0, abs=1e-12)


def test_generator_eta_one_hand_value():
    rho = bloch_to_density([0.0, 0.0, 0.0])
    rho_hat = bloch_to_density([0.0, 0.0, 0.5])
    expect = 1.0 * (1 - 0.25) * (1 - 0.5 * (1 + np.sqrt(0.75)))
    assert generator_fidelity_qubit(rho, rho_hat, 1.0, 1.0) == pytest.approx(
        expect, abs=1e-14)
    assert expect == pytest.approx(0.050240473580835526, abs=1e-15)


def test_generator_eta_one_reduces_to_closed_form(rng):
    """At eta = 1 the general display collapses to M (1 - zh^2)(1 - F)."""
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.uniform(0.0, 0.95) / np.linalg.norm(v)
        vh = rng.normal(size=3)
        vh *= rng.uniform(0.0, 0.95) / np.linalg.norm(vh)
        rho, rho_hat = bloch_to_density(v), bloch_to_density(vh)
        g = generator_fidelity_qubit(rho, rho_hat, 1.0, 1.3)
        closed = 1.3 * (1 - vh[2] ** 2) * (1 - fidelity_bloch(v, vh))
        assert abs(g - closed) < 1e-10


def test_generator_convex_in_eta(rng):
    """General eta is the convex combination of the eta = 0 and eta = 1 forms."""
    for _ in range(100):
        v = rng.normal(size=3)
        v *= rng.uniform(0.0, 0.9) / np.linalg.norm(v)
        vh = rng.normal(size=3)
        vh *= rng.uniform(0.0, 0.9) / np.linalg.norm(vh)
        rho, rho_hat = bloch_to_density(v), bloch_to_density(vh)
        eta = rng.uniform(0.05, 0.95)
        g = generator_fidelity_qubit(rho, rho_hat, eta, 1.0)
        g0 = generator_fidelity_qubit(rho, rho_hat, 0.0, 1.0)
        g1 = generator_fidelity_qubit(rho, rho_hat, 1.0, 1.0)
        assert g == pytest.approx(eta * g1 + (1 - eta) * g0, abs=1e-12)


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.7, 1.0])
def test_generator_nonnegative(rng, eta):
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.uniform(0.0, 0.95) / np.linalg.norm(v)
        vh = rng.normal(size=3)
        vh *= rng.uniform(0.0, 0.95) / np.linalg.norm(vh)
        g = generator_fidelity_qubit(bloch_to_density(v), bloch_to_density(vh),
                                     eta, 1.0)
        assert g >= -1e-9


def test_generator_refuses_boundary_states():
    pure = bloch_to_density([0.0, 0.0, 1.0])
    interior = bloch_to_density([0.0, 0.0, 0.5])
    with pytest.raises(SingularStateError):
        generator_fidelity_qubit(pure, interior, 0.5, 1.0)
    with pytest.raises(SingularStateError):
        generator_fidelity_qubit(interior, pure, 0.5, 1.0)


def test_jz_expectation():
    ops = make_spin_operators(3)
    jz_diag = np.diag(ops.jz).real
    assert jz_expectation(basis_projector(3, 0), jz_diag) == pytest.approx(1.0)
    assert jz_expectation(np.diag([0.8, 0.1, 0.1]), jz_diag) == pytest.approx(0.7)
