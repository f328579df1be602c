"""Feedback laws evaluated on the estimated state only."""

import numpy as np
import pytest

from spinfilter.control import Controller, evaluate, signed_power
from spinfilter.operators import (
    basis_projector,
    make_sigma_operators,
    make_spin_operators,
    maximally_mixed,
)

from conftest import random_density

J1_OPS = make_spin_operators(3)


def test_signed_power():
    assert signed_power(-0.7, 2.0) == pytest.approx(0.49)  # plain integer power
    assert signed_power(-0.7, 3.0) == pytest.approx(-0.343)
    assert signed_power(-4.0, 1.5) == pytest.approx(-8.0)  # odd extension
    assert signed_power(4.0, 1.5) == pytest.approx(8.0)
    assert signed_power(0.0, 1.7) == 0.0


def test_population_law_values():
    ctrl = Controller(kind="population", alpha=5.0, beta=2.0, nbar=0)
    assert evaluate(ctrl, basis_projector(3, 0), J1_OPS) == pytest.approx(0.0)
    assert evaluate(ctrl, basis_projector(3, 1), J1_OPS) == pytest.approx(5.0)
    assert evaluate(ctrl, maximally_mixed(3), J1_OPS) == pytest.approx(
        5.0 * (2.0 / 3.0) ** 2)


def test_population_law_range(rng):
    ctrl = Controller(kind="population", alpha=3.0, beta=1.5, nbar=1)
    for _ in range(50):
        u = evaluate(ctrl, random_density(rng, 3), J1_OPS)
        assert 0.0 <= u <= 3.0
    assert evaluate(ctrl, basis_projector(3, 1), J1_OPS) == 0.0


def test_expectation_law_hand_value():
    """alpha (J - nbar - Tr(J_z rho_hat))^beta on the paper's mixed state."""
    ctrl = Controller(kind="expectation", alpha=2.0, beta=2.0, nbar=1)
    rho_hat = np.diag([0.8, 0.1, 0.1]).astype(complex)
    assert evaluate(ctrl, rho_hat, J1_OPS) == pytest.approx(0.98)


def test_expectation_law_on_projectors():
    ctrl = Controller(kind="expectation", alpha=2.0, beta=2.0, nbar=1)
    assert evaluate(ctrl, basis_projector(3, 1), J1_OPS) == pytest.approx(0.0)
    # u(rho_k) = alpha (k - nbar)^beta
    assert evaluate(ctrl, basis_projector(3, 0), J1_OPS) == pytest.approx(2.0)
    assert evaluate(ctrl, basis_projector(3, 2), J1_OPS) == pytest.approx(2.0)


def test_constant_and_off():
    ops = make_sigma_operators()
    assert evaluate(Controller(kind="constant", c=1.0), maximally_mixed(2),
                    ops) == 1.0
    assert evaluate(Controller(kind="off"), maximally_mixed(2), ops) == 0.0


def test_law_depends_only_on_summary_statistics(rng):
    """Two states with equal Tr(J_z rho_hat) give the same expectation-law u."""
    ctrl = Controller(kind="expectation", alpha=1.0, beta=2.0, nbar=1)
    a = np.diag([0.3, 0.4, 0.3]).astype(complex)
    b = random_density(rng, 3)
    # shift b's diagonal to match Tr(J_z a) = 0 exactly
    jz = np.diag(J1_OPS.jz).real
    diag = np.real(np.diag(b)).copy()
    drift = float(jz @ diag)
    diag[0] -= drift / 2
    diag[2] += drift / 2
    if np.all(diag > 0):
        b2 = np.diag(diag).astype(complex)
        assert evaluate(ctrl, a, J1_OPS) == pytest.approx(
            evaluate(ctrl, b2, J1_OPS))


def test_smoothness_across_target():
    """beta > 1 leaves no kink at the target state (finite-difference check)."""
    ctrl = Controller(kind="expectation", alpha=1.0, beta=2.0, nbar=1)
    eps = 1e-6
    up = evaluate(ctrl, np.diag([eps, 1 - 2 * eps, eps]).astype(complex),
                  J1_OPS)
    assert up == pytest.approx(0.0, abs=1e-10)


def test_controller_validation():
    with pytest.raises(ValueError):
        Controller(kind="population", alpha=-1.0, beta=2.0)
    with pytest.raises(ValueError):
        Controller(kind="population", alpha=1.0, beta=0.5)
    with pytest.raises(ValueError):
        Controller(kind="nonsense")
    with pytest.raises(ValueError):
        Controller(kind="population", nbar=-1)


def test_target_index_must_exist():
    ctrl = Controller(kind="population", alpha=1.0, beta=2.0, nbar=5)
    with pytest.raises(IndexError):
        evaluate(ctrl, maximally_mixed(3), J1_OPS)
