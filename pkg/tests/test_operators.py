"""Spin operators, projectors, and Bloch-vector conversions."""

import numpy as np
import pytest

from spinfilter.errors import DimensionError, StateError
from spinfilter.operators import (
    SIGMA_Y,
    SIGMA_Z,
    basis_projector,
    bloch_to_density,
    check_density_matrix,
    density_to_bloch,
    is_density_matrix,
    make_sigma_operators,
    make_spin_operators,
    maximally_mixed,
)

from conftest import random_density

# J = 1 angular-momentum matrices in the |+1>, |0>, |-1> basis.
JZ_N3 = np.diag([1.0, 0.0, -1.0])
JY_N3 = np.array(
    [[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / np.sqrt(2)


def test_spin_half_matches_pauli_halves():
    ops = make_spin_operators(2)
    assert ops.j == 0.5
    np.testing.assert_allclose(ops.jz, SIGMA_Z / 2, atol=1e-15)
    np.testing.assert_allclose(ops.jy, SIGMA_Y / 2, atol=1e-15)
    np.testing.assert_allclose(ops.a_diag, [0.5, -0.5], atol=1e-15)


def test_spin_one_matrices():
    ops = make_spin_operators(3)
    np.testing.assert_allclose(ops.jz, JZ_N3, atol=1e-15)
    np.testing.assert_allclose(ops.jy, JY_N3, atol=1e-15)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 7])
def test_su2_commutator_closes(N):
    """[J_y, J_z] = i J_x and the Casimir J^2 = J(J+1) on every dimension."""
    ops = make_spin_operators(N)
    jx = -1j * (ops.jy @ ops.jz - ops.jz @ ops.jy)
    np.testing.assert_allclose(jx, jx.conj().T, atol=1e-13)
    np.testing.assert_allclose(
        ops.jz @ jx - jx @ ops.jz, 1j * ops.jy, atol=1e-13)
    casimir = jx @ jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    j = ops.j
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(N), atol=1e-13)


def test_sigma_convention_operators():
    ops = make_sigma_operators()
    np.testing.assert_allclose(ops.a_diag, [1.0, -1.0])
    np.testing.assert_allclose(ops.a, SIGMA_Z)
    np.testing.assert_allclose(ops.b, SIGMA_Y)
    # the angular-momentum matrices stay available for J_z expectations
    np.testing.assert_allclose(ops.jz, SIGMA_Z / 2)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_basis_projector_properties(N):
    ops = make_spin_operators(N)
    for n in range(N):
        p = basis_projector(N, n)
        check_density_matrix(p)
        np.testing.assert_allclose(p @ p, p, atol=1e-15)
        # Tr(J_z rho_n) = J - n (n = 0 is the highest weight)
        assert np.real(np.trace(ops.jz @ p)) == pytest.approx(ops.j - n)
        np.testing.assert_allclose(ops.jz @ p, p @ ops.jz, atol=1e-15)


def test_basis_projector_range():
    with pytest.raises(IndexError):
        basis_projector(3, 3)
    with pytest.raises(IndexError):
        basis_projector(3, -1)


def test_bloch_to_density_hand_value():
    np.testing.assert_allclose(
        bloch_to_density([1.0, 0.0, 0.0]),
        0.5 * np.array([[1, 1], [1, 1]]), atol=1e-15)
    np.testing.assert_allclose(
        bloch_to_density([0.0, 0.0, 1.0]), np.diag([1.0, 0.0]), atol=1e-15)


def test_bloch_round_trip(rng):
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.uniform(0, 1) / np.linalg.norm(v)
        rho = bloch_to_density(v)
        check_density_matrix(rho)
        np.testing.assert_allclose(density_to_bloch(rho), v, atol=1e-13)
    # and matrix -> vector -> matrix
    rho = random_density(rng, 2)
    np.testing.assert_allclose(
        bloch_to_density(density_to_bloch(rho)), rho, atol=1e-13)


def test_bloch_vector_outside_ball_rejected():
    with pytest.raises(StateError):
        bloch_to_density([0.8, 0.8, 0.8])


def test_density_to_bloch_requires_qubit(rng):
    with pytest.raises(DimensionError):
        density_to_bloch(random_density(rng, 3))


def test_maximally_mixed():
    np.testing.assert_allclose(maximally_mixed(3), np.eye(3) / 3)
    check_density_matrix(maximally_mixed(5))


def test_check_density_matrix_rejects_bad_inputs(rng):
    with pytest.raises(StateError):
        check_density_matrix(np.array([[1.0, 0.5], [0.0, 0.0]]))  # not Hermitian
    with pytest.raises(StateError):
        check_density_matrix(np.diag([0.7, 0.7]))  # trace 1.4
    with pytest.raises(StateError):
        check_density_matrix(np.diag([1.2, -0.2]))  # negative eigenvalue
    assert is_density_matrix(random_density(rng, 4))
    assert not is_density_matrix(np.diag([1.2, -0.2]))


@pytest.mark.parametrize("N", [2, 3, 4])
def test_ladder_coefficients_symmetry(N):
    """J_y couples neighbors with the symmetric coefficients c_m."""
    ops = make_spin_operators(N)
    sub = np.abs(np.diag(ops.jy, -1))
    np.testing.assert_allclose(sub, sub[::-1], atol=1e-15)
    twoj = N - 1
    for m in range(1, N):
        assert sub[m - 1] == pytest.approx(0.5 * np.sqrt((twoj + 1 - m) * m))
