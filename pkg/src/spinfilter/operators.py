"""Spin operators, canonical states, and Bloch-sphere conversions.

States are plain complex ``numpy.ndarray`` density matrices.  A valid density
matrix is Hermitian, unit-trace, and positive semidefinite to within
``STATE_ATOL``; :func:`check_density_matrix` enforces this.

Two operator conventions coexist and are never converted into each other:

* ``spin_j`` — angular-momentum operators J_z, J_y for any N = 2J + 1.  The
  measurement operator is A = J_z and the control operator is B = J_y.
* ``spin_half`` — the two-level system written directly with Pauli matrices,
  A = sigma_z and B = sigma_y (so A = 2 J_z compared with ``spin_j`` at
  N = 2; the two parameterizations describe the same physics under
  (omega, u, M) -> (2 omega, 2 u, 4 M), but the library keeps them as
  separate code paths selected by configuration).

Basis indexing: n = 0 is the highest J_z eigenvalue (+J) and n = 2J the
lowest, so Tr(J_z rho_n) = J - n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, StateError

#: Absolute tolerance for Hermiticity / trace / positivity checks.
STATE_ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class SpinOperators:
    """Operator set for one model convention.

    Attributes
    ----------
    dim : int
        Hilbert-space dimension N.
    j : float
        Total spin J = (N - 1)/2.
    jz, jy : ndarray
        Angular-momentum operators along z and y (always present).
    a_diag : ndarray
        Diagonal of the measurement operator A actually used by the
        dynamics (J_z eigenvalues for ``spin_j``, +/-1 for ``spin_half``).
    b : ndarray
        Control operator B (J_y or sigma_y).
    convention : str
        ``"spin_j"`` or ``"spin_half"``.
    sx, sy, sz : ndarray or None
        Pauli matrices, populated only when N = 2.
    """

    dim: int
    j: float
    jz: np.ndarray
    jy: np.ndarray
    a_diag: np.ndarray
    b: np.ndarray
    convention: str
    sx: np.ndarray | None = field(default=None, repr=False)
    sy: np.ndarray | None = field(default=None, repr=False)
    sz: np.ndarray | None = field(default=None, repr=False)

    @property
    def a(self) -> np.ndarray:
        """Measurement operator A as a dense matrix."""
        return np.diag(self.a_diag).astype(complex)


def _angular_momentum(N: int) -> tuple[np.ndarray, np.ndarray]:
    """J_z and J_y for dimension N, in the basis ordered +J ... -J."""
    J = (N - 1) / 2.0
    jz = np.diag(np.array([J - n for n in range(N)], dtype=float)).astype(complex)
    # off-diagonal couplings c_m = (1/2) sqrt((2J + 1 - m) m), m = 1..2J
    jy = np.zeros((N, N), dtype=complex)
    for m in range(1, N):
        c = 0.5 * np.sqrt((2 * J + 1 - m) * m)
        jy[m - 1, m] = -1j * c
        jy[m, m - 1] = 1j * c
    return jz, jy


def make_spin_operators(N: int) -> SpinOperators:
    """Construct the spin-J operator set for dimension ``N``.

    Parameters
    ----------
    N : int
        Hilbert-space dimension, N >= 2.

    Returns
    -------
    SpinOperators
        With ``a_diag = diag(J_z)`` and ``b = J_y``.  For N = 2 the Pauli
        matrices are attached as well (J_z = sigma_z / 2, J_y = sigma_y / 2).
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise DimensionError(f"N must be an integer >= 2, got {N!r}")
    N = int(N)
    jz, jy = _angular_momentum(N)
    pauli = {"sx": SIGMA_X, "sy": SIGMA_Y, "sz": SIGMA_Z} if N == 2 else {}
    return SpinOperators(
        dim=N,
        j=(N - 1) / 2.0,
        jz=jz,
        jy=jy,
        a_diag=np.real(np.diag(jz)).copy(),
        b=jy,
        convention="spin_j",
        **pauli,
    )


def make_sigma_operators() -> SpinOperators:
    """Construct the two-level operator set in the Pauli convention.

    The dynamics then use A = sigma_z and B = sigma_y directly (measurement
    strength and control enter with a factor-2/4 difference relative to the
    ``spin_j`` parameterization at N = 2).
    """
    jz, jy = _angular_momentum(2)
    return SpinOperators(
        dim=2,
        j=0.5,
        jz=jz,
        jy=jy,
        a_diag=np.array([1.0, -1.0]),
        b=SIGMA_Y,
        convention="spin_half",
        sx=SIGMA_X,
        sy=SIGMA_Y,
        sz=SIGMA_Z,
    )


def basis_projector(N: int, n: int) -> np.ndarray:
    """Rank-1 projector rho_n = e_n e_n* onto the n-th J_z eigenstate.

    ``n`` runs from 0 (eigenvalue +J) to N - 1 (eigenvalue -J).
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise DimensionError(f"N must be an integer >= 2, got {N!r}")
    if not isinstance(n, (int, np.integer)) or not 0 <= n < N:
        raise IndexError(f"basis index n={n!r} outside 0..{N - 1}")
    rho = np.zeros((N, N), dtype=complex)
    rho[n, n] = 1.0
    return rho


def maximally_mixed(N: int) -> np.ndarray:
    """The state 1/N."""
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise DimensionError(f"N must be an integer >= 2, got {N!r}")
    return np.eye(N, dtype=complex) / N


def bloch_to_density(v) -> np.ndarray:
    """Density matrix (1 + x sigma_x + y sigma_y + z sigma_z)/2 of a Bloch vector.

    Raises
    ------
    StateError
        If ``v`` lies outside the closed unit ball (beyond tolerance).
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"Bloch vector must have shape (3,), got {v.shape}")
    r2 = float(v @ v)
    if r2 > 1.0 + 1e-10:
        raise StateError(f"Bloch vector has norm {np.sqrt(r2):.6g} > 1")
    x, y, z = v
    return 0.5 * (np.eye(2, dtype=complex) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch coordinates (Tr(sigma_x rho), Tr(sigma_y rho), Tr(sigma_z rho)).

    Exact inverse of :func:`bloch_to_density` on valid 2x2 states.
    """
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 state, got shape {rho.shape}")
    x = float(np.real(rho[0, 1] + rho[1, 0]))
    y = float(np.real(1j * (rho[0, 1] - rho[1, 0])))
    z = float(np.real(rho[0, 0] - rho[1, 1]))
    return np.array([x, y, z])


def check_density_matrix(rho: np.ndarray, atol: float = STATE_ATOL) -> None:
    """Validate Hermiticity, unit trace, and positive semidefiniteness.

    Raises :class:`StateError` naming the violated invariant.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
        raise DimensionError(f"density matrix must be square with N >= 2, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > atol:
        raise StateError(f"not Hermitian: max |rho - rho*| = {herm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > atol:
        raise StateError(f"trace {tr:.12g} differs from 1")
    wmin = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    if wmin < -atol:
        raise StateError(f"negative eigenvalue {wmin:.3e}")


def is_density_matrix(rho: np.ndarray, atol: float = STATE_ATOL) -> bool:
    """Boolean form of :func:`check_density_matrix`."""
    try:
        check_density_matrix(rho, atol=atol)
    except (StateError, DimensionError):
        return False
    return True
