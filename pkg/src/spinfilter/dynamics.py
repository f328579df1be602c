"""Drift and diffusion superoperators of the coupled filtering equations.

The monitored system and its filter evolve under the Ito pair

    d rho     = (F_u(rho) + L(rho)) dt + G(rho) dW
    d rho_hat = (F_u(rho_hat) + L(rho_hat)
                 + 2 sqrt(eta M) Tr(A (rho - rho_hat)) G(rho_hat)) dt
                + G(rho_hat) dW

driven by the *same* Wiener increment dW, with

    F_u(rho) = -i [omega A_z + u B, rho]
    L(rho)   = (M/2) (2 A rho A - A^2 rho - rho A^2)
    G(rho)   = sqrt(eta M) (A rho + rho A - 2 Tr(A rho) rho)

where (A, B) = (J_z, J_y) for the ``spin_j`` convention and
(sigma_z, sigma_y) for ``spin_half`` (for which L reduces to the familiar
M (sigma_z rho sigma_z - rho) because sigma_z^2 = 1).  The control u is a
scalar evaluated on the *estimated* state only; the innovation drift above is
what feeds measurement information into the filter.

The Bloch-coordinate form of the N = 2 system (J_z = sigma_z/2
normalization) is provided by :func:`bloch_drift` / :func:`bloch_diffusion`:

    dx = (-omega y - (M/2) x + u z) dt - sqrt(eta M) x z dW
    dy = ( omega x - (M/2) y    ) dt - sqrt(eta M) y z dW
    dz = (-u x                  ) dt + sqrt(eta M) (1 - z^2) dW

with the estimate obeying the same equations plus the correction drifts
eta M xh zh (zh - z), eta M yh zh (zh - z), -eta M (1 - zh^2)(zh - z).
The identical system written with sigma_z, sigma_y instead satisfies these
equations after (omega, u, M) -> (2 omega, 2 u, 4 M).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .operators import SpinOperators


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of the measurement setup.

    omega >= 0 is the free precession frequency, eta in [0, 1] the detector
    efficiency, and M > 0 the measurement strength.
    """

    omega: float = 0.0
    eta: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        if not self.omega >= 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if not 0 <= self.eta <= 1:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if not self.M > 0:
            raise ValueError(f"M must be > 0, got {self.M}")


@dataclass
class CoupledState:
    """The pair (rho, rho_hat) of actual and estimated states."""

    rho: np.ndarray
    rho_hat: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        self.rho_hat = np.asarray(self.rho_hat, dtype=complex)
        if self.rho.shape != self.rho_hat.shape:
            raise DimensionError(
                f"state dims differ: {self.rho.shape} vs {self.rho_hat.shape}"
            )

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def _check_dim(rho: np.ndarray, ops: SpinOperators) -> None:
    if rho.shape != (ops.dim, ops.dim):
        raise DimensionError(
            f"state shape {rho.shape} does not match operator dim {ops.dim}"
        )


def hamiltonian_term(rho: np.ndarray, u: float, p: PhysicalParams,
                     ops: SpinOperators) -> np.ndarray:
    """F_u(rho) = -i [omega A + u B, rho].

    A is diagonal, so the omega part is evaluated elementwise as
    -i omega (a_j - a_k) rho_jk; only the control commutator needs matrix
    products.  The result is Hermitian and traceless.
    """
    rho = np.asarray(rho, dtype=complex)
    _check_dim(rho, ops)
    d = ops.a_diag
    out = (-1j * p.omega) * (d[:, None] - d[None, :]) * rho
    if u != 0.0:
        out = out - 1j * u * (ops.b @ rho - rho @ ops.b)
    return out


def lindblad_term(rho: np.ndarray, p: PhysicalParams,
                  ops: SpinOperators) -> np.ndarray:
    """L(rho) = (M/2)(2 A rho A - A^2 rho - rho A^2), elementwise for diagonal A.

    Entry (j, k) is -(M/2) (a_j - a_k)^2 rho_jk: pure dephasing of the
    off-diagonals, vanishing on every A eigenprojector.
    """
    rho = np.asarray(rho, dtype=complex)
    _check_dim(rho, ops)
    d = ops.a_diag
    return (-0.5 * p.M) * (d[:, None] - d[None, :]) ** 2 * rho


def diffusion_term(rho: np.ndarray, p: PhysicalParams,
                   ops: SpinOperators) -> np.ndarray:
    """G(rho) = sqrt(eta M) (A rho + rho A - 2 Tr(A rho) rho)."""
    rho = np.asarray(rho, dtype=complex)
    _check_dim(rho, ops)
    d = ops.a_diag
    tr_a = float(np.real(np.sum(d * np.real(np.diag(rho)))))
    return np.sqrt(p.eta * p.M) * ((d[:, None] + d[None, :]) * rho - 2.0 * tr_a * rho)


def coupled_drift(s: CoupledState, u: float, p: PhysicalParams,
                  ops: SpinOperators) -> tuple[np.ndarray, np.ndarray]:
    """Drift matrices of (rho, rho_hat); the estimate carries the innovation.

    Returns ``(F_u(rho) + L(rho),
    F_u(rho_hat) + L(rho_hat) + 2 sqrt(eta M) Tr(A (rho - rho_hat)) G(rho_hat))``.
    Both are traceless Hermitian; with rho = rho_hat the innovation term is
    exactly zero and the two drifts coincide.
    """
    _check_dim(s.rho, ops)
    _check_dim(s.rho_hat, ops)
    drift = hamiltonian_term(s.rho, u, p, ops) + lindblad_term(s.rho, p, ops)
    drift_hat = hamiltonian_term(s.rho_hat, u, p, ops) + lindblad_term(s.rho_hat, p, ops)
    d = ops.a_diag
    tr = float(np.sum(d * np.real(np.diag(s.rho))))
    tr_hat = float(np.sum(d * np.real(np.diag(s.rho_hat))))
    innovation = 2.0 * np.sqrt(p.eta * p.M) * (tr - tr_hat)
    if innovation != 0.0:
        drift_hat = drift_hat + innovation * diffusion_term(s.rho_hat, p, ops)
    return drift, drift_hat


def observation_increment(rho: np.ndarray, dW: float, dt: float,
                          p: PhysicalParams, ops: SpinOperators) -> float:
    """dY = dW + 2 sqrt(eta M) Tr(A rho) dt, accumulated from the actual state."""
    rho = np.asarray(rho)
    _check_dim(rho, ops)
    if not np.isfinite(dW):
        raise ValueError("dW must be finite")
    tr_a = float(np.sum(ops.a_diag * np.real(np.diag(rho))))
    return float(dW + 2.0 * np.sqrt(p.eta * p.M) * tr_a * dt)


def bloch_drift(v, v_hat, u: float, p: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Drift of the six coupled Bloch SDEs (J_z = sigma_z/2 normalization).

    Returns (actual drift, estimate drift); the estimate includes the
    (zh - z) correction terms.
    """
    x, y, z = np.asarray(v, dtype=float)
    xh, yh, zh = np.asarray(v_hat, dtype=float)
    w, eta, M = p.omega, p.eta, p.M
    a = np.array([
        -w * y - 0.5 * M * x + u * z,
        w * x - 0.5 * M * y,
        -u * x,
    ])
    corr = eta * M * (zh - z)
    a_hat = np.array([
        -w * yh - 0.5 * M * xh + u * zh + corr * xh * zh,
        w * xh - 0.5 * M * yh + corr * yh * zh,
        -u * xh - corr * (1.0 - zh ** 2),
    ])
    return a, a_hat


def bloch_diffusion(v, v_hat, p: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Diffusion coefficients of the six coupled Bloch SDEs."""
    x, y, z = np.asarray(v, dtype=float)
    xh, yh, zh = np.asarray(v_hat, dtype=float)
    s = np.sqrt(p.eta * p.M)
    g = np.array([-s * x * z, -s * y * z, s * (1.0 - z ** 2)])
    g_hat = np.array([-s * xh * zh, -s * yh * zh, s * (1.0 - zh ** 2)])
    return g, g_hat
