"""Scalar diagnostics: fidelity, purity, Bures distance, Lyapunov functions.

Fidelity is available through three routes that agree on two-level systems:
the general eigendecomposition form (Tr sqrt(sqrt(rho) rho_hat sqrt(rho)))^2,
the two-level closed form Tr(rho rho_hat) + 2 sqrt(det rho det rho_hat), and
the Bloch form (1 + v . vh + Xi)/2 with Xi = sqrt((1-|v|^2)(1-|vh|^2)).

The closed-form infinitesimal generator of the fidelity and the purity drift
are stated in the J_z = sigma_z/2 normalization of the two-level Bloch
equations (see :mod:`spinfilter.dynamics`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularStateError, StateError
from .operators import density_to_bloch

#: Column names of the per-step metric channels, in CSV order.
METRIC_NAMES = (
    "fidelity",
    "purity_rho",
    "purity_rhohat",
    "bures_coupled",
    "v0",
    "v1",
    "u",
    "jz_expect_rho",
    "jz_expect_rhohat",
)

#: States with Xi below this are treated as boundary for interior-only formulas.
XI_FLOOR = 1e-9


@dataclass(frozen=True)
class MetricSample:
    """One row of diagnostics at time t."""

    t: float
    fidelity: float
    purity_actual: float
    purity_estimate: float
    bures_sum: float
    lyapunov: float
    control: float


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity_general(rho: np.ndarray, rho_hat: np.ndarray) -> float:
    """Squared Uhlmann fidelity (Tr sqrt(sqrt(rho) rho_hat sqrt(rho)))^2.

    Symmetric in its arguments; 1 iff the states coincide, 0 iff their
    supports are orthogonal.  Tiny negative eigenvalues of the inner matrix
    (round-off) are clamped; anything below -1e-12 raises.
    """
    rho = np.asarray(rho, dtype=complex)
    rho_hat = np.asarray(rho_hat, dtype=complex)
    if rho.shape != rho_hat.shape:
        raise DimensionError(f"state dims differ: {rho.shape} vs {rho_hat.shape}")
    sq = _sqrtm_psd(rho)
    inner = sq @ rho_hat @ sq
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    if w.min() < -1e-12:
        raise StateError(f"inner matrix not PSD: min eigenvalue {w.min():.3e}")
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(f, 1.0) if f <= 1.0 + 1e-9 else f


def fidelity_qubit(rho: np.ndarray, rho_hat: np.ndarray) -> float:
    """Two-level closed form Tr(rho rho_hat) + 2 sqrt(det rho det rho_hat)."""
    rho = np.asarray(rho, dtype=complex)
    rho_hat = np.asarray(rho_hat, dtype=complex)
    if rho.shape != (2, 2) or rho_hat.shape != (2, 2):
        raise DimensionError("fidelity_qubit requires 2x2 states")
    cross = float(np.real(np.trace(rho @ rho_hat)))
    dets = float(np.real(np.linalg.det(rho))) * float(np.real(np.linalg.det(rho_hat)))
    return cross + 2.0 * np.sqrt(max(dets, 0.0))


def fidelity_bloch(v, v_hat) -> float:
    """(1 + v . vh + sqrt((1 - |v|^2)(1 - |vh|^2))) / 2."""
    v = np.asarray(v, dtype=float)
    v_hat = np.asarray(v_hat, dtype=float)
    nv2 = max(1.0 - float(v @ v), 0.0)
    nvh2 = max(1.0 - float(v_hat @ v_hat), 0.0)
    return 0.5 * (1.0 + float(v @ v_hat) + np.sqrt(nv2 * nvh2))


def purity_deficit(rho: np.ndarray) -> float:
    """S(rho) = 1 - Tr(rho^2); zero exactly on pure states."""
    rho = np.asarray(rho, dtype=complex)
    return float(1.0 - np.real(np.einsum("ij,ji->", rho, rho)))


def bures_distance(rho: np.ndarray, rho_hat: np.ndarray) -> float:
    """d_B = sqrt(2 (1 - sqrt(F))), with F clamped into [0, 1]."""
    f = min(max(fidelity_general(rho, rho_hat), 0.0), 1.0)
    return float(np.sqrt(2.0 * (1.0 - np.sqrt(f))))


def bures_coupled(rho: np.ndarray, rho_hat: np.ndarray,
                  target: np.ndarray) -> float:
    """d_B(rho, target) + d_B(rho_hat, target) for a common target state."""
    return bures_distance(rho, target) + bures_distance(rho_hat, target)


def lyapunov_v0(rho: np.ndarray, rho_hat: np.ndarray, nbar: int = 0) -> float:
    """V_0 = sqrt(1 - Tr(rho rho_nbar) Tr(rho_hat rho_nbar)).

    Zero iff both states put full population on the target projector.
    """
    p = float(np.real(rho[nbar, nbar]))
    ph = float(np.real(rho_hat[nbar, nbar]))
    return float(np.sqrt(max(1.0 - p * ph, 0.0)))


def lyapunov_v1(rho: np.ndarray, rho_hat: np.ndarray, nbar: int = 1) -> float:
    """V_1 = sum over k != nbar of sqrt(Tr(rho rho_k)) + sqrt(Tr(rho_hat rho_k))."""
    p = np.clip(np.real(np.diag(rho)), 0.0, None)
    ph = np.clip(np.real(np.diag(rho_hat)), 0.0, None)
    mask = np.arange(p.size) != nbar
    return float(np.sum(np.sqrt(p[mask])) + np.sum(np.sqrt(ph[mask])))


def generator_fidelity_qubit(rho: np.ndarray, rho_hat: np.ndarray,
                             eta: float, M: float) -> float:
    """Closed-form infinitesimal generator of the two-level fidelity.

    Valid on interior state pairs (Xi > 0) of the coupled Bloch dynamics in
    the J_z = sigma_z/2 normalization:

        LF = (M (1 - eta) / (4 Xi)) [ (1 - zh^2)(1 - |v|^2)
                                     + (1 - z^2)(1 - |vh|^2)
                                     + 2 zh^2 (1 - v.vh - Xi) Xi
                                     - 2 (1 - z zh) Xi ]
             + (M / 2) (1 - zh^2) (1 - v.vh - Xi)

    For eta = 1 this reduces to M (1 - zh^2)(1 - F); it is nonnegative and
    does not depend on the control u.

    Raises
    ------
    SingularStateError
        If either state is (numerically) on the boundary, where the formula
        divides by Xi.
    """
    v = density_to_bloch(rho)
    v_hat = density_to_bloch(rho_hat)
    if not 0 <= eta <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if not M > 0:
        raise ValueError(f"M must be > 0, got {M}")
    z, zh = v[2], v_hat[2]
    nv2 = 1.0 - float(v @ v)
    nvh2 = 1.0 - float(v_hat @ v_hat)
    xi = np.sqrt(max(nv2, 0.0) * max(nvh2, 0.0))
    if xi < XI_FLOOR:
        raise SingularStateError(
            f"generator formula requires interior states (Xi = {xi:.3e})"
        )
    dot = float(v @ v_hat)
    bracket = (
        (1.0 - zh ** 2) * nv2
        + (1.0 - z ** 2) * nvh2
        + 2.0 * zh ** 2 * (1.0 - dot - xi) * xi
        - 2.0 * (1.0 - z * zh) * xi
    )
    return float(
        M * (1.0 - eta) / (4.0 * xi) * bracket
        + 0.5 * M * (1.0 - zh ** 2) * (1.0 - dot - xi)
    )


def purity_drift_qubit(v, eta: float, M: float) -> float:
    """Ito drift of S(rho) = 1 - Tr(rho^2) for the two-level Bloch dynamics.

    Closed form M ((1 - eta)(1 - z^2)/2 - (1 - eta z^2) S) in the
    J_z = sigma_z/2 normalization; independent of the control.
    """
    v = np.asarray(v, dtype=float)
    z = float(v[2])
    s = 0.5 * (1.0 - float(v @ v))
    return float(M * ((1.0 - eta) * (1.0 - z ** 2) / 2.0 - (1.0 - eta * z ** 2) * s))


def jz_expectation(rho: np.ndarray, jz_diag: np.ndarray) -> float:
    """Tr(J_z rho) for a diagonal J_z."""
    return float(np.sum(np.asarray(jz_diag) * np.real(np.diag(rho))))
