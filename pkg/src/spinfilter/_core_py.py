"""Pure-NumPy stepping kernels (fallback backend).

Trajectories are advanced in batch: all arrays carry a leading trajectory
axis, and each Euler step is a handful of vectorized elementwise products
plus one batched matrix commutator and one batched eigendecomposition for
the physicality projection.  The arithmetic per trajectory is identical to
the compiled kernel's, so either backend is deterministic on its own; the
two backends agree to integrator accuracy, not bit-for-bit.

Controller codes: 0 = off, 1 = constant, 2 = population, 3 = expectation.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

#: Pre-clip eigenvalue below which a step counts as diverged.
DIVERGENCE_TOL = 0.1


def _signed_power(base: np.ndarray, beta: float) -> np.ndarray:
    if float(beta).is_integer():
        return base ** int(beta)
    return np.sign(base) * np.abs(base) ** float(beta)


def control_values(ctrl_code: int, diag_hat: np.ndarray, jz_diag: np.ndarray,
                   jval: float, alpha: float, beta: float, nbar: int,
                   cval: float) -> np.ndarray:
    """Vectorized feedback law on diagonal populations (..., N) -> (...)."""
    if ctrl_code == 0:
        return np.zeros(diag_hat.shape[:-1])
    if ctrl_code == 1:
        return np.full(diag_hat.shape[:-1], cval)
    if ctrl_code == 2:
        return alpha * _signed_power(1.0 - diag_hat[..., nbar], beta)
    if ctrl_code == 3:
        base = jval - nbar - np.sum(jz_diag * diag_hat, axis=-1)
        return alpha * _signed_power(base, beta)
    raise ValueError(f"unknown controller code {ctrl_code}")


def project_batch(m: np.ndarray, div_tol: float = DIVERGENCE_TOL):
    """Hermitize, clip negative eigenvalues, renormalize (batched).

    Returns (projected, bad) where ``bad`` flags matrices whose smallest
    pre-clip eigenvalue fell below ``-div_tol`` (or whose clipped trace
    collapsed) — the divergence criterion.
    """
    h = 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
    w, v = np.linalg.eigh(h)
    bad = w[..., 0] < -div_tol
    wc = np.clip(w, 0.0, None)
    out = np.einsum("...ij,...j,...kj->...ik", v, wc, np.conj(v))
    tr = np.real(np.einsum("...ii->...", out))
    bad = bad | (tr < 0.5)
    safe_tr = np.where(tr > 0.0, tr, 1.0)
    out = out / safe_tr[..., None, None]
    return out, bad


def run_ensemble_batch(rho0, rhohat0, dw, dt, omega, M, eta, a_diag, b_op,
                       jz_diag, jval, ctrl_code, alpha, beta, nbar, cval,
                       stride, div_tol=DIVERGENCE_TOL):
    """Advance a batch of coupled trajectories with Euler-Maruyama steps.

    Parameters
    ----------
    rho0, rhohat0 : (B, N, N) complex
        Initial states (copied, not mutated).
    dw : (B, n_steps) float
        Wiener increments, one row per trajectory.
    stride : int
        Record every ``stride``-th step (plus the initial state); must
        divide ``n_steps``.

    Returns
    -------
    rhos, rhohats : (B, R+1, N, N) complex
    ys : (B, R+1) float
        Accumulated observation process.
    final_rho, final_rhohat : (B, N, N) complex
        State at the last step (frozen at divergence, if any).
    diverged : (B,) int64
        Step index at which each trajectory diverged, or -1.
    """
    rho = np.array(rho0, dtype=complex)
    rhohat = np.array(rhohat0, dtype=complex)
    B, N = rho.shape[0], rho.shape[1]
    n_steps = dw.shape[1]
    if n_steps % stride != 0:
        raise ValueError(f"stride {stride} does not divide step count {n_steps}")
    n_rec = n_steps // stride

    d = np.asarray(a_diag, dtype=float)
    jd = np.asarray(jz_diag, dtype=float)
    b = np.asarray(b_op, dtype=complex)
    sqem = np.sqrt(eta * M)
    # Hamiltonian (omega part) and Lindblad act elementwise for diagonal A.
    d1 = d[:, None] - d[None, :]
    lin_coef = (-1j * omega) * d1 - (0.5 * M) * d1 ** 2
    gsum = d[:, None] + d[None, :]

    rhos = np.empty((B, n_rec + 1, N, N), dtype=complex)
    rhohats = np.empty_like(rhos)
    ys = np.zeros((B, n_rec + 1))
    rhos[:, 0] = rho
    rhohats[:, 0] = rhohat
    y = np.zeros(B)
    alive = np.ones(B, dtype=bool)
    diverged = np.full(B, -1, dtype=np.int64)

    idx = np.arange(N)
    for k in range(n_steps):
        diag_r = np.real(rho[:, idx, idx])
        diag_h = np.real(rhohat[:, idx, idx])
        u = control_values(ctrl_code, diag_h, jd, jval, alpha, beta, nbar, cval)
        tra = diag_r @ d
        trah = diag_h @ d

        g = sqem * (gsum * rho - 2.0 * tra[:, None, None] * rho)
        gh = sqem * (gsum * rhohat - 2.0 * trah[:, None, None] * rhohat)
        drift = lin_coef * rho - 1j * u[:, None, None] * (b @ rho - rho @ b)
        drift_h = lin_coef * rhohat - 1j * u[:, None, None] * (b @ rhohat - rhohat @ b)

        dwk = dw[:, k]
        innovation = 2.0 * sqem * (tra - trah)
        dw_eff = dwk + innovation * dt

        new_rho, bad_r = project_batch(rho + drift * dt + g * dwk[:, None, None],
                                       div_tol)
        new_hat, bad_h = project_batch(
            rhohat + drift_h * dt + gh * dw_eff[:, None, None], div_tol)

        newly_bad = alive & (bad_r | bad_h)
        diverged[newly_bad] = k
        alive = alive & ~newly_bad

        keep = alive[:, None, None]
        rho = np.where(keep, new_rho, rho)
        rhohat = np.where(keep, new_hat, rhohat)
        y = np.where(alive, y + dwk + 2.0 * sqem * tra * dt, y)

        if (k + 1) % stride == 0:
            r = (k + 1) // stride
            rhos[:, r] = rho
            rhohats[:, r] = rhohat
            ys[:, r] = y

    return rhos, rhohats, ys, rho, rhohat, diverged


def run_trajectory(rho0, rhohat0, dw, dt, omega, M, eta, a_diag, b_op,
                   jz_diag, jval, ctrl_code, alpha, beta, nbar, cval,
                   stride, div_tol=DIVERGENCE_TOL):
    """Single-trajectory wrapper around :func:`run_ensemble_batch`."""
    rhos, rhohats, ys, fr, fh, div = run_ensemble_batch(
        rho0[None], rhohat0[None], np.asarray(dw)[None], dt, omega, M, eta,
        a_diag, b_op, jz_diag, jval, ctrl_code, alpha, beta, nbar, cval,
        stride, div_tol)
    return rhos[0], rhohats[0], ys[0], fr[0], fh[0], int(div[0])
