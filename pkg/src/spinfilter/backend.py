"""Stepping-kernel backend selection.

At import time the compiled Cython kernel (:mod:`spinfilter._core`) is
preferred when present; otherwise the pure-NumPy fallback
(:mod:`spinfilter._core_py`) is used.  The environment variable
``SPINFILTER_BACKEND`` (``compiled`` | ``python`` | ``auto``) overrides the
choice, and :func:`set_backend` switches it at runtime (used by the tests
and the benchmark).

Both backends consume identical pre-generated Wiener increments, so the
noise realization never depends on the backend; numerical results agree to
integrator accuracy and each backend is bit-deterministic on its own.
"""

from __future__ import annotations

import os

import numpy as np

from . import _core_py

try:  # pragma: no cover - absence exercised via set_backend("python")
    from . import _core
    _HAVE_COMPILED = True
except ImportError:  # extension not built
    _core = None
    _HAVE_COMPILED = False


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _HAVE_COMPILED else ("python",)


def _initial_choice() -> str:
    env = os.environ.get("SPINFILTER_BACKEND", "auto").strip().lower()
    if env not in ("auto", "compiled", "python"):
        raise ValueError(
            f"SPINFILTER_BACKEND must be auto|compiled|python, got {env!r}")
    if env == "python":
        return "python"
    if env == "compiled":
        if not _HAVE_COMPILED:
            raise ImportError(
                "SPINFILTER_BACKEND=compiled but spinfilter._core is not built")
        return "compiled"
    return "compiled" if _HAVE_COMPILED else "python"


_ACTIVE = _initial_choice()


def active_backend() -> str:
    """Name of the backend currently in use."""
    return _ACTIVE


def set_backend(name: str) -> None:
    """Switch backends at runtime (``compiled`` or ``python``)."""
    global _ACTIVE
    if name not in ("compiled", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and not _HAVE_COMPILED:
        raise ValueError("compiled backend requested but extension not built")
    _ACTIVE = name


def run_trajectory(rho0, rhohat0, dw, dt, omega, M, eta, a_diag, b_op,
                   jz_diag, jval, ctrl_code, alpha, beta, nbar, cval,
                   stride, div_tol=_core_py.DIVERGENCE_TOL):
    """Advance one coupled trajectory on the active backend."""
    if _ACTIVE == "compiled":
        return _core.run_trajectory(
            np.ascontiguousarray(rho0, dtype=complex),
            np.ascontiguousarray(rhohat0, dtype=complex),
            np.ascontiguousarray(dw, dtype=float), float(dt), float(omega),
            float(M), float(eta), np.ascontiguousarray(a_diag, dtype=float),
            np.ascontiguousarray(b_op, dtype=complex),
            np.ascontiguousarray(jz_diag, dtype=float), float(jval),
            int(ctrl_code), float(alpha), float(beta), int(nbar), float(cval),
            int(stride), float(div_tol))
    return _core_py.run_trajectory(rho0, rhohat0, dw, dt, omega, M, eta,
                                   a_diag, b_op, jz_diag, jval, ctrl_code,
                                   alpha, beta, nbar, cval, stride, div_tol)


def run_ensemble_batch(rho0, rhohat0, dw, dt, omega, M, eta, a_diag, b_op,
                       jz_diag, jval, ctrl_code, alpha, beta, nbar, cval,
                       stride, div_tol=_core_py.DIVERGENCE_TOL):
    """Advance a batch of trajectories; loops the compiled single-trajectory
    kernel or defers to the vectorized NumPy kernel."""
    if _ACTIVE == "compiled":
        B = rho0.shape[0]
        outs = [run_trajectory(rho0[i], rhohat0[i], dw[i], dt, omega, M, eta,
                               a_diag, b_op, jz_diag, jval, ctrl_code, alpha,
                               beta, nbar, cval, stride, div_tol)
                for i in range(B)]
        rhos = np.stack([o[0] for o in outs])
        rhohats = np.stack([o[1] for o in outs])
        ys = np.stack([o[2] for o in outs])
        final_rho = np.stack([o[3] for o in outs])
        final_hat = np.stack([o[4] for o in outs])
        diverged = np.array([o[5] for o in outs], dtype=np.int64)
        return rhos, rhohats, ys, final_rho, final_hat, diverged
    return _core_py.run_ensemble_batch(rho0, rhohat0, dw, dt, omega, M, eta,
                                       a_diag, b_op, jz_diag, jval, ctrl_code,
                                       alpha, beta, nbar, cval, stride, div_tol)
