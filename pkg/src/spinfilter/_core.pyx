# cython: language_level=3, boundscheck=False, wraparound=False
# cython: cdivision=True, initializedcheck=False
"""Compiled Euler-Maruyama kernel for the coupled stochastic master equations.

Mirrors the pure-NumPy kernel in ``_core_py``: same update rule, the same
eigenvalue-clipping projection, the same divergence criterion and frozen
post-divergence recording.  Dimensions are small (a handful of levels), so
the step is hand-rolled loops plus LAPACK ``zheevd`` for the projection.

Controller codes: 0 = off, 1 = constant, 2 = population, 3 = expectation.
"""

import numpy as np

from libc.math cimport floor, pow as cpow, sqrt
from scipy.linalg.cython_lapack cimport zheevd

BACKEND_NAME = "compiled"

#: Pre-clip eigenvalue below which a step counts as diverged.
DIVERGENCE_TOL = 0.1


cdef inline double _ipow(double base, long e) noexcept nogil:
    cdef double r = 1.0
    cdef long i, n = e if e >= 0 else -e
    for i in range(n):
        r *= base
    return r if e >= 0 else 1.0 / r


cdef inline double _signed_power(double base, double beta, bint beta_is_int,
                                 long ibeta) noexcept nogil:
    if beta_is_int:
        return _ipow(base, ibeta)
    if base > 0.0:
        return cpow(base, beta)
    if base < 0.0:
        return -cpow(-base, beta)
    return 0.0


cdef inline double _control(int code, double* diag_h, double* jd, double jval,
                            double alpha, double beta, bint beta_is_int,
                            long ibeta, int nbar, double cval,
                            int N) noexcept nogil:
    cdef double base
    cdef int i
    if code == 0:
        return 0.0
    if code == 1:
        return cval
    if code == 2:
        return alpha * _signed_power(1.0 - diag_h[nbar], beta, beta_is_int, ibeta)
    base = jval - nbar
    for i in range(N):
        base -= jd[i] * diag_h[i]
    return alpha * _signed_power(base, beta, beta_is_int, ibeta)


cdef int _project(double complex[:, ::1] m, double complex[:, ::1] out,
                  double complex[:, ::1] vbuf, double[::1] wbuf,
                  double complex[::1] work, int lwork, double[::1] rwork,
                  int lrwork, int[::1] iwork, int liwork, double div_tol,
                  int N) noexcept nogil:
    """Hermitize ``m``, clip negative eigenvalues, renormalize into ``out``.

    Returns 0 when the state is acceptable, nonzero when the smallest
    pre-clip eigenvalue fell below ``-div_tol``, the clipped trace
    collapsed below 0.5, or LAPACK failed to converge.
    """
    cdef int i, j, k, info = 0, bad = 0
    cdef int n = N, lda = N, lw = lwork, lrw = lrwork, liw = liwork
    cdef char jobz = b'V', uplo = b'L'
    cdef double tr = 0.0, wk
    cdef double complex acc
    # C-ordered Hermitian buffer; LAPACK reads it as its (conjugate)
    # transpose, which has the same spectrum, and the reconstruction
    # below conjugates back.
    for i in range(N):
        for j in range(N):
            vbuf[i, j] = 0.5 * (m[i, j] + m[j, i].conjugate())
    zheevd(&jobz, &uplo, &n, &vbuf[0, 0], &lda, &wbuf[0], &work[0], &lw,
           &rwork[0], &lrw, &iwork[0], &liw, &info)
    if info != 0:
        return 2
    if wbuf[0] < -div_tol:
        bad = 1
    for k in range(N):
        if wbuf[k] > 0.0:
            tr += wbuf[k]
    # Fortran column k of eigenvectors lands in C row k of vbuf.
    for i in range(N):
        for j in range(N):
            acc = 0.0
            for k in range(N):
                if wbuf[k] > 0.0:
                    acc = acc + wbuf[k] * vbuf[k, i].conjugate() * vbuf[k, j]
            out[i, j] = acc
    if tr < 0.5:
        bad = 1
    if tr > 0.0:
        for i in range(N):
            for j in range(N):
                out[i, j] = out[i, j] / tr
    return bad


def run_trajectory(double complex[:, ::1] rho0, double complex[:, ::1] rhohat0,
                   double[::1] dw, double dt, double omega, double M,
                   double eta, double[::1] a_diag, double complex[:, ::1] b_op,
                   double[::1] jz_diag, double jval, int ctrl_code,
                   double alpha, double beta, int nbar, double cval,
                   int stride, double div_tol=DIVERGENCE_TOL):
    """Advance one coupled trajectory with Euler-Maruyama steps.

    Same contract as ``_core_py.run_trajectory``: returns
    ``(rhos, rhohats, ys, final_rho, final_rhohat, diverged)`` with states
    recorded every ``stride`` steps and ``diverged`` the step index at which
    the projection flagged the pair (or -1).  States freeze at divergence.
    """
    cdef int N = rho0.shape[0]
    cdef long n_steps = dw.shape[0]
    if ctrl_code < 0 or ctrl_code > 3:
        raise ValueError(f"unknown controller code {ctrl_code}")
    if stride < 1 or n_steps % stride != 0:
        raise ValueError(f"stride {stride} does not divide step count {n_steps}")
    cdef long n_rec = n_steps // stride

    rhos_arr = np.empty((n_rec + 1, N, N), dtype=complex)
    rhohats_arr = np.empty((n_rec + 1, N, N), dtype=complex)
    ys_arr = np.zeros(n_rec + 1)
    rho_arr = np.array(rho0, dtype=complex)
    rhohat_arr = np.array(rhohat0, dtype=complex)

    cdef double complex[:, :, ::1] rhos = rhos_arr
    cdef double complex[:, :, ::1] rhohats = rhohats_arr
    cdef double[::1] ys = ys_arr
    cdef double complex[:, ::1] rho = rho_arr
    cdef double complex[:, ::1] rhohat = rhohat_arr

    # Scratch: candidates, projected states, commutators, eigen workspace.
    cdef double complex[:, ::1] cand = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] cand_h = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] prho = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] prhohat = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] comm = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] comm_h = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] vbuf = np.empty((N, N), dtype=complex)
    cdef double[::1] wbuf = np.empty(N)
    cdef double[::1] diag_h = np.empty(N)
    cdef int lwork = 2 * N + N * N + 16
    cdef int lrwork = 1 + 5 * N + 2 * N * N + 16
    cdef int liwork = 3 + 5 * N + 16
    cdef double complex[::1] work = np.empty(lwork, dtype=complex)
    cdef double[::1] rwork = np.empty(lrwork)
    cdef int[::1] iwork = np.empty(liwork, dtype=np.intc)

    cdef double complex[:, ::1] lin_coef = np.empty((N, N), dtype=complex)
    cdef double[:, ::1] gsum = np.empty((N, N))
    cdef double sqem = sqrt(eta * M)
    cdef double complex IU = 1j
    cdef int i, j, mm
    cdef double d1
    for i in range(N):
        for j in range(N):
            d1 = a_diag[i] - a_diag[j]
            lin_coef[i, j] = (-IU * omega) * d1 - (0.5 * M) * d1 * d1
            gsum[i, j] = a_diag[i] + a_diag[j]

    cdef bint beta_is_int = beta == floor(beta)
    cdef long ibeta = <long>beta if beta_is_int else 0
    cdef long k, diverged = -1
    cdef bint alive = 1
    cdef int bad_r, bad_h
    cdef double tra, trah, u, dwk, dw_eff, y = 0.0
    cdef double complex drift, acc

    for i in range(N):
        for j in range(N):
            rhos[0, i, j] = rho[i, j]
            rhohats[0, i, j] = rhohat[i, j]

    with nogil:
        for k in range(n_steps):
            if alive:
                tra = 0.0
                trah = 0.0
                for i in range(N):
                    tra += a_diag[i] * rho[i, i].real
                    diag_h[i] = rhohat[i, i].real
                    trah += a_diag[i] * diag_h[i]
                u = _control(ctrl_code, &diag_h[0], &jz_diag[0], jval, alpha,
                             beta, beta_is_int, ibeta, nbar, cval, N)
                dwk = dw[k]
                dw_eff = dwk + 2.0 * sqem * (tra - trah) * dt

                if u != 0.0:
                    for i in range(N):
                        for j in range(N):
                            acc = 0.0
                            for mm in range(N):
                                acc = acc + b_op[i, mm] * rho[mm, j] \
                                    - rho[i, mm] * b_op[mm, j]
                            comm[i, j] = acc
                            acc = 0.0
                            for mm in range(N):
                                acc = acc + b_op[i, mm] * rhohat[mm, j] \
                                    - rhohat[i, mm] * b_op[mm, j]
                            comm_h[i, j] = acc

                for i in range(N):
                    for j in range(N):
                        drift = lin_coef[i, j] * rho[i, j]
                        if u != 0.0:
                            drift = drift - IU * u * comm[i, j]
                        cand[i, j] = rho[i, j] + drift * dt \
                            + sqem * (gsum[i, j] - 2.0 * tra) * rho[i, j] * dwk
                        drift = lin_coef[i, j] * rhohat[i, j]
                        if u != 0.0:
                            drift = drift - IU * u * comm_h[i, j]
                        cand_h[i, j] = rhohat[i, j] + drift * dt \
                            + sqem * (gsum[i, j] - 2.0 * trah) * rhohat[i, j] * dw_eff

                bad_r = _project(cand, prho, vbuf, wbuf, work, lwork, rwork,
                                 lrwork, iwork, liwork, div_tol, N)
                bad_h = _project(cand_h, prhohat, vbuf, wbuf, work, lwork,
                                 rwork, lrwork, iwork, liwork, div_tol, N)
                if bad_r != 0 or bad_h != 0:
                    diverged = k
                    alive = 0
                else:
                    for i in range(N):
                        for j in range(N):
                            rho[i, j] = prho[i, j]
                            rhohat[i, j] = prhohat[i, j]
                    y += dwk + 2.0 * sqem * tra * dt

            if (k + 1) % stride == 0:
                for i in range(N):
                    for j in range(N):
                        rhos[(k + 1) // stride, i, j] = rho[i, j]
                        rhohats[(k + 1) // stride, i, j] = rhohat[i, j]
                ys[(k + 1) // stride] = y

    return rhos_arr, rhohats_arr, ys_arr, rho_arr, rhohat_arr, int(diverged)
