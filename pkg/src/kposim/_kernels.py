"""Compiled inner loops for the deterministic and stochastic integrators.

All kernels operate row-independently with fixed summation order, so results
are bit-reproducible and independent of how trajectories are batched or
scheduled across threads (kernels release the GIL).

Row status codes: 0 converged, 1 step budget exhausted, 2 amplitude blowup
or non-finite state.
"""

import numpy as np
from numba import njit

STATUS_CONVERGED = 0
STATUS_MAX_STEPS = 1
STATUS_BLOWUP = 2

#: squared amplitude beyond which a trajectory counts as blown up (|A| > 1e6)
BLOWUP_ABS2 = 1e12


@njit(cache=True, nogil=True)
def _mf_drift(A, J, delta, g, u, gamma, out, active):
    """Mean-field drift dA/dt for a batch of states, rows gated by `active`.

    dA_j/dt = i*delta*A_j - i*g*conj(A_j) - i*u*|A_j|^2*A_j
              + (i/2) * sum_k J_jk A_k - (gamma/2)*A_j

    Returns 2 if any active site has |A|^2 above BLOWUP_ABS2 or non-finite.
    """
    m, n = A.shape
    status = 0
    for i in range(m):
        if not active[i]:
            continue
        for j in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += J[j, k] * A[i, k]
            a = A[i, j]
            r2 = a.real * a.real + a.imag * a.imag
            if not (r2 <= BLOWUP_ABS2):
                status = STATUS_BLOWUP
            out[i, j] = (
                1j * delta * a
                - 1j * g * np.conj(a)
                - 1j * u * r2 * a
                + 0.5j * acc
                - 0.5 * gamma * a
            )
    return status


@njit(cache=True, nogil=True)
def rk4_ensemble(A, J, delta, g, u, gamma, dt, max_steps, tol):
    """Fixed-step RK4 on the mean-field drift for a batch of trajectories.

    Advances every row until its drift sup-norm falls below `tol`, it blows
    up, or `max_steps` steps are done.  Rows are frozen at the state where
    they stopped.  Returns (status, steps) arrays, one entry per row.
    """
    m, n = A.shape
    k1 = np.zeros_like(A)
    k2 = np.zeros_like(A)
    k3 = np.zeros_like(A)
    k4 = np.zeros_like(A)
    tmp = np.zeros_like(A)
    active = np.ones(m, dtype=np.bool_)
    status = np.full(m, STATUS_MAX_STEPS, dtype=np.int64)
    steps = np.full(m, max_steps, dtype=np.int64)
    for s in range(max_steps + 1):
        any_active = False
        _mf_drift(A, J, delta, g, u, gamma, k1, active)
        for i in range(m):
            if not active[i]:
                continue
            sup = 0.0
            blown = False
            for j in range(n):
                v = abs(k1[i, j])
                a = A[i, j]
                r2 = a.real * a.real + a.imag * a.imag
                if not (r2 <= BLOWUP_ABS2) or not (v <= 1e300):
                    blown = True
                if v > sup:
                    sup = v
            if blown:
                active[i] = False
                status[i] = STATUS_BLOWUP
                steps[i] = s
            elif sup < tol:
                active[i] = False
                status[i] = STATUS_CONVERGED
                steps[i] = s
            else:
                any_active = True
        if not any_active or s == max_steps:
            break
        for i in range(m):
            if active[i]:
                for j in range(n):
                    tmp[i, j] = A[i, j] + 0.5 * dt * k1[i, j]
        _mf_drift(tmp, J, delta, g, u, gamma, k2, active)
        for i in range(m):
            if active[i]:
                for j in range(n):
                    tmp[i, j] = A[i, j] + 0.5 * dt * k2[i, j]
        _mf_drift(tmp, J, delta, g, u, gamma, k3, active)
        for i in range(m):
            if active[i]:
                for j in range(n):
                    tmp[i, j] = A[i, j] + dt * k3[i, j]
        _mf_drift(tmp, J, delta, g, u, gamma, k4, active)
        for i in range(m):
            if active[i]:
                for j in range(n):
                    A[i, j] = A[i, j] + (dt / 6.0) * (
                        k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                    )
    return status, steps


@njit(cache=True, nogil=True)
def rk4_trajectory(A, J, delta, g, u, gamma, dt, max_steps, tol, stride, rec, rec_steps):
    """Single-trajectory RK4 with state recording every `stride` steps.

    A is a (1, n) state advanced in place.  States are recorded (into `rec`,
    with their step index in `rec_steps`) at every step index divisible by
    `stride`, plus the final state.  Returns (status, steps_done, n_recorded).
    """
    n = A.shape[1]
    k1 = np.zeros_like(A)
    k2 = np.zeros_like(A)
    k3 = np.zeros_like(A)
    k4 = np.zeros_like(A)
    tmp = np.zeros_like(A)
    active = np.ones(1, dtype=np.bool_)
    n_rec = 0
    status = STATUS_MAX_STEPS
    stop = max_steps
    for s in range(max_steps + 1):
        _mf_drift(A, J, delta, g, u, gamma, k1, active)
        sup = 0.0
        blown = False
        for j in range(n):
            v = abs(k1[0, j])
            a = A[0, j]
            r2 = a.real * a.real + a.imag * a.imag
            if not (r2 <= BLOWUP_ABS2) or not (v <= 1e300):
                blown = True
            if v > sup:
                sup = v
        if s % stride == 0:
            for j in range(n):
                rec[n_rec, j] = A[0, j]
            rec_steps[n_rec] = s
            n_rec += 1
        if blown:
            status = STATUS_BLOWUP
            stop = s
            break
        if sup < tol:
            status = STATUS_CONVERGED
            stop = s
            break
        if s == max_steps:
            stop = s
            break
        for j in range(n):
            tmp[0, j] = A[0, j] + 0.5 * dt * k1[0, j]
        _mf_drift(tmp, J, delta, g, u, gamma, k2, active)
        for j in range(n):
            tmp[0, j] = A[0, j] + 0.5 * dt * k2[0, j]
        _mf_drift(tmp, J, delta, g, u, gamma, k3, active)
        for j in range(n):
            tmp[0, j] = A[0, j] + dt * k3[0, j]
        _mf_drift(tmp, J, delta, g, u, gamma, k4, active)
        for j in range(n):
            A[0, j] = A[0, j] + (dt / 6.0) * (
                k1[0, j] + 2.0 * k2[0, j] + 2.0 * k3[0, j] + k4[0, j]
            )
    if stop % stride != 0:
        for j in range(n):
            rec[n_rec, j] = A[0, j]
        rec_steps[n_rec] = stop
        n_rec += 1
    return status, stop, n_rec


@njit(cache=True, nogil=True)
def em_segment(alpha, J, delta, g, u, gamma, dt, noise, step0, burn_steps, stride, samples, filled):
    """Euler-Maruyama segment for one stochastic trajectory.

    Drift (symmetric-ordering convention, note the +u frequency shift
    relative to the mean-field equation):

        d alpha_j/dt = i*(delta - u*(|alpha_j|^2 - 1))*alpha_j
                       - (gamma/2)*alpha_j - i*g*conj(alpha_j)
                       + (i/2) * sum_k J_jk alpha_k

    `noise` holds one pre-drawn complex increment per step and site.  The
    state is sampled into `samples` at every global step index (step0 +
    local + 1) that is past `burn_steps` and a multiple of `stride` beyond
    it.  Returns (status, new_filled).
    """
    n = alpha.shape[0]
    seg_steps = noise.shape[0]
    d = np.zeros(n, dtype=np.complex128)
    for s in range(seg_steps):
        for j in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += J[j, k] * alpha[k]
            a = alpha[j]
            r2 = a.real * a.real + a.imag * a.imag
            if not (r2 <= BLOWUP_ABS2):
                return STATUS_BLOWUP, filled
            d[j] = (
                1j * (delta - u * (r2 - 1.0)) * a
                - 0.5 * gamma * a
                - 1j * g * np.conj(a)
                + 0.5j * acc
            )
        for j in range(n):
            alpha[j] = alpha[j] + d[j] * dt + noise[s, j]
        g_step = step0 + s + 1
        if g_step > burn_steps and (g_step - burn_steps) % stride == 0:
            for j in range(n):
                samples[filled, j] = alpha[j]
            filled += 1
    return STATUS_CONVERGED, filled
