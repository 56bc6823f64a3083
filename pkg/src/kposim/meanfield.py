"""Deterministic mean-field dynamics of the coupled oscillator amplitudes.

The state is a complex vector A with A_j = X_j + i*Y_j.  The drift

    dA_j/dt = i*delta*A_j - i*g*conj(A_j) - i*u*|A_j|^2*A_j
              + (i/2) * sum_k J_jk A_k - (gamma/2)*A_j

is integrated with classical fixed-step RK4; a trajectory counts as
converged once the drift sup-norm drops below the configured tolerance,
which directly certifies the fixed-point property used by the readout.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BelowThresholdError, BlowupError, UndefinedSpinError
from .ising import as_coupling
from .linear import linear_evolution_matrix
from .rng import TAG_INIT, stream

#: oscillators with |A| at or below this have no meaningful phase
AMPLITUDE_FLOOR = 1e-8


def drift(A, params, J):
    """Mean-field time derivative dA/dt; works on any (..., n) state array."""
    J = as_coupling(J, min_n=1)
    A = np.asarray(A, dtype=complex)
    if A.shape[-1] != J.shape[0]:
        raise ValueError(f"state has {A.shape[-1]} sites, coupling matrix has {J.shape[0]}")
    r2 = A.real**2 + A.imag**2
    return (
        (1j * params.delta - 0.5 * params.gamma) * A
        - 1j * params.g * np.conj(A)
        - 1j * params.u * r2 * A
        + 0.5j * (A @ J)
    )


def drift_blockform(A, params, J):
    """Same drift evaluated through the real 2n block form.

    The stacked quadrature vector (X; Y) evolves as S @ (X; Y) + u * Z with
    S the explicit linear evolution matrix and Z = (|A|^2 Y; -|A|^2 X).
    Used as an independent cross-check of `drift`.
    """
    J = as_coupling(J, min_n=1)
    A = np.asarray(A, dtype=complex)
    S = linear_evolution_matrix(params, J)
    x, y = A.real, A.imag
    w = np.concatenate([x, y])
    r2 = x**2 + y**2
    Z = np.concatenate([r2 * y, -r2 * x])
    dw = S @ w + params.u * Z
    n = J.shape[0]
    return dw[:n] + 1j * dw[n:]


def single_kpo_fixed_point(params):
    """Closed-form nonzero steady state (R, phi) of a single oscillator.

    R = sqrt((delta + sqrt(g^2 - gamma^2/4)) / u) and
    tan(phi) = (gamma/2) / (sqrt(g^2 - gamma^2/4) - g), with phi in
    (pi/2, pi).  The second root is phi - pi; both have the same R.

    Raises BelowThresholdError for g < sqrt(gamma^2/4 + delta^2), where the
    only stable state is the origin.
    """
    g_th = math.sqrt(0.25 * params.gamma**2 + params.delta**2)
    if params.g < g_th:
        raise BelowThresholdError(
            f"g={params.g} is below the single-oscillator threshold {g_th}"
        )
    if params.u <= 0:
        raise ValueError("closed-form fixed point needs u > 0")
    s = math.sqrt(max(params.g**2 - 0.25 * params.gamma**2, 0.0))
    if params.delta + s < 0:
        raise ValueError(
            f"delta + sqrt(g^2 - gamma^2/4) = {params.delta + s} < 0: no real amplitude"
        )
    R = math.sqrt((params.delta + s) / params.u)
    phi = math.atan2(0.5 * params.gamma, s - params.g)
    return R, phi


def random_initial(n, scale=0.01, seed=None):
    """Uniform random initial amplitudes: X_j, Y_j ~ U[-scale, scale].

    Deterministic per seed (stream (seed, TAG_INIT)); seed is required.
    """
    if seed is None:
        raise ValueError("random_initial requires an explicit seed")
    if not scale > 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    rng = stream(seed, TAG_INIT)
    xy = rng.uniform(-scale, scale, size=(2, n))
    return xy[0] + 1j * xy[1]


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings (times in units of 1/gamma).

    dt is capped at 0.05, which keeps RK4 comfortably stable for the rate
    scales this model is run at (gamma = 1, |J| <= O(1)).
    """

    dt: float = 0.01
    t_max: float = 500.0
    convergence_tol: float = 1e-9
    record_stride: int = 1

    def __post_init__(self):
        if not 0 < self.dt <= 0.05:
            raise ValueError(f"dt must be in (0, 0.05], got {self.dt}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if not self.convergence_tol > 0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")

    @property
    def max_steps(self):
        return int(round(self.t_max / self.dt))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Recorded trajectory: states[i] is the state at times[i]."""

    times: np.ndarray
    states: np.ndarray
    converged: bool
    final: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("record times must be strictly increasing")
        if len(self.times) != len(self.states):
            raise ValueError("times and states length mismatch")


def integrate(A0, params, J, cfg=None):
    """Integrate the mean-field dynamics from A0 until convergence or t_max.

    Returns a TrajectoryRecord with states recorded every
    cfg.record_stride steps (plus the final state).  Raises BlowupError if
    any |A_j| exceeds 1e6 or the state becomes non-finite.
    """
    cfg = cfg or IntegratorConfig()
    J = as_coupling(J, min_n=1)
    A = np.asarray(A0, dtype=complex)
    if A.shape != (J.shape[0],):
        raise ValueError(f"initial state must have shape ({J.shape[0]},), got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("initial state contains non-finite entries")
    max_steps = cfg.max_steps
    cap = max_steps // cfg.record_stride + 2
    rec = np.zeros((cap, J.shape[0]), dtype=complex)
    rec_steps = np.zeros(cap, dtype=np.int64)
    Awork = A[None, :].copy()
    status, stop, n_rec = _kernels.rk4_trajectory(
        Awork,
        J,
        params.delta,
        params.g,
        params.u,
        params.gamma,
        cfg.dt,
        max_steps,
        cfg.convergence_tol,
        cfg.record_stride,
        rec,
        rec_steps,
    )
    if status == _kernels.STATUS_BLOWUP:
        raise BlowupError(
            f"amplitude blowup at t={stop * cfg.dt:.3g} (|A| > 1e6 or non-finite)"
        )
    return TrajectoryRecord(
        times=rec_steps[:n_rec] * cfg.dt,
        states=rec[:n_rec].copy(),
        converged=status == _kernels.STATUS_CONVERGED,
        final=Awork[0].copy(),
    )


def readout_spins(A, amplitude_floor=AMPLITUDE_FLOOR):
    """Ising spins from oscillator phases: +1 for arg(A_j) in [0, pi],
    -1 for arg(A_j) in (-pi, 0).

    Raises UndefinedSpinError if any |A_j| <= amplitude_floor (the
    oscillator is not oscillating, so its phase carries no spin).
    """
    A = np.asarray(A, dtype=complex)
    mags = np.abs(A)
    if np.any(mags <= amplitude_floor):
        worst = int(np.argmin(mags))
        raise UndefinedSpinError(
            f"oscillator {worst} has |A|={mags[worst]:.3g} <= floor {amplitude_floor:g}"
        )
    ang = np.angle(A)
    return np.where((ang < 0) & (ang > -np.pi), -1, 1).astype(np.int64)


def binarization_residual(A, params, amplitude_floor=AMPLITUDE_FLOOR):
    """Deviation from the binarized-phase fixed-point condition.

    At any nonzero fixed point the phases satisfy
    sin(2*phi_j) = -gamma/(2*g); returns max_j |sin(2*phi_j) + gamma/(2*g)|.
    """
    if not params.g > 0:
        raise ValueError("binarization residual needs g > 0")
    A = np.asarray(A, dtype=complex)
    mags = np.abs(A)
    if np.any(mags <= amplitude_floor):
        raise UndefinedSpinError("binarization residual undefined below amplitude floor")
    return float(np.abs(np.sin(2.0 * np.angle(A)) + 0.5 * params.gamma / params.g).max())
