"""Threshold analysis of the linearized network: everything derivable
without time integration.

The linearized quadrature dynamics around the origin is governed by a
2n x 2n block matrix built from K = delta*I + J/2.  Its eigenvalues come in
pairs

    lambda_q(+-) = -gamma/2 +- sqrt(g^2 - z_q),    z_q = (delta + c_q/2)^2

with c_q the eigenvalues of J, so the oscillation threshold is
g_th = sqrt(gamma^2/4 + z_min) and the mode that first crosses threshold is
the eigenvector of J whose z_q attains z_min.  The sign pattern of that
eigenvector is the Ising state selected at threshold.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousSignError
from .ising import as_coupling, ising_energy

#: relative gap under which z eigenvalues are treated as one eigenspace
DEGENERACY_RTOL = 1e-9

#: eigenvector components below this (times the vector norm) have no
#: trustworthy sign
SIGN_ZERO_TOL = 1e-9


def mode_coupling_matrix(J, delta):
    """Linear mode-coupling matrix K = delta*I + J/2."""
    J = as_coupling(J, min_n=1)
    return delta * np.eye(J.shape[0]) + 0.5 * J


def linear_evolution_matrix(params, J):
    """Explicit 2n x 2n evolution matrix of the linearized (X, Y) dynamics.

    Block layout: [[-gamma/2 I, -g I - K], [-g I + K, -gamma/2 I]], acting on
    the stacked quadrature vector (X_1..X_n, Y_1..Y_n).
    """
    J = as_coupling(J, min_n=1)
    n = J.shape[0]
    K = mode_coupling_matrix(J, params.delta)
    eye = np.eye(n)
    top = np.hstack([-0.5 * params.gamma * eye, -params.g * eye - K])
    bot = np.hstack([-params.g * eye + K, -0.5 * params.gamma * eye])
    return np.vstack([top, bot])


@dataclass(frozen=True)
class ModeSpectrum:
    """Eigen-decomposition of J with the derived squared detunings.

    coupling_eigs    : eigenvalues c_q of J, ascending
    squared_detuning : z_q = (delta + c_q/2)^2, aligned with coupling_eigs
    eigenvectors     : orthonormal eigenvectors of J as columns, aligned
    delta            : detuning the z values were computed for
    """

    coupling_eigs: np.ndarray
    squared_detuning: np.ndarray
    eigenvectors: np.ndarray
    delta: float

    @property
    def z_min(self):
        return float(self.squared_detuning.min())


def mode_spectrum(J, delta):
    """Eigen-decomposition of J plus z_q = (delta + c_q/2)^2 for each mode.

    Verifies that the returned columns are orthonormal eigenvectors of J and
    of K^2 (with eigenvalue z_q) before returning.
    """
    J = as_coupling(J, min_n=1)
    n = J.shape[0]
    c, V = np.linalg.eigh(J)
    z = (delta + 0.5 * c) ** 2
    scale = max(1.0, float(np.abs(c).max(initial=0.0)))
    if np.abs(V.T @ V - np.eye(n)).max() > 1e-10:
        raise ArithmeticError("eigensolver returned non-orthonormal eigenvectors")
    if np.abs(J @ V - V * c).max() > 1e-8 * scale:
        raise ArithmeticError("eigensolver residual too large for J")
    K = mode_coupling_matrix(J, delta)
    K2 = K @ K
    zscale = max(1.0, float(z.max(initial=0.0)))
    if np.abs(K2 @ V - V * z).max() > 1e-8 * zscale:
        raise ArithmeticError("eigenvectors of J failed the K^2 consistency check")
    return ModeSpectrum(coupling_eigs=c, squared_detuning=z, eigenvectors=V, delta=float(delta))


def linear_eigenvalues(params, J):
    """All 2n eigenvalues -gamma/2 +- sqrt(g^2 - z_q) of the linearized dynamics.

    Returned as a complex array: the first n entries take the + branch and
    the last n the - branch, each aligned with ascending c_q.  Modes with
    g^2 < z_q give a conjugate pair with real part -gamma/2.
    """
    ms = mode_spectrum(J, params.delta)
    root = np.sqrt(params.g**2 - ms.squared_detuning + 0j)
    return np.concatenate([-0.5 * params.gamma + root, -0.5 * params.gamma - root])


def max_growth_rate(params, J):
    """Largest real part among the linear eigenvalues."""
    return float(linear_eigenvalues(params, J).real.max())


def threshold(params, J):
    """Oscillation threshold g_th = sqrt(gamma^2/4 + z_min).

    Smallest pump amplitude at which the largest linear eigenvalue crosses
    zero; depends on params only through gamma and delta.
    """
    ms = mode_spectrum(J, params.delta)
    return float(np.sqrt(0.25 * params.gamma**2 + ms.z_min))


@dataclass(frozen=True)
class ThresholdReport:
    """Ising state(s) selected at the oscillation threshold.

    selected_states holds the sign pattern of every eigenvector in the z_min
    eigenspace whose components all have a well-defined sign (global sign
    fixed so the first component is +1); degenerate is True when that
    eigenspace has dimension > 1.  n_ambiguous counts eigenvectors skipped
    because a component was within SIGN_ZERO_TOL of zero.
    """

    g_th: float
    z_min: float
    selected_states: list = field(default_factory=list)
    selected_energy: float = float("nan")
    degenerate: bool = False
    n_ambiguous: int = 0

    def to_dict(self):
        """JSON-ready representation (spin patterns as plain lists)."""
        return {
            "g_th": self.g_th,
            "z_min": self.z_min,
            "selected_states": [s.tolist() for s in self.selected_states],
            "selected_energy": self.selected_energy,
            "degenerate": self.degenerate,
            "n_ambiguous": self.n_ambiguous,
        }


def state_at_threshold(J, delta, gamma=1.0):
    """Threshold-selected Ising state(s) for a given detuning.

    The mode(s) attaining z_min are the eigenvectors of K^2 that first cross
    threshold; with all steady amplitudes positive, the sign pattern of such
    an eigenvector is the selected spin configuration.  Raises
    AmbiguousSignError if no eigenvector in the z_min eigenspace has a fully
    resolved sign pattern.
    """
    J = as_coupling(J)
    ms = mode_spectrum(J, delta)
    z = ms.squared_detuning
    z_min = float(z.min())
    tol = DEGENERACY_RTOL * max(1.0, float(z.max()))
    members = np.flatnonzero(z - z_min <= tol)
    degenerate = len(members) > 1
    states = []
    n_ambiguous = 0
    for q in members:
        v = ms.eigenvectors[:, q]
        if np.min(np.abs(v)) < SIGN_ZERO_TOL * np.linalg.norm(v):
            n_ambiguous += 1
            continue
        sigma = np.where(v > 0, 1, -1).astype(np.int64)
        if sigma[0] < 0:
            sigma = -sigma
        states.append(sigma)
    g_th = float(np.sqrt(0.25 * gamma**2 + z_min))
    if not states:
        raise AmbiguousSignError(
            f"all {len(members)} eigenvector(s) of the z_min eigenspace at "
            f"delta={delta} have near-zero components; sign readout undefined"
        )
    energy = ising_energy(J, states[0])
    return ThresholdReport(
        g_th=g_th,
        z_min=z_min,
        selected_states=states,
        selected_energy=energy,
        degenerate=degenerate,
        n_ambiguous=n_ambiguous,
    )


@dataclass(frozen=True)
class CurvePoint:
    """One detuning sample of the threshold-energy curve."""

    delta: float
    g_th: float
    energy: float  # NaN when ambiguous
    degenerate: bool
    ambiguous: bool


def threshold_energy_curve(J, deltas, gamma=1.0):
    """Energy of the threshold-selected state on a grid of detunings.

    Detunings where the sign readout is undefined produce a flagged record
    (ambiguous=True, energy NaN) instead of aborting the sweep.  Output
    order follows the input grid.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if deltas.size == 0:
        raise ValueError("detuning grid must be nonempty")
    points = []
    for d in deltas:
        try:
            rep = state_at_threshold(J, float(d), gamma=gamma)
            points.append(
                CurvePoint(
                    delta=float(d),
                    g_th=rep.g_th,
                    energy=rep.selected_energy,
                    degenerate=rep.degenerate,
                    ambiguous=False,
                )
            )
        except AmbiguousSignError:
            ms = mode_spectrum(J, float(d))
            g_th = float(np.sqrt(0.25 * gamma**2 + ms.z_min))
            points.append(
                CurvePoint(
                    delta=float(d),
                    g_th=g_th,
                    energy=float("nan"),
                    degenerate=True,
                    ambiguous=True,
                )
            )
    return points
