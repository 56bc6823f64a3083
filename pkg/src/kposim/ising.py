"""Coupling graphs, Ising/XY energies and brute-force spectrum enumeration.

The coupling matrix J is a plain numpy array: real, symmetric, zero
diagonal.  Spin configurations are integer arrays with entries +1/-1.
Energies use the full double sum

    E(sigma) = - sum_{j,k} J_jk sigma_j sigma_k

so every edge is counted twice; the spectrum enumeration and all histograms
use the same convention throughout.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError
from .rng import TAG_GRAPH, stream

#: exhaustive enumeration guard: 2^n configurations
MAX_ENUMERATION_SIZE = 24

#: relative tolerance used to group floating-point energies into levels
LEVEL_CLUSTER_RTOL = 1e-9


def as_coupling(J, min_n=2):
    """Validate and return a coupling matrix as a float array.

    Requires a square, real, symmetric matrix with zero diagonal and at
    least ``min_n`` rows.  Dynamics accepts min_n=1 (a single oscillator has
    a trivial 1x1 zero coupling); Ising instances require min_n=2.
    """
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError(f"coupling matrix must be square, got shape {J.shape}")
    n = J.shape[0]
    if n < min_n:
        raise ValueError(f"coupling matrix must be at least {min_n}x{min_n}, got n={n}")
    if not np.all(np.isfinite(J)):
        raise ValueError("coupling matrix contains non-finite entries")
    if not np.array_equal(J, J.T):
        raise ValueError("coupling matrix must be symmetric")
    if np.any(np.diag(J) != 0.0):
        raise ValueError("coupling matrix must have zero diagonal")
    return J


def as_spins(sigma, n):
    """Validate a spin configuration of length n with entries +1/-1."""
    sigma = np.asarray(sigma)
    if sigma.shape != (n,):
        raise ValueError(f"spin configuration must have shape ({n},), got {sigma.shape}")
    if not np.all(np.abs(sigma) == 1):
        raise ValueError("spins must be +1 or -1")
    return sigma.astype(np.int64)


def ising_energy(J, sigma):
    """Double-sum Ising energy -sum_{j,k} J_jk sigma_j sigma_k."""
    J = as_coupling(J)
    sigma = as_spins(sigma, J.shape[0])
    return float(-(sigma @ J @ sigma))


def batch_ising_energies(J, spins):
    """Ising energies of a (m, n) batch of spin configurations."""
    J = as_coupling(J)
    spins = np.asarray(spins, dtype=float)
    if spins.ndim != 2 or spins.shape[1] != J.shape[0]:
        raise ValueError(f"expected shape (m, {J.shape[0]}), got {spins.shape}")
    return -np.einsum("ij,jk,ik->i", spins, J, spins)


def xy_energy(J, phases):
    """Planar-spin energy -sum_{j,k} J_jk cos(phi_j - phi_k).

    Reduces to ising_energy of the sign readout whenever all pairwise phase
    differences are 0 or +-pi.
    """
    J = as_coupling(J)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (J.shape[0],):
        raise ValueError(f"phases must have shape ({J.shape[0]},), got {phases.shape}")
    diff = phases[:, None] - phases[None, :]
    return float(-np.sum(J * np.cos(diff)))


@dataclass(frozen=True)
class IsingSpectrum:
    """Full Ising spectrum: strictly increasing energies with degeneracies.

    Degeneracies sum to 2^n and are all even (global spin flip maps every
    configuration to one with the same energy).
    """

    energies: np.ndarray
    degeneracies: np.ndarray
    n: int

    def __post_init__(self):
        if np.any(np.diff(self.energies) <= 0):
            raise ValueError("spectrum energies must be strictly increasing")
        if int(self.degeneracies.sum()) != 2**self.n:
            raise ValueError("spectrum degeneracies must sum to 2^n")
        if np.any(self.degeneracies % 2 != 0):
            raise ValueError("spectrum degeneracies must all be even")

    @property
    def min_energy(self):
        return float(self.energies[0])

    @property
    def max_energy(self):
        return float(self.energies[-1])

    def levels(self):
        """List of (energy, degeneracy) pairs, lowest energy first."""
        return list(zip(self.energies.tolist(), self.degeneracies.astype(int).tolist()))


def _config_block(start, stop, n):
    """Spin configurations with sigma_0 = +1 for indices [start, stop)."""
    idx = np.arange(start, stop, dtype=np.uint32)
    bits = (idx[:, None] >> np.arange(n - 1, dtype=np.uint32)) & 1
    spins = np.empty((len(idx), n))
    spins[:, 0] = 1.0
    spins[:, 1:] = 2.0 * bits - 1.0
    return spins


def enumerate_spectrum(J, block_size=1 << 17):
    """Exhaustive spectrum of all 2^n configurations, grouped into levels.

    Only the half-space sigma_0 = +1 is enumerated; degeneracies are doubled
    since E(sigma) == E(-sigma) exactly.  Energies within a relative gap of
    LEVEL_CLUSTER_RTOL are treated as one level, which absorbs the
    last-digit rounding spread of summing the same +-J_jk terms in different
    orders.  Refuses instances with more than MAX_ENUMERATION_SIZE spins.
    """
    J = as_coupling(J)
    n = J.shape[0]
    if n > MAX_ENUMERATION_SIZE:
        raise SizeLimitError(
            f"enumeration of 2^{n} configurations refused (limit n <= {MAX_ENUMERATION_SIZE})"
        )
    total = 1 << (n - 1)
    energies = np.empty(total)
    for start in range(0, total, block_size):
        stop = min(start + block_size, total)
        spins = _config_block(start, stop, n)
        energies[start:stop] = -np.einsum("ij,jk,ik->i", spins, J, spins)
    energies.sort()
    tol = LEVEL_CLUSTER_RTOL * max(1.0, abs(energies[0]), abs(energies[-1]))
    # cluster boundaries where the sorted gap exceeds tol
    splits = np.flatnonzero(np.diff(energies) > tol) + 1
    starts = np.concatenate(([0], splits))
    stops = np.concatenate((splits, [total]))
    levels = np.add.reduceat(energies, starts) / (stops - starts)
    degeneracies = 2 * (stops - starts)
    return IsingSpectrum(energies=levels, degeneracies=degeneracies, n=n)


def make_chain(n, J):
    """Ferromagnetic periodic chain: J_jk = J for |j-k| = 1, plus the
    closing bond between sites 0 and n-1.  Requires n >= 3 and J > 0."""
    if n < 3:
        raise ValueError(f"chain needs n >= 3, got {n}")
    if not J > 0:
        raise ValueError(f"chain coupling must be > 0, got {J}")
    m = np.zeros((n, n))
    for j in range(n):
        m[j, (j + 1) % n] = J
        m[(j + 1) % n, j] = J
    return m


def make_random_binary(n, J, density, seed):
    """Random binary sparse graph: each unordered pair carries +-J with equal
    probability, independently present with the given edge density.

    Deterministic for a fixed seed: edge presence uniforms are drawn first,
    then edge signs, from the stream (seed, TAG_GRAPH).
    """
    if n < 2:
        raise ValueError(f"random graph needs n >= 2, got {n}")
    if not J > 0:
        raise ValueError(f"coupling magnitude must be > 0, got {J}")
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = stream(seed, TAG_GRAPH)
    rows, cols = np.triu_indices(n, 1)
    present = rng.random(len(rows)) < density
    signs = 2 * rng.integers(0, 2, len(rows)) - 1
    vals = np.where(present, signs * J, 0.0)
    m = np.zeros((n, n))
    m[rows, cols] = vals
    m[cols, rows] = vals
    return m


@dataclass(frozen=True)
class GraphSpec:
    """Declarative description of one of the built-in coupling graphs."""

    kind: str  # "chain" or "random_binary"
    n: int
    J: float
    density: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("chain", "random_binary"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if not self.J > 0:
            raise ValueError(f"J must be > 0, got {self.J}")
        if self.kind == "random_binary":
            if self.density is None or not 0.0 <= self.density <= 1.0:
                raise ValueError(f"density must be in [0, 1], got {self.density}")
            if self.seed is None or self.seed < 0:
                raise ValueError("random_binary graph needs a non-negative seed")


def build_graph(spec):
    """Materialize a GraphSpec into a coupling matrix."""
    if spec.kind == "chain":
        return make_chain(spec.n, spec.J)
    return make_random_binary(spec.n, spec.J, spec.density, spec.seed)
