"""Campaign orchestration: landscape sweeps and selection histograms.

All campaigns are deterministic functions of (inputs, master_seed): random
streams derive from the master seed through fixed (cell, repeat) paths and
results land in position-indexed arrays, so thread count and completion
order never change the output.  Grid cells below the oscillation threshold
are masked analytically and never integrated (all oscillators decay to zero
there, so no spin state is defined).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import UndefinedSpinError
from .ising import as_coupling, batch_ising_energies
from .linear import threshold
from .meanfield import IntegratorConfig, binarization_residual, random_initial, readout_spins
from .rng import TAG_CELL, TAG_DELTA, TAG_REPEAT, child_seed
from .twa import INITIAL_SCALE, run_distribution

#: cells with g below g_th minus this slack are masked as below threshold
MASK_SLACK = 1e-12


@dataclass(frozen=True)
class SweepGrid:
    """Detuning/pump grid for landscape sweeps.

    Exactly one of gs (absolute pump values) or g_relative (multipliers
    applied to the detuning-dependent threshold) must be given to sweep;
    a bare detuning grid is enough for threshold-curve style scans.
    """

    deltas: tuple
    gs: tuple | None = None
    g_relative: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if self.gs is not None:
            object.__setattr__(self, "gs", tuple(float(g) for g in self.gs))
        if self.g_relative is not None:
            object.__setattr__(self, "g_relative", tuple(float(g) for g in self.g_relative))
        if len(self.deltas) == 0:
            raise ValueError("deltas axis must be nonempty")
        if np.any(np.diff(self.deltas) <= 0):
            raise ValueError("deltas must be strictly increasing")
        if self.gs is not None and self.g_relative is not None:
            raise ValueError("give either gs or g_relative, not both")
        for name, axis in (("gs", self.gs), ("g_relative", self.g_relative)):
            if axis is not None:
                if len(axis) == 0:
                    raise ValueError(f"{name} axis must be nonempty")
                if np.any(np.diff(axis) <= 0):
                    raise ValueError(f"{name} must be strictly increasing")

    @property
    def n_g(self):
        axis = self.gs if self.gs is not None else self.g_relative
        if axis is None:
            raise ValueError("grid has no pump axis (gs or g_relative)")
        return len(axis)

    def g_values_at(self, g_th):
        """Pump values for one detuning, resolving g_relative against g_th."""
        if self.gs is not None:
            return np.asarray(self.gs)
        return g_th * np.asarray(self.g_relative)


@dataclass(frozen=True)
class SweepResult:
    """Per-cell statistics of a landscape sweep.

    mean_energy is NaN for masked cells and for cells with no usable
    repeats (n_ok == 0, reported but not integrated into any average).
    """

    grid: SweepGrid
    g_values: np.ndarray  # (n_delta, n_g) actual pump value per cell
    g_th_per_delta: np.ndarray
    mean_energy: np.ndarray  # (n_delta, n_g)
    n_ok: np.ndarray  # (n_delta, n_g) repeats entering the mean
    masked: np.ndarray  # (n_delta, n_g) bool, below threshold
    n_repeats: int


@dataclass(frozen=True)
class CellStats:
    """Converged-repeat statistics of one mean-field grid cell."""

    energies: np.ndarray
    n_ok: int
    n_unconverged: int
    n_failed: int
    max_residual: float

    @property
    def mean_energy(self):
        return float(self.energies.mean()) if self.n_ok else float("nan")


def meanfield_cell(J, params, n_repeats, cfg=None, seed=None):
    """Integrate n_repeats random-initial trajectories at fixed (delta, g).

    All repeats advance together in one batched RK4 call; repeat r draws its
    initial state from the stream (seed, TAG_REPEAT, r).  Only converged
    trajectories with a defined spin readout enter `energies`; unconverged
    and blown-up repeats are counted separately.
    """
    cfg = cfg or IntegratorConfig()
    if seed is None:
        raise ValueError("meanfield_cell requires an explicit seed")
    J = as_coupling(J)
    n = J.shape[0]
    A = np.zeros((n_repeats, n), dtype=complex)
    for r in range(n_repeats):
        A[r] = random_initial(n, INITIAL_SCALE, child_seed(seed, TAG_REPEAT, r))
    status, _steps = _kernels.rk4_ensemble(
        A, J, params.delta, params.g, params.u, params.gamma,
        cfg.dt, cfg.max_steps, cfg.convergence_tol,
    )
    ok_rows = []
    n_unconverged = int(np.sum(status == _kernels.STATUS_MAX_STEPS))
    n_failed = int(np.sum(status == _kernels.STATUS_BLOWUP))
    max_residual = 0.0
    spins = np.zeros((n_repeats, n), dtype=np.int64)
    for r in range(n_repeats):
        if status[r] != _kernels.STATUS_CONVERGED:
            continue
        try:
            spins[r] = readout_spins(A[r])
        except UndefinedSpinError:
            n_failed += 1
            continue
        ok_rows.append(r)
        max_residual = max(max_residual, binarization_residual(A[r], params))
    if ok_rows:
        energies = batch_ising_energies(J, spins[ok_rows])
    else:
        energies = np.zeros(0)
    return CellStats(
        energies=energies,
        n_ok=len(ok_rows),
        n_unconverged=n_unconverged,
        n_failed=n_failed,
        max_residual=max_residual,
    )


def _sweep_frame(J, grid, params_base):
    """Common sweep scaffolding: thresholds, pump values and the mask."""
    n_delta, n_g = len(grid.deltas), grid.n_g
    g_th = np.array([threshold(params_base.with_drive(delta=d), J) for d in grid.deltas])
    g_values = np.vstack([grid.g_values_at(g_th[i]) for i in range(n_delta)])
    masked = g_values < (g_th[:, None] - MASK_SLACK)
    return n_delta, n_g, g_th, g_values, masked


def _run_cells(cells, worker, threads):
    """Evaluate worker over cell indices, optionally with a thread pool."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, cells))
    return [worker(c) for c in cells]


def meanfield_sweep(J, grid, params_base, n_repeats=50, master_seed=None, cfg=None, threads=1):
    """Mean Ising energy of converged mean-field steady states per grid cell.

    Cell (i, j) uses the seed path (master_seed, TAG_CELL, i*n_g + j); a
    sweep over a single cell therefore reproduces meanfield_cell called with
    that derived seed exactly.
    """
    if master_seed is None:
        raise ValueError("meanfield_sweep requires an explicit master_seed")
    J = as_coupling(J)
    n_delta, n_g, g_th, g_values, masked = _sweep_frame(J, grid, params_base)
    mean_energy = np.full((n_delta, n_g), np.nan)
    n_ok = np.zeros((n_delta, n_g), dtype=np.int64)
    todo = [(i, j) for i in range(n_delta) for j in range(n_g) if not masked[i, j]]

    def worker(cell):
        i, j = cell
        params = params_base.with_drive(delta=grid.deltas[i], g=g_values[i, j])
        seed = child_seed(master_seed, TAG_CELL, i * n_g + j)
        return meanfield_cell(J, params, n_repeats, cfg=cfg, seed=seed)

    for (i, j), stats in zip(todo, _run_cells(todo, worker, threads)):
        mean_energy[i, j] = stats.mean_energy
        n_ok[i, j] = stats.n_ok
    return SweepResult(
        grid=grid,
        g_values=g_values,
        g_th_per_delta=g_th,
        mean_energy=mean_energy,
        n_ok=n_ok,
        masked=masked,
        n_repeats=n_repeats,
    )


def twa_sweep(J, grid, params_base, cfg=None, master_seed=None, threads=1, noise_scale=1.0):
    """Mean Ising energy over pooled stochastic samples per grid cell.

    Cell (i, j) runs a full distribution with master seed derived from
    (master_seed, TAG_CELL, i*n_g + j), so a single-cell sweep equals
    run_distribution called with that derived seed.
    """
    if master_seed is None:
        raise ValueError("twa_sweep requires an explicit master_seed")
    J = as_coupling(J)
    n_delta, n_g, g_th, g_values, masked = _sweep_frame(J, grid, params_base)
    mean_energy = np.full((n_delta, n_g), np.nan)
    n_ok = np.zeros((n_delta, n_g), dtype=np.int64)
    todo = [(i, j) for i in range(n_delta) for j in range(n_g) if not masked[i, j]]

    def worker(cell):
        i, j = cell
        params = params_base.with_drive(delta=grid.deltas[i], g=g_values[i, j])
        seed = child_seed(master_seed, TAG_CELL, i * grid.n_g + j)
        return run_distribution(J, params, cfg=cfg, master_seed=seed, noise_scale=noise_scale)

    results = _run_cells(todo, worker, threads)
    n_repeats = (cfg.n_repeats if cfg is not None else 10)
    for (i, j), hist in zip(todo, results):
        mean_energy[i, j] = hist.mean_energy
        n_ok[i, j] = n_repeats - len(hist.failed_repeats)
    return SweepResult(
        grid=grid,
        g_values=g_values,
        g_th_per_delta=g_th,
        mean_energy=mean_energy,
        n_ok=n_ok,
        masked=masked,
        n_repeats=n_repeats,
    )


@dataclass(frozen=True)
class HistogramRun:
    """One selection histogram with the drive it was produced at."""

    delta: float
    g: float
    g_th: float
    histogram: object


def selection_histograms(J, params_base, cfg=None, master_seed=None,
                         deltas=(-0.2, 0.0, 0.2), g_above=1.001, threads=1):
    """Energy histograms at several detunings with the pump just above threshold.

    For each detuning the pump is set to g_above times the analytic
    mean-field threshold (default 0.1% above) and a pooled distribution run
    is performed with seed path (master_seed, TAG_DELTA, index).
    """
    if master_seed is None:
        raise ValueError("selection_histograms requires an explicit master_seed")
    J = as_coupling(J)
    runs = []
    for i, d in enumerate(deltas):
        g_th = threshold(params_base.with_drive(delta=d), J)
        g = g_above * g_th
        params = params_base.with_drive(delta=d, g=g)
        seed = child_seed(master_seed, TAG_DELTA, i)
        hist = run_distribution(J, params, cfg=cfg, master_seed=seed, threads=threads)
        runs.append(HistogramRun(delta=float(d), g=float(g), g_th=float(g_th), histogram=hist))
    return runs
