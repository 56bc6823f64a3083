"""Network of Kerr parametric oscillators as an Ising state selector.

The library covers four layers:

* ``ising``       -- coupling graphs, Ising/XY energies, exhaustive spectrum
* ``linear``      -- oscillation threshold and the detuning-selected state
* ``meanfield``   -- deterministic amplitude dynamics and spin readout
* ``twa``         -- stochastic (truncated-Wigner) dynamics and histograms
* ``experiments`` -- deterministic sweep and histogram campaigns

See README.md for the command-line interface and the demo scripts.
"""

from .errors import (
    AmbiguousSignError,
    BelowThresholdError,
    BlowupError,
    ConfigError,
    KposimError,
    SizeLimitError,
    UndefinedSpinError,
)
from .experiments import (
    CellStats,
    HistogramRun,
    SweepGrid,
    SweepResult,
    meanfield_cell,
    meanfield_sweep,
    selection_histograms,
    twa_sweep,
)
from .ising import (
    GraphSpec,
    IsingSpectrum,
    as_coupling,
    batch_ising_energies,
    build_graph,
    enumerate_spectrum,
    ising_energy,
    make_chain,
    make_random_binary,
    xy_energy,
)
from .linear import (
    CurvePoint,
    ModeSpectrum,
    ThresholdReport,
    linear_eigenvalues,
    linear_evolution_matrix,
    max_growth_rate,
    mode_coupling_matrix,
    mode_spectrum,
    state_at_threshold,
    threshold,
    threshold_energy_curve,
)
from .meanfield import (
    AMPLITUDE_FLOOR,
    IntegratorConfig,
    TrajectoryRecord,
    binarization_residual,
    drift,
    drift_blockform,
    integrate,
    random_initial,
    readout_spins,
    single_kpo_fixed_point,
)
from .params import KpoParams
from .twa import (
    EnergyHistogram,
    SdeConfig,
    energy_histogram,
    integrate_sde,
    noise_increment,
    run_distribution,
    sample_spins,
)

__version__ = "0.1.0"
