"""Stochastic dynamics in the truncated-Wigner approximation.

Each trajectory obeys the Langevin equation

    d alpha_j/dt = i*(delta - u*(|alpha_j|^2 - 1))*alpha_j - (gamma/2)*alpha_j
                   - i*g*conj(alpha_j) + (i/2) * sum_k J_jk alpha_k
                   + sqrt(gamma/2) * chi(t)

with complex Gaussian white noise <chi(t) chi*(t')> = delta(t - t'),
<chi chi> = 0.  With the noise switched off this is exactly the mean-field
drift with detuning shifted by +u (symmetric-ordering frequency shift).
The noise is additive, so Euler-Maruyama integrates the stochastic term
exactly and the scheme is weakly first order in dt overall.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BlowupError, KposimError
from .ising import as_coupling, batch_ising_energies, enumerate_spectrum
from .meanfield import AMPLITUDE_FLOOR, random_initial
from .rng import TAG_NOISE, TAG_REPEAT, child_seed, stream

#: steps integrated per pre-drawn noise block (fixed: affects only memory)
SEGMENT_STEPS = 16384

#: initial-condition scale for distribution runs, matching the mean-field choice
INITIAL_SCALE = 0.01


@dataclass(frozen=True)
class SdeConfig:
    """Euler-Maruyama settings (times in units of 1/gamma).

    Defaults implement the long-sampling protocol: each repeat runs to
    t_final = 10000 sampling every 1.0, so 10 repeats pool 100000 points.
    """

    dt: float = 0.005
    t_final: float = 10000.0
    sample_interval: float = 1.0
    n_repeats: int = 10
    burn_in: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.sample_interval < self.dt:
            raise ValueError("sample_interval must be >= dt")
        if self.burn_in < 0 or self.t_final < self.burn_in:
            raise ValueError("need 0 <= burn_in <= t_final")
        if self.n_repeats < 1:
            raise ValueError(f"n_repeats must be >= 1, got {self.n_repeats}")

    @property
    def n_steps(self):
        return int(round(self.t_final / self.dt))

    @property
    def burn_steps(self):
        return int(round(self.burn_in / self.dt))

    @property
    def sample_stride(self):
        return max(1, int(round(self.sample_interval / self.dt)))

    @property
    def samples_per_run(self):
        return (self.n_steps - self.burn_steps) // self.sample_stride


def noise_increment(dt, gamma, rng, size=None):
    """Integrated noise term per Euler-Maruyama step.

    Returns (sqrt(gamma*dt)/2) * (u + i*v) with u, v independent standard
    normals, i.e. the white noise chi discretized as (u + i*v)/sqrt(2*dt)
    and multiplied by sqrt(gamma/2)*dt.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    shape = () if size is None else size
    u = rng.standard_normal(shape)
    v = rng.standard_normal(shape)
    return (np.sqrt(gamma * dt) / 2.0) * (u + 1j * v)


def integrate_sde(alpha0, params, J, cfg=None, seed=None, noise_scale=1.0):
    """Single stochastic trajectory; returns the sampled states.

    Samples the state every cfg.sample_interval after cfg.burn_in, giving a
    (cfg.samples_per_run, n) complex array.  The noise stream derives from
    (seed, TAG_NOISE); identical inputs and seed give a bit-identical sample
    sequence.  noise_scale rescales the stochastic term (0 turns the SDE
    into the deterministic drift) and exists for diagnostics and testing.

    Raises BlowupError if any |alpha_j| exceeds 1e6 or goes non-finite.
    """
    cfg = cfg or SdeConfig()
    if seed is None:
        raise ValueError("integrate_sde requires an explicit seed")
    J = as_coupling(J, min_n=1)
    n = J.shape[0]
    alpha = np.asarray(alpha0, dtype=complex).copy()
    if alpha.shape != (n,):
        raise ValueError(f"initial state must have shape ({n},), got {alpha.shape}")
    if not np.all(np.isfinite(alpha)):
        raise ValueError("initial state contains non-finite entries")
    rng = stream(seed, TAG_NOISE)
    n_steps = cfg.n_steps
    samples = np.zeros((cfg.samples_per_run, n), dtype=complex)
    filled = 0
    done = 0
    while done < n_steps:
        seg = min(SEGMENT_STEPS, n_steps - done)
        noise = noise_increment(cfg.dt, params.gamma, rng, size=(seg, n))
        if noise_scale != 1.0:
            noise = noise * noise_scale
        status, filled = _kernels.em_segment(
            alpha,
            J,
            params.delta,
            params.g,
            params.u,
            params.gamma,
            cfg.dt,
            noise,
            done,
            cfg.burn_steps,
            cfg.sample_stride,
            samples,
            filled,
        )
        if status == _kernels.STATUS_BLOWUP:
            raise BlowupError(f"stochastic trajectory blew up before t={cfg.t_final}")
        done += seg
    return samples[:filled]


def sample_spins(samples, amplitude_floor=AMPLITUDE_FLOOR):
    """Spin configurations sign(arg(alpha_j)) for a batch of sampled states.

    Samples containing an oscillator at or below the amplitude floor are
    discarded (their phase is numerically meaningless) and counted, not
    fatal.  Returns (configs, n_discarded).
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 2:
        raise ValueError(f"expected (m, n) sample array, got shape {samples.shape}")
    ok = np.all(np.abs(samples) > amplitude_floor, axis=1)
    kept = samples[ok]
    ang = np.angle(kept)
    configs = np.where((ang < 0) & (ang > -np.pi), -1, 1).astype(np.int64)
    return configs, int(len(samples) - len(kept))


@dataclass(frozen=True)
class EnergyHistogram:
    """Probability mass over the discrete Ising spectrum levels.

    support equals the spectrum energies of the instance; mass sums to one
    over the configurations that were actually binned.  total_samples counts
    every sampled point (binned + discarded) from successful repeats.
    """

    support: np.ndarray
    mass: np.ndarray
    counts: np.ndarray
    total_samples: int
    discarded: int = 0
    failed_repeats: tuple = ()

    def __post_init__(self):
        if abs(float(self.mass.sum()) - 1.0) > 1e-12:
            raise ValueError("histogram mass must sum to 1 within 1e-12")
        if np.any(np.diff(self.support) <= 0):
            raise ValueError("histogram support must be strictly increasing")
        if int(self.counts.sum()) + self.discarded != self.total_samples:
            raise ValueError("counts + discarded must equal total_samples")

    @property
    def mean_energy(self):
        return float(np.dot(self.support, self.mass))

    def argmax_level(self):
        """Index into support of the most probable level."""
        return int(np.argmax(self.mass))


def energy_histogram(configs, J, spectrum=None, discarded=0, failed_repeats=()):
    """Bin spin configurations onto the exact Ising spectrum levels.

    Every configuration energy must land on a spectrum level (they are sums
    of the same +-J_jk terms); a mismatch beyond floating-point slack means
    the configurations and the spectrum came from different instances and
    raises KposimError.
    """
    J = as_coupling(J)
    configs = np.asarray(configs)
    if configs.ndim != 2 or configs.shape[0] == 0:
        raise ValueError("need a nonempty (m, n) batch of spin configurations")
    spectrum = spectrum or enumerate_spectrum(J)
    levels = spectrum.energies
    energies = batch_ising_energies(J, configs)
    pos = np.searchsorted(levels, energies)
    lo = np.clip(pos - 1, 0, len(levels) - 1)
    hi = np.clip(pos, 0, len(levels) - 1)
    nearest = np.where(
        np.abs(energies - levels[lo]) <= np.abs(energies - levels[hi]), lo, hi
    )
    err = np.abs(energies - levels[nearest])
    tol = 1e-9 * max(1.0, float(np.abs(levels).max()))
    if len(levels) > 1:
        tol = min(tol, 0.25 * float(np.diff(levels).min()))
    if err.max() > tol:
        bad = int(np.argmax(err))
        raise KposimError(
            f"sampled energy {energies[bad]!r} not on the instance spectrum "
            f"(nearest level {levels[nearest[bad]]!r})"
        )
    counts = np.bincount(nearest, minlength=len(levels)).astype(np.int64)
    mass = counts / counts.sum()
    return EnergyHistogram(
        support=levels.copy(),
        mass=mass,
        counts=counts,
        total_samples=int(len(configs) + discarded),
        discarded=int(discarded),
        failed_repeats=tuple(failed_repeats),
    )


def _one_repeat(J, params, cfg, master_seed, repeat, noise_scale):
    seed_r = child_seed(master_seed, TAG_REPEAT, repeat)
    alpha0 = random_initial(J.shape[0], INITIAL_SCALE, seed_r)
    samples = integrate_sde(alpha0, params, J, cfg, seed=seed_r, noise_scale=noise_scale)
    return sample_spins(samples)


def run_distribution(J, params, cfg=None, master_seed=None, noise_scale=1.0, threads=1):
    """Pooled energy histogram over cfg.n_repeats independent trajectories.

    Each repeat r draws its initial state and noise from streams derived via
    (master_seed, TAG_REPEAT, r), so the pooled histogram is independent of
    scheduling and thread count.  Repeats that blow up are recorded in
    failed_repeats and excluded; the run fails only if more than half of the
    repeats fail.
    """
    cfg = cfg or SdeConfig()
    if master_seed is None:
        raise ValueError("run_distribution requires an explicit master_seed")
    J = as_coupling(J)
    spectrum = enumerate_spectrum(J)
    results = [None] * cfg.n_repeats
    failed = []

    def work(r):
        try:
            return _one_repeat(J, params, cfg, master_seed, r, noise_scale)
        except BlowupError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for r, out in enumerate(pool.map(work, range(cfg.n_repeats))):
                results[r] = out
    else:
        for r in range(cfg.n_repeats):
            results[r] = work(r)
    configs, discarded = [], 0
    for r, out in enumerate(results):
        if out is None:
            failed.append(r)
            continue
        configs.append(out[0])
        discarded += out[1]
    if 2 * len(failed) > cfg.n_repeats:
        raise BlowupError(f"{len(failed)} of {cfg.n_repeats} repeats blew up")
    pooled = np.concatenate(configs, axis=0) if configs else np.zeros((0, J.shape[0]))
    if len(pooled) == 0:
        raise KposimError("no samples survived discarding; histogram undefined")
    return energy_histogram(
        pooled, J, spectrum=spectrum, discarded=discarded, failed_repeats=failed
    )
