"""Stochastic dynamics: noise contract, moments, sampling, histograms."""

import numpy as np
import pytest
from scipy.stats import chi2

from kposim import (
    BlowupError,
    IntegratorConfig,
    KpoParams,
    KposimError,
    SdeConfig,
    energy_histogram,
    enumerate_spectrum,
    integrate,
    integrate_sde,
    make_chain,
    noise_increment,
    run_distribution,
    sample_spins,
    threshold,
)
from kposim.rng import TAG_NOISE, stream

CHAIN = make_chain(8, 0.1)


def test_noise_increment_moments():
    dt, gamma = 0.01, 1.0
    rng = stream(123, TAG_NOISE)
    inc = noise_increment(dt, gamma, rng, size=10**6)
    # chi = increment / (sqrt(gamma/2) * dt); <chi chi*> should be 1/dt
    chi_t = inc / (np.sqrt(gamma / 2) * dt)
    second = np.mean(chi_t * np.conj(chi_t)).real
    assert abs(second - 1.0 / dt) < 0.01 / dt
    anom = np.mean(chi_t * chi_t)
    se = np.std(chi_t * chi_t) / np.sqrt(len(chi_t))
    assert abs(anom) < 3 * se
    # reproducible
    inc2 = noise_increment(dt, gamma, stream(123, TAG_NOISE), size=10**6)
    assert np.array_equal(inc, inc2)


def test_sde_config_counts():
    cfg = SdeConfig()
    assert cfg.n_steps == 2_000_000
    assert cfg.sample_stride == 200
    assert cfg.samples_per_run == 10_000
    assert cfg.n_repeats * cfg.samples_per_run == 100_000
    cfg = SdeConfig(dt=0.01, t_final=10.0, sample_interval=1.0, n_repeats=1)
    assert cfg.samples_per_run == 10
    with pytest.raises(ValueError):
        SdeConfig(sample_interval=0.001)
    with pytest.raises(ValueError):
        SdeConfig(burn_in=-1.0)


def test_integrate_sde_deterministic():
    params = KpoParams(delta=-0.2, g=0.52, u=0.01, gamma=1.0)
    cfg = SdeConfig(dt=0.01, t_final=50.0, sample_interval=1.0)
    a0 = np.full(8, 0.01 + 0.0j)
    s1 = integrate_sde(a0, params, CHAIN, cfg, seed=77)
    s2 = integrate_sde(a0, params, CHAIN, cfg, seed=77)
    assert np.array_equal(s1, s2)
    assert s1.shape == (50, 8)
    s3 = integrate_sde(a0, params, CHAIN, cfg, seed=78)
    assert not np.array_equal(s1, s3)


def test_zero_noise_sde_matches_meanfield_with_shifted_detuning():
    # noise off: the stochastic drift equals the mean-field drift at delta+u
    params = KpoParams(delta=-0.25, g=0.6, u=0.01, gamma=1.0)
    a0 = np.array([0.02 - 0.01j] * 8)
    cfg = SdeConfig(dt=0.002, t_final=5.0, sample_interval=5.0)
    sde_final = integrate_sde(a0, params, CHAIN, cfg, seed=1, noise_scale=0.0)[-1]
    mf = integrate(
        a0,
        params.with_drive(delta=params.delta + params.u),
        CHAIN,
        IntegratorConfig(dt=0.002, t_max=5.0, convergence_tol=1e-300),
    )
    # Euler-Maruyama is first order in dt; RK4 reference is effectively exact
    assert np.abs(sde_final - mf.final).max() < 5e-3 * np.abs(mf.final).max()
    coarse = integrate_sde(a0, params, CHAIN, SdeConfig(dt=0.004, t_final=5.0, sample_interval=5.0), seed=1, noise_scale=0.0)[-1]
    err_fine = np.abs(sde_final - mf.final).max()
    err_coarse = np.abs(coarse - mf.final).max()
    assert 1.5 < err_coarse / err_fine < 2.5  # first-order convergence


def test_ou_stationary_moment_and_bias_scaling():
    # u = g = 0, J = 0, delta = 0: damped mode driven by vacuum noise has
    # stationary <|alpha|^2> = 1/2; Euler-Maruyama biases it by O(dt)
    n = 64
    J0 = np.zeros((n, n))
    params = KpoParams(delta=0.0, g=0.0, u=0.0, gamma=1.0)

    def moment(dt, t_final=2500.0, seed=5):
        cfg = SdeConfig(dt=dt, t_final=t_final, sample_interval=1.0, burn_in=20.0)
        s = integrate_sde(np.zeros(n, dtype=complex), params, J0, cfg, seed=seed)
        return float(np.mean(np.abs(s) ** 2))

    m = moment(0.005)
    assert abs(m - 0.5) < 0.05 * 0.5
    # exact EM stationary moment is 0.5/(1 - gamma*dt/4): bias halves with dt
    bias_2, bias_1 = moment(0.2) - 0.5, moment(0.1) - 0.5
    assert 1.4 < bias_2 / bias_1 < 2.7


def test_sample_spins_readout_and_discards():
    samples = np.array(
        [
            [1j, 1j],
            [np.exp(2.0j), np.exp(-0.5j)],
            [0.0 + 0j, 1j],
        ]
    )
    configs, discarded = sample_spins(samples)
    assert discarded == 1
    assert np.array_equal(configs, [[1, 1], [1, -1]])


def test_energy_histogram_single_level():
    configs = np.tile([1, 1, 1, 1, 1, 1, 1, 1], (10, 1))
    hist = energy_histogram(configs, CHAIN)
    assert hist.mass[0] == 1.0
    assert hist.counts.sum() == 10
    assert hist.total_samples == 10


def test_energy_histogram_uniform_random_matches_degeneracy():
    spec = enumerate_spectrum(CHAIN)
    rng = np.random.default_rng(2024)
    configs = rng.choice([-1, 1], size=(10**5, 8))
    hist = energy_histogram(configs, CHAIN)
    np.testing.assert_array_equal(hist.support, spec.energies)
    expected = spec.degeneracies / 256.0
    se = np.sqrt(expected * (1 - expected) / 10**5)
    assert np.all(np.abs(hist.mass - expected) < 4 * se)
    assert abs(hist.mass.sum() - 1.0) <= 1e-12


def test_energy_histogram_guards():
    with pytest.raises(ValueError):
        energy_histogram(np.zeros((0, 8)), CHAIN)
    # configurations from a different instance do not land on the spectrum
    other = make_chain(8, 0.07)
    spec = enumerate_spectrum(other)
    configs = np.tile([1, 1, 1, 1, -1, -1, -1, -1], (5, 1))
    with pytest.raises(KposimError):
        energy_histogram(configs, CHAIN, spectrum=spec)


def test_run_distribution_counts_and_determinism():
    params = KpoParams(delta=-0.2, g=0.0, u=0.01, gamma=1.0)
    params = params.with_drive(g=1.001 * threshold(params, CHAIN))
    cfg = SdeConfig(dt=0.01, t_final=60.0, sample_interval=1.0, n_repeats=3)
    h1 = run_distribution(CHAIN, params, cfg, master_seed=31)
    assert h1.total_samples == 3 * 60
    assert h1.discarded == 0
    assert h1.failed_repeats == ()
    assert abs(h1.mass.sum() - 1.0) <= 1e-12
    h2 = run_distribution(CHAIN, params, cfg, master_seed=31)
    assert np.array_equal(h1.counts, h2.counts)
    h3 = run_distribution(CHAIN, params, cfg, master_seed=32)
    assert not np.array_equal(h1.counts, h3.counts)


def test_run_distribution_thread_invariance():
    params = KpoParams(delta=0.0, g=0.52, u=0.01, gamma=1.0)
    cfg = SdeConfig(dt=0.01, t_final=40.0, sample_interval=1.0, n_repeats=4)
    h1 = run_distribution(CHAIN, params, cfg, master_seed=9, threads=1)
    h2 = run_distribution(CHAIN, params, cfg, master_seed=9, threads=3)
    assert np.array_equal(h1.counts, h2.counts)
    assert h1.total_samples == h2.total_samples


def test_run_distribution_blowup_propagation():
    params = KpoParams(delta=0.0, g=2.0, u=0.0, gamma=1.0)  # unsaturated growth
    cfg = SdeConfig(dt=0.01, t_final=60.0, sample_interval=1.0, n_repeats=4)
    with pytest.raises(BlowupError):
        run_distribution(CHAIN, params, cfg, master_seed=3)


def test_sde_drift_odd_symmetry_deterministic():
    # with the noise off, trajectories from +-alpha0 are exact mirror images
    params = KpoParams(delta=-0.2, g=0.53, u=0.01, gamma=1.0)
    cfg = SdeConfig(dt=0.01, t_final=3.0, sample_interval=0.5)
    a0 = np.arange(1, 9) * (0.01 - 0.004j)
    up = integrate_sde(a0, params, CHAIN, cfg, seed=0, noise_scale=0.0)
    dn = integrate_sde(-a0, params, CHAIN, cfg, seed=0, noise_scale=0.0)
    np.testing.assert_array_equal(up, -dn)


def test_flip_pair_statistics_chi_square():
    # sigma and -sigma are sampled with equal frequency.  Run well below
    # threshold on a small ring, where the state mixes fast enough that
    # subsampled points are effectively independent.
    chain4 = make_chain(4, 0.1)
    params = KpoParams(delta=-0.2, g=0.0, u=0.01, gamma=1.0)
    params = params.with_drive(g=0.5 * threshold(params, chain4))
    cfg = SdeConfig(dt=0.01, t_final=6000.0, sample_interval=10.0, n_repeats=2)
    pools = []
    from kposim.meanfield import random_initial
    from kposim.rng import TAG_REPEAT, child_seed

    for r in range(cfg.n_repeats):
        seed_r = child_seed(1234, TAG_REPEAT, r)
        a0 = random_initial(4, 0.01, seed_r)
        pools.append(integrate_sde(a0, params, chain4, cfg, seed=seed_r))
    configs, _ = sample_spins(np.concatenate(pools, axis=0))
    keys = {}
    for c in configs:
        keys[tuple(c)] = keys.get(tuple(c), 0) + 1
    stat, dof = 0.0, 0
    seen = set()
    for key, n1 in keys.items():
        flip = tuple(-k for k in key)
        if key in seen or flip in seen:
            continue
        seen.add(key)
        n2 = keys.get(flip, 0)
        if n1 + n2 >= 20:
            stat += (n1 - n2) ** 2 / (n1 + n2)
            dof += 1
    assert dof > 0
    p_value = chi2.sf(stat, dof)
    assert p_value > 0.01
