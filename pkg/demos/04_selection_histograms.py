"""Energy histograms from stochastic dynamics: selection survives noise.

The truncated-Wigner trajectories add vacuum-level Gaussian noise to every
oscillator, so instead of a single converged state each run yields a
probability distribution P(E) over the exact Ising levels.  With the pump
held just above threshold, lowering or raising the detuning moves the most
probable level toward the bottom or the top of the spectrum, and P(E)
decays roughly exponentially away from the peak.

This demo runs the full sampling protocol (10 repeats to t = 10000, sampled
every unit of time, 100000 points per histogram) for a random binary graph;
histograms land in demos/out/.  Takes about half a minute.

Run:  python3 demos/04_selection_histograms.py
"""

import os

import numpy as np

from kposim import KpoParams, SdeConfig, make_random_binary, selection_histograms
from kposim.output import write_histogram_csv

OUT = os.path.join(os.path.dirname(__file__), "out")

J = make_random_binary(8, 0.1, 0.8, seed=21)
base = KpoParams(u=0.01, gamma=1.0)
cfg = SdeConfig(dt=0.005, t_final=10000.0, sample_interval=1.0, n_repeats=10)

runs = selection_histograms(J, base, cfg=cfg, master_seed=7, deltas=(-0.2, 0.0, 0.2))

for run in runs:
    hist = run.histogram
    name = f"hist_delta{run.delta:+g}.csv"
    write_histogram_csv(os.path.join(OUT, name), hist)
    peak = hist.argmax_level()
    print(f"delta = {run.delta:+.1f} (g = {run.g:.4f}, 0.1% above threshold):")
    print(f"  most probable level: {peak} of 0..{len(hist.support)-1} "
          f"at E = {hist.support[peak]:+.2f}")
    bar_scale = 40 / hist.mass.max()
    for e, p in zip(hist.support, hist.mass):
        print(f"  E={e:+5.2f}  {p:8.5f}  {'#' * int(round(p * bar_scale))}")
    print(f"  wrote demos/out/{name}")

print("note: with the pump only 0.1% above threshold the saturated amplitude")
print("is comparable to the vacuum noise, so highly degenerate interior levels")
print("retain weight; a few percent above threshold the peaks sharpen onto the")
print("targeted extremes.")
