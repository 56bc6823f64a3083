"""Tabular output emission: CSV (RFC-4180 subset) and JSON metadata.

All numbers are written with shortest round-trip precision (repr), '.'
decimal separator, no locale.  Files are written atomically
(temp-then-rename) so partial outputs never appear under the final name.
Reruns with identical inputs and seeds produce byte-identical files.
"""

import json
import os
import tempfile

import numpy as np

from .errors import ConfigError
from .ising import as_coupling


def fmt(x):
    """Shortest decimal representation that parses back to the same value."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def atomic_write_text(path, text):
    """Write text to path via a temp file and rename in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fingerprint_line(fields):
    """One-line comment carrying the full parameter fingerprint of a run."""
    parts = " ".join(f"{k}={v}" for k, v in fields.items())
    return f"# kposim {parts}"


def _csv(header, rows, fingerprint=None):
    lines = []
    if fingerprint:
        lines.append(fingerprint_line(fingerprint))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_spectrum_csv(path, spectrum, fingerprint=None):
    """energy,degeneracy rows, lowest level first."""
    rows = zip(spectrum.energies, spectrum.degeneracies)
    atomic_write_text(path, _csv(["energy", "degeneracy"], rows, fingerprint))


def write_threshold_curve_csv(path, points, fingerprint=None):
    """delta,g_th,energy,degenerate,ambiguous rows; flags as 0/1."""
    rows = ((p.delta, p.g_th, p.energy, p.degenerate, p.ambiguous) for p in points)
    header = ["delta", "g_th", "energy", "degenerate", "ambiguous"]
    atomic_write_text(path, _csv(header, rows, fingerprint))


def write_sweep_long_csv(path, result, fingerprint=None):
    """Long-format sweep table: delta,g,mean_energy,n_ok,masked."""
    rows = []
    for i, d in enumerate(result.grid.deltas):
        for j in range(result.grid.n_g):
            rows.append(
                (
                    d,
                    result.g_values[i, j],
                    result.mean_energy[i, j],
                    result.n_ok[i, j],
                    result.masked[i, j],
                )
            )
    header = ["delta", "g", "mean_energy", "n_ok", "masked"]
    atomic_write_text(path, _csv(header, rows, fingerprint))


def write_sweep_grid_csv(path, result, fingerprint=None):
    """Dense matrix for plotting: first row g-axis labels, one row per delta."""
    axis = result.grid.gs if result.grid.gs is not None else result.grid.g_relative
    header = ["delta\\g"] + [fmt(g) for g in axis]
    rows = []
    for i, d in enumerate(result.grid.deltas):
        rows.append([d] + list(result.mean_energy[i]))
    atomic_write_text(path, _csv(header, rows, fingerprint))


def write_histogram_csv(path, histogram, fingerprint=None):
    """energy,probability,count rows over the full spectrum support."""
    rows = zip(histogram.support, histogram.mass, histogram.counts)
    atomic_write_text(path, _csv(["energy", "probability", "count"], rows, fingerprint))


def write_histogram_metadata_json(path, runs_meta):
    """JSON block recording drives, seeds, discard counts and failed repeats."""
    atomic_write_text(path, json.dumps(runs_meta, indent=2, sort_keys=True) + "\n")


def write_trajectory_csv(path, record, fingerprint=None):
    """time,X_1..X_n,Y_1..Y_n rows of a recorded trajectory."""
    n = record.states.shape[1]
    header = ["time"] + [f"X_{j+1}" for j in range(n)] + [f"Y_{j+1}" for j in range(n)]
    rows = (
        [t] + list(state.real) + list(state.imag)
        for t, state in zip(record.times, record.states)
    )
    atomic_write_text(path, _csv(header, rows, fingerprint))


def write_matrix_csv(path, J):
    """Dense coupling matrix, one row per line, comma-separated."""
    J = as_coupling(J)
    atomic_write_text(path, "\n".join(",".join(fmt(v) for v in row) for row in J) + "\n")


def load_matrix_csv(path):
    """Read a dense coupling matrix written by write_matrix_csv.

    Comment lines (leading '#') are skipped; the result must satisfy the
    coupling-matrix contract (square, symmetric, zero diagonal, n >= 2).
    """
    if not os.path.exists(path):
        raise ConfigError(f"coupling matrix file not found: {path}")
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(v) for v in line.split(",")])
    try:
        return as_coupling(np.asarray(rows, dtype=float))
    except ValueError as exc:
        raise ConfigError(f"invalid coupling matrix in {path}: {exc}") from exc
