"""Command-line interface.

Subcommands map one-to-one onto the library campaigns:

    spectrum         exhaustive Ising spectrum of the configured graph
    single-kpo       closed-form vs integrated single-oscillator steady state
    threshold-curve  energy of the threshold-selected state vs detuning
    meanfield-sweep  mean steady-state energy over a (detuning, pump) grid
    twa-sweep        stochastic mean energy over a (detuning, pump) grid
    twa-hist         energy histograms at pump just above threshold

Exit codes: 0 success, 2 config errors, 3 numerical blowups, 4 guard
violations (size limits, invalid physical values, undefined readouts),
1 unexpected internal errors.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import parse_config
from .errors import BlowupError, ConfigError, KposimError
from .experiments import SweepGrid, meanfield_sweep, selection_histograms, twa_sweep
from .ising import enumerate_spectrum
from .linear import threshold, threshold_energy_curve
from .meanfield import (
    IntegratorConfig,
    binarization_residual,
    integrate,
    random_initial,
    single_kpo_fixed_point,
)
from .output import (
    atomic_write_text,
    write_histogram_csv,
    write_histogram_metadata_json,
    write_spectrum_csv,
    write_sweep_grid_csv,
    write_sweep_long_csv,
    write_threshold_curve_csv,
)
from .rng import child_seed

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_GUARD = 4

THREADS_ENV_VAR = "KPOSIM_THREADS"

#: default detuning grid for threshold-curve when the config has none
DEFAULT_CURVE_DELTAS = tuple(np.linspace(-0.3, 0.3, 121))

#: default detunings for twa-hist when the config has no grid
DEFAULT_HIST_DELTAS = (-0.2, 0.0, 0.2)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kposim",
        description="Kerr parametric oscillator network as an Ising state selector",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("spectrum", "enumerate the full Ising spectrum of the configured graph"),
        ("single-kpo", "closed-form vs integrated single-oscillator steady state"),
        ("threshold-curve", "threshold-selected Ising energy vs detuning"),
        ("meanfield-sweep", "mean-field energy landscape over the pump/detuning grid"),
        ("twa-sweep", "stochastic energy landscape over the pump/detuning grid"),
        ("twa-hist", "energy histograms with pump just above threshold"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help=f"worker threads (default ${THREADS_ENV_VAR} or 1); no effect on results",
        )
        mode = p.add_mutually_exclusive_group()
        mode.add_argument(
            "--strict", dest="strict", action="store_true", default=True,
            help="reject unknown config keys (default)",
        )
        mode.add_argument(
            "--lenient", dest="strict", action="store_false",
            help="warn about unknown config keys instead of failing",
        )
    return parser


def _threads(args):
    if args.threads is not None:
        value = args.threads
    else:
        value = int(os.environ.get(THREADS_ENV_VAR, "1"))
    if value < 1:
        raise ConfigError(f"thread count must be >= 1, got {value}")
    return value


def _load(args):
    cfg = parse_config(args.config, strict=args.strict)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        cfg = type(cfg)(**{**cfg.__dict__, "master_seed": args.seed})
    if args.out is not None:
        cfg = type(cfg)(**{**cfg.__dict__, "output_dir": args.out})
    return cfg


def _fingerprint(cfg, command, **extra):
    fields = {
        "command": command,
        "graph": cfg.graph_label(),
        "delta": cfg.params.delta,
        "g": cfg.params.g,
        "u": cfg.params.u,
        "gamma": cfg.params.gamma,
    }
    if cfg.grid is not None:
        fields["deltas"] = f"[{cfg.grid.deltas[0]}..{cfg.grid.deltas[-1]}]x{len(cfg.grid.deltas)}"
        if cfg.grid.gs is not None:
            fields["gs"] = f"[{cfg.grid.gs[0]}..{cfg.grid.gs[-1]}]x{len(cfg.grid.gs)}"
        if cfg.grid.g_relative is not None:
            fields["g_relative"] = ",".join(str(g) for g in cfg.grid.g_relative)
    if cfg.sde is not None:
        s = cfg.sde
        fields["sde"] = (
            f"dt={s.dt},t_final={s.t_final},sample_interval={s.sample_interval},"
            f"n_repeats={s.n_repeats},burn_in={s.burn_in}"
        )
    if cfg.integrator is not None:
        i = cfg.integrator
        fields["integrator"] = f"dt={i.dt},t_max={i.t_max},tol={i.convergence_tol}"
    fields["master_seed"] = cfg.master_seed
    fields.update(extra)
    return fields


def _emit(path, writer, *writer_args):
    writer(path, *writer_args)
    print(f"wrote {path}")


def cmd_spectrum(cfg, threads):
    J = cfg.coupling_matrix()
    spectrum = enumerate_spectrum(J)
    path = os.path.join(cfg.output_dir, "spectrum.csv")
    _emit(path, write_spectrum_csv, spectrum, _fingerprint(cfg, "spectrum", n=spectrum.n))
    return EXIT_OK


def cmd_single_kpo(cfg, threads):
    params = cfg.params
    R, phi = single_kpo_fixed_point(params)
    icfg = cfg.integrator or IntegratorConfig()
    J1 = np.zeros((1, 1))
    A0 = random_initial(1, seed=child_seed(cfg.master_seed, 0))
    record = integrate(A0, params, J1, icfg)
    a = record.final[0]
    r_num, phi_num = abs(a), float(np.angle(a))
    # the fixed point comes in a +-pi phase pair; compare against the closer one
    phi_err = min(
        abs(phi_num - phi), abs(phi_num - phi + np.pi), abs(phi_num - phi - np.pi)
    )
    report = {
        "params": {"delta": params.delta, "g": params.g, "u": params.u, "gamma": params.gamma},
        "g_th": float(np.sqrt(0.25 * params.gamma**2 + params.delta**2)),
        "closed_form": {"R": R, "phi": phi},
        "integrated": {
            "R": r_num,
            "phi": phi_num,
            "converged": record.converged,
            "t_final": float(record.times[-1]),
        },
        "rel_error_R": abs(r_num - R) / R if R else float("nan"),
        "phi_error_mod_pi": phi_err,
        "binarization_residual": binarization_residual(record.final, params),
        "master_seed": cfg.master_seed,
    }
    path = os.path.join(cfg.output_dir, "single_kpo.json")
    atomic_write_text(path, json.dumps(report, indent=2) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_threshold_curve(cfg, threads):
    J = cfg.coupling_matrix()
    deltas = cfg.grid.deltas if cfg.grid is not None else DEFAULT_CURVE_DELTAS
    points = threshold_energy_curve(J, deltas, gamma=cfg.params.gamma)
    path = os.path.join(cfg.output_dir, "threshold_curve.csv")
    fp = _fingerprint(cfg, "threshold-curve", n_deltas=len(points))
    _emit(path, write_threshold_curve_csv, points, fp)
    return EXIT_OK


def _require_sweep_grid(cfg):
    if cfg.grid is None:
        raise ConfigError("this command needs a grid section", field="grid")
    if cfg.grid.gs is None and cfg.grid.g_relative is None:
        raise ConfigError("sweep grid needs gs or g_relative", field="grid")
    return cfg.grid


def cmd_meanfield_sweep(cfg, threads):
    J = cfg.coupling_matrix()
    grid = _require_sweep_grid(cfg)
    result = meanfield_sweep(
        J, grid, cfg.params,
        n_repeats=cfg.sweep_repeats,
        master_seed=cfg.master_seed,
        cfg=cfg.integrator,
        threads=threads,
    )
    fp = _fingerprint(cfg, "meanfield-sweep", n_repeats=cfg.sweep_repeats)
    _emit(os.path.join(cfg.output_dir, "meanfield_sweep.csv"), write_sweep_long_csv, result, fp)
    _emit(os.path.join(cfg.output_dir, "meanfield_sweep_grid.csv"), write_sweep_grid_csv, result, fp)
    return EXIT_OK


def cmd_twa_sweep(cfg, threads):
    J = cfg.coupling_matrix()
    grid = _require_sweep_grid(cfg)
    result = twa_sweep(
        J, grid, cfg.params, cfg=cfg.sde, master_seed=cfg.master_seed, threads=threads
    )
    fp = _fingerprint(cfg, "twa-sweep", n_repeats=result.n_repeats)
    _emit(os.path.join(cfg.output_dir, "twa_sweep.csv"), write_sweep_long_csv, result, fp)
    _emit(os.path.join(cfg.output_dir, "twa_sweep_grid.csv"), write_sweep_grid_csv, result, fp)
    return EXIT_OK


def cmd_twa_hist(cfg, threads):
    J = cfg.coupling_matrix()
    deltas = cfg.grid.deltas if cfg.grid is not None else DEFAULT_HIST_DELTAS
    runs = selection_histograms(
        J, cfg.params, cfg=cfg.sde, master_seed=cfg.master_seed,
        deltas=deltas, threads=threads,
    )
    meta = []
    for i, run in enumerate(runs):
        hist = run.histogram
        name = f"twa_hist_{i}_delta{run.delta:+g}.csv"
        fp = _fingerprint(
            cfg, "twa-hist", delta=run.delta, g=run.g, g_th=run.g_th,
            total_samples=hist.total_samples,
        )
        _emit(os.path.join(cfg.output_dir, name), write_histogram_csv, hist, fp)
        meta.append(
            {
                "file": name,
                "delta": run.delta,
                "g": run.g,
                "g_th": run.g_th,
                "total_samples": hist.total_samples,
                "discarded": hist.discarded,
                "failed_repeats": list(hist.failed_repeats),
                "master_seed": cfg.master_seed,
            }
        )
    path = os.path.join(cfg.output_dir, "twa_hist_meta.json")
    write_histogram_metadata_json(path, meta)
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "single-kpo": cmd_single_kpo,
    "threshold-curve": cmd_threshold_curve,
    "meanfield-sweep": cmd_meanfield_sweep,
    "twa-sweep": cmd_twa_sweep,
    "twa-hist": cmd_twa_hist,
}


def main(argv=None):
    """Run the CLI; returns the process exit code."""
    args = _build_parser().parse_args(argv)
    try:
        threads = _threads(args)
        cfg = _load(args)
        return _COMMANDS[args.command](cfg, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowupError as exc:
        print(f"numerical blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (KposimError, ValueError) as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


def entrypoint():
    raise SystemExit(main())
