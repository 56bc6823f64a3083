"""Run-configuration files: strict JSON parsing and canonical emission.

A run config is one JSON object with the sections below; missing optional
sections take the documented defaults.  Unknown keys are rejected in strict
mode (the default) because a silently ignored typo in a physics parameter is
the costliest failure mode of a simulation CLI.

    {
      "graph":      {"kind": "chain", "n": 8, "J": 0.1}
                  | {"kind": "random_binary", "n": 8, "J": 0.1,
                     "density": 0.8, "seed": 21}
                  | {"csv": "matrix.csv"},
      "params":     {"delta": 0.0, "g": 0.0, "u": 0.01, "gamma": 1.0},
      "grid":       {"deltas": [...] | {"start": a, "stop": b, "num": k},
                     "gs": [...], "g_relative": [...]},
      "sde":        {"dt", "t_final", "sample_interval", "n_repeats", "burn_in"},
      "integrator": {"dt", "t_max", "convergence_tol", "record_stride"},
      "sweep":      {"n_repeats": 50},
      "master_seed": 12345,
      "output_dir": "out"
    }
"""

import json
import numbers
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .experiments import SweepGrid
from .ising import GraphSpec, build_graph
from .meanfield import IntegratorConfig
from .output import load_matrix_csv
from .params import KpoParams
from .twa import SdeConfig

_SECTION_KEYS = {
    "": {"graph", "params", "grid", "sde", "integrator", "sweep", "master_seed", "output_dir"},
    "graph": {"kind", "n", "J", "density", "seed"},
    "graph(csv)": {"csv"},
    "params": {"delta", "g", "u", "gamma"},
    "grid": {"deltas", "gs", "g_relative"},
    "grid.axis": {"start", "stop", "num"},
    "sde": {"dt", "t_final", "sample_interval", "n_repeats", "burn_in"},
    "integrator": {"dt", "t_max", "convergence_tol", "record_stride"},
    "sweep": {"n_repeats"},
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration; graph is a GraphSpec or a CSV matrix path."""

    graph: object
    master_seed: int
    params: KpoParams = KpoParams()
    grid: SweepGrid | None = None
    sde: SdeConfig | None = None
    integrator: IntegratorConfig | None = None
    sweep_repeats: int = 50
    output_dir: str = "out"

    def coupling_matrix(self):
        """Materialize the coupling matrix (builds the graph or loads CSV)."""
        if isinstance(self.graph, GraphSpec):
            return build_graph(self.graph)
        return load_matrix_csv(self.graph)

    def graph_label(self):
        if isinstance(self.graph, GraphSpec):
            g = self.graph
            if g.kind == "chain":
                return f"chain(n={g.n},J={g.J})"
            return f"random_binary(n={g.n},J={g.J},density={g.density},seed={g.seed})"
        return f"csv({self.graph})"


def _check_keys(mapping, section, strict, schema_key=None):
    allowed = _SECTION_KEYS[schema_key if schema_key is not None else section]
    unknown = set(mapping) - allowed
    if unknown:
        names = ", ".join(sorted(unknown))
        where = section or "top level"
        if strict:
            raise ConfigError(f"unknown key(s) {names} (allowed: {sorted(allowed)})", field=where)
        warnings.warn(f"config {where}: ignoring unknown key(s) {names}", stacklevel=2)


def _need(mapping, key, section):
    if key not in mapping:
        raise ConfigError("missing required key", field=f"{section}.{key}" if section else key)
    return mapping[key]


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"expected a number, got {value!r}", field=field)
    return float(value)


def _integer(value, field):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"expected an integer, got {value!r}", field=field)
    return int(value)


def _axis(value, field, strict):
    """Axis given as a list of numbers or a {start, stop, num} linspace."""
    if isinstance(value, dict):
        _check_keys(value, field, strict, schema_key="grid.axis")
        start = _number(_need(value, "start", field), f"{field}.start")
        stop = _number(_need(value, "stop", field), f"{field}.stop")
        num = _integer(_need(value, "num", field), f"{field}.num")
        if num < 1:
            raise ConfigError("num must be >= 1", field=f"{field}.num")
        return tuple(float(x) for x in np.linspace(start, stop, num))
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a nonempty list or {start, stop, num}", field=field)
    return tuple(_number(v, field) for v in value)


def _parse_graph(section, strict):
    if not isinstance(section, dict):
        raise ConfigError("graph section must be an object", field="graph")
    if "csv" in section:
        _check_keys(section, "graph", strict, schema_key="graph(csv)")
        path = section["csv"]
        if not isinstance(path, str):
            raise ConfigError("csv must be a path string", field="graph.csv")
        return path
    _check_keys(section, "graph", strict)
    kind = _need(section, "kind", "graph")
    n = _integer(_need(section, "n", "graph"), "graph.n")
    J = _number(_need(section, "J", "graph"), "graph.J")
    density = section.get("density")
    seed = section.get("seed")
    try:
        return GraphSpec(
            kind=kind,
            n=n,
            J=J,
            density=None if density is None else _number(density, "graph.density"),
            seed=None if seed is None else _integer(seed, "graph.seed"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), field="graph") from exc


def _parse_section(section, name, strict, fields, builder):
    if not isinstance(section, dict):
        raise ConfigError(f"{name} section must be an object", field=name)
    _check_keys(section, name, strict)
    kwargs = {}
    for key, conv in fields.items():
        if key in section:
            kwargs[key] = conv(section[key], f"{name}.{key}")
    try:
        return builder(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), field=name) from exc


def config_from_dict(data, strict=True):
    """Build a RunConfig from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(data, "", strict)
    graph = _parse_graph(_need(data, "graph", ""), strict)
    master_seed = _integer(_need(data, "master_seed", ""), "master_seed")
    if master_seed < 0:
        raise ConfigError("master_seed must be non-negative", field="master_seed")
    params = KpoParams()
    if "params" in data:
        params = _parse_section(
            data["params"], "params", strict,
            {"delta": _number, "g": _number, "u": _number, "gamma": _number},
            KpoParams,
        )
    grid = None
    if "grid" in data:
        section = data["grid"]
        if not isinstance(section, dict):
            raise ConfigError("grid section must be an object", field="grid")
        _check_keys(section, "grid", strict)
        axes = {}
        axes["deltas"] = _axis(_need(section, "deltas", "grid"), "grid.deltas", strict)
        for key in ("gs", "g_relative"):
            if key in section and section[key] is not None:
                axes[key] = _axis(section[key], f"grid.{key}", strict)
        try:
            grid = SweepGrid(**axes)
        except ValueError as exc:
            raise ConfigError(str(exc), field="grid") from exc
    sde = None
    if "sde" in data:
        sde = _parse_section(
            data["sde"], "sde", strict,
            {
                "dt": _number,
                "t_final": _number,
                "sample_interval": _number,
                "n_repeats": _integer,
                "burn_in": _number,
            },
            SdeConfig,
        )
    integrator = None
    if "integrator" in data:
        integrator = _parse_section(
            data["integrator"], "integrator", strict,
            {
                "dt": _number,
                "t_max": _number,
                "convergence_tol": _number,
                "record_stride": _integer,
            },
            IntegratorConfig,
        )
    sweep_repeats = 50
    if "sweep" in data:
        section = data["sweep"]
        if not isinstance(section, dict):
            raise ConfigError("sweep section must be an object", field="sweep")
        _check_keys(section, "sweep", strict)
        if "n_repeats" in section:
            sweep_repeats = _integer(section["n_repeats"], "sweep.n_repeats")
            if sweep_repeats < 1:
                raise ConfigError("n_repeats must be >= 1", field="sweep.n_repeats")
    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir must be a string", field="output_dir")
    return RunConfig(
        graph=graph,
        master_seed=master_seed,
        params=params,
        grid=grid,
        sde=sde,
        integrator=integrator,
        sweep_repeats=sweep_repeats,
        output_dir=output_dir,
    )


def parse_config(path, strict=True):
    """Parse a JSON run-configuration file with field-level diagnostics."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    cfg = config_from_dict(data, strict=strict)
    if isinstance(cfg.graph, str):
        base = os.path.dirname(os.path.abspath(path))
        matrix_path = cfg.graph if os.path.isabs(cfg.graph) else os.path.join(base, cfg.graph)
        if not os.path.exists(matrix_path):
            raise ConfigError(f"coupling matrix file not found: {matrix_path}", field="graph.csv")
        cfg = RunConfig(**{**cfg.__dict__, "graph": matrix_path})
    return cfg


def config_to_dict(cfg):
    """Canonical JSON-ready dict; inverse of config_from_dict."""
    data = {}
    if isinstance(cfg.graph, GraphSpec):
        g = {"kind": cfg.graph.kind, "n": cfg.graph.n, "J": cfg.graph.J}
        if cfg.graph.density is not None:
            g["density"] = cfg.graph.density
        if cfg.graph.seed is not None:
            g["seed"] = cfg.graph.seed
        data["graph"] = g
    else:
        data["graph"] = {"csv": cfg.graph}
    data["params"] = {
        "delta": cfg.params.delta,
        "g": cfg.params.g,
        "u": cfg.params.u,
        "gamma": cfg.params.gamma,
    }
    if cfg.grid is not None:
        grid = {"deltas": list(cfg.grid.deltas)}
        if cfg.grid.gs is not None:
            grid["gs"] = list(cfg.grid.gs)
        if cfg.grid.g_relative is not None:
            grid["g_relative"] = list(cfg.grid.g_relative)
        data["grid"] = grid
    if cfg.sde is not None:
        data["sde"] = {
            "dt": cfg.sde.dt,
            "t_final": cfg.sde.t_final,
            "sample_interval": cfg.sde.sample_interval,
            "n_repeats": cfg.sde.n_repeats,
            "burn_in": cfg.sde.burn_in,
        }
    if cfg.integrator is not None:
        data["integrator"] = {
            "dt": cfg.integrator.dt,
            "t_max": cfg.integrator.t_max,
            "convergence_tol": cfg.integrator.convergence_tol,
            "record_stride": cfg.integrator.record_stride,
        }
    data["sweep"] = {"n_repeats": cfg.sweep_repeats}
    data["master_seed"] = cfg.master_seed
    data["output_dir"] = cfg.output_dir
    return data


def write_config(cfg, path=None):
    """Serialize a RunConfig to canonical JSON; optionally write it to path."""
    text = json.dumps(config_to_dict(cfg), indent=2) + "\n"
    if path is not None:
        from .output import atomic_write_text

        atomic_write_text(path, text)
    return text
