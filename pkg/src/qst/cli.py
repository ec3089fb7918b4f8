"""Command-line entry point: dispatches experiments from a strict JSON
configuration and writes CSV results plus a meta.json sidecar.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.  All numbers are serialized with 17 significant digits, so
a rerun with the same config and seed reproduces every CSV byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .dynamics import IntegratorConfig, PropagationError
from .model import Scheme, transfer_spec, validate_spec
from .optimize import (DEFAULT_RESOLUTION, OptimizationResult, TrendFits,
                       fit_trends, grid_scan, optimize_transfer)
from .protocol import (make_schedule, run_round_trip, run_transfer,
                       transfer_fidelity)
from .robustness import (disorder_average, leakage_infidelity, pulse_checksum,
                         stray_photon_infidelity, sweep_detuning,
                         sweep_dissipation, DEFAULT_SEED)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

EXPERIMENTS = ("round-trip", "transfer", "optimize", "sweep-dissipation",
               "sweep-disorder", "sweep-detuning", "sweep-leakage",
               "sweep-stray-photon", "fit-trends")

_COMMON_KEYS = {"experiment", "out", "workers", "seed", "n_modes", "scheme",
                "g_ratio"}
_EXPERIMENT_KEYS = {
    "round-trip": {"kappa", "tau_d", "constant_g", "t_final", "n_samples",
                   "g_b"},
    "transfer": {"kappa", "tau_d", "gamma", "kappa_c", "detuning_b",
                 "n_samples"},
    "optimize": {"kappa_range", "tau_d_range", "resolution", "full_scan"},
    "sweep-dissipation": {"which", "values", "pulses"},
    "sweep-disorder": {"deltas", "n_realizations", "pulses"},
    "sweep-detuning": {"delta_omegas", "symmetric", "pulses"},
    "sweep-leakage": {"epsilons", "alphas", "pulse"},
    "sweep-stray-photon": {"epsilons", "pulse"},
    "fit-trends": {"g_ratios", "pulses"},
}


class ConfigError(Exception):
    """Raised for any malformed or inconsistent run configuration."""


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def parse_config(path: str, experiment: str | None = None) -> dict:
    """Load and validate a JSON run configuration (strict: unknown keys
    are rejected, and the experiment must match the CLI subcommand)."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}; got {exp!r}")
    if experiment is not None and exp != experiment:
        raise ConfigError(
            f"config experiment {exp!r} does not match subcommand {experiment!r}")
    allowed = _COMMON_KEYS | _EXPERIMENT_KEYS[exp]
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r} for {exp}")
    cfg.setdefault("out", ".")
    cfg.setdefault("n_modes", 51)
    cfg.setdefault("scheme", "simultaneous")
    if cfg["scheme"] not in ("simultaneous", "delayed-mirror"):
        raise ConfigError(f"unknown scheme {cfg['scheme']!r}")
    if not isinstance(cfg["n_modes"], int) or cfg["n_modes"] < 1 \
            or cfg["n_modes"] % 2 == 0:
        raise ConfigError("n_modes must be an odd positive integer")
    for key, rng in (("kappa_range", 2), ("tau_d_range", 2)):
        if key in cfg and (not isinstance(cfg[key], list)
                           or len(cfg[key]) != rng):
            raise ConfigError(f"{key} must be a 2-element list")
    for key in ("values", "deltas", "delta_omegas", "epsilons", "alphas",
                "g_ratios"):
        if key in cfg and (not isinstance(cfg[key], list) or not cfg[key]):
            raise ConfigError(f"{key} must be a nonempty list")
    return cfg


def _scheme(cfg) -> Scheme:
    return (Scheme.DELAYED_MIRROR if cfg["scheme"] == "delayed-mirror"
            else Scheme.SIMULTANEOUS_IDENTICAL)


def _require(cfg, *keys):
    for key in keys:
        if key not in cfg:
            raise ConfigError(f"{cfg['experiment']} requires {key!r}")
    return [cfg[k] for k in keys]


def _pulses(cfg) -> dict:
    """Frozen (kappa, tau_d) per coupling ratio: taken from the config
    when given, otherwise recomputed by the optimizer (slow)."""
    if "pulses" in cfg:
        raw = cfg["pulses"]
        if not isinstance(raw, dict) or not raw:
            raise ConfigError('"pulses" must map g_ratio to [kappa, tau_d]')
        out = {}
        for key, val in raw.items():
            try:
                g = float(key)
            except ValueError:
                raise ConfigError(f"pulses key {key!r} is not a number")
            if not isinstance(val, list) or len(val) != 2:
                raise ConfigError(f"pulses[{key!r}] must be [kappa, tau_d]")
            out[g] = (float(val[0]), float(val[1]))
        return out
    ratios = cfg.get("g_ratios") or [_require(cfg, "g_ratio")[0]]
    pulses = {}
    for g in ratios:
        res = optimize_transfer(float(g), _scheme(cfg),
                                workers=cfg.get("workers"))
        pulses[float(g)] = (res.kappa_opt, res.tau_d_opt)
    return pulses


def _atomic_write(out_dir: str, name: str, text: str):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else _fmt(c)
                              for c in row))
    return "\n".join(lines) + "\n"


def _write_timeseries(out_dir: str, sim, with_f_a: bool, with_vac: bool):
    n = sim.mode_pops.shape[1]
    header = ["t", "P_A", "P_B"] + [f"mode_{k:02d}" for k in range(n)]
    cols = [sim.times, sim.p_a, sim.p_b] + \
        [sim.mode_pops[:, k] for k in range(n)]
    if with_f_a:
        header.append("P_f_A")
        cols.append(sim.p_f_a)
    if with_vac:
        header.append("P_vac")
        cols.append(sim.p_vac)
    rows = zip(*cols)
    _atomic_write(out_dir, "timeseries.csv", _csv(header, rows))


def _write_sweep(out_dir: str, results):
    header = ["param_name", "param_value", "g_ratio", "infidelity", "stderr"]
    rows = [(res.param_name, row.param_value, row.g_ratio, row.infidelity,
             row.stderr)
            for res in results for row in res.rows]
    _atomic_write(out_dir, "sweep.csv", _csv(header, rows))


def _write_optima(out_dir: str, results: list[OptimizationResult]):
    header = ["g_ratio", "kappa_opt", "tau_d_opt", "F_opt", "t_cycle"]
    rows = [(r.g_ratio, r.kappa_opt, r.tau_d_opt, r.f_opt, r.t_cycle_opt)
            for r in results]
    _atomic_write(out_dir, "optimum.csv", _csv(header, rows))


def _write_fits(out_dir: str, fits: TrendFits):
    header = ["model", "coeff_1", "coeff_2", "r_squared"]
    rows = [(f"kappa_opt_{fits.kappa.model}", fits.kappa.coeff_1,
             fits.kappa.coeff_2, fits.kappa.r_squared),
            (f"t_cycle_{fits.t_cycle.model}", fits.t_cycle.coeff_1,
             fits.t_cycle.coeff_2, fits.t_cycle.r_squared),
            (f"tau_d_opt_{fits.tau_d.model}", fits.tau_d.coeff_1,
             fits.tau_d.coeff_2, fits.tau_d.r_squared)]
    _atomic_write(out_dir, "fits.csv", _csv(header, rows))


def _integrator(cfg) -> IntegratorConfig:
    n = cfg.get("n_samples", 2001)
    if not isinstance(n, int) or n < 2:
        raise ConfigError("n_samples must be an integer >= 2")
    return IntegratorConfig(n_samples=n)


def _check_spec(spec):
    problems = validate_spec(spec)
    if problems:
        raise ConfigError("; ".join(problems))


def _run_round_trip(cfg, out_dir, meta):
    g_ratio, = _require(cfg, "g_ratio")
    if "g_b" in cfg:
        print("warning: g_b is ignored; the round trip forces g_B = 0",
              file=sys.stderr)
    spec = transfer_spec(float(g_ratio), n_modes=cfg["n_modes"])
    _check_spec(spec)
    icfg = _integrator(cfg)
    if "constant_g" in cfg:
        t_final, = _require(cfg, "t_final")
        res = run_round_trip(spec, float(cfg["constant_g"]),
                             float(t_final), icfg)
    else:
        kappa, tau_d = _require(cfg, "kappa", "tau_d")
        from .model import PulseParams
        pulse = PulseParams(g0=float(g_ratio), kappa=float(kappa),
                            tau_d=float(tau_d))
        res = run_round_trip(spec, pulse, cfg=icfg)
        meta["pulse_checksum"] = pulse_checksum(
            {float(g_ratio): (float(kappa), float(tau_d))})
    _write_timeseries(out_dir, res.sim, with_f_a=False, with_vac=False)
    meta["return_probability"] = res.return_probability


def _run_transfer(cfg, out_dir, meta):
    g_ratio, kappa, tau_d = _require(cfg, "g_ratio", "kappa", "tau_d")
    gamma = float(cfg.get("gamma", 0.0))
    kappa_c = float(cfg.get("kappa_c", 0.0))
    spec = transfer_spec(float(g_ratio), n_modes=cfg["n_modes"], gamma=gamma,
                         kappa_c=kappa_c,
                         detuning_b=float(cfg.get("detuning_b", 0.0)))
    _check_spec(spec)
    schedule = make_schedule(spec, float(kappa), float(tau_d), _scheme(cfg))
    res = run_transfer(spec, schedule, _integrator(cfg))
    dissipative = gamma > 0 or kappa_c > 0
    _write_timeseries(out_dir, res.sim, with_f_a=False, with_vac=dissipative)
    meta["fidelity"] = res.fidelity
    meta["t_cycle"] = res.t_cycle
    meta["pulse_checksum"] = pulse_checksum(
        {float(g_ratio): (float(kappa), float(tau_d))})


def _run_optimize(cfg, out_dir, meta):
    g_ratio, = _require(cfg, "g_ratio")
    spec = transfer_spec(float(g_ratio), n_modes=cfg["n_modes"])
    _check_spec(spec)
    workers = cfg.get("workers")
    res = optimize_transfer(float(g_ratio), _scheme(cfg), spec=spec,
                            workers=workers)
    if cfg.get("full_scan", False):
        kr = cfg.get("kappa_range", [0.1, 20.0])
        dr = cfg.get("tau_d_range", [0.0, 2.0])
        scan = grid_scan(spec, tuple(map(float, kr)), tuple(map(float, dr)),
                         cfg.get("resolution", DEFAULT_RESOLUTION),
                         _scheme(cfg), workers=workers)
    else:
        scan = res.scan
    rows = [(k, d, scan.infidelity[i, j])
            for i, k in enumerate(scan.kappa)
            for j, d in enumerate(scan.tau_d)]
    _atomic_write(out_dir, "scan.csv",
                  _csv(["kappa", "tau_d", "infidelity"], rows))
    _write_optima(out_dir, [res])
    meta["optimum"] = {"kappa": res.kappa_opt, "tau_d": res.tau_d_opt,
                       "infidelity": res.infidelity,
                       "t_cycle": res.t_cycle_opt, "t_half": res.t_half_opt}
    meta["pulse_checksum"] = pulse_checksum(
        {res.g_ratio: (res.kappa_opt, res.tau_d_opt)})


def _run_fit_trends(cfg, out_dir, meta):
    pulses = _pulses(cfg)
    results = []
    for g, (kappa, tau_d) in sorted(pulses.items()):
        f = transfer_fidelity(transfer_spec(g, n_modes=cfg["n_modes"]),
                              kappa, tau_d, _scheme(cfg))
        from .optimize import _result_from_point
        results.append(_result_from_point(g, kappa, tau_d, 1.0 - f))
    fits = fit_trends(results)
    _write_optima(out_dir, results)
    _write_fits(out_dir, fits)
    meta["pulse_checksum"] = pulse_checksum(pulses)


def _run_sweeps(cfg, out_dir, meta):
    exp = cfg["experiment"]
    n_modes = cfg["n_modes"]
    if exp == "sweep-dissipation":
        which, values = _require(cfg, "which", "values")
        results = [sweep_dissipation(_pulses(cfg), which,
                                     [float(v) for v in values], n_modes)]
    elif exp == "sweep-disorder":
        deltas, = _require(cfg, "deltas")
        seed = int(cfg.get("seed", DEFAULT_SEED))
        results = [disorder_average(_pulses(cfg), [float(v) for v in deltas],
                                    int(cfg.get("n_realizations", 100)),
                                    seed, n_modes)]
        meta["seed"] = seed
    elif exp == "sweep-detuning":
        delta_omegas, = _require(cfg, "delta_omegas")
        results = [sweep_detuning(_pulses(cfg),
                                  [float(v) for v in delta_omegas],
                                  bool(cfg.get("symmetric", False)), n_modes)]
    elif exp == "sweep-leakage":
        g_ratio, epsilons, alphas, pulse = _require(
            cfg, "g_ratio", "epsilons", "alphas", "pulse")
        results = []
        for alpha in alphas:
            res = leakage_infidelity(float(g_ratio),
                                     (float(pulse[0]), float(pulse[1])),
                                     [float(e) for e in epsilons],
                                     float(alpha), n_modes)
            res.param_name = f"epsilon_f[alpha={float(alpha):g}]"
            results.append(res)
    else:
        g_ratio, epsilons, pulse = _require(cfg, "g_ratio", "epsilons",
                                            "pulse")
        results = [stray_photon_infidelity(
            float(g_ratio), (float(pulse[0]), float(pulse[1])),
            [float(e) for e in epsilons], n_modes)]
    _write_sweep(out_dir, results)
    meta["pulse_checksum"] = sorted({r.pulse_checksum for r in results})


_HANDLERS = {
    "round-trip": _run_round_trip,
    "transfer": _run_transfer,
    "optimize": _run_optimize,
    "fit-trends": _run_fit_trends,
    "sweep-dissipation": _run_sweeps,
    "sweep-disorder": _run_sweeps,
    "sweep-detuning": _run_sweeps,
    "sweep-leakage": _run_sweeps,
    "sweep-stray-photon": _run_sweeps,
}


def run_experiment(cfg: dict) -> int:
    """Execute one validated configuration; returns the process exit code
    and writes the experiment's CSVs plus meta.json to the output dir."""
    out_dir = cfg["out"]
    meta = {"experiment": cfg["experiment"], "config": cfg,
            "version": __version__}
    start = time.monotonic()
    try:
        _HANDLERS[cfg["experiment"]](cfg, out_dir, meta)
    except ConfigError:
        raise
    except (PropagationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _error_record(out_dir, "numerical", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        raise ConfigError(str(exc))
    # wall time is informational only; the CSVs alone are byte-reproducible
    meta["wall_time_s"] = time.monotonic() - start
    try:
        _atomic_write(out_dir, "meta.json",
                      json.dumps(meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _error_record(out_dir: str, kind: str, exc: Exception):
    record = {"error": kind, "message": str(exc),
              "type": type(exc).__name__}
    print(f"error: {kind}: {exc}", file=sys.stderr)
    try:
        _atomic_write(out_dir, "error.json",
                      json.dumps(record, indent=2, sort_keys=True) + "\n")
    except OSError:
        pass


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qst",
        description="Qubit state transfer through a multimode channel: "
                    "simulation, optimization and robustness experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for exp in EXPERIMENTS:
        p = sub.add_parser(exp)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config, args.experiment)
        if args.out is not None:
            cfg["out"] = args.out
        if args.workers is not None:
            cfg["workers"] = args.workers
        if args.seed is not None:
            cfg["seed"] = args.seed
        return run_experiment(cfg)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
