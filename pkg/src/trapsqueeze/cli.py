"""Command-line front end.

Subcommands: ``run``, ``sweep``, ``stability-map`` and ``presets``.  Exit
status is 0 on success, 2 when a trajectory diverged (partial output is
still written) and 1 for invalid input or I/O failures.
"""

import argparse
import csv
import dataclasses
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

from .analysis import series_from, stability_classify
from .config import RUN_METHODS, SWEEP_AXES, RunConfig, load_config
from .errors import ConfigError, TrapSqueezeError, UnknownPreset
from .experiments import CATALOG, preset as lookup_preset
from .propagation import propagate
from .trap import TrapParams, initial_state

log = logging.getLogger("trapsqueeze")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DIVERGED = 2

SERIES_COLUMNS = ("t", "a", "q", "lambda_min", "purity")
SUMMARY_COLUMNS = ("value", "peak_log_neg", "min_lambda", "diverged", "divergence_time")


def fmt(x):
    """Floats with 12 significant digits; ``None`` as an empty field."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def write_series(path, rows):
    two = bool(rows) and rows[0].log_neg is not None
    header = SERIES_COLUMNS + (("log_neg",) if two else ())
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(getattr(r, c)) for c in header])


def write_diff(path, res_a, res_b):
    n = min(len(res_a.times), len(res_b.times))
    dim = res_a.states.shape[-1]
    iu = np.triu_indices(dim)
    header = ["t", "max_abs_diff"] + [f"d{i}{j}" for i, j in zip(*iu)]
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in range(n):
            d = res_a.states[k] - res_b.states[k]
            w.writerow([fmt(res_a.times[k]), fmt(np.abs(d).max())] + [fmt(v) for v in d[iu]])


def summarize(result, rows):
    """Peak log-negativity, minimum squeezing eigenvalue and divergence info."""
    lam = min(r.lambda_min for r in rows)
    peak = max(r.log_neg for r in rows) if rows[0].log_neg is not None else None
    return {
        "peak_log_neg": peak,
        "min_lambda": lam,
        "diverged": result.diverged,
        "divergence_time": result.divergence_time,
    }


def _trajectory(params, schedule, t_end, dt, method, sample_every):
    result = propagate(initial_state(params, schedule), params, schedule, t_end,
                       dt=dt, method=method, sample_every=sample_every)
    return result, series_from(result, schedule)


def _report_divergence(result, label=""):
    if result.diverged:
        log.warning("%sdiverged at t = %g", label, result.divergence_time)


def _suffixed(path, tag):
    root, ext = os.path.splitext(path)
    return f"{root}.{tag}{ext or '.csv'}"


def execute_run(config):
    """Run one trajectory and write its CSV(s); returns the exit status."""
    params, schedule, t_end = config.resolved()
    if config.method != "both":
        result, rows = _trajectory(params, schedule, t_end, config.dt, config.method, config.sample_every)
        write_series(config.out, rows)
        _report_divergence(result)
        return EXIT_DIVERGED if result.diverged else EXIT_OK

    if config.out in (None, "-"):
        raise ConfigError("method = both needs an output path")
    results = {}
    for method in ("rk4", "expm"):
        result, rows = _trajectory(params, schedule, t_end, config.dt, method, config.sample_every)
        write_series(_suffixed(config.out, method), rows)
        _report_divergence(result, f"{method}: ")
        results[method] = result
    write_diff(_suffixed(config.out, "diff"), results["rk4"], results["expm"])
    diverged = any(r.diverged for r in results.values())
    return EXIT_DIVERGED if diverged else EXIT_OK


def sweep_variants(config):
    """``(value, params, schedule, t_end)`` for every value on the sweep axis."""
    if config.axis is None or not config.values:
        raise ConfigError("sweep needs an axis and at least one value")
    if config.axis == "preset":
        out = []
        for name in config.values:
            try:
                p = lookup_preset(name)
            except UnknownPreset as exc:
                raise ConfigError(str(exc)) from None
            out.append((name, p.params, p.schedule, config.t_end or p.t_end))
        return out
    params, schedule, t_end = config.resolved()
    out = []
    for v in config.values:
        if config.axis == "time_scale":
            variant = (params, schedule.scaled(v))
        elif config.axis == "q_shift":
            variant = (params, schedule.shifted(dq=v))
        elif config.axis == "a_shift":
            variant = (params, schedule.shifted(da=v))
        else:
            if params.n_ions != 2:
                raise ConfigError("the coupling axis needs a two-ion configuration")
            variant = (TrapParams.pair(v, xi=params.xi or 0.5, omega_rf=params.omega_rf,
                                       mass=params.mass), schedule)
        out.append((v, variant[0], variant[1], t_end))
    return out


def _sweep_item(args):
    value, params, schedule, t_end, dt, method, sample_every = args
    result, rows = _trajectory(params, schedule, t_end, dt, method, sample_every)
    return value, result, rows


def execute_sweep(config):
    """Run every sweep value as an independent trajectory; returns the exit status.

    Results are written in input order whatever order workers finish in.
    """
    method = "rk4" if config.method == "both" else config.method
    tasks = [v + (config.dt, method, config.sample_every) for v in sweep_variants(config)]
    jobs = config.jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            outcomes = list(pool.map(_sweep_item, tasks))
    else:
        outcomes = [_sweep_item(t) for t in tasks]

    if config.series_dir:
        os.makedirs(config.series_dir, exist_ok=True)
    with _open_out(config.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for value, result, rows in outcomes:
            s = summarize(result, rows)
            w.writerow([value if isinstance(value, str) else fmt(value)] +
                       [fmt(s[c]) for c in SUMMARY_COLUMNS[1:]])
            _report_divergence(result, f"{config.axis} = {value}: ")
            if config.series_dir:
                label = value if isinstance(value, str) else fmt(value)
                write_series(os.path.join(config.series_dir, f"{config.axis}_{label}.csv"), rows)
    return EXIT_DIVERGED if any(r.diverged for _, r, _ in outcomes) else EXIT_OK


def stability_map_cmd(config):
    """Write ``a,q,stable`` rows for the configured grid; returns the exit status."""
    smap = stability_classify(config.params, config.a_range, config.q_range,
                              config.resolution, jobs=config.jobs or os.cpu_count() or 1)
    with _open_out(config.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("a", "q", "stable"))
        for i, a in enumerate(smap.a_values):
            for j, q in enumerate(smap.q_values):
                w.writerow((fmt(a), fmt(q), int(smap.stable[i, j])))
    return EXIT_OK


def _common(p):
    p.add_argument("--config", help="run configuration file")
    p.add_argument("--preset", help="preset name (see `presets`)")
    p.add_argument("--dt", type=float, help="time step in units of 1/Omega (default 1e-3)")
    p.add_argument("--t-end", type=float, help="final time in units of 1/Omega")
    p.add_argument("--method", choices=RUN_METHODS, help="integrator (default rk4)")
    p.add_argument("--sample-every", type=int, help="store every n-th step (default 100)")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument("--jobs", type=int, help="worker processes (default: all cores)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trapsqueeze",
        description="Squeezing and entanglement of trapped-ion motion under ramped Paul-trap potentials.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("presets", help="list the scenario catalog")

    run = sub.add_parser("run", help="propagate one trajectory and write its series")
    _common(run)

    sweep = sub.add_parser("sweep", help="run a family of trajectories along one axis")
    _common(sweep)
    sweep.add_argument("--axis", choices=SWEEP_AXES)
    sweep.add_argument("--values", nargs="+", help="axis values (numbers, or preset names)")
    sweep.add_argument("--series-dir", help="also write each value's full series here")

    smap = sub.add_parser("stability-map", help="Floquet stability over an (a, q) grid")
    smap.add_argument("--config")
    smap.add_argument("--a-range", nargs=2, type=float, metavar=("LO", "HI"))
    smap.add_argument("--q-range", nargs=2, type=float, metavar=("LO", "HI"))
    smap.add_argument("--resolution", nargs="+", type=int, metavar="N")
    smap.add_argument("--n-ions", type=int, choices=(1, 2))
    smap.add_argument("--coupling", type=float, help="two-ion coupling xi*omega_long^2/omega_rf^2")
    smap.add_argument("--out")
    smap.add_argument("--jobs", type=int)
    return parser


def config_from_args(args):
    """Load ``--config`` (if any) and apply command-line overrides."""
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    preset = getattr(args, "preset", None)
    if preset is not None:
        if cfg.schedule is not None:
            raise ConfigError("--preset conflicts with the [schedule] in the config file")
        try:
            lookup_preset(preset)
        except UnknownPreset as exc:
            raise ConfigError(str(exc)) from None
        cfg.preset = preset
    for attr in ("dt", "t_end", "method", "sample_every", "out", "jobs", "axis", "series_dir",
                 "a_range", "q_range"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg, attr, tuple(value) if isinstance(value, list) else value)
    if getattr(args, "values", None) is not None:
        if cfg.axis == "preset":
            cfg.values = tuple(args.values)
        else:
            try:
                cfg.values = tuple(float(v) for v in args.values)
            except ValueError:
                raise ConfigError(f"--values must be numbers for axis {cfg.axis!r}") from None
    if getattr(args, "resolution", None) is not None:
        res = tuple(args.resolution)
        if len(res) not in (1, 2):
            raise ConfigError("--resolution takes one or two integers")
        cfg.resolution = res * 2 if len(res) == 1 else res
    if getattr(args, "coupling", None) is not None:
        cfg.params = TrapParams.pair(args.coupling)
    elif getattr(args, "n_ions", None) is not None and args.n_ions != cfg.params.n_ions:
        cfg.params = TrapParams.pair() if args.n_ions == 2 else dataclasses.replace(cfg.params, n_ions=1)
    return cfg.validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command == "presets":
        for name, p in CATALOG.items():
            print(f"{name:14s} n_ions={p.params.n_ions} t_end={p.t_end:g}  {p.description}")
        return EXIT_OK
    try:
        cfg = config_from_args(args)
        if args.command == "run":
            return execute_run(cfg)
        if args.command == "sweep":
            return execute_sweep(cfg)
        return stability_map_cmd(cfg)
    except (TrapSqueezeError, ValueError) as exc:
        print(f"trapsqueeze: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"trapsqueeze: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
