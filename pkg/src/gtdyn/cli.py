"""Command-line front end: ``gtdyn simulate | verify | boundary``.

Settings are resolved as command-line flags, then the ``--config`` JSON file,
then built-in defaults.  Stochastic commands need a seed, taken from
``--seed``, the config file, or the ``GTDYN_SEED`` environment variable.

Exit codes: 0 success, 1 failed check, 2 invalid configuration,
3 simulation stopped by the event cap.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Callable, Sequence

from .bdp1 import Bdp1Chain
from .boundary import (EdreiOmega, boundary_row, check_boundary_compatibility, phi_coefficients,
                       total_positivity_check, validate_omega)
from .exceptions import GtdynError
from .nchain import NChain
from .params import UvParams, ZwParams, parse_number, parse_quadruple, shift_params, zw_from_mapping
from .pascal import AbParams, check_pascal_all, simulate_path
from .trajectory import DEFAULT_MAX_EVENTS, child_seeds
from .verify import (BoxTruncation, VerificationReport, check_coherence, check_detailed_balance,
                     check_intertwine_generator, check_semigroup_mc)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_TRUNCATED = 0, 1, 2, 3

log = logging.getLogger("gtdyn")

DEFAULTS: dict[str, dict[str, Any]] = {
    "simulate": {
        "model": "n-chain", "n": 2, "t": 1.0, "trajectories": 1, "jobs": 1,
        "max_events": DEFAULT_MAX_EVENTS, "ab": "1.5,2.5", "c": 0.7,
    },
    "verify": {
        "check": ["intertwine"], "n": 2, "box": 12, "margin": 3, "tol": None,
        "samples": 10_000, "trajectories": 100_000, "t": 0.1, "n_max": 10,
        "ab": "1.5,2.5", "c": 0.7, "jobs": 1, "window": "-25,25",
    },
    "boundary": {"n": 1, "eps": 1e-12, "max_order": 3, "tp_tol": 1e-10},
}

CHECKS = ("intertwine", "coherence", "detailed-balance", "semigroup-mc", "all-pascal",
          "total-positivity", "boundary-compatibility")


class ConfigError(Exception):
    pass


# -- configuration ----------------------------------------------------------

def _resolve(command: str, args: argparse.Namespace) -> dict[str, Any]:
    cfg = dict(DEFAULTS[command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    cfg.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "func")})
    return cfg


def _quadruple(value) -> tuple:
    if isinstance(value, str):
        return parse_quadruple(value)
    if isinstance(value, dict):
        return zw_from_mapping(value).as_tuple()
    if isinstance(value, (list, tuple)) and len(value) == 4:
        return tuple(parse_number(v) for v in value)
    raise ValueError(f"cannot read four parameters from {value!r}")


def _zw(cfg) -> ZwParams:
    if cfg.get("zw") is None:
        raise ConfigError("missing --zw")
    return ZwParams.from_values(*_quadruple(cfg["zw"]))


def _uv_for_level(cfg, N: int) -> UvParams:
    if cfg.get("uv") is not None:
        return UvParams.from_values(*_quadruple(cfg["uv"]))
    return shift_params(_zw(cfg), N)


def _ints(value) -> tuple[int, ...]:
    if isinstance(value, str):
        return tuple(int(p) for p in value.split(",") if p.strip())
    if isinstance(value, int):
        return (value,)
    return tuple(int(p) for p in value)


def _ab(cfg) -> AbParams:
    a, b = (float(x) for x in (cfg["ab"].split(",") if isinstance(cfg["ab"], str) else cfg["ab"]))
    return AbParams(a, b)


def _seed(cfg) -> int:
    seed = cfg.get("seed")
    if seed is None:
        seed = os.environ.get("GTDYN_SEED")
    if seed is None:
        raise ConfigError("a seed is required (--seed, config 'seed', or GTDYN_SEED)")
    try:
        return int(seed)
    except ValueError as exc:
        raise ConfigError(f"seed must be an integer, got {seed!r}") from exc


def _positive_int(cfg, key: str, minimum: int = 1) -> int:
    value = int(cfg[key])
    if value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}")
    return value


@contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _map(fn: Callable, tasks: Sequence, jobs: int) -> list:
    """Order-preserving map, parallel over processes when ``jobs > 1``."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _state_key(state) -> str:
    return ",".join(str(int(c)) for c in state) if isinstance(state, tuple) else str(int(state))


# -- simulate ---------------------------------------------------------------

def _run_one(task):
    model, params, N, start, t_max, seed, max_events = task
    if model == "bdp1":
        return Bdp1Chain(params).simulate(start[0], t_max, seed, max_events)
    if model == "n-chain":
        return NChain(params, N).simulate(start, t_max, seed, max_events)
    kind = "6A" if model == "pascal-6a" else "6B"
    ab, c = params
    return simulate_path(N, start[0], t_max, seed, model=kind, ab=ab, c=c, max_events=max_events)


def _simulation_tasks(cfg) -> list[tuple]:
    model = cfg["model"]
    N = _positive_int(cfg, "n")
    t_max = float(cfg["t"])
    if t_max < 0:
        raise ConfigError("--t must be nonnegative")
    runs = _positive_int(cfg, "trajectories")
    max_events = _positive_int(cfg, "max_events")
    if model == "bdp1":
        params = _uv_for_level(cfg, 1)
        start = _ints(cfg.get("start", 0))
        Bdp1Chain(params)
    elif model == "n-chain":
        params = _uv_for_level(cfg, N)
        start = _ints(cfg["start"]) if cfg.get("start") is not None else tuple(range(N - 1, -1, -1))
        NChain(params, N).neighbor_rates(start)
    elif model in ("pascal-6a", "pascal-6b"):
        params = (_ab(cfg), float(cfg["c"]))
        start = _ints(cfg["start"]) if cfg.get("start") is not None else (N // 2,)
    else:
        raise ConfigError(f"unknown model {model!r}")
    seed = _seed(cfg)
    seeds = [seed] if runs == 1 else child_seeds(seed, runs)
    return [(model, params, N, start, t_max, s, max_events) for s in seeds]


def cmd_simulate(cfg: dict) -> int:
    tasks = _simulation_tasks(cfg)
    trajectories = _map(_run_one, tasks, int(cfg["jobs"]))
    many = len(trajectories) > 1
    with _output(cfg.get("out")) as fh:
        labels = list(trajectories[0].labels)
        fh.write(",".join((["trajectory"] if many else []) + ["time"] + labels) + "\n")
        for k, tr in enumerate(trajectories):
            tr.write_csv(fh, k if many else None)
    summary = {
        "model": cfg["model"],
        "N": 1 if cfg["model"] == "bdp1" else int(cfg["n"]),
        "t_max": float(cfg["t"]),
        "seed": _seed(cfg),
        "trajectories": [
            {
                "seed": tr.seed,
                "event_count": tr.event_count,
                "final_state": _state_key(tr.final_state),
                "truncated": tr.truncated,
                "occupation": {_state_key(s): v for s, v in sorted(tr.occupation().items())},
            }
            for tr in trajectories
        ],
    }
    summary_path = cfg.get("summary")
    if summary_path is None and cfg.get("out") not in (None, "-"):
        summary_path = os.path.splitext(cfg["out"])[0] + ".summary.json"
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if summary_path:
        with open(summary_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    if any(tr.truncated for tr in trajectories):
        log.error("event cap reached; trajectories truncated")
        return EXIT_TRUNCATED
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _check_task(task) -> list[VerificationReport]:
    name, cfg = task
    tol = cfg.get("tol")
    extra = {} if tol is None else {"tol": float(tol)}
    N = int(cfg["n"])
    if name == "intertwine":
        box = BoxTruncation(N, int(cfg["box"]), int(cfg["margin"]))
        return [check_intertwine_generator(_zw(cfg), N, box, **extra)]
    if name == "coherence":
        box = BoxTruncation(N, int(cfg["box"]), int(cfg["margin"]))
        return [check_coherence(_zw(cfg), N, box, **extra)]
    if name == "detailed-balance":
        return [check_detailed_balance(_uv_for_level(cfg, N), N, int(cfg["samples"]), _seed(cfg), **extra)]
    if name == "semigroup-mc":
        start = _ints(cfg["start"]) if cfg.get("start") is not None else tuple(range(N, 1, -1)) + (0,)
        return [check_semigroup_mc(_zw(cfg), N, start, float(cfg["t"]), int(cfg["trajectories"]),
                                   _seed(cfg))]
    if name == "all-pascal":
        return check_pascal_all(int(cfg["n_max"]), ab=_ab(cfg), c=float(cfg["c"]))
    if name in ("total-positivity", "boundary-compatibility"):
        omega = _omega(cfg)
        if name == "total-positivity":
            eps_tp = 1e-10 if tol is None else float(tol)
            return [total_positivity_check(phi_coefficients(omega), eps_tp=eps_tp)]
        lo, hi = _ints(cfg["window"])
        return [check_boundary_compatibility(omega, N, (lo, hi), margin=int(cfg["margin"]), **extra)]
    raise ConfigError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")


def _check_names(cfg) -> list[str]:
    names = cfg["check"]
    if isinstance(names, str):
        names = [names]
    out = []
    for item in names:
        out += [n.strip() for n in item.split(",") if n.strip()]
    unknown = [n for n in out if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check {unknown[0]!r}; choose from {', '.join(CHECKS)}")
    return out


def _validate_check_config(name: str, cfg: dict) -> None:
    """Touch every parameter a check needs so bad input fails before any work starts."""
    if name in ("intertwine", "coherence", "semigroup-mc"):
        zw = _zw(cfg)
        for level in range(1, int(cfg["n"]) + 1):
            shift_params(zw, level)
    if name == "detailed-balance":
        _uv_for_level(cfg, int(cfg["n"]))
    if name in ("detailed-balance", "semigroup-mc"):
        _seed(cfg)
    if name == "all-pascal":
        _ab(cfg)
    if name in ("total-positivity", "boundary-compatibility"):
        _omega(cfg)


def cmd_verify(cfg: dict) -> int:
    names = _check_names(cfg)
    for name in names:
        _validate_check_config(name, cfg)
    results = _map(_check_task, [(name, cfg) for name in names], int(cfg["jobs"]))
    reports = [r for group in results for r in group]
    with _output(cfg.get("out")) as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2, default=str)
        fh.write("\n")
    for r in reports:
        log.info("%s: %s (residual %.3g, tolerance %.3g)", r.check, "pass" if r.passed else "FAIL",
                 r.max_residual, r.tolerance)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# -- boundary ---------------------------------------------------------------

def _omega(cfg) -> EdreiOmega:
    spec = cfg.get("omega")
    if spec is None:
        raise ConfigError("missing --omega")
    try:
        omega = EdreiOmega.from_dict(spec) if isinstance(spec, dict) else EdreiOmega.parse(str(spec))
    except (OSError, ValueError, ZeroDivisionError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read omega: {exc}") from exc
    ok, problems = validate_omega(omega)
    if not ok:
        raise ConfigError("invalid omega: " + "; ".join(problems))
    return omega


def _number(x):
    return str(x) if isinstance(x, Fraction) and x.denominator != 1 else float(x)


def cmd_boundary(cfg: dict) -> int:
    omega = _omega(cfg)
    N = _positive_int(cfg, "n")
    eps = float(cfg["eps"])
    window = phi_coefficients(omega, eps)
    if cfg.get("window") is not None:
        lo, hi = _ints(cfg["window"])
    else:
        lo, hi = window.lo, window.hi + N - 1
    window = phi_coefficients(omega, eps, lo=lo - N + 1, hi=hi)
    tp = total_positivity_check(window, int(cfg["max_order"]), float(cfg["tp_tol"]))
    row = boundary_row(window, N, (lo, hi), eps)
    mass = sum(row.values())
    out = {
        "omega": omega.to_dict(),
        "gamma_plus": float(omega.gamma_plus),
        "gamma_minus": float(omega.gamma_minus),
        "phi": {"lo": window.lo, "hi": window.hi, "tail_bound": window.tail_bound,
                "coeffs": [_number(c) for c in window.coeffs]},
        "total_positivity": tp.to_dict(),
        "N": N,
        "coord_window": [lo, hi],
        "row": [{"point": list(p), "value": _number(v)} for p, v in row.items() if v != 0],
        "row_mass": _number(mass),
    }
    with _output(cfg.get("out")) as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    if cfg.get("phi_csv"):
        with open(cfg["phi_csv"], "w", encoding="utf-8") as fh:
            fh.write(window.to_csv())
    return EXIT_OK if tp.passed else EXIT_FAIL


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtdyn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="level N")
    common.add_argument("--jobs", type=int, help="worker processes")

    sim = sub.add_parser("simulate", parents=[common], help="simulate trajectories")
    sim.add_argument("--model", choices=["bdp1", "n-chain", "pascal-6a", "pascal-6b"])
    sim.add_argument("--zw", help="z,z',w,w' (complex as 1+2j)")
    sim.add_argument("--uv", help="u,u',v,v' rate parameters at level N")
    sim.add_argument("--t", type=float, help="time horizon")
    sim.add_argument("--start", help="initial state, comma separated")
    sim.add_argument("--trajectories", type=int)
    sim.add_argument("--max-events", type=int, dest="max_events")
    sim.add_argument("--ab", help="a,b for pascal-6a")
    sim.add_argument("--c", type=float, help="c for pascal-6b")
    sim.add_argument("--summary", help="summary JSON path (default: next to --out, else stderr)")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", parents=[common], help="run numerical checks")
    ver.add_argument("--check", action="append", help=f"one of {', '.join(CHECKS)}; repeatable")
    ver.add_argument("--zw")
    ver.add_argument("--uv")
    ver.add_argument("--box", type=int, help="coordinate bound L of the truncation box")
    ver.add_argument("--margin", type=int)
    ver.add_argument("--tol", type=float)
    ver.add_argument("--samples", type=int, help="moves for detailed-balance")
    ver.add_argument("--trajectories", type=int, help="runs for semigroup-mc")
    ver.add_argument("--t", type=float)
    ver.add_argument("--start")
    ver.add_argument("--n-max", type=int, dest="n_max")
    ver.add_argument("--ab")
    ver.add_argument("--c", type=float)
    ver.add_argument("--omega")
    ver.add_argument("--window", help="lo,hi coordinate window for boundary checks")
    ver.set_defaults(func=cmd_verify)

    bnd = sub.add_parser("boundary", parents=[common], help="boundary coefficients and links")
    bnd.add_argument("--omega", help="zero, pascal:X, inline JSON, or a JSON file")
    bnd.add_argument("--window", help="lo,hi coordinate window for the level-N row")
    bnd.add_argument("--eps", type=float)
    bnd.add_argument("--max-order", type=int, dest="max_order")
    bnd.add_argument("--tp-tol", type=float, dest="tp_tol")
    bnd.add_argument("--phi-csv", dest="phi_csv", help="write (n, phi_n) CSV here")
    bnd.set_defaults(func=cmd_boundary)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    command = args.command
    del args.command, args.verbose
    try:
        cfg = _resolve(command, args)
        return args.func(cfg)
    except (ConfigError, GtdynError, ValueError, KeyError, IndexError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
