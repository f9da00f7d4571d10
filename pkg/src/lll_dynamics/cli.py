"""Batch front-end.

Every run is described by one JSON document with the sections ``system``,
``initial_data``, ``integrator``, ``observables`` and ``output``. Unknown keys
are configuration errors. Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .asymptotics import QuadratureError, bump, compare
from .core import GRADIENT_CONSISTENT, PAPER_LITERAL, BlowUpError, HamiltonianOverflowError
from .fock import FockSystem, ansatz_coefficients
from .integrate import OBSERVABLES, SCHEMES, Trajectory, evolve, flow_consistency_check
from .limit import LimitSystem, build_grid
from .shell import DEFAULT_EPSILON, ShellSystem

logger = logging.getLogger("lll_dynamics")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

CSV_COLUMNS = ("t", "re_a", "im_a") + OBSERVABLES

MODE_FLAGS = {"gradient": GRADIENT_CONSISTENT, "paper": PAPER_LITERAL}

SECTIONS = ("system", "initial_data", "integrator", "observables", "output")

SYSTEM_KEYS = {
    "fock": {"N", "fast"},
    "limit": {"R", "j_min", "j_max", "lam", "mode"},
    "shell": {"j_min", "j_max", "lam", "epsilon", "mode"},
}
INITIAL_KEYS = {
    "a", "profile", "amplitude", "center", "width", "j", "j1", "j2", "amplitude2",
    "ray", "n", "n1", "n2", "values", "scale", "lam", "lo", "hi",
}
INTEGRATOR_KEYS = {"scheme", "dt", "t_end", "tol", "max_iter"}
OBSERVABLE_KEYS = {"observe_every", "alpha"}
OUTPUT_KEYS = {"dir", "name"}
ASYMPTOTIC_SYSTEM_KEYS = {"lambdas", "a", "N_factor"}


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    return config


def _check_keys(section: str, given: dict, allowed: set):
    if not isinstance(given, dict):
        raise ConfigError(f"section {section!r} must be an object")
    for key in given:
        if key not in allowed:
            raise ConfigError(f"unknown key {section}.{key}")


def validate(config: dict, command: str) -> dict:
    for key in config:
        if key not in SECTIONS:
            raise ConfigError(f"unknown key {key}")
    config = {s: dict(config.get(s, {})) for s in SECTIONS}
    if command == "verify-asymptotics":
        _check_keys("system", config["system"], ASYMPTOTIC_SYSTEM_KEYS)
        _check_keys("initial_data", config["initial_data"], {"profile", "lo", "hi", "amplitude"})
        _check_keys("integrator", config["integrator"], set())
        _check_keys("observables", config["observables"], set())
    else:
        kind = command.split("-", 1)[1] if command.startswith("simulate-") else config["system"].get("type")
        allowed = SYSTEM_KEYS.get(kind)
        if allowed is None:
            raise ConfigError(f"unknown system type {kind!r}")
        extra = {"type"} if command == "check-gradients" else set()
        _check_keys("system", config["system"], allowed | extra)
        _check_keys("initial_data", config["initial_data"], INITIAL_KEYS)
        _check_keys("integrator", config["integrator"], INTEGRATOR_KEYS if command.startswith("simulate-") else set())
        _check_keys("observables", config["observables"], OBSERVABLE_KEYS)
    _check_keys("output", config["output"], OUTPUT_KEYS)
    return config


def _complex(value, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{what} must be a number or a [re, im] pair")


def _complex_array(values, what: str) -> np.ndarray:
    if not isinstance(values, list):
        raise ConfigError(f"{what} must be a list")
    return np.array([_complex(v, what) for v in values], dtype=complex)


def _get(section: dict, key: str, default, kind=float):
    value = section.get(key, default)
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def build_system(kind: str, cfg: dict, mode: str | None = None):
    mode = mode or cfg.get("mode", GRADIENT_CONSISTENT)
    if mode not in (GRADIENT_CONSISTENT, PAPER_LITERAL):
        raise ConfigError(f"unknown mode {mode!r}")
    try:
        if kind == "fock":
            return FockSystem(_get(cfg, "N", 16, int), bool(cfg.get("fast", True)))
        if kind == "limit":
            grid = build_grid(_get(cfg, "R", 4, int), _get(cfg, "j_min", -2, int), _get(cfg, "j_max", 4, int))
            return LimitSystem(grid, _get(cfg, "lam", 1.0), mode)
        if kind == "shell":
            return ShellSystem(
                _get(cfg, "j_min", 0, int),
                _get(cfg, "j_max", 7, int),
                _get(cfg, "lam", 1.0),
                _get(cfg, "epsilon", DEFAULT_EPSILON),
                mode,
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown system type {kind!r}")


def initial_state(system, cfg: dict, seed: int | None = None) -> np.ndarray:
    """Initial vector from a named profile or literal values."""
    profile = cfg.get("profile", "zero")
    a = _complex(cfg.get("a", 1.0), "a")
    amp = _complex(cfg.get("amplitude", 0.5), "amplitude")
    y = np.zeros(system.size, dtype=complex)
    y[0] = a
    s = system.frequencies[1:]
    if isinstance(system, FockSystem):
        if profile == "zero":
            pass
        elif profile == "literal":
            values = _complex_array(cfg.get("values", []), "values")
            if values.size > system.size:
                raise ConfigError("more literal coefficients than N+1")
            y[: values.size] = values
            if "a" in cfg:
                y[0] = a
        elif profile == "single_mode":
            y[_index(cfg, "n", system.size)] = amp
        elif profile == "two_mode":
            y[_index(cfg, "n1", system.size)] = amp
            y[_index(cfg, "n2", system.size)] = _complex(cfg.get("amplitude2", cfg.get("amplitude", 0.5)), "amplitude2")
        elif profile == "gaussian_bump":
            lam = _get(cfg, "lam", 8, int)
            center, width = _get(cfg, "center", 1.0), _get(cfg, "width", 0.5)
            try:
                y = ansatz_coefficients(a, lambda x: _log_gaussian(x, amp, center, width), lam, system.N)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        elif profile == "random":
            y = _random(system.size, _get(cfg, "scale", 0.5), seed)
            y[0] = a
        else:
            raise ConfigError(f"unknown profile {profile!r} for the fock system")
        return y

    grid = system.grid
    g = np.zeros(grid.shape, dtype=complex)
    if profile == "zero":
        pass
    elif profile == "literal":
        values = _complex_array(cfg.get("values", []), "values")
        if values.size != g.size:
            raise ConfigError(f"expected {g.size} literal values, got {values.size}")
        g = values.reshape(grid.shape)
    elif profile == "single_shell":
        g[_ray(cfg, grid), _level(cfg, "j", grid)] = amp
    elif profile == "two_mode":
        ray = _ray(cfg, grid)
        g[ray, _level(cfg, "j1", grid)] = amp
        g[ray, _level(cfg, "j2", grid)] = _complex(cfg.get("amplitude2", cfg.get("amplitude", 0.5)), "amplitude2")
    elif profile == "gaussian_bump":
        g = _log_gaussian(grid.s, amp, _get(cfg, "center", 1.0), _get(cfg, "width", 0.5))
    elif profile == "random":
        g = _random(g.size, _get(cfg, "scale", 0.5), seed).reshape(grid.shape)
    else:
        raise ConfigError(f"unknown profile {profile!r}")
    y[1:] = np.asarray(g).reshape(-1)
    return y


def _log_gaussian(s, amp, center, width):
    """amp * exp(-(log2(s/center))^2 / (2 width^2)), zero at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape, dtype=complex)
    pos = s > 0
    out[pos] = amp * np.exp(-np.log2(s[pos] / center) ** 2 / (2 * width**2))
    return out


def _random(n, scale, seed):
    rng = np.random.default_rng(seed)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)


def _index(cfg, key, size):
    n = _get(cfg, key, 1, int)
    if not 0 < n < size:
        raise ConfigError(f"{key}={n} outside 1..{size - 1}")
    return n


def _ray(cfg, grid):
    r = _get(cfg, "ray", 0, int)
    if not 0 <= r < grid.R:
        raise ConfigError(f"ray={r} outside 0..{grid.R - 1}")
    return r


def _level(cfg, key, grid):
    j = _get(cfg, key, grid.j_min, int)
    if not grid.j_min <= j <= grid.j_max:
        raise ConfigError(f"{key}={j} outside [{grid.j_min}, {grid.j_max}]")
    return j - grid.j_min


def _fmt(x: float) -> str:
    return repr(float(x))


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i, t in enumerate(traj.times):
        a = traj.states[i, 0]
        row = [t, a.real, a.imag] + [traj.observables[name][i] for name in OBSERVABLES]
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trajectory_json(traj: Trajectory, command: str, config: dict) -> str:
    doc = {
        "command": command,
        "config": config,
        "times": [float(t) for t in traj.times],
        "states": [[[float(z.real), float(z.imag)] for z in y] for y in traj.states],
    }
    return json.dumps(doc, indent=1) + "\n"


def _output_paths(config, args, default_name):
    out_dir = Path(args.out or config["output"].get("dir", "."))
    name = config["output"].get("name", default_name)
    return out_dir, name


def cmd_simulate(args, config) -> int:
    kind = args.command.split("-", 1)[1]
    mode = MODE_FLAGS[args.mode] if args.mode else None
    system = build_system(kind, config["system"], mode)
    y0 = initial_state(system, config["initial_data"], args.seed)
    integ = config["integrator"]
    scheme = integ.get("scheme", "implicit_midpoint")
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    dt, t_end = _get(integ, "dt", 1e-3), _get(integ, "t_end", 1.0)
    if not (dt > 0 and t_end > 0):
        raise ConfigError("dt and t_end must be positive")
    obs = config["observables"]
    out_dir, name = _output_paths(config, args, kind)
    status = EXIT_OK
    try:
        traj = evolve(
            system,
            y0,
            t_end,
            dt,
            scheme,
            observe_every=_get(obs, "observe_every", 1, int),
            alpha=_get(obs, "alpha", 0.25),
            tol=_get(integ, "tol", 1e-13),
            max_iter=_get(integ, "max_iter", 50, int),
        )
    except BlowUpError as exc:
        logger.error("%s", exc)
        traj, status = exc.trajectory, EXIT_NUMERICAL
        if traj is None:
            return status
    atomic_write(out_dir / f"{name}.csv", trajectory_csv(traj))
    atomic_write(out_dir / f"{name}.json", trajectory_json(traj, args.command, config))
    if not args.quiet:
        print(f"wrote {len(traj)} snapshots to {out_dir / name}.csv")
    return status


def cmd_verify_asymptotics(args, config) -> int:
    sysc, init = config["system"], config["initial_data"]
    lambdas = sysc.get("lambdas", [16, 32, 64])
    if not isinstance(lambdas, list) or not all(isinstance(l, int) and l >= 1 for l in lambdas):
        raise ConfigError("system.lambdas must be a list of integers >= 1")
    a = _complex(sysc.get("a", 1.0), "a")
    if init.get("profile", "bump") != "bump":
        raise ConfigError("verify-asymptotics supports the 'bump' profile only")
    lo, hi = _get(init, "lo", 0.5), _get(init, "hi", 2.0)
    try:
        g = bump(lo, hi, _get(init, "amplitude", 1.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = []
    for lam in lambdas:
        N = int(math.ceil(lam * hi)) + 1
        b = compare(a, g, lam, N, support=(lo, hi))
        r = b.ratios()
        parts = sum(getattr(b, f"H{k}") for k in range(5)).real
        rows.append(
            {
                "lam": lam,
                "N": N,
                "ratio_H2": r["H2"],
                "ratio_H3": r["H3"],
                "ratio_H4": r["H4"],
                "abs_H1": abs(b.H1),
                "additivity_rel": abs(parts - b.total) / abs(b.total),
            }
        )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for row in rows:
        writer.writerow([row["lam"], row["N"]] + [_fmt(v) for k, v in row.items() if k not in ("lam", "N")])
    out_dir, name = _output_paths(config, args, "asymptotics")
    atomic_write(out_dir / f"{name}.csv", buf.getvalue())
    atomic_write(out_dir / f"{name}.json", json.dumps({"config": config, "rows": rows}, indent=1) + "\n")
    if not args.quiet:
        print(buf.getvalue(), end="")
    return EXIT_OK


def cmd_check_gradients(args, config) -> int:
    kind = config["system"].get("type", "limit")
    mode = MODE_FLAGS[args.mode] if args.mode else None
    system = build_system(kind, config["system"], mode)
    init = dict(config["initial_data"])
    init.setdefault("profile", "random")
    y = initial_state(system, init, args.seed if args.seed is not None else 0)
    report = flow_consistency_check(system, y)
    doc = {
        "system": kind,
        "mode": getattr(system, "mode", GRADIENT_CONSISTENT),
        "max_rel_error": report.max_rel_error,
        "passed": report.passed(),
        "term_coefficients": report.term_coefficients,
        "mismatched_terms": report.mismatched_terms(),
    }
    text = json.dumps(doc, indent=1) + "\n"
    if config["output"] or args.out:
        out_dir, name = _output_paths(config, args, "gradients")
        atomic_write(out_dir / f"{name}.json", text)
    if not args.quiet:
        print(text, end="")
    return EXIT_OK


def describe(system) -> str:
    """Human-readable summary of the equations, mode, constants and grid."""
    return system.describe()


def cmd_describe(args, config) -> int:
    mode = MODE_FLAGS[args.mode] if args.mode else None
    system = build_system(args.system, config.get("system", {}) if config else {}, mode)
    print(describe(system))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lll-dynamics", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--mode", choices=sorted(MODE_FLAGS), help="right-hand side of the limit/shell systems")
        p.add_argument("--seed", type=int, help="seed for random initial data")
        p.add_argument("--quiet", action="store_true")

    for name in ("simulate-fock", "simulate-limit", "simulate-shell", "verify-asymptotics", "check-gradients"):
        common(sub.add_parser(name))
    p = sub.add_parser("describe")
    p.add_argument("system", choices=sorted(SYSTEM_KEYS))
    common(p, config_required=False)
    return parser


COMMANDS = {
    "simulate-fock": cmd_simulate,
    "simulate-limit": cmd_simulate,
    "simulate-shell": cmd_simulate,
    "verify-asymptotics": cmd_verify_asymptotics,
    "check-gradients": cmd_check_gradients,
    "describe": cmd_describe,
}


def run(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s: %(message)s")
    try:
        config: dict[str, Any] = {}
        if args.config:
            config = validate(load_config(args.config), args.command)
        elif args.command == "describe":
            config = {}
        return COMMANDS[args.command](args, config)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG
    except (BlowUpError, HamiltonianOverflowError, FloatingPointError, QuadratureError, RuntimeError) as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # parameter values the library rejects (negative dt, bad alpha, ...)
        logger.error("config error: %s", exc)
        return EXIT_CONFIG


def main():
    sys.exit(run())
