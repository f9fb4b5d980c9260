"""Command-line front end.

Subcommands ``matrix``, ``sweep``, ``optimize`` and ``simulate`` share one
configuration scheme: a JSON document (``--config PATH`` or ``--config -``
for standard input), optionally seeded by a figure ``--preset``, with
per-key overrides from flags (``--mu 10``) or ``--set key=value``.
Precedence is preset < config < flags.

Exit codes: 0 success, 2 configuration error, 3 computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    IncompatibleObjectiveError,
    InvalidParameterError,
    ReserveSpacingError,
)
from .model import (
    STATE_LABELS,
    ModelParams,
    ModelVariant,
    check_distance,
    check_distribution,
    colonisation_matrix,
    compose,
    event_matrices,
    extinction_matrix,
)
from .simulate import SimConfig, estimate_stationary, estimate_survival
from .spacing import ObjectiveKind, ObjectiveSpec, objective, optimize_spacing
from .spectral import BOTH_OCCUPIED, stationary_distribution, survival_probability

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3

SIG_DIGITS = 12
CSV_HEADER = ("series", "d", "value")
UNITS = {"time_step": "year", "distance": "km"}

# Closed-form curves plotted alongside the viability objectives.
CURVE_KINDS = ("colonisation", "shared_catastrophe")

_MODEL_KEYS = {"variant": str, "r": float, "mu": float, "alpha": float, "a": float, "b": float}
_SWEEP_KEYS = {"objective": str, "d_min": float, "d_max": float, "n_points": int}

SCHEMA: dict[str, dict[str, Any]] = {
    "matrix": {**_MODEL_KEYS, "d": float, "matrices": list},
    "sweep": {**_MODEL_KEYS, **_SWEEP_KEYS, "series": list},
    "optimize": {
        **_MODEL_KEYS,
        "objective": str,
        "d_min": float,
        "d_max": float,
        "tol": float,
        "n_grid": int,
        "series": list,
    },
    "simulate": {
        **_MODEL_KEYS,
        "d": float,
        "mode": str,
        "n_reps": int,
        "horizon": int,
        "burn_in": int,
        "seed": int,
        "initial": list,
    },
}

DEFAULTS: dict[str, Any] = {
    "variant": "baseline",
    "r": 0.5,
    "mu": 5.0,
    "alpha": 0.1,
    "a": 0.0,
    "b": 0.0,
    "d": 10.0,
    "d_min": 0.0,
    "n_points": 401,
    "tol": 1e-6,
    "n_grid": 512,
    "mode": "survival",
    "n_reps": 100_000,
    "horizon": 20,
    "burn_in": 1000,
    "seed": 0,
}

_FIGURE_GRID = {"d_min": 0.0, "d_max": 100.0, "n_points": 401}


def _series(key: str, values: Iterable[float]) -> list[dict[str, Any]]:
    return [{"label": f"{key}={v:g}", key: v} for v in values]


PRESETS: dict[str, dict[str, Any]] = {
    "fig3": {
        "objective": "colonisation",
        **_FIGURE_GRID,
        "series": _series("alpha", (0.01, 0.1, 0.2)),
    },
    "fig5": {
        "objective": "shared_catastrophe",
        "r": 0.5,
        **_FIGURE_GRID,
        "series": _series("mu", (20.0, 30.0, 40.0)),
    },
    "fig6": {
        "variant": "baseline",
        "objective": "quasi_extinction_rate",
        "r": 0.5,
        "alpha": 0.1,
        **_FIGURE_GRID,
        "series": _series("mu", (5.0, 10.0, 20.0)),
    },
    "fig8": {
        "variant": "recruitment",
        "objective": "equilibrium_persistence",
        "r": 0.5,
        "alpha": 0.1,
        "mu": 5.0,
        **_FIGURE_GRID,
        "series": _series("a", (0.05, 0.075, 0.10)),
    },
    "fig9": {
        "variant": "full",
        "objective": "equilibrium_persistence",
        "r": 0.5,
        "alpha": 0.1,
        "mu": 5.0,
        "a": 0.1,
        **_FIGURE_GRID,
        "series": _series("b", (0.025, 0.05, 0.1)),
    },
}


# ---------------------------------------------------------------------------
# formatting and round-tripping


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def write_curve_csv(records: Iterable[tuple[str, float, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for label, d, value in records:
        writer.writerow((label, fmt(d), fmt(value)))
    return buf.getvalue()


def read_curve_csv(text: str) -> list[tuple[str, float, float]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ConfigError(f"curve CSV must start with header {','.join(CSV_HEADER)}")
    return [(label, float(d), float(v)) for label, d, v in rows[1:]]


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    """Validated settings for one subcommand invocation."""

    command: str
    values: dict[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    @property
    def variant(self) -> ModelVariant:
        return ModelVariant.parse(self.values["variant"])

    def params(self, overrides: dict[str, Any] | None = None) -> ModelParams:
        fields = {k: self.values[k] for k in ("r", "mu", "alpha", "a", "b")}
        fields.update({k: v for k, v in (overrides or {}).items() if k in fields})
        return ModelParams(**fields)


def _coerce(command: str, key: str, value: Any, where: str) -> Any:
    schema = SCHEMA[command]
    if key not in schema:
        raise ConfigError(f"{where}: unknown key {key!r} for '{command}' (allowed: {', '.join(sorted(schema))})")
    kind = schema[key]
    try:
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float, str)):
                raise TypeError
            return float(value)
        if kind is int:
            if isinstance(value, bool):
                raise TypeError
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
        if kind is list:
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            if not isinstance(value, list):
                raise TypeError
            return value
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: key {key!r} expects {kind.__name__}, got {value!r}") from None
    raise AssertionError(kind)


def _load_config_document(path: str) -> dict[str, Any]:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def _parse_assignment(text: str) -> tuple[str, Any]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"--set expects KEY=VALUE, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().replace("-", "_"), value


def build_config(command: str, args: argparse.Namespace) -> RunConfig:
    """Merge preset, config file and flag overrides, then validate everything."""
    values: dict[str, Any] = {}
    if getattr(args, "preset", None):
        preset = PRESETS[args.preset]
        values.update({k: v for k, v in preset.items() if k in SCHEMA[command]})
    if args.config:
        for key, value in _load_config_document(args.config).items():
            values[key] = _coerce(command, key, value, args.config)
    for key in SCHEMA[command]:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = _coerce(command, key, flag_value, f"--{key.replace('_', '-')}")
    for assignment in args.set or ():
        key, value = _parse_assignment(assignment)
        values[key] = _coerce(command, key, value, "--set")

    merged = {k: v for k, v in DEFAULTS.items() if k in SCHEMA[command]}
    merged.update(values)
    cfg = RunConfig(command, merged)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    try:
        variant = cfg.variant
        params = cfg.params()
        if "d" in cfg.values:
            check_distance(cfg["d"])
        for item in cfg.get("series") or ():
            _series_params(cfg, item)
        if cfg.command == "matrix":
            _requested_matrices(cfg)
        if cfg.command in ("sweep", "optimize"):
            for label, p, spec in _series_specs(cfg):
                if isinstance(spec, ObjectiveSpec):
                    spec.check(p)
            if cfg.get("d_max") is not None and not cfg["d_min"] < cfg["d_max"]:
                raise InvalidParameterError(
                    f"need d_min < d_max, got [{cfg['d_min']}, {cfg['d_max']}]"
                )
            check_distance(cfg["d_min"])
            if cfg.command == "sweep":
                if cfg.get("d_max") is None:
                    raise ConfigError("sweep needs d_max")
                if cfg["n_points"] < 2:
                    raise InvalidParameterError("n_points must be >= 2")
            else:
                if not cfg["tol"] > 0:
                    raise InvalidParameterError(f"tol must be > 0, got {cfg['tol']}")
                if cfg["n_grid"] < 3:
                    raise InvalidParameterError("n_grid must be >= 3")
        if cfg.command == "simulate":
            _sim_config(cfg)
            _initial(cfg)
            if cfg["mode"] not in ("survival", "stationary"):
                raise ConfigError(f"mode must be 'survival' or 'stationary', got {cfg['mode']!r}")
            if cfg["mode"] == "stationary" and (variant is ModelVariant.BASELINE or params.a == 0.0):
                raise IncompatibleObjectiveError(
                    "stationary mode needs external recruitment: use variant "
                    "'recruitment' or 'full' with a > 0"
                )
    except (InvalidParameterError, IncompatibleObjectiveError) as exc:
        raise ConfigError(str(exc)) from None


def _series_params(cfg: RunConfig, item: Any) -> tuple[str, dict[str, Any]]:
    if not isinstance(item, dict):
        raise ConfigError(f"series entries must be objects, got {item!r}")
    allowed = set(_MODEL_KEYS) | {"label", "objective"}
    unknown = set(item) - allowed
    if unknown:
        raise ConfigError(f"series entry: unknown key(s) {', '.join(sorted(unknown))}")
    overrides = {k: v for k, v in item.items() if k != "label"}
    label = str(item.get("label", ",".join(f"{k}={v}" for k, v in overrides.items()) or "default"))
    return label, overrides


def _series_specs(cfg: RunConfig):
    """Yield (label, params, spec) per series; spec is a curve kind string for closed-form curves."""
    items = cfg.get("series") or [{"label": "default"}]
    for item in items:
        label, overrides = _series_params(cfg, item)
        params = cfg.params(overrides)
        variant = ModelVariant.parse(overrides.get("variant", cfg["variant"]))
        kind = overrides.get("objective", cfg.get("objective"))
        if kind in CURVE_KINDS:
            if cfg.command != "sweep":
                raise ConfigError(f"objective {kind!r} is only available for 'sweep'")
            yield label, params, kind
        elif kind is None:
            yield label, params, ObjectiveSpec.default_for(variant)
        else:
            yield label, params, ObjectiveSpec(variant, ObjectiveKind.parse(kind))


def _requested_matrices(cfg: RunConfig) -> list[str]:
    names = cfg.get("matrices") or [*cfg.variant.stages, "A"]
    names = [str(n).upper() for n in names]
    bad = [n for n in names if n not in ("E", "L", "C", "R", "A")]
    if bad:
        raise ConfigError(f"matrices: unknown matrix name(s) {', '.join(bad)}; choose from E, L, C, R, A")
    return names


def _sim_config(cfg: RunConfig) -> SimConfig:
    return SimConfig(
        variant=cfg.variant,
        params=cfg.params(),
        d=cfg["d"],
        n_reps=cfg["n_reps"],
        horizon=cfg["horizon"],
        seed=cfg["seed"],
        burn_in=cfg["burn_in"],
    )


def _initial(cfg: RunConfig) -> np.ndarray:
    initial = cfg.get("initial")
    if initial is None:
        return BOTH_OCCUPIED
    try:
        return check_distribution(np.array([float(x) for x in initial]))
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"initial: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def _params_dict(params: ModelParams) -> dict[str, float]:
    return {"r": params.r, "mu": params.mu, "alpha": params.alpha, "a": params.a, "b": params.b}


def _round_sig(x: float) -> float:
    return float(fmt(x))


def run_matrix(cfg: RunConfig, out_format: str = "text") -> str:
    params = cfg.params()
    d = cfg["d"]
    mats = event_matrices(params, d)
    mats["A"] = compose(cfg.variant, params, d)
    names = _requested_matrices(cfg)
    if out_format == "json":
        return dump_json(
            {
                "variant": cfg.variant.value,
                "params": _params_dict(params),
                "d": d,
                "units": UNITS,
                "orientation": "rows=current state, columns=next state; P_next = P @ A",
                "matrices": {n: [[_round_sig(x) for x in row] for row in mats[n]] for n in names},
            }
        )
    width = SIG_DIGITS + 8
    lines = [
        f"# variant={cfg.variant.value} d={fmt(d)} "
        + " ".join(f"{k}={fmt(v)}" for k, v in _params_dict(params).items()),
        "# rows: current occupied count; columns: next occupied count",
    ]
    for name in names:
        lines.append("")
        lines.append(name)
        lines.append("from\\to " + "".join(s.rjust(width) for s in STATE_LABELS))
        for label, row in zip(STATE_LABELS, mats[name]):
            lines.append(label.ljust(8) + "".join(fmt(x).rjust(width) for x in row))
    return "\n".join(lines) + "\n"


def _curve_value(kind: "str | ObjectiveSpec", params: ModelParams, d: float) -> float:
    if kind == "colonisation":
        return float(colonisation_matrix(params.alpha, d)[1, 2])
    if kind == "shared_catastrophe":
        return float(extinction_matrix(params.r, params.mu, d)[2, 0])
    return objective(kind, params, d)


def run_sweep(cfg: RunConfig) -> str:
    grid = np.linspace(cfg["d_min"], cfg["d_max"], cfg["n_points"])
    records = []
    for label, params, kind in _series_specs(cfg):
        records.extend((label, float(d), _curve_value(kind, params, float(d))) for d in grid)
    return write_curve_csv(records)


def run_optimize(cfg: RunConfig) -> str:
    results = []
    for label, params, spec in _series_specs(cfg):
        opt = optimize_spacing(
            spec, params, d_min=cfg["d_min"], d_max=cfg.get("d_max"), tol=cfg["tol"], n_grid=cfg["n_grid"]
        )
        results.append(
            {
                "series": label,
                "variant": spec.variant.value,
                "objective": spec.kind.value,
                "params": _params_dict(params),
                **opt.to_dict(),
            }
        )
    if cfg.get("series") is None:
        doc = {**results[0], "units": UNITS}
    else:
        doc = {"units": UNITS, "results": results}
    return dump_json(doc)


def _z(estimate: float, exact: float, n: int) -> float | None:
    """Deviation in units of the binomial sd implied by the analytic probability.

    ``None`` when the analytic value is 0 or 1 yet the estimate differs.
    """
    diff = estimate - exact
    sigma = math.sqrt(max(exact * (1.0 - exact), 0.0) / n)
    if sigma > 0.0:
        return diff / sigma
    return 0.0 if abs(diff) <= 1e-12 else None


def run_simulate(cfg: RunConfig) -> str:
    sim = _sim_config(cfg)
    initial = _initial(cfg)
    doc: dict[str, Any] = {
        "mode": cfg["mode"],
        "variant": sim.variant.value,
        "params": _params_dict(sim.params),
        "d": sim.d,
        "n_reps": sim.n_reps,
        "seed": sim.seed,
        "units": UNITS,
    }
    if cfg["mode"] == "survival":
        est = estimate_survival(sim, initial)
        exact = survival_probability(sim.variant, sim.params, sim.d, initial, sim.horizon)
        doc.update(
            {
                "horizon": sim.horizon,
                "initial": [float(x) for x in initial],
                "initial_is_default": cfg.get("initial") is None,
                "estimate": {"mean": est.mean, "std_error": est.std_error, "n": est.n},
                "analytic": exact,
                "z": _z(est.mean, exact, est.n),
            }
        )
    else:
        est = estimate_stationary(sim, initial)
        pi = stationary_distribution(compose(sim.variant, sim.params, sim.d)).pi
        doc.update(
            {
                "burn_in": sim.burn_in,
                "estimate": {
                    "probs": [float(x) for x in est.probs],
                    "std_errors": [float(x) for x in est.std_errors],
                    "n": est.n,
                },
                "analytic": [float(x) for x in pi],
                "z": [_z(float(m), float(p), est.n) for m, p in zip(est.probs, pi)],
            }
        )
    return dump_json(doc)


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reserve-spacing",
        description="Viability and optimal spacing of two marine reserves.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "matrix": "print event and transition matrices",
        "sweep": "objective or closed-form curve over a distance grid (CSV)",
        "optimize": "optimal inter-reserve distance (JSON)",
        "simulate": "Monte Carlo estimate next to the analytic value (JSON)",
    }
    for command, schema in SCHEMA.items():
        p = sub.add_parser(command, help=helps[command], allow_abbrev=False)
        p.add_argument("--config", metavar="PATH", help="JSON config file, '-' for stdin")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        if command in ("sweep", "optimize"):
            choices = sorted(PRESETS) if command == "sweep" else ["fig6", "fig8", "fig9"]
            p.add_argument("--preset", choices=choices, help="named figure parameter set")
        if command == "matrix":
            p.add_argument("--format", choices=("text", "json"), default="text")
        for key, kind in schema.items():
            if key == "series":
                continue
            flag = "--" + key.replace("_", "-")
            if kind is list:
                p.add_argument(flag, dest=key, metavar="X,Y,...")
            elif kind is str:
                p.add_argument(flag, dest=key)
            else:
                p.add_argument(flag, dest=key, type=str, metavar=kind.__name__.upper())
    return parser


def _parse_flag_numbers(command: str, args: argparse.Namespace) -> None:
    for key, kind in SCHEMA[command].items():
        raw = getattr(args, key, None)
        if raw is None or kind not in (int, float):
            continue
        try:
            value = float(raw) if kind is float else int(raw)
        except ValueError:
            raise ConfigError(f"--{key.replace('_', '-')}: expected {kind.__name__}, got {raw!r}") from None
        if kind is float and not math.isfinite(value) and key not in ("d_max",):
            raise ConfigError(f"--{key.replace('_', '-')}: must be finite, got {raw!r}")
        setattr(args, key, value)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _parse_flag_numbers(args.command, args)
        cfg = build_config(args.command, args)
    except ConfigError as exc:
        print(f"reserve-spacing {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "matrix":
            text = run_matrix(cfg, args.format)
        elif args.command == "sweep":
            text = run_sweep(cfg)
        elif args.command == "optimize":
            text = run_optimize(cfg)
        else:
            text = run_simulate(cfg)
    except (ReserveSpacingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"reserve-spacing {args.command}: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
