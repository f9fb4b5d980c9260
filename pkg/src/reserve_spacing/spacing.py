"""Viability as a function of reserve spacing, and its maximisation.

The objective is cheap (closed form per distance) but not guaranteed
unimodal, so the optimiser scans a coarse grid and then refines the best
bracket by golden-section search.  When dispersal is short compared with
catastrophe size the curve rises to an asymptote instead of peaking; in
that case the smallest distance that gets within ``EPS_PLATEAU`` of the
supremum is returned, since closer reserves recolonise each other more
readily.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IncompatibleObjectiveError, InvalidParameterError
from .model import ModelParams, ModelVariant, check_distance, compose
from .spectral import decay_rate, stationary_distribution

EPS_PLATEAU = 1e-6
DEFAULT_GRID = 512
DEFAULT_TOL = 1e-6
TAIL_FRACTION = 0.1

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ObjectiveKind(str, enum.Enum):
    QUASI_EXTINCTION_RATE = "quasi_extinction_rate"
    EQUILIBRIUM_PERSISTENCE = "equilibrium_persistence"

    @classmethod
    def parse(cls, value: "str | ObjectiveKind") -> "ObjectiveKind":
        if isinstance(value, cls):
            return value
        aliases = {"lambda2": cls.QUASI_EXTINCTION_RATE, "persistence": cls.EQUILIBRIUM_PERSISTENCE}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise IncompatibleObjectiveError(f"unknown objective {value!r}") from None


@dataclass(frozen=True)
class ObjectiveSpec:
    variant: ModelVariant
    kind: ObjectiveKind

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", ModelVariant.parse(self.variant))
        object.__setattr__(self, "kind", ObjectiveKind.parse(self.kind))

    @classmethod
    def default_for(cls, variant: "ModelVariant | str") -> "ObjectiveSpec":
        variant = ModelVariant.parse(variant)
        if variant is ModelVariant.BASELINE:
            return cls(variant, ObjectiveKind.QUASI_EXTINCTION_RATE)
        return cls(variant, ObjectiveKind.EQUILIBRIUM_PERSISTENCE)

    def check(self, params: ModelParams) -> None:
        """Reject variant/parameter combinations the objective does not cover.

        The decay rate needs an absorbing empty state (baseline, or any
        variant with ``a == 0``); equilibrium persistence needs ``a > 0``.
        """
        absorbing = self.variant is ModelVariant.BASELINE or params.a == 0.0
        if self.kind is ObjectiveKind.QUASI_EXTINCTION_RATE and not absorbing:
            raise IncompatibleObjectiveError(
                f"quasi-extinction rate needs an absorbing empty state, but variant "
                f"{self.variant.value!r} has external recruitment a={params.a}; "
                f"use equilibrium persistence"
            )
        if self.kind is ObjectiveKind.EQUILIBRIUM_PERSISTENCE and absorbing:
            raise IncompatibleObjectiveError(
                f"equilibrium persistence needs external recruitment a > 0 and a "
                f"recruitment variant, got variant {self.variant.value!r} with a={params.a}; "
                f"use the quasi-extinction rate"
            )


@dataclass
class SpacingOptimum:
    """Result of a spacing search.

    ``curve`` holds the coarse grid samples in ascending ``d``.
    """

    d_star: float
    value: float
    plateau: bool
    curve: list[tuple[float, float]] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "d_star": self.d_star,
            "value": self.value,
            "plateau": self.plateau,
            "curve": [[d, v] for d, v in self.curve],
        }


def objective(spec: ObjectiveSpec, params: ModelParams, d: float) -> float:
    spec.check(params)
    A = compose(spec.variant, params, d)
    if spec.kind is ObjectiveKind.QUASI_EXTINCTION_RATE:
        return decay_rate(A)
    return stationary_distribution(A).persistence


def _check_range(d_min: float, d_max: float) -> tuple[float, float]:
    d_min = check_distance(d_min)
    d_max = check_distance(d_max)
    if not d_min < d_max:
        raise InvalidParameterError(f"need d_min < d_max, got [{d_min}, {d_max}]")
    return d_min, d_max


def sweep(
    spec: ObjectiveSpec,
    params: ModelParams,
    d_min: float,
    d_max: float,
    n_points: int,
) -> list[tuple[float, float]]:
    """Objective on ``n_points`` evenly spaced distances, endpoints included."""
    d_min, d_max = _check_range(d_min, d_max)
    if int(n_points) != n_points or n_points < 2:
        raise InvalidParameterError(f"n_points must be an integer >= 2, got {n_points!r}")
    spec.check(params)
    grid = np.linspace(d_min, d_max, int(n_points))
    return [(float(d), objective(spec, params, d)) for d in grid]


def _golden_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _first_crossing(
    f: Callable[[float], float], lo: float, hi: float, level: float, tol: float
) -> tuple[float, float]:
    """Smallest d in (lo, hi] with f(d) >= level, given f(lo) < level <= f(hi)."""
    f_hi = f(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid >= level:
            hi, f_hi = mid, f_mid
        else:
            lo = mid
    return hi, f_hi


def optimize_spacing(
    spec: ObjectiveSpec,
    params: ModelParams,
    d_min: float = 0.0,
    d_max: float | None = None,
    tol: float = DEFAULT_TOL,
    n_grid: int = DEFAULT_GRID,
) -> SpacingOptimum:
    """Distance in ``[d_min, d_max]`` maximising the viability objective.

    Args:
        spec: Variant and objective kind.
        params: Model parameters.
        d_min: Lower end of the search range.
        d_max: Upper end; defaults to ``20 * max(mu, 1/alpha)``.
        tol: Final bracket width of the refinement.
        n_grid: Size of the coarse grid.

    Returns:
        The optimum.  Ties are broken toward the smaller distance, and in the
        plateau regime ``d_star`` is the smallest distance whose objective is
        within ``EPS_PLATEAU`` of the grid maximum.
    """
    if d_max is None:
        d_max = params.default_d_max
        if d_max <= d_min:
            d_max = d_min + params.default_d_max
    if not (tol > 0.0 and math.isfinite(tol)):
        raise InvalidParameterError(f"tol must be > 0, got {tol!r}")
    curve = sweep(spec, params, d_min, d_max, n_grid)
    ds = np.array([d for d, _ in curve])
    vs = np.array([v for _, v in curve])

    def f(d: float) -> float:
        return objective(spec, params, d)

    best = float(vs.max())
    tail = ds >= d_max - TAIL_FRACTION * (d_max - d_min)
    tail_variation = float(np.abs(np.diff(vs[tail])).sum())
    if vs[-1] >= best - EPS_PLATEAU and tail_variation < EPS_PLATEAU:
        level = best - EPS_PLATEAU
        i = int(np.argmax(vs >= level))
        if i == 0:
            d_star, value = float(ds[0]), float(vs[0])
        else:
            d_star, value = _first_crossing(f, float(ds[i - 1]), float(ds[i]), level, tol)
        return SpacingOptimum(d_star=d_star, value=value, plateau=True, curve=curve)

    i = int(np.argmax(vs))  # first index attaining the maximum
    lo = float(ds[max(i - 1, 0)])
    hi = float(ds[min(i + 1, len(ds) - 1)])
    d_ref, v_ref = _golden_max(f, lo, hi, tol)
    if v_ref > best:
        d_star, value = d_ref, v_ref
    else:
        d_star, value = float(ds[i]), best
    return SpacingOptimum(d_star=d_star, value=value, plateau=False, curve=curve)
