"""Two-reserve patch-occupancy chain: event matrices and their composition.

States count occupied reserves: 0 (both empty), 1, 2 (both occupied).

Orientation used throughout the package: rows are the current state,
columns the next state, and a distribution evolves as a row vector,
``p_next = p @ A``.  Under this convention the product ``E @ C`` applies
the catastrophe step first and colonisation second, so the variant
compositions read left to right in event order:

    Baseline     A = E @ C
    Recruitment  A = E @ C @ R
    Full         A = E @ L @ C @ R

Units: one step is one year; distances share units with ``mu`` and
``1/alpha`` (kilometres in the examples).  The algebra itself is unit-free.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

N_STATES = 3
STATE_LABELS = ("0", "1", "2")
ROW_SUM_TOL = 1e-12


class ModelVariant(str, enum.Enum):
    BASELINE = "baseline"
    RECRUITMENT = "recruitment"
    FULL = "full"

    @classmethod
    def parse(cls, value: "str | ModelVariant") -> "ModelVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise InvalidParameterError(
                f"unknown variant {value!r}; expected one of {choices}"
            ) from None

    @property
    def stages(self) -> tuple[str, ...]:
        """Event matrices in the order they act on the state."""
        return _STAGES[self]


_STAGES = {
    ModelVariant.BASELINE: ("E", "C"),
    ModelVariant.RECRUITMENT: ("E", "C", "R"),
    ModelVariant.FULL: ("E", "L", "C", "R"),
}


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise InvalidParameterError(f"{name} must be finite and > 0, got {value!r}")
    return value


def check_distance(d: float) -> float:
    d = float(d)
    if not (d >= 0.0 and math.isfinite(d)):
        raise InvalidParameterError(f"distance d must be finite and >= 0, got {d!r}")
    return d


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the two-reserve model.

    Attributes:
        r: Per-step probability that a catastrophe hits at least one reserve.
        mu: Mean catastrophe size (distance units).
        alpha: Dispersal decay rate, the inverse mean dispersal distance.
        a: Per-step probability an empty patch is filled by external recruits.
        b: Per-step probability an occupied patch goes locally extinct.
    """

    r: float
    mu: float
    alpha: float
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _check_probability("r", self.r))
        object.__setattr__(self, "mu", _check_positive("mu", self.mu))
        object.__setattr__(self, "alpha", _check_positive("alpha", self.alpha))
        object.__setattr__(self, "a", _check_probability("a", self.a))
        object.__setattr__(self, "b", _check_probability("b", self.b))

    def replace(self, **changes: float) -> "ModelParams":
        fields = {"r": self.r, "mu": self.mu, "alpha": self.alpha, "a": self.a, "b": self.b}
        unknown = set(changes) - set(fields)
        if unknown:
            raise InvalidParameterError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        fields.update(changes)
        return ModelParams(**fields)

    @property
    def default_d_max(self) -> float:
        """Upper end of the default spacing search range."""
        return 20.0 * max(self.mu, 1.0 / self.alpha)


def colonisation_matrix(alpha: float, d: float) -> np.ndarray:
    """Colonisation of an empty reserve by the occupied one.

    Only state 1 moves: it reaches state 2 with probability ``exp(-alpha*d)``.
    """
    alpha = _check_positive("alpha", alpha)
    d = check_distance(d)
    c = math.exp(-alpha * d)
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, 1.0 - c, c],
            [0.0, 0.0, 1.0],
        ]
    )


def extinction_matrix(r: float, mu: float, d: float) -> np.ndarray:
    """Catastrophe step.

    A catastrophe arrives with probability ``r``; given arrival it strikes
    both reserves with probability ``q = exp(-d/mu)``, otherwise one reserve
    chosen uniformly.
    """
    r = _check_probability("r", r)
    mu = _check_positive("mu", mu)
    d = check_distance(d)
    q = math.exp(-d / mu)
    lose_single = 0.5 * r * (1.0 + q)
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [lose_single, 1.0 - lose_single, 0.0],
            [r * q, r * (1.0 - q), 1.0 - r],
        ]
    )


def recruitment_matrix(a: float) -> np.ndarray:
    """External recruitment; each empty patch fills independently with prob ``a``."""
    a = _check_probability("a", a)
    return np.array(
        [
            [(1.0 - a) ** 2, 2.0 * a * (1.0 - a), a * a],
            [0.0, 1.0 - a, a],
            [0.0, 0.0, 1.0],
        ]
    )


def local_extinction_matrix(b: float) -> np.ndarray:
    """Non-catastrophic loss; each occupied patch empties independently with prob ``b``."""
    b = _check_probability("b", b)
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [b, 1.0 - b, 0.0],
            [b * b, 2.0 * b * (1.0 - b), (1.0 - b) ** 2],
        ]
    )


def event_matrices(params: ModelParams, d: float) -> dict[str, np.ndarray]:
    """All four event matrices keyed ``E``, ``L``, ``C``, ``R``."""
    return {
        "E": extinction_matrix(params.r, params.mu, d),
        "L": local_extinction_matrix(params.b),
        "C": colonisation_matrix(params.alpha, d),
        "R": recruitment_matrix(params.a),
    }


def stage_matrices(variant: ModelVariant, params: ModelParams, d: float) -> list[np.ndarray]:
    """Event matrices used by ``variant``, in the order they act."""
    variant = ModelVariant.parse(variant)
    mats = event_matrices(params, d)
    return [mats[name] for name in variant.stages]


def compose(variant: ModelVariant, params: ModelParams, d: float) -> np.ndarray:
    """One-step transition matrix of ``variant`` at spacing ``d``."""
    stages = stage_matrices(variant, params, d)
    A = stages[0]
    for M in stages[1:]:
        A = A @ M
    # Products of stochastic matrices can overshoot 1 by an ulp.
    return np.clip(A, 0.0, 1.0)


def check_transition_matrix(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (N_STATES, N_STATES):
        raise InvalidParameterError(f"transition matrix must be 3x3, got shape {A.shape}")
    if not np.all(np.isfinite(A)) or A.min() < -ROW_SUM_TOL or A.max() > 1.0 + ROW_SUM_TOL:
        raise InvalidParameterError("transition matrix entries must lie in [0, 1]")
    if np.max(np.abs(A.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
        raise InvalidParameterError("transition matrix rows must sum to 1")
    return A


def check_distribution(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (N_STATES,):
        raise InvalidParameterError(f"occupancy distribution must have length 3, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or p.min() < -ROW_SUM_TOL or p.max() > 1.0 + ROW_SUM_TOL:
        raise InvalidParameterError("occupancy probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > ROW_SUM_TOL:
        raise InvalidParameterError(f"occupancy probabilities must sum to 1, got {p.sum()!r}")
    return p


def step_distribution(p: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Advance an occupancy distribution by one step (``p @ A``)."""
    return check_distribution(p) @ check_transition_matrix(A)
