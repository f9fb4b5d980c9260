"""Seeded Monte Carlo simulation of the two-reserve occupancy chain.

Each step applies the variant's event stages one after another (catastrophe,
then local extinction, colonisation and recruitment where present), drawing
every stage's transition from its own matrix row.  Only the event matrices
are used, never the composed transition matrix, so the simulator is an
independent check on the analytic results.

Replicates are processed in fixed-size blocks.  Each block has its own
Philox stream keyed by ``(seed, block index)``, so results do not depend on
how blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, IrreducibilityError
from .model import (
    ModelParams,
    ModelVariant,
    check_distance,
    check_distribution,
    stage_matrices,
)
from .spectral import BOTH_OCCUPIED

BLOCK_SIZE = 1 << 16
DEFAULT_BURN_IN = 1000


@dataclass(frozen=True)
class SimConfig:
    variant: ModelVariant
    params: ModelParams
    d: float
    n_reps: int = 100_000
    horizon: int = 0
    seed: int = 0
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", ModelVariant.parse(self.variant))
        object.__setattr__(self, "d", check_distance(self.d))
        for name, lowest in (("n_reps", 1), ("horizon", 0), ("burn_in", 0)):
            value = getattr(self, name)
            if int(value) != value or value < lowest:
                raise InvalidParameterError(f"{name} must be an integer >= {lowest}, got {value!r}")
            object.__setattr__(self, name, int(value))
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class SimulationEstimate:
    mean: float
    std_error: float
    n: int


@dataclass(frozen=True)
class StationaryEstimate:
    """Empirical occupancy frequencies with per-state binomial standard errors."""

    probs: np.ndarray
    std_errors: np.ndarray
    n: int


def _cumulative_rows(M: np.ndarray) -> np.ndarray:
    """Thresholds for inverse-CDF sampling of each row's next state.

    A threshold is pinned to 1.0 when no mass lies beyond it, so rounding in
    the cumulative sum can never select a zero-probability state.
    """
    cum = np.cumsum(M, axis=1)[:, :-1]
    tail_empty = np.cumsum(M[:, ::-1], axis=1)[:, ::-1][:, 1:] == 0.0
    cum[tail_empty] = 1.0
    return cum


def _stage_thresholds(
    variant: ModelVariant, params: ModelParams, d: float
) -> list[tuple[np.ndarray, np.ndarray]]:
    stages = []
    for M in stage_matrices(variant, params, d):
        cum = _cumulative_rows(M)
        stages.append((cum[:, 0].copy(), cum[:, 1].copy()))
    return stages


def _advance(states: np.ndarray, thresholds, rng: np.random.Generator) -> np.ndarray:
    for to_one, to_two in thresholds:
        u = rng.random(states.shape[0])
        states = (u >= to_one.take(states)).astype(np.int8) + (u >= to_two.take(states))
    return states


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Independent stream for replicate block ``block`` of a run seeded ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def simulate_step(state, variant, params: ModelParams, d: float, rng: np.random.Generator):
    """Advance one step by sampling each event stage in order.

    ``state`` may be a single occupancy count or an integer array of counts;
    the return value has the same form.
    """
    variant = ModelVariant.parse(variant)
    scalar = np.ndim(state) == 0
    states = np.atleast_1d(np.asarray(state))
    if states.size and (states.min() < 0 or states.max() > 2):
        raise InvalidParameterError("occupancy states must be 0, 1 or 2")
    out = _advance(states.astype(np.int8), _stage_thresholds(variant, params, d), rng)
    return int(out[0]) if scalar else out


def _blocks(n_reps: int):
    for block, start in enumerate(range(0, n_reps, BLOCK_SIZE)):
        yield block, min(BLOCK_SIZE, n_reps - start)


def _final_states(cfg: SimConfig, initial: np.ndarray, steps: int):
    """Yield the state of every replicate after ``steps`` steps, block by block."""
    thresholds = _stage_thresholds(cfg.variant, cfg.params, cfg.d)
    init_cum = _cumulative_rows(initial[None, :])[0]
    for block, size in _blocks(cfg.n_reps):
        rng = block_generator(cfg.seed, block)
        u = rng.random(size)
        states = (u >= init_cum[0]).astype(np.int8) + (u >= init_cum[1])
        for _ in range(steps):
            states = _advance(states, thresholds, rng)
        yield states


def estimate_survival(cfg: SimConfig, initial: np.ndarray = BOTH_OCCUPIED) -> SimulationEstimate:
    """Fraction of replicates with at least one occupied reserve at ``cfg.horizon``."""
    initial = check_distribution(initial)
    extant = 0
    for states in _final_states(cfg, initial, cfg.horizon):
        extant += int(np.count_nonzero(states))
    n = cfg.n_reps
    p = extant / n
    return SimulationEstimate(mean=p, std_error=math.sqrt(p * (1.0 - p) / n), n=n)


def estimate_stationary(cfg: SimConfig, initial: np.ndarray = BOTH_OCCUPIED) -> StationaryEstimate:
    """Long-run occupancy from the pooled states of replicates after ``cfg.burn_in`` steps.

    Raises:
        IrreducibilityError: if the variant has no external recruitment.
    """
    if cfg.variant is ModelVariant.BASELINE or cfg.params.a == 0.0:
        raise IrreducibilityError("stationary estimation needs external recruitment (a > 0)")
    initial = check_distribution(initial)
    counts = np.zeros(3, dtype=np.int64)
    for states in _final_states(cfg, initial, cfg.burn_in):
        counts += np.bincount(states, minlength=3)
    n = cfg.n_reps
    probs = counts / n
    return StationaryEstimate(probs=probs, std_errors=np.sqrt(probs * (1.0 - probs) / n), n=n)
