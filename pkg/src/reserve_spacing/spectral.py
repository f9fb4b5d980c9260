"""Viability measures of the composed chain.

For the absorbing variants the quantity of interest is the decay rate of
the probability of persistence once the chain has settled into its
quasi-stationary regime: the Perron root of the 2x2 block of transitions
among the occupied states {1, 2}.  That block is nonnegative, so its
eigenvalues are real and the largest is obtained in closed form from the
trace and discriminant.

For chains with external recruitment (``a > 0``) the empty state is no longer
absorbing and viability is the equilibrium probability that at least one
reserve is occupied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateEigenvectorError,
    InvalidParameterError,
    IrreducibilityError,
    StructureError,
)
from .model import (
    ModelParams,
    ModelVariant,
    check_distribution,
    check_transition_matrix,
    compose,
    step_distribution,
)

BOTH_OCCUPIED = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class SpectralSummary:
    """Decay rate from quasi-equilibrium and the quasi-stationary distribution.

    ``qsd`` is over states (1, 2), conditional on the population being extant.
    """

    lambda2: float
    qsd: np.ndarray


@dataclass(frozen=True)
class StationarySummary:
    pi: np.ndarray
    persistence: float


def _transient_block(A: np.ndarray) -> np.ndarray:
    A = check_transition_matrix(A)
    if not (A[0, 0] == 1.0 and A[0, 1] == 0.0 and A[0, 2] == 0.0):
        raise StructureError(
            "state 0 must be absorbing (row 0 == (1, 0, 0)) for the decay-rate analysis"
        )
    return A[1:, 1:]


def _perron_root(B: np.ndarray) -> float:
    (b11, b12), (b21, b22) = B
    disc = (b11 - b22) ** 2 + 4.0 * b12 * b21
    return 0.5 * (b11 + b22 + math.sqrt(disc))


def decay_rate(A: np.ndarray) -> float:
    """Second eigenvalue of an absorbing transition matrix.

    Equal to the spectral radius of the occupied-state block; the leading
    eigenvalue of ``A`` itself is 1 from the absorbing row.
    """
    return _perron_root(_transient_block(A))


def second_eigenvalue(A: np.ndarray) -> SpectralSummary:
    """Decay rate plus the normalised left eigenvector of the occupied block.

    Raises:
        StructureError: if state 0 is not absorbing.
        DegenerateEigenvectorError: if the occupied block is identically zero.
    """
    B = _transient_block(A)
    if not np.any(B):
        raise DegenerateEigenvectorError("occupied-state block is zero; no quasi-stationary distribution")
    (b11, b12), (b21, b22) = B
    lam = _perron_root(B)
    # Gaps between the Perron root and each diagonal entry.  The conjugate
    # form avoids cancellation when the off-diagonal product is tiny.
    delta = b11 - b22
    root = math.sqrt(delta * delta + 4.0 * b12 * b21)
    cross = 2.0 * b12 * b21
    if delta >= 0.0:
        gap_22 = 0.5 * (delta + root)
        gap_11 = cross / (delta + root) if delta + root > 0.0 else 0.0
    else:
        gap_11 = 0.5 * (root - delta)
        gap_22 = cross / (root - delta)
    # Two equivalent forms of the left eigenvector, both nonnegative.
    v_first = np.array([b21, gap_11])
    v_second = np.array([gap_22, b12])
    v = v_first if v_first.sum() >= v_second.sum() else v_second
    total = v.sum()
    if total <= 0.0:
        # Scalar multiple of the identity: every vector is an eigenvector.
        v, total = np.array([1.0, 1.0]), 2.0
    qsd = np.clip(v / total, 0.0, 1.0)
    return SpectralSummary(lambda2=lam, qsd=qsd / qsd.sum())


def stationary_distribution(A: np.ndarray) -> StationarySummary:
    """Equilibrium occupancy via a direct 3x3 solve.

    The balance equations ``pi (A - I) = 0`` have rank 2 when the stationary
    distribution is unique, so one of them is replaced by ``sum(pi) = 1``.

    Raises:
        IrreducibilityError: if the empty state is absorbing (no recruitment)
            or the stationary distribution is not unique.
    """
    A = check_transition_matrix(A)
    if A[0, 0] == 1.0:
        raise IrreducibilityError(
            "state 0 is absorbing (a = 0); use the decay-rate analysis instead"
        )
    M = A.T - np.eye(3)
    M[0, :] = 1.0
    rhs = np.array([1.0, 0.0, 0.0])
    try:
        pi = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        raise IrreducibilityError("stationary distribution is not unique") from None
    pi = np.clip(pi, 0.0, 1.0)
    pi = pi / pi.sum()
    return StationarySummary(pi=pi, persistence=float(1.0 - pi[0]))


def distribution_path(
    variant: ModelVariant,
    params: ModelParams,
    d: float,
    t: int,
    p0: np.ndarray = BOTH_OCCUPIED,
) -> np.ndarray:
    """Occupancy distributions P_0 .. P_t, shape ``(t + 1, 3)``."""
    if int(t) != t or t < 0:
        raise InvalidParameterError(f"step count must be a nonnegative integer, got {t!r}")
    A = compose(variant, params, d)
    path = np.empty((int(t) + 1, 3))
    path[0] = check_distribution(p0)
    for k in range(1, int(t) + 1):
        path[k] = step_distribution(path[k - 1], A)
    return path


def survival_probability(
    variant: ModelVariant,
    params: ModelParams,
    d: float,
    p0: np.ndarray = BOTH_OCCUPIED,
    t: int = 1,
) -> float:
    """Probability that at least one reserve is occupied after ``t`` steps.

    Summed from the occupied states rather than ``1 - P_t[0]`` so that small
    survival probabilities keep their relative precision.
    """
    final = distribution_path(variant, params, d, t, p0)[-1]
    return float(final[1] + final[2])
