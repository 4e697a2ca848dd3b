"""Base probability objects and the one-step conditional weighting.

Every dependency structure in this package reuses the same conditioning
rule: given that the parent draw landed on category i, the child's
probability of i is pulled up to ``p_i + delta*(1 - p_i)`` and the
probability of any other category j is pushed down to ``p_j*(1 - delta)``.
The coefficient delta in [0, 1] interpolates between independence (0) and
deterministic copying of the parent outcome (1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import CategoryIndexError, DomainError

# Construction guard for user-supplied probability vectors.  Vectors whose
# sum strays further than this are rejected rather than renormalized.
MARGINAL_SUM_TOL = 1e-9

# Algebraic identities (row-stochasticity, affine form) hold to 1e-12 for
# exactly normalized inputs; the construction check inherits the looser
# marginal guard because a vector summing to 1 +/- 1e-9 caps what any
# derived row sum can achieve.
ROW_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Marginal:
    """Base category distribution: K >= 2 probabilities summing to 1."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1:
            raise DomainError("marginal probabilities must be a 1-D vector")
        if probs.size < 2:
            raise DomainError(
                f"at least 2 categories required, got {probs.size}"
            )
        if not np.all(np.isfinite(probs)):
            raise DomainError("marginal probabilities must be finite")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise DomainError("marginal probabilities must lie in [0, 1]")
        total = float(probs.sum())
        if abs(total - 1.0) > MARGINAL_SUM_TOL:
            raise DomainError(
                f"marginal probabilities sum to {total!r}; expected 1 within "
                f"{MARGINAL_SUM_TOL:g} (renormalize explicitly if intended)"
            )
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def num_categories(self) -> int:
        return int(self.probs.size)

    def probability_of(self, category: int) -> float:
        """Probability of the 1-based category index."""
        check_category(category, self.num_categories)
        return float(self.probs[category - 1])


@dataclass(frozen=True)
class DependencyCoefficient:
    """Dependence strength in [0, 1]; 0 = independent, 1 = copy the parent."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not np.isfinite(value) or not 0.0 <= value <= 1.0:
            raise DomainError(
                f"dependency coefficient must lie in [0, 1], got {self.value!r}"
            )
        object.__setattr__(self, "value", value)


MarginalLike = Union[Marginal, Sequence[float], np.ndarray]
DeltaLike = Union[DependencyCoefficient, float, int]


def as_marginal(p: MarginalLike) -> Marginal:
    return p if isinstance(p, Marginal) else Marginal(np.asarray(p))


def as_delta(delta: DeltaLike) -> float:
    if isinstance(delta, DependencyCoefficient):
        return delta.value
    return DependencyCoefficient(float(delta)).value


def check_category(category: int, num_categories: int) -> None:
    if not isinstance(category, (int, np.integer)) or isinstance(category, bool):
        raise CategoryIndexError(f"category index must be an integer, got {category!r}")
    if not 1 <= category <= num_categories:
        raise CategoryIndexError(
            f"category index {category} outside 1..{num_categories}"
        )


def repeat_probability(p: MarginalLike, delta: DeltaLike, category: int) -> float:
    """Probability of category j when the conditioning draw was also j.

    Equals ``p_j + delta*(1 - p_j)``; lies in [p_j, 1].
    """
    marginal = as_marginal(p)
    d = as_delta(delta)
    pj = marginal.probability_of(category)
    return pj + d * (1.0 - pj)


def switch_probability(p: MarginalLike, delta: DeltaLike, category: int) -> float:
    """Probability of category j when the conditioning draw was any other
    category.

    Equals ``p_j*(1 - delta)``; lies in [0, p_j].
    """
    marginal = as_marginal(p)
    d = as_delta(delta)
    pj = marginal.probability_of(category)
    return pj * (1.0 - d)


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """Row-stochastic K x K matrix of one-step conditional probabilities.

    Row i is the distribution of the child given the parent landed on
    category i: entry (i, i) is the repeat probability, entry (i, j) with
    j != i is the switch probability of j.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError("transition kernel must be a square matrix")
        if matrix.shape[0] < 2:
            raise DomainError("transition kernel needs at least 2 categories")
        if not np.all(np.isfinite(matrix)):
            raise DomainError("transition kernel entries must be finite")
        if np.any(matrix < -1e-15) or np.any(matrix > 1.0 + 1e-15):
            raise DomainError("transition kernel entries must lie in [0, 1]")
        row_sums = matrix.sum(axis=1)
        worst = float(np.max(np.abs(row_sums - 1.0)))
        if worst > ROW_SUM_TOL:
            raise DomainError(
                f"transition kernel rows must sum to 1; worst deviation {worst:g}"
            )
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def num_categories(self) -> int:
        return int(self.matrix.shape[0])

    def row(self, category: int) -> np.ndarray:
        """Child distribution conditioned on the parent's 1-based category."""
        check_category(category, self.num_categories)
        return self.matrix[category - 1]


def transition_kernel(p: MarginalLike, delta: DeltaLike) -> TransitionKernel:
    """One-step conditional kernel built from repeat/switch probabilities.

    With delta = 0 every row equals p (independence); with delta = 1 the
    kernel is the identity (the child copies the parent).  Algebraically the
    result equals ``(1 - delta) * ones @ p + delta * I`` -- that identity is
    exercised by the test suite as an independent check, not used here.
    """
    marginal = as_marginal(p)
    d = as_delta(delta)
    probs = marginal.probs
    matrix = np.tile(probs * (1.0 - d), (marginal.num_categories, 1))
    np.fill_diagonal(matrix, probs + d * (1.0 - probs))
    return TransitionKernel(matrix)
