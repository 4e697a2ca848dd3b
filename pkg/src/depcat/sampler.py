"""Seeded Monte Carlo generation of dependent sequences.

Draws are inverse-CDF lookups against precomputed cumulative sums: the
first position samples the base distribution, every later position samples
the kernel row selected by its parent's realized value (parents precede
children, so a single left-to-right pass suffices).  Batches are a pure
function of (seed, parameters); worker counts and chunking cannot change
the result because the underlying variates are counter-based.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyBatchError
from .exact import CrossCovariance, exponent_basis_for, _check_pair_positions
from .generators import GeneratorSpec
from .graph import build_tree
from .kernel import DeltaLike, Marginal, MarginalLike, as_delta, as_marginal, transition_kernel
from .rng import ALGORITHM_ID, uniform_grid


def _right_closed_cumulative(vector: np.ndarray) -> np.ndarray:
    # Forcing the final cumulative to 1.0 pairs with uniforms in (0, 1]:
    # every draw lands in exactly one right-closed bucket.
    cumulative = np.cumsum(vector, dtype=np.float64)
    cumulative[-1] = 1.0
    return cumulative


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Realized sequences plus everything needed to regenerate them."""

    outcomes: np.ndarray  # (count, length) int64, entries in 1..K
    seed: int
    marginal: Marginal
    delta: float
    spec: GeneratorSpec

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=np.int64)
        if outcomes.ndim != 2:
            raise DomainError("batch outcomes must be a 2-D array")
        if outcomes.size and (
            outcomes.min() < 1 or outcomes.max() > self.marginal.num_categories
        ):
            raise DomainError("batch entries must lie in 1..K")
        outcomes.flags.writeable = False
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def count(self) -> int:
        return int(self.outcomes.shape[0])

    @property
    def length(self) -> int:
        return int(self.outcomes.shape[1])

    @property
    def num_categories(self) -> int:
        return self.marginal.num_categories

    def metadata(self) -> dict:
        return {
            "algorithm": ALGORITHM_ID,
            "seed": self.seed,
            "count": self.count,
            "N": self.length,
            "K": self.num_categories,
            "p": [float(v) for v in self.marginal.probs],
            "delta": self.delta,
            "generator": self.spec.to_dict(),
        }

    def to_csv(self) -> str:
        """One row per sequence; header names the positions e1..eN."""
        header = ",".join(f"e{i}" for i in range(1, self.length + 1))
        lines = [header]
        for row in self.outcomes:
            lines.append(",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        """One compact JSON array per line."""
        lines = [
            json.dumps([int(v) for v in row], separators=(",", ":"))
            for row in self.outcomes
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), sort_keys=True, indent=2) + "\n"


def _sample_rows(
    base_cumulative: np.ndarray,
    row_cumulative: np.ndarray,
    parents: np.ndarray,
    seed: int,
    first_index: int,
    count: int,
) -> np.ndarray:
    length = parents.size + 1
    uniforms = uniform_grid(seed, first_index, count, length)
    out = np.empty((count, length), dtype=np.int64)
    out[:, 0] = np.searchsorted(base_cumulative, uniforms[:, 0], side="left") + 1
    for index in range(2, length + 1):
        rows = row_cumulative[out[:, parents[index - 2] - 1] - 1]
        out[:, index - 1] = (rows < uniforms[:, index - 1, None]).sum(axis=1) + 1
    return out


def sample_batch(
    p: MarginalLike,
    delta: DeltaLike,
    spec: GeneratorSpec,
    length: int,
    count: int,
    seed: int,
    workers: int = 1,
) -> SampleBatch:
    """Draw `count` sequences of the given length, keyed per sequence index.

    `workers` only partitions the row range across threads; the batch is
    identical for any worker count.
    """
    marginal = as_marginal(p)
    d = as_delta(delta)
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    tree = build_tree(spec, length)  # validates the generator up to length
    kernel = transition_kernel(marginal, d)
    base_cumulative = _right_closed_cumulative(marginal.probs)
    row_cumulative = np.cumsum(kernel.matrix, axis=1)
    row_cumulative[:, -1] = 1.0
    parents = tree.parents

    outcomes = np.empty((count, length), dtype=np.int64)
    if count:
        chunk = -(-count // workers)
        starts = range(0, count, chunk)

        def fill(start: int) -> None:
            stop = min(start + chunk, count)
            outcomes[start:stop] = _sample_rows(
                base_cumulative, row_cumulative, parents, seed, start, stop - start
            )

        if workers == 1:
            for start in starts:
                fill(start)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(fill, starts))

    return SampleBatch(outcomes, int(seed), marginal, d, spec)


def sample_sequence(
    p: MarginalLike,
    delta: DeltaLike,
    spec: GeneratorSpec,
    length: int,
    seed: int,
    index: int = 0,
) -> tuple[int, ...]:
    """The single sequence a batch would place at the given row index."""
    marginal = as_marginal(p)
    d = as_delta(delta)
    if index < 0:
        raise DomainError(f"index must be >= 0, got {index}")
    tree = build_tree(spec, length)
    kernel = transition_kernel(marginal, d)
    row_cumulative = np.cumsum(kernel.matrix, axis=1)
    row_cumulative[:, -1] = 1.0
    rows = _sample_rows(
        _right_closed_cumulative(marginal.probs),
        row_cumulative,
        tree.parents,
        int(seed),
        index,
        1,
    )
    return tuple(int(v) for v in rows[0])


@dataclass(frozen=True, eq=False)
class EmpiricalMarginal:
    """Category counts at one position; counts sum to the batch size exactly."""

    position: int
    counts: np.ndarray
    total: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.total


def empirical_marginals(batch: SampleBatch, position: int) -> EmpiricalMarginal:
    """Observed category frequencies at a position."""
    if batch.count == 0:
        raise EmptyBatchError("cannot compute marginals of an empty batch")
    if not 1 <= position <= batch.length:
        raise DomainError(f"position {position} outside 1..{batch.length}")
    counts = np.bincount(
        batch.outcomes[:, position - 1] - 1, minlength=batch.num_categories
    )
    return EmpiricalMarginal(position, counts, batch.count)


def empirical_cross_covariance(batch: SampleBatch, m: int, n: int) -> CrossCovariance:
    """Sample covariance of position indicators (population-normalized)."""
    if batch.count == 0:
        raise EmptyBatchError("cannot compute covariance of an empty batch")
    _check_pair_positions(m, n)
    if n > batch.length:
        raise DomainError(f"position {n} outside 1..{batch.length}")
    k = batch.num_categories
    left = batch.outcomes[:, m - 1] - 1
    right = batch.outcomes[:, n - 1] - 1
    joint = np.bincount(left * k + right, minlength=k * k).reshape(k, k) / batch.count
    matrix = joint - np.outer(joint.sum(axis=1), joint.sum(axis=0))
    return CrossCovariance(m, n, matrix, exponent_basis_for(batch.spec), "empirical")
