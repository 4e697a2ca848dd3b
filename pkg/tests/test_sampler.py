"""Sampler: determinism, degenerate limits, convergence to exact values."""

import json

import numpy as np
import pytest

from depcat import (
    DomainError,
    EmptyBatchError,
    GeneratorSpec,
    cross_covariance_enumerated,
    empirical_cross_covariance,
    empirical_marginals,
    outcome_probability,
    sample_batch,
    sample_sequence,
)

FK = GeneratorSpec.builtin("fk")
SEQ = GeneratorSpec.builtin("sequential")
FSQRT = GeneratorSpec.builtin("floor_sqrt")
SIN_DRIFT = GeneratorSpec.builtin("sin_drift")
PRIME = GeneratorSpec.builtin("prime_partition")


class TestDeterminism:
    def test_identical_inputs_identical_batches(self):
        a = sample_batch([0.5, 0.3, 0.2], 0.4, SEQ, 6, 500, seed=99)
        b = sample_batch([0.5, 0.3, 0.2], 0.4, SEQ, 6, 500, seed=99)
        assert np.array_equal(a.outcomes, b.outcomes)

    def test_worker_count_is_invisible(self):
        kwargs = dict(p=[0.5, 0.3, 0.2], delta=0.4, spec=FSQRT, length=7, count=1003, seed=5)
        single = sample_batch(**kwargs, workers=1)
        for workers in (2, 3, 8):
            assert np.array_equal(
                single.outcomes, sample_batch(**kwargs, workers=workers).outcomes
            )

    def test_sequence_matches_batch_row(self):
        batch = sample_batch([0.4, 0.6], 0.3, FK, 5, 20, seed=77)
        for index in (0, 7, 19):
            assert sample_sequence([0.4, 0.6], 0.3, FK, 5, seed=77, index=index) == tuple(
                batch.outcomes[index]
            )

    def test_different_seeds_differ(self):
        a = sample_batch([0.5, 0.5], 0.5, SEQ, 6, 200, seed=1)
        b = sample_batch([0.5, 0.5], 0.5, SEQ, 6, 200, seed=2)
        assert not np.array_equal(a.outcomes, b.outcomes)


class TestDegenerateLimits:
    def test_full_dependence_freezes_the_sequence(self):
        for spec in (SEQ, FK, FSQRT):
            batch = sample_batch([0.5, 0.3, 0.2], 1.0, spec, 8, 300, seed=4)
            assert np.all(batch.outcomes == batch.outcomes[:, :1])

    def test_full_dependence_marginals_match_first_position(self):
        batch = sample_batch([0.5, 0.3, 0.2], 1.0, SEQ, 6, 1000, seed=12)
        first = empirical_marginals(batch, 1)
        for position in range(2, 7):
            later = empirical_marginals(batch, position)
            assert np.array_equal(first.counts, later.counts)

    def test_zero_dependence_positions_uncorrelated(self):
        batch = sample_batch([0.5, 0.5], 0.0, SEQ, 4, 200_000, seed=31)
        cov = empirical_cross_covariance(batch, 1, 4)
        assert np.max(np.abs(cov.matrix)) < 0.003

    def test_single_draw_marginal_is_one_hot(self):
        batch = sample_batch([0.5, 0.5], 0.2, SEQ, 3, 1, seed=8)
        marginal = empirical_marginals(batch, 2)
        assert marginal.counts.sum() == 1
        assert set(marginal.counts) == {0, 1}


class TestConvergence:
    def test_pair_frequency_matches_exact_probability(self):
        # chain, K=2, p=0.5, delta=0.5: P((1,1)) = 0.5 * 0.75 = 0.375
        batch = sample_batch([0.5, 0.5], 0.5, SEQ, 2, 1_000_000, seed=2024)
        exact = outcome_probability((1, 1), [0.5, 0.5], 0.5, SEQ)
        assert exact == pytest.approx(0.375, abs=1e-15)
        observed = np.mean(
            (batch.outcomes[:, 0] == 1) & (batch.outcomes[:, 1] == 1)
        )
        assert observed == pytest.approx(exact, abs=0.002)

    def test_marginals_converge_to_p_for_every_builtin(self):
        p = np.array([0.5, 0.3, 0.2])
        standard_error = np.sqrt(p * (1 - p) / 1_000_000)
        for offset, spec in enumerate((SEQ, FK, FSQRT, SIN_DRIFT, PRIME)):
            batch = sample_batch(p, 0.4, spec, 7, 1_000_000, seed=555 + offset)
            cells = 0
            within = 0
            for position in range(1, 8):
                freq = empirical_marginals(batch, position).frequencies
                for i in range(3):
                    cells += 1
                    within += abs(freq[i] - p[i]) <= 3 * standard_error[i]
            assert within / cells >= 0.95, spec.kind

    def test_covariance_converges_to_enumerated(self):
        p = [0.5, 0.3, 0.2]
        batch = sample_batch(p, 0.6, FSQRT, 4, 1_000_000, seed=99)
        empirical = empirical_cross_covariance(batch, 2, 4)
        exact = cross_covariance_enumerated(p, 0.6, FSQRT, 2, 4)
        assert np.max(np.abs(empirical.matrix - exact.matrix)) < 0.003

    def test_empirical_covariance_rows_sum_to_zero(self):
        batch = sample_batch([0.5, 0.3, 0.2], 0.5, SEQ, 5, 10_000, seed=3)
        cov = empirical_cross_covariance(batch, 2, 5)
        assert np.max(np.abs(cov.matrix.sum(axis=0))) < 1e-12
        assert np.max(np.abs(cov.matrix.sum(axis=1))) < 1e-12
        assert cov.method == "empirical"


class TestExports:
    def test_csv_layout(self):
        batch = sample_batch([0.5, 0.5], 1.0, SEQ, 3, 2, seed=10)
        lines = batch.to_csv().strip().splitlines()
        assert lines[0] == "e1,e2,e3"
        assert len(lines) == 3
        for line in lines[1:]:
            values = [int(v) for v in line.split(",")]
            assert values[0] == values[1] == values[2]  # delta = 1

    def test_jsonl_layout(self):
        batch = sample_batch([0.5, 0.5], 0.3, SEQ, 4, 3, seed=10)
        lines = batch.to_jsonl().strip().splitlines()
        assert len(lines) == 3
        for line, row in zip(lines, batch.outcomes):
            assert json.loads(line) == [int(v) for v in row]

    def test_metadata_contents(self):
        batch = sample_batch([0.25, 0.75], 0.4, FSQRT, 5, 7, seed=123)
        meta = batch.metadata()
        assert meta["algorithm"] == "splitmix64-2level"
        assert meta["seed"] == 123
        assert meta["count"] == 7
        assert meta["N"] == 5 and meta["K"] == 2
        assert meta["generator"] == {"kind": "floor_sqrt"}
        assert meta["delta"] == 0.4
        round_tripped = json.loads(batch.metadata_json())
        assert round_tripped == json.loads(json.dumps(meta))


class TestErrors:
    def test_empty_batch_statistics_raise(self):
        batch = sample_batch([0.5, 0.5], 0.4, SEQ, 3, 0, seed=1)
        with pytest.raises(EmptyBatchError):
            empirical_marginals(batch, 1)
        with pytest.raises(EmptyBatchError):
            empirical_cross_covariance(batch, 1, 2)

    def test_position_bounds(self):
        batch = sample_batch([0.5, 0.5], 0.4, SEQ, 3, 5, seed=1)
        with pytest.raises(DomainError):
            empirical_marginals(batch, 4)
        with pytest.raises(DomainError):
            empirical_cross_covariance(batch, 2, 4)

    def test_invalid_worker_count(self):
        with pytest.raises(DomainError):
            sample_batch([0.5, 0.5], 0.4, SEQ, 3, 5, seed=1, workers=0)
