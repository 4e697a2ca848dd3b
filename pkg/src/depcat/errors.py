"""Semantic exception hierarchy for depcat.

Public functions raise these instead of bare ValueError/KeyError so callers
can distinguish bad inputs from structural problems in a dependency spec.
"""


class DepcatError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DepcatError, ValueError):
    """An argument lies outside the documented domain (index, length, probability)."""


class CategoryIndexError(DepcatError, IndexError):
    """A 1-based category index is outside {1..K}."""


class IncompleteGeneratorError(DepcatError, KeyError):
    """A table-backed generator has no entry for a requested index."""


class AxiomViolationError(DepcatError):
    """A generator produced a parent outside {1..n-1}, breaking the class axioms."""


class EnumerationTooLargeError(DepcatError):
    """The K**N outcome space exceeds the configured enumeration cap."""

    def __init__(self, num_categories: int, length: int, cap: int):
        self.num_outcomes = num_categories**length
        self.cap = cap
        super().__init__(
            f"sample space has {num_categories}**{length} = {self.num_outcomes} "
            f"outcomes, exceeding the enumeration cap of {cap}"
        )


class EmptyBatchError(DepcatError):
    """An empirical statistic was requested from a batch with no sequences."""
