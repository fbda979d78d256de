"""Exception types raised across the toolkit."""

from __future__ import annotations


class KeydynError(Exception):
    """Base class for all toolkit errors."""


class LayoutMismatch(KeydynError):
    """Two vectors (or a vector and fitted parameters) disagree on layout."""


class SampleTooShort(KeydynError):
    """A layout references a timing entry the sample cannot provide."""


class EmptyInput(KeydynError):
    """An operation that needs at least one element received none."""


class NoSharedFeatures(KeydynError):
    """Two vectors have no feature available in both."""


class EmptyClass(KeydynError):
    """SVM training requires at least one vector per class."""


class NonConvergence(KeydynError):
    """Optimizer hit its update cap before satisfying the KKT tolerance."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


class ZeroTotal(KeydynError):
    """Confusion counts sum to zero."""


class ZeroDenominator(KeydynError):
    """A ratio metric has an empty denominator."""


class ZeroAttempts(KeydynError):
    """FAR/FRR computed over zero attempts."""


class ZeroUsers(KeydynError):
    """FER/FTA computed over zero potential users."""


class EmptyScores(KeydynError):
    """A score set is missing genuine or impostor scores."""


class OutOfRange(KeydynError):
    """A rate or probability argument left its legal domain."""


class MalformedHeader(KeydynError):
    """CSV header does not match the event schema."""


class MalformedRow(KeydynError):
    """One or more CSV rows are unparseable or violate sample invariants.

    ``line`` is the 1-based line number of the first offending row;
    ``problems`` lists every collected violation.
    """

    def __init__(self, line: int, problems: list[str]):
        super().__init__(f"line {line}: " + "; ".join(problems))
        self.line = line
        self.problems = problems


class EmptyFile(KeydynError):
    """CSV contains a header but no event rows (or nothing at all)."""


class InsufficientSamples(KeydynError):
    """A user has too few samples for the requested split or training."""


class InvalidSample(KeydynError):
    """A submitted sample failed validation; ``violations`` lists why."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class TrainingFailed(KeydynError):
    """Template training raised; counts as an enrollment failure."""


class UnknownUser(KeydynError):
    """No enrollment record exists for the requested user."""


class NotTrained(KeydynError):
    """The user is enrolled but has not reached the training minimum."""
