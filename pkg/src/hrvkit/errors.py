"""Semantic exception and warning types shared across the package."""

from __future__ import annotations


class HrvError(Exception):
    """Base class for every error raised by this package."""


class InvalidSampleError(HrvError):
    """Sample matrix violates its contract (shape, finiteness, sign)."""


class EmptySampleError(HrvError):
    """Input contains no data rows."""


class NegativeValueError(HrvError):
    """A sample entry is negative."""


class NonNumericError(HrvError):
    """A sample entry does not parse as a number."""


class RaggedRowsError(HrvError):
    """Data rows have inconsistent lengths."""


class EmptyInputError(HrvError):
    """An operation received an empty vector."""


class LevelOutOfRangeError(HrvError):
    """Order-component level is outside [1, d]."""


class KTooLargeError(HrvError):
    """Intermediate order k exceeds what the sample supports."""


class NonPositiveDataError(HrvError):
    """An order statistic needed by a tail fit is zero or negative."""


class DegenerateDataError(HrvError):
    """Tail fit is undefined because the upper order statistics carry no spread."""


class AllZeroLevelError(HrvError):
    """Every threshold candidate at the requested level is zero."""


class NotInSimplexError(HrvError):
    """Point lies outside the unit simplex."""


class NoMassError(HrvError):
    """No usable atoms remain for the requested operation."""


class BadBandwidthError(HrvError):
    """Kernel bandwidth is not a usable positive number."""


class NoAtomsError(HrvError):
    """An atomic measure with at least one atom is required."""


class InfiniteAtomError(HrvError):
    """Atoms with infinite components cannot drive this construction."""


class BadAlphaError(HrvError):
    """Tail index parameter must be strictly positive."""


class BadThresholdError(HrvError):
    """Threshold or level parameter must be strictly positive."""


class UnknownExampleError(HrvError):
    """Requested generator name is not registered."""


class ExtrapolationWarning(UserWarning):
    """Tail formula applied below the order statistic that anchors it."""


class InteriorDivergenceWarning(UserWarning):
    """Interior risk integral is dominated by a few extreme atoms."""


class DegenerateMassWarning(UserWarning):
    """An inclusion-exclusion term was zeroed for lack of fitted structure."""
