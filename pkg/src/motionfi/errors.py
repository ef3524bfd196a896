"""Exception hierarchy shared across the package.

Each error class carries the process exit code the CLI maps it to:
input/parse problems exit 2, infeasible segmentations exit 3, and
numeric failures (degenerate data, out-of-domain values) exit 4.
"""


class MotionFiError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(MotionFiError, ValueError):
    """Invalid argument, configuration, or file content."""

    exit_code = 2


class SceneError(InputError):
    """Scene definition violates an invariant or cannot be synthesized."""


class FilterSpecError(InputError):
    """Filter specification is invalid for the signal it is applied to."""


class TrainingError(InputError):
    """Dataset cannot be used to train a classifier."""


class InfeasibleSegmentationError(MotionFiError):
    """No partition of the signal satisfies the segment-length window."""

    exit_code = 3


class NumericError(MotionFiError, ValueError):
    """Numeric failure: degenerate ranges, NaNs, out-of-domain values."""

    exit_code = 4


class DegenerateRangeError(NumericError):
    """Sequence has zero range (constant), so normalization is undefined."""


class DataError(NumericError):
    """Data contains non-finite values."""
