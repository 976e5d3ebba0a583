"""Exception hierarchy for twoweight.

Every error is a ``ValueError`` so callers that only guard against bad input
keep working; the subclasses let the CLI map failures onto exit codes.
"""
from __future__ import annotations


class TwoWeightError(ValueError):
	"""Base class for all package errors."""


class InvalidCubeError(TwoWeightError):
	"""A cube with non-positive side or mismatched dimensions."""


class InvalidDilationError(TwoWeightError):
	"""Dilation factor that is not strictly positive."""


class LatticeMismatchError(TwoWeightError):
	"""Objects living on incompatible cell lattices were combined."""


class ScaleRangeError(TwoWeightError):
	"""A grid level outside the configured scale bound."""


class DegenerateInputError(TwoWeightError):
	"""Input with nothing to evaluate (empty family, null test functions)."""


class SingularCellError(TwoWeightError):
	"""Fractional kernel evaluated inside a charged cell off its midpoint."""


class NoExteriorError(TwoWeightError):
	"""An open set filling the whole window has no complement to measure."""


class ResolutionError(TwoWeightError):
	"""A cell set that is not a union of grid cubes at the finest level."""


class NoMaximalCubeError(TwoWeightError):
	"""A set without maximal grid cubes inside the window."""


class InvalidParameterError(TwoWeightError):
	"""Parameter outside its admissible range."""


class ExhaustivenessError(TwoWeightError):
	"""A case split that failed to cover some cube."""


class ConfigError(TwoWeightError):
	"""Malformed configuration or spec file."""
