"""Exact rational helpers built on :class:`fractions.Fraction`."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Union

RationalLike = Union[Fraction, int, float, str]


def as_rational(value: RationalLike) -> Fraction:
	"""
	Convert ``value`` to an exact :class:`Fraction`.

	Strings accept ``"p/q"`` and decimal literals (``"0.4"`` is exactly 2/5).
	Floats are taken at their exact binary value.
	"""
	if isinstance(value, Fraction):
		return value
	if isinstance(value, bool):
		raise TypeError("Booleans are not rationals.")
	if isinstance(value, int):
		return Fraction(value)
	if isinstance(value, float):
		if not math.isfinite(value):
			raise ValueError(f"Non-finite value {value!r} is not rational.")
		return Fraction(value)
	if isinstance(value, str):
		try:
			return Fraction(value.strip())
		except (ValueError, ZeroDivisionError) as exc:
			raise ValueError(f"Cannot parse rational from {value!r}.") from exc
	raise TypeError(f"Unsupported rational type: {type(value).__name__}")


def as_vector(values: Union[RationalLike, Iterable[RationalLike]], dim: Optional[int] = None) -> tuple[Fraction, ...]:
	"""Convert a scalar or iterable to a tuple of Fractions of length ``dim``."""
	if isinstance(values, (Fraction, int, float, str)):
		if dim is None:
			dim = 1
		return tuple(as_rational(values) for _ in range(dim))
	out = tuple(as_rational(v) for v in values)
	if dim is not None and len(out) != dim:
		raise ValueError(f"Expected {dim} coordinates, got {len(out)}.")
	return out


def format_rational(value: Fraction) -> str:
	"""Print a rational as ``p`` or ``p/q``; parses back with :func:`as_rational`."""
	value = as_rational(value)
	if value.denominator == 1:
		return str(value.numerator)
	return f"{value.numerator}/{value.denominator}"


def pow2(j: int) -> Fraction:
	"""Exact ``2**j`` for any integer ``j``."""
	return Fraction(2) ** int(j)


def floor_log2(value: Fraction) -> int:
	"""Largest integer ``j`` with ``2**j <= value``."""
	value = as_rational(value)
	if value <= 0:
		raise ValueError("floor_log2 needs a positive value.")
	j = value.numerator.bit_length() - value.denominator.bit_length()
	while pow2(j) > value:
		j -= 1
	while pow2(j + 1) <= value:
		j += 1
	return j


def ceil_log2(value: Fraction) -> int:
	"""Smallest integer ``j`` with ``2**j >= value``."""
	j = floor_log2(value)
	return j if pow2(j) == as_rational(value) else j + 1
