"""
Cube and point literals used on the command line and in spec files.

Grammar::

	cube     := interval ("x" interval)*
	interval := "[" rational "," rational ")"
	point    := rational ("," rational)*
	rational := integer | integer "/" integer | decimal

All intervals of a cube literal must have the same length. Printing always
uses the ``p/q`` form so that parse and print round-trip exactly.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from twoweight.errors import InvalidCubeError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import as_rational, format_rational

_INTERVAL = re.compile(r"\[\s*([^,\[\]()]+?)\s*,\s*([^,\[\]()]+?)\s*\)")


def parse_cube(text: str) -> Cube:
	stripped = text.strip()
	parts = [part.strip() for part in re.split(r"\)\s*x\s*\[", stripped)]
	if len(parts) > 1:
		parts = [parts[0] + ")"] + ["[" + p + ")" for p in parts[1:-1]] + ["[" + parts[-1]]
	lower: list[Fraction] = []
	upper: list[Fraction] = []
	for part in parts:
		match = _INTERVAL.fullmatch(part)
		if match is None:
			raise InvalidCubeError(f"Malformed interval {part!r} in cube literal {text!r}.")
		try:
			lower.append(as_rational(match.group(1)))
			upper.append(as_rational(match.group(2)))
		except ValueError as exc:
			raise InvalidCubeError(f"Bad coordinate in cube literal {text!r}: {exc}") from exc
	return Cube.from_bounds(lower, upper)


def format_cube(cube: Cube) -> str:
	return "x".join(
		f"[{format_rational(lo)},{format_rational(hi)})"
		for lo, hi in zip(cube.corner, cube.upper)
	)


def parse_point(text: str) -> tuple[Fraction, ...]:
	try:
		return tuple(as_rational(part) for part in text.split(","))
	except ValueError as exc:
		raise ValueError(f"Malformed point literal {text!r}: {exc}") from exc


def format_point(point: Sequence[Fraction]) -> str:
	return ",".join(format_rational(p) for p in point)
