"""
Half-open axis-parallel cubes with exact rational geometry.

A cube is ``corner + [0, side)^n``. Containment, intersection and dilation are
exact; only measure evaluation downstream goes through floating point.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from twoweight.errors import InvalidCubeError, InvalidDilationError
from twoweight.geometry.rational import RationalLike, as_rational, as_vector

MAX_DIM = 3


@dataclass(frozen=True, order=True)
class Cube:
	"""
	Half-open cube ``[corner, corner + side)^n``.

	Ordering is lexicographic on ``(corner, side)``; sweeps use it to break ties
	between equally good witnesses.
	"""

	corner: tuple[Fraction, ...]
	side: Fraction

	def __post_init__(self) -> None:
		corner = as_vector(self.corner)
		side = as_rational(self.side)
		if not corner:
			raise InvalidCubeError("Cube needs at least one coordinate.")
		if len(corner) > MAX_DIM:
			raise InvalidCubeError(
				f"Dimension {len(corner)} exceeds the supported maximum {MAX_DIM}."
			)
		if side <= 0:
			raise InvalidCubeError(f"Cube side must be positive, got {side}.")
		object.__setattr__(self, "corner", corner)
		object.__setattr__(self, "side", side)

	@classmethod
	def from_bounds(cls, lower: Sequence[RationalLike], upper: Sequence[RationalLike]) -> "Cube":
		lower = as_vector(lower)
		upper = as_vector(upper, dim=len(lower))
		sides = {u - l for l, u in zip(lower, upper)}
		if len(sides) != 1:
			raise InvalidCubeError(f"Bounds {lower} .. {upper} do not form a cube.")
		return cls(lower, sides.pop())

	@property
	def dim(self) -> int:
		return len(self.corner)

	@property
	def upper(self) -> tuple[Fraction, ...]:
		return tuple(c + self.side for c in self.corner)

	@property
	def center(self) -> tuple[Fraction, ...]:
		half = self.side / 2
		return tuple(c + half for c in self.corner)

	@property
	def volume(self) -> Fraction:
		return self.side ** self.dim

	def lower_float(self) -> np.ndarray:
		return np.array([float(c) for c in self.corner], dtype=np.float64)

	def upper_float(self) -> np.ndarray:
		return np.array([float(c) for c in self.upper], dtype=np.float64)

	def contains_point(self, x: Sequence[RationalLike]) -> bool:
		x = as_vector(x, dim=self.dim)
		return all(c <= xi < c + self.side for c, xi in zip(self.corner, x))

	def contains(self, other: "Cube") -> bool:
		"""True when ``other`` is a subset of ``self``."""
		_check_dims(self, other)
		return all(
			a <= b and b + other.side <= a + self.side
			for a, b in zip(self.corner, other.corner)
		)

	def intersects(self, other: "Cube") -> bool:
		"""True when the half-open cubes share a set of positive volume."""
		_check_dims(self, other)
		return all(
			max(a, b) < min(a + self.side, b + other.side)
			for a, b in zip(self.corner, other.corner)
		)

	def overlap_volume(self, other: "Cube") -> Fraction:
		_check_dims(self, other)
		volume = Fraction(1)
		for a, b in zip(self.corner, other.corner):
			length = min(a + self.side, b + other.side) - max(a, b)
			if length <= 0:
				return Fraction(0)
			volume *= length
		return volume


def _check_dims(a: Cube, b: Cube) -> None:
	if a.dim != b.dim:
		raise InvalidCubeError(f"Dimension mismatch: {a.dim} vs {b.dim}.")


def dilate(cube: Cube, factor: RationalLike) -> Cube:
	"""Same center, side multiplied by ``factor``."""
	factor = as_rational(factor)
	if factor <= 0:
		raise InvalidDilationError(f"Dilation factor must be positive, got {factor}.")
	side = cube.side * factor
	shift = (side - cube.side) / 2
	return Cube(tuple(c - shift for c in cube.corner), side)


def children(cube: Cube) -> list[Cube]:
	"""The ``2^n`` half-size cubes partitioning ``cube``, in lexicographic order."""
	half = cube.side / 2
	return [
		Cube(tuple(c + b * half for c, b in zip(cube.corner, bits)), half)
		for bits in itertools.product((0, 1), repeat=cube.dim)
	]


def parents(cube: Cube) -> list[Cube]:
	"""
	The ``2^n`` double-size cubes having ``cube`` as a child.

	Alignment is to the cube's own side length, independent of any grid.
	"""
	side = cube.side
	return [
		Cube(tuple(c - b * side for c, b in zip(cube.corner, bits)), 2 * side)
		for bits in itertools.product((0, 1), repeat=cube.dim)
	]


def bounding_cube(cubes: Iterable[Cube]) -> Cube:
	"""Smallest cube sharing the lower corner of the joint bounding box."""
	cubes = list(cubes)
	if not cubes:
		raise InvalidCubeError("bounding_cube needs at least one cube.")
	dim = cubes[0].dim
	lower = [min(q.corner[i] for q in cubes) for i in range(dim)]
	upper = [max(q.upper[i] for q in cubes) for i in range(dim)]
	side = max(u - l for l, u in zip(lower, upper))
	return Cube(tuple(lower), side)


def cube_bounds(cubes: Sequence[Cube]) -> tuple[np.ndarray, np.ndarray]:
	"""Float ``(lower, upper)`` arrays of shape ``(len(cubes), n)``."""
	if not cubes:
		return np.zeros((0, 1)), np.zeros((0, 1))
	lower = np.array([[float(c) for c in q.corner] for q in cubes], dtype=np.float64)
	sides = np.array([float(q.side) for q in cubes], dtype=np.float64)
	return lower, lower + sides[:, None]
