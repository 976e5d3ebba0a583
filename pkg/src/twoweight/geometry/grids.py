"""
Shifted dyadic grids.

The grid with shift ``gamma`` has level-``j`` cubes
``2^j (k + [0,1)^n + (-1)^j gamma)``. The alternating sign makes every level a
refinement of the next, so two grid cubes are either disjoint or nested. With
``gamma`` ranging over ``{0, 1/3, 2/3}^n`` every cube sits in the middle nine
tenths of a comparable cube from one of the ``3^n`` grids.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from twoweight.errors import InvalidParameterError, ScaleRangeError
from twoweight.geometry.cubes import Cube, dilate
from twoweight.geometry.rational import RationalLike, as_vector, ceil_log2, pow2

DEFAULT_SCALE_BOUND = 40
THIRDS = (Fraction(0), Fraction(1, 3), Fraction(2, 3))
COVER_FRACTION = Fraction(9, 10)


@dataclass(frozen=True, order=True)
class ShiftedGrid:
	gamma: tuple[Fraction, ...]
	scale_bound: int = DEFAULT_SCALE_BOUND

	def __post_init__(self) -> None:
		gamma = as_vector(self.gamma)
		if not gamma:
			raise InvalidParameterError("ShiftedGrid needs a nonempty shift vector.")
		for g in gamma:
			if g not in THIRDS:
				raise InvalidParameterError(f"Grid shift entries must be 0, 1/3 or 2/3, got {g}.")
		if int(self.scale_bound) <= 0:
			raise InvalidParameterError("scale_bound must be positive.")
		object.__setattr__(self, "gamma", gamma)
		object.__setattr__(self, "scale_bound", int(self.scale_bound))

	@classmethod
	def standard(cls, dim: int, scale_bound: int = DEFAULT_SCALE_BOUND) -> "ShiftedGrid":
		return cls(tuple(Fraction(0) for _ in range(dim)), scale_bound)

	@property
	def dim(self) -> int:
		return len(self.gamma)

	@property
	def label(self) -> str:
		return ",".join(str(g) for g in self.gamma)

	def check_level(self, j: int) -> int:
		if abs(int(j)) > self.scale_bound:
			raise ScaleRangeError(
				f"Level {j} outside the scale bound [-{self.scale_bound}, {self.scale_bound}]."
			)
		return int(j)

	def shift(self, j: int) -> tuple[Fraction, ...]:
		"""Corner offset ``2^j (-1)^j gamma`` of the level-``j`` cubes."""
		sign = -1 if int(j) % 2 else 1
		scale = pow2(j)
		return tuple(scale * sign * g for g in self.gamma)


def all_shifted_grids(dim: int, scale_bound: int = DEFAULT_SCALE_BOUND) -> list[ShiftedGrid]:
	"""The ``3^n`` grids, standard grid first."""
	return [
		ShiftedGrid(gamma, scale_bound)
		for gamma in itertools.product(THIRDS, repeat=dim)
	]


def grid_cube(grid: ShiftedGrid, j: int, k: Sequence[int]) -> Cube:
	j = grid.check_level(j)
	if len(k) != grid.dim:
		raise InvalidParameterError(f"Index has {len(k)} entries, grid has dimension {grid.dim}.")
	scale = pow2(j)
	shift = grid.shift(j)
	return Cube(tuple(scale * int(ki) + s for ki, s in zip(k, shift)), scale)


def level_index(grid: ShiftedGrid, x: Sequence[RationalLike], j: int) -> tuple[int, ...]:
	"""Index ``k`` of the level-``j`` cube containing ``x``."""
	j = grid.check_level(j)
	x = as_vector(x, dim=grid.dim)
	scale = pow2(j)
	shift = grid.shift(j)
	return tuple(math.floor((xi - s) / scale) for xi, s in zip(x, shift))


def containing_cube(grid: ShiftedGrid, x: Sequence[RationalLike], j: int) -> Cube:
	return grid_cube(grid, j, level_index(grid, x, j))


def containing_chain(
	grid: ShiftedGrid,
	x: Sequence[RationalLike],
	j_min: int,
	j_max: int,
) -> list[Cube]:
	"""Grid cubes containing ``x`` from level ``j_min`` up to ``j_max``."""
	if int(j_min) > int(j_max):
		raise InvalidParameterError(f"j_min={j_min} exceeds j_max={j_max}.")
	return [containing_cube(grid, x, j) for j in range(int(j_min), int(j_max) + 1)]


def grid_parent(grid: ShiftedGrid, cube: Cube) -> Cube:
	"""Level ``j+1`` cube of ``grid`` containing the level-``j`` grid cube ``cube``."""
	j = ceil_log2(cube.side)
	return containing_cube(grid, cube.corner, j + 1)


def is_grid_cube(grid: ShiftedGrid, cube: Cube) -> bool:
	j = ceil_log2(cube.side)
	if pow2(j) != cube.side or abs(j) > grid.scale_bound:
		return False
	return containing_cube(grid, cube.corner, j) == cube


@dataclass(frozen=True)
class CoverResult:
	grid: ShiftedGrid
	cube: Cube
	ratio: Fraction


def cover_cube(cube: Cube, scale_bound: int = DEFAULT_SCALE_BOUND) -> CoverResult:
	"""
	Smallest shifted grid cube ``Q'`` with ``cube`` inside ``(9/10) Q'``.

	Levels are scanned upward from the first one that can fit, grids in their
	canonical order, so the answer is deterministic.
	"""
	grids = all_shifted_grids(cube.dim, scale_bound)
	start = ceil_log2(cube.side / COVER_FRACTION)
	for j in range(start, scale_bound + 1):
		for grid in grids:
			candidate = containing_cube(grid, cube.corner, j)
			if dilate(candidate, COVER_FRACTION).contains(cube):
				return CoverResult(grid, candidate, candidate.side / cube.side)
	raise ScaleRangeError(f"No covering grid cube for {cube} within scale bound {scale_bound}.")


def iter_level_cubes(grid: ShiftedGrid, window: Cube, j: int) -> Iterator[Cube]:
	"""Level-``j`` grid cubes meeting ``window``, in index order."""
	lo = level_index(grid, window.corner, j)
	scale = pow2(j)
	hi = tuple(
		math.ceil((u - s) / scale) - 1 for u, s in zip(window.upper, grid.shift(j))
	)
	for k in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
		yield grid_cube(grid, j, k)
