"""Finite cube families standing in for "all cubes"."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from twoweight.errors import DegenerateInputError, InvalidCubeError, InvalidParameterError
from twoweight.geometry.cubes import Cube, cube_bounds
from twoweight.geometry.grids import ShiftedGrid, iter_level_cubes
from twoweight.geometry.literal import format_cube
from twoweight.geometry.rational import RationalLike, as_rational, ceil_log2, floor_log2, pow2


@dataclass(frozen=True)
class CubeFamily:
	cubes: tuple[Cube, ...]
	window: Optional[Cube] = None
	label: str = "explicit"

	def __post_init__(self) -> None:
		cubes = tuple(self.cubes)
		if not cubes:
			raise DegenerateInputError("Cube family is empty.")
		dim = cubes[0].dim
		if any(q.dim != dim for q in cubes):
			raise InvalidCubeError("Cube family mixes dimensions.")
		if self.window is not None:
			outside = [q for q in cubes if not self.window.contains(q)]
			if outside:
				raise InvalidCubeError(
					f"Cube {format_cube(outside[0])} lies outside the window {format_cube(self.window)}."
				)
		object.__setattr__(self, "cubes", cubes)

	@classmethod
	def explicit(cls, cubes: Iterable[Cube], window: Optional[Cube] = None) -> "CubeFamily":
		return cls(tuple(cubes), window, "explicit")

	@classmethod
	def sweep(
		cls,
		window: Cube,
		step: RationalLike,
		sides: Sequence[RationalLike],
	) -> "CubeFamily":
		"""Cubes with corners on the ``step`` lattice from the window corner, given sides, inside the window."""
		step = as_rational(step)
		if step <= 0:
			raise InvalidParameterError("Sweep step must be positive.")
		cubes = []
		for side in sorted({as_rational(s) for s in sides}):
			count = math.floor((window.side - side) / step)
			if side <= 0 or count < 0:
				continue
			for k in itertools.product(range(count + 1), repeat=window.dim):
				cubes.append(Cube(tuple(c + step * ki for c, ki in zip(window.corner, k)), side))
		return cls(tuple(cubes), window, f"sweep(step={step})")

	@classmethod
	def default(cls, window: Cube, step: RationalLike) -> "CubeFamily":
		"""Dyadic multiples of ``step`` as sides, corners on the ``step`` lattice."""
		step = as_rational(step)
		top = floor_log2(window.side / step)
		sides = [step * pow2(j) for j in range(0, top + 1)]
		family = cls.sweep(window, step, sides)
		return cls(family.cubes, window, f"default(step={step})")

	@classmethod
	def dyadic(
		cls,
		window: Cube,
		j_min: int,
		j_max: Optional[int] = None,
		grid: Optional[ShiftedGrid] = None,
	) -> "CubeFamily":
		"""Grid cubes inside the window at levels ``j_min .. j_max``."""
		grid = grid or ShiftedGrid.standard(window.dim)
		if j_max is None:
			j_max = ceil_log2(window.side)
		cubes = [
			q for j in range(int(j_min), int(j_max) + 1)
			for q in iter_level_cubes(grid, window, j)
			if window.contains(q)
		]
		return cls(tuple(cubes), window, f"dyadic({grid.label}, {j_min}..{j_max})")

	@classmethod
	def intervals(
		cls,
		a_range: tuple[RationalLike, RationalLike],
		b_range: tuple[RationalLike, RationalLike],
		step: RationalLike,
	) -> "CubeFamily":
		"""One-dimensional intervals ``[a, b)`` with ``a`` in ``[a0, a1)``, ``b`` in ``(b0, b1]``, ``a < b``."""
		step = as_rational(step)
		a0, a1 = (as_rational(v) for v in a_range)
		b0, b1 = (as_rational(v) for v in b_range)
		starts = [a0 + step * i for i in range(math.ceil((a1 - a0) / step))]
		ends = [b1 - step * i for i in range(math.ceil((b1 - b0) / step))]
		cubes = [Cube((a,), b - a) for a in starts for b in sorted(ends) if b > a]
		window = Cube((min(a0, b0),), max(a1, b1) - min(a0, b0))
		return cls(tuple(cubes), window, f"intervals(step={step})")

	def __len__(self) -> int:
		return len(self.cubes)

	def __iter__(self) -> Iterator[Cube]:
		return iter(self.cubes)

	@property
	def dim(self) -> int:
		return self.cubes[0].dim

	def bounds(self) -> tuple[np.ndarray, np.ndarray]:
		return cube_bounds(self.cubes)

	def extended(self, cubes: Iterable[Cube]) -> "CubeFamily":
		"""This family plus ``cubes``, duplicates removed, order kept."""
		seen = dict.fromkeys(self.cubes)
		for q in cubes:
			seen.setdefault(q, None)
		window = self.window
		if window is not None and not all(window.contains(q) for q in seen):
			window = None
		return CubeFamily(tuple(seen), window, self.label + "+")

	def max_side(self) -> Fraction:
		return max(q.side for q in self.cubes)
