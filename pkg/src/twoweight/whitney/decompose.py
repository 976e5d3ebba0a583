"""
Whitney decompositions of open sets given as unions of lattice cells.

The selected cubes are the maximal grid cubes ``Q`` with ``R_W Q`` inside the
open set, where everything outside the lattice counts as exterior. Cells of
the open set that no such cube covers sit within a few cells of the boundary;
they are kept as single-cell *floor* cubes so that the family still covers
the set, and the Whitney condition is only asserted for the other cubes.

All containment tests work in integer cell coordinates: a box touches a cell
when their interiors meet.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from twoweight.errors import ConfigError, InvalidParameterError, NoExteriorError, ResolutionError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.grids import ShiftedGrid
from twoweight.geometry.literal import format_cube
from twoweight.geometry.rational import RationalLike, as_rational, floor_log2, format_rational, pow2
from twoweight.measures.lattice import CellSet, Lattice


@dataclass(frozen=True)
class WhitneyConfig:
	"""
	Whitney parameters: dilation ``R_W >= 3``, overlap factor ``N >= 3`` and the
	grid the cubes are taken from (standard grid when ``None``).
	"""

	R_W: Fraction = Fraction(4)
	N: int = 3
	grid: Optional[ShiftedGrid] = None

	def __post_init__(self) -> None:
		R_W = as_rational(self.R_W)
		if R_W < 3:
			raise InvalidParameterError(f"R_W must be at least 3, got {R_W}.")
		if int(self.N) != self.N or int(self.N) < 3:
			raise InvalidParameterError(f"N must be an integer >= 3, got {self.N}.")
		if R_W < int(self.N):
			warnings.warn(
				f"R_W={R_W} is below N={self.N}; NQ may leave the open set and bounded overlap can fail.",
				RuntimeWarning,
			)
		object.__setattr__(self, "R_W", R_W)
		object.__setattr__(self, "N", int(self.N))

	def grid_for(self, dim: int) -> ShiftedGrid:
		if self.grid is None:
			return ShiftedGrid.standard(dim)
		if self.grid.dim != dim:
			raise InvalidParameterError(f"Grid has dimension {self.grid.dim}, open set has {dim}.")
		return self.grid

	def to_dict(self) -> dict:
		return {
			"R_W": format_rational(self.R_W),
			"N": self.N,
			"grid": None if self.grid is None else self.grid.label,
		}

	@classmethod
	def from_dict(cls, data: Optional[dict], default: Optional["WhitneyConfig"] = None) -> "WhitneyConfig":
		"""``R_W`` and ``N`` from a mapping; the grid is chosen by the caller."""
		base = default or cls()
		if data is None:
			return base
		if not isinstance(data, dict):
			raise ConfigError("Whitney section must be a mapping.")
		extra = set(data) - {"R_W", "N", "grid"}
		if extra:
			raise ConfigError(f"Unknown keys for WhitneyConfig: {sorted(extra)}")
		if data.get("grid") not in (None, "standard"):
			raise ConfigError("Whitney grids are chosen per run; only 'standard' may be named.")
		try:
			return cls(data.get("R_W", base.R_W), data.get("N", base.N))
		except (TypeError, ValueError) as exc:
			if isinstance(exc, InvalidParameterError):
				raise
			raise ConfigError(f"Invalid Whitney parameters: {exc}") from exc


def floor_level(lattice: Lattice, grid: ShiftedGrid) -> int:
	"""Level ``j0`` of the lattice cells; they must be cubes of ``grid``."""
	j0 = floor_log2(lattice.h)
	if pow2(j0) != lattice.h:
		raise ResolutionError(f"Cell size {lattice.h} is not a power of two.")
	grid.check_level(j0)
	shift = grid.shift(j0)
	if any(((o - s) / lattice.h).denominator != 1 for o, s in zip(lattice.origin, shift)):
		raise ResolutionError(
			f"Lattice origin {tuple(format_rational(o) for o in lattice.origin)} "
			f"is not a level-{j0} corner of grid {grid.label}."
		)
	return j0


def dilation_offsets(cells: int, factor: Fraction) -> tuple[int, int]:
	"""Cell offsets ``[lo, hi)`` touched by ``factor * Q`` for a block of ``cells`` starting at 0."""
	lo = Fraction(cells) * (1 - factor) / 2
	hi = Fraction(cells) * (1 + factor) / 2
	return math.floor(lo), math.ceil(hi)


def padded_cumsum(mask: np.ndarray) -> np.ndarray:
	"""Summed-area table with a leading zero row on every axis."""
	table = np.asarray(mask, dtype=np.int64)
	for axis in range(table.ndim):
		table = np.cumsum(table, axis=axis)
	return np.pad(table, [(1, 0)] * table.ndim)


def product_box_counts(table: np.ndarray, lo: Sequence[np.ndarray], hi: Sequence[np.ndarray]) -> np.ndarray:
	"""Counts over every box ``prod [lo_a, hi_a)`` of the per-axis index arrays."""
	dim = len(lo)
	total = np.zeros(tuple(len(a) for a in lo), dtype=np.int64)
	for bits in itertools.product((0, 1), repeat=dim):
		index = [hi[a] if bit else lo[a] for a, bit in enumerate(bits)]
		sign = -1 if (dim - sum(bits)) % 2 else 1
		total += sign * table[np.ix_(*index)]
	return total


def paired_box_counts(table: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
	"""Counts over boxes ``[lo_i, hi_i)`` given as ``(K, n)`` index arrays."""
	dim = lo.shape[1]
	total = np.zeros(lo.shape[0], dtype=np.int64)
	for bits in itertools.product((0, 1), repeat=dim):
		index = tuple(hi[:, a] if bit else lo[:, a] for a, bit in enumerate(bits))
		sign = -1 if (dim - sum(bits)) % 2 else 1
		total += sign * table[index]
	return total


def _block_starts(lattice: Lattice, grid: ShiftedGrid, j: int, axis: int, cells: int) -> np.ndarray:
	"""Start indices of the level-``j`` grid blocks lying fully inside the lattice."""
	phase = (grid.shift(j)[axis] - lattice.origin[axis]) / lattice.h
	if phase.denominator != 1:
		raise ResolutionError(f"Level {j} of grid {grid.label} does not refine to the lattice cells.")
	first = int(phase) % cells
	count = max((lattice.shape[axis] - first) // cells, 0)
	return first + cells * np.arange(count, dtype=np.int64)


@dataclass(frozen=True)
class WhitneyFamily:
	"""
	Whitney cubes of ``omega``; ``floor[i]`` marks single-cell boundary cubes
	and ``k`` the superlevel index when the family comes from a field.
	"""

	cubes: tuple[Cube, ...]
	levels: tuple[int, ...]
	floor: tuple[bool, ...]
	omega: CellSet
	config: WhitneyConfig
	k: Optional[int] = None

	def __len__(self) -> int:
		return len(self.cubes)

	@property
	def lattice(self) -> Lattice:
		return self.omega.lattice

	@property
	def resolved(self) -> list[int]:
		return [i for i, is_floor in enumerate(self.floor) if not is_floor]

	@cached_property
	def boxes(self) -> tuple[np.ndarray, np.ndarray]:
		"""Unclipped cell index boxes ``(lo, hi)``, each ``(K, n)``."""
		dim = self.lattice.dim
		lo = np.zeros((len(self.cubes), dim), dtype=np.int64)
		hi = np.zeros((len(self.cubes), dim), dtype=np.int64)
		for i, cube in enumerate(self.cubes):
			box = self.lattice.index_box(cube)
			lo[i] = [a for a, _ in box]
			hi[i] = [b for _, b in box]
		return lo, hi

	@cached_property
	def labels(self) -> np.ndarray:
		"""Cube id per cell, ``-1`` off the family; later cubes win on overlaps."""
		labels = np.full(self.lattice.shape, -1, dtype=np.int64)
		for i, cube in enumerate(self.cubes):
			labels[self.lattice.slices(cube)] = i
		return labels

	@cached_property
	def C_W(self) -> int:
		from twoweight.whitney.verify import verify_whitney

		return verify_whitney(self).C_W

	def to_dict(self) -> dict:
		grid = self.config.grid_for(self.lattice.dim)
		return {
			"k": self.k,
			"config": self.config.to_dict(),
			"lattice": self.lattice.to_dict(),
			"cubes": [
				{"cube": format_cube(q), "level": j, "index": list(_grid_index(q, grid, j)), "floor": is_floor}
				for q, j, is_floor in zip(self.cubes, self.levels, self.floor)
			],
		}


def _grid_index(cube: Cube, grid: ShiftedGrid, j: int) -> tuple[int, ...]:
	shift = grid.shift(j)
	scale = pow2(j)
	return tuple(int((c - s) / scale) for c, s in zip(cube.corner, shift))


def maximal_grid_cubes(
	omega: CellSet,
	grid: ShiftedGrid,
	factor: RationalLike = 1,
) -> tuple[list[Cube], list[int], np.ndarray]:
	"""
	Maximal grid cubes ``Q`` at or above the cell level with ``factor * Q``
	inside ``omega``, plus the mask of the cells they cover.
	"""
	lattice = omega.lattice
	factor = as_rational(factor)
	j0 = floor_level(lattice, grid)
	exterior = padded_cumsum(~omega.mask)
	shape = np.array(lattice.shape, dtype=np.int64)
	covered = np.zeros(lattice.shape, dtype=bool)
	cubes: list[Cube] = []
	levels: list[int] = []
	top = j0 + floor_log2(Fraction(max(lattice.shape)))
	for j in range(top, j0 - 1, -1):
		grid.check_level(j)
		cells = 2 ** (j - j0)
		starts = [_block_starts(lattice, grid, j, axis, cells) for axis in range(lattice.dim)]
		if any(len(s) == 0 for s in starts):
			continue
		lo_off, hi_off = dilation_offsets(cells, factor)
		lo = [s + lo_off for s in starts]
		hi = [s + hi_off for s in starts]
		inside = np.ones(tuple(len(s) for s in starts), dtype=bool)
		for axis in range(lattice.dim):
			ok = (lo[axis] >= 0) & (hi[axis] <= shape[axis])
			view = [1] * lattice.dim
			view[axis] = -1
			inside &= ok.reshape(view)
		counts = product_box_counts(
			exterior,
			[np.clip(a, 0, n) for a, n in zip(lo, shape)],
			[np.clip(b, 0, n) for b, n in zip(hi, shape)],
		)
		fresh = inside & (counts == 0) & ~covered[np.ix_(*starts)]
		for index in zip(*np.nonzero(fresh)):
			start = [int(starts[axis][i]) for axis, i in enumerate(index)]
			covered[tuple(slice(s, s + cells) for s in start)] = True
			corner = tuple(o + s * lattice.h for o, s in zip(lattice.origin, start))
			cubes.append(Cube(corner, cells * lattice.h))
			levels.append(j)
	return cubes, levels, covered


def whitney_decompose(
	omega: CellSet,
	config: WhitneyConfig = WhitneyConfig(),
	k: Optional[int] = None,
) -> WhitneyFamily:
	"""Maximal grid cubes ``Q`` with ``R_W Q`` inside ``omega``, plus floor cells."""
	lattice = omega.lattice
	grid = config.grid_for(lattice.dim)
	j0 = floor_level(lattice, grid)
	if omega.is_empty():
		return WhitneyFamily((), (), (), omega, config, k)
	if omega.is_full():
		raise NoExteriorError("The open set fills the whole window; the Whitney condition cannot be checked.")
	cubes, levels, covered = maximal_grid_cubes(omega, grid, config.R_W)
	floor = [False] * len(cubes)
	for index in zip(*np.nonzero(omega.mask & ~covered)):
		cubes.append(lattice.cell_cube(index))
		levels.append(j0)
		floor.append(True)
	return WhitneyFamily(tuple(cubes), tuple(levels), tuple(floor), omega, config, k)


def random_open_set(
	lattice: Lattice,
	rng: np.random.Generator,
	boxes: int = 4,
	max_fraction: float = 0.25,
) -> CellSet:
	"""Union of ``boxes`` random cell-aligned boxes, each at most ``max_fraction`` of every side."""
	if int(boxes) <= 0:
		raise InvalidParameterError("boxes must be positive.")
	mask = np.zeros(lattice.shape, dtype=bool)
	for _ in range(int(boxes)):
		region = []
		for n in lattice.shape:
			side = int(rng.integers(1, max(int(n * max_fraction), 1) + 1))
			start = int(rng.integers(0, n - side + 1))
			region.append(slice(start, start + side))
		mask[tuple(region)] = True
	return CellSet(lattice, mask)


def window_lattice(window: Cube, h: RationalLike, grid: Optional[ShiftedGrid] = None) -> Lattice:
	"""Lattice of spacing ``h`` covering ``window``, its cells cubes of ``grid``."""
	h = as_rational(h)
	grid = grid or ShiftedGrid.standard(window.dim)
	anchor = grid.shift(floor_log2(h))
	return Lattice.covering(window.corner, window.upper, h, anchor=anchor)
