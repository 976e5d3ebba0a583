"""
Uniform cell lattices, cell sets and piecewise-constant functions.

A lattice is the box ``origin + h * [0, shape)`` cut into half-open cells of
side ``h``. Arrays attached to a lattice are indexed ``[i_0, ..., i_{n-1}]``
with axis ``a`` running along coordinate ``a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from twoweight.errors import InvalidParameterError, LatticeMismatchError, ResolutionError
from twoweight.geometry.cubes import MAX_DIM, Cube
from twoweight.geometry.rational import RationalLike, as_rational, as_vector


@dataclass(frozen=True)
class Lattice:
	origin: tuple[Fraction, ...]
	h: Fraction
	shape: tuple[int, ...]

	def __post_init__(self) -> None:
		origin = as_vector(self.origin)
		h = as_rational(self.h)
		shape = tuple(int(s) for s in self.shape)
		if h <= 0:
			raise InvalidParameterError(f"Cell size must be positive, got {h}.")
		if len(shape) != len(origin):
			raise InvalidParameterError("Lattice origin and shape disagree on dimension.")
		if not 1 <= len(shape) <= MAX_DIM:
			raise InvalidParameterError(f"Lattice dimension must be 1..{MAX_DIM}.")
		if any(s <= 0 for s in shape):
			raise InvalidParameterError(f"Lattice shape must be positive, got {shape}.")
		object.__setattr__(self, "origin", origin)
		object.__setattr__(self, "h", h)
		object.__setattr__(self, "shape", shape)

	@classmethod
	def covering(
		cls,
		lower: Sequence[RationalLike],
		upper: Sequence[RationalLike],
		h: RationalLike,
		anchor: Optional[Sequence[RationalLike]] = None,
	) -> "Lattice":
		"""Smallest lattice of spacing ``h`` aligned to ``anchor`` covering the box."""
		lower = as_vector(lower)
		upper = as_vector(upper, dim=len(lower))
		h = as_rational(h)
		anchor = as_vector(anchor, dim=len(lower)) if anchor is not None else tuple(Fraction(0) for _ in lower)
		origin = []
		shape = []
		for lo, hi, a in zip(lower, upper, anchor):
			start = math.floor((lo - a) / h)
			stop = math.ceil((hi - a) / h)
			origin.append(a + start * h)
			shape.append(max(stop - start, 1))
		return cls(tuple(origin), h, tuple(shape))

	@classmethod
	def over_cube(cls, cube: Cube, cells_per_side: int) -> "Lattice":
		if int(cells_per_side) <= 0:
			raise InvalidParameterError("cells_per_side must be positive.")
		return cls(cube.corner, cube.side / int(cells_per_side), (int(cells_per_side),) * cube.dim)

	@property
	def dim(self) -> int:
		return len(self.shape)

	@property
	def size(self) -> int:
		return int(np.prod(self.shape))

	@property
	def upper(self) -> tuple[Fraction, ...]:
		return tuple(o + s * self.h for o, s in zip(self.origin, self.shape))

	@property
	def cell_volume(self) -> float:
		return float(self.h) ** self.dim

	def bounding_cube(self) -> Cube:
		return Cube(self.origin, max(self.shape) * self.h)

	def edges(self, axis: int) -> np.ndarray:
		return float(self.origin[axis]) + float(self.h) * np.arange(self.shape[axis] + 1, dtype=np.float64)

	def midpoints(self, axis: int) -> np.ndarray:
		return float(self.origin[axis]) + float(self.h) * (np.arange(self.shape[axis], dtype=np.float64) + 0.5)

	def midpoint_grid(self) -> np.ndarray:
		"""Array of shape ``shape + (n,)`` with the cell midpoints."""
		axes = np.meshgrid(*(self.midpoints(a) for a in range(self.dim)), indexing="ij")
		return np.stack(axes, axis=-1)

	def cell_cube(self, index: Sequence[int]) -> Cube:
		return Cube(tuple(o + int(i) * self.h for o, i in zip(self.origin, index)), self.h)

	def cell_bounds(self) -> tuple[np.ndarray, np.ndarray]:
		"""Float lower/upper corners of every cell, shape ``shape + (n,)``."""
		lower = self.midpoint_grid() - 0.5 * float(self.h)
		return lower, lower + float(self.h)

	def cell_index(self, x: Sequence[RationalLike]) -> Optional[tuple[int, ...]]:
		"""Index of the cell containing ``x`` or ``None`` outside the lattice."""
		x = as_vector(x, dim=self.dim)
		index = tuple(math.floor((xi - o) / self.h) for xi, o in zip(x, self.origin))
		if all(0 <= i < s for i, s in zip(index, self.shape)):
			return index
		return None

	def is_aligned(self, cube: Cube) -> bool:
		"""True when the cube is a union of cells of the infinite lattice."""
		if cube.dim != self.dim:
			return False
		if (cube.side / self.h).denominator != 1:
			return False
		return all(((c - o) / self.h).denominator == 1 for c, o in zip(cube.corner, self.origin))

	def index_box(self, cube: Cube) -> tuple[tuple[int, int], ...]:
		"""Cell index ranges ``[start, stop)`` of an aligned cube, unclipped."""
		if not self.is_aligned(cube):
			raise ResolutionError(f"Cube {cube} is not aligned with the lattice of spacing {self.h}.")
		count = int(cube.side / self.h)
		starts = [int((c - o) / self.h) for c, o in zip(cube.corner, self.origin)]
		return tuple((s, s + count) for s in starts)

	def slices(self, cube: Cube) -> tuple[slice, ...]:
		"""Clipped slices selecting the cells of an aligned cube."""
		return tuple(
			slice(max(a, 0), min(b, s)) for (a, b), s in zip(self.index_box(cube), self.shape)
		)

	def sub_lattice(self, cube: Cube) -> "Lattice":
		"""Cells of the infinite lattice inside an aligned cube."""
		count = int(cube.side / self.h)
		if not self.is_aligned(cube):
			raise ResolutionError(f"Cube {cube} is not aligned with the lattice of spacing {self.h}.")
		return Lattice(cube.corner, self.h, (count,) * self.dim)

	def offset_of(self, other: "Lattice") -> tuple[int, ...]:
		"""Index of ``other.origin`` in this lattice; both must share spacing and phase."""
		if other.h != self.h:
			raise LatticeMismatchError(f"Cell sizes differ: {self.h} vs {other.h}.")
		offsets = []
		for a, b in zip(self.origin, other.origin):
			step = (b - a) / self.h
			if step.denominator != 1:
				raise LatticeMismatchError("Lattices are not on a common cell grid.")
			offsets.append(int(step))
		return tuple(offsets)

	def same_as(self, other: "Lattice") -> bool:
		return self.origin == other.origin and self.h == other.h and self.shape == other.shape

	def require_same(self, other: "Lattice", what: str = "operands") -> None:
		if not self.same_as(other):
			raise LatticeMismatchError(
				f"Incompatible lattices for {what}: "
				f"(origin={self.origin}, h={self.h}, shape={self.shape}) vs "
				f"(origin={other.origin}, h={other.h}, shape={other.shape})."
			)

	def to_dict(self) -> dict:
		return {
			"origin": [str(o) for o in self.origin],
			"h": str(self.h),
			"shape": list(self.shape),
		}

	@classmethod
	def from_dict(cls, data: dict) -> "Lattice":
		return cls(as_vector(data["origin"]), as_rational(data["h"]), tuple(data["shape"]))


def transfer(values: np.ndarray, source: Lattice, target: Lattice, fill: float = 0.0) -> np.ndarray:
	"""Copy cell values from ``source`` onto the overlapping cells of ``target``."""
	offset = target.offset_of(source)
	out = np.full(target.shape, fill, dtype=values.dtype)
	src_slices = []
	dst_slices = []
	for off, s_len, t_len in zip(offset, source.shape, target.shape):
		start = max(off, 0)
		stop = min(off + s_len, t_len)
		if stop <= start:
			return out
		dst_slices.append(slice(start, stop))
		src_slices.append(slice(start - off, stop - off))
	out[tuple(dst_slices)] = values[tuple(src_slices)]
	return out


@dataclass(frozen=True)
class CellSet:
	"""A finite union of lattice cells."""

	lattice: Lattice
	mask: np.ndarray = field(compare=False)

	def __post_init__(self) -> None:
		mask = np.asarray(self.mask, dtype=bool)
		if mask.shape != self.lattice.shape:
			raise LatticeMismatchError(
				f"Mask shape {mask.shape} does not match lattice shape {self.lattice.shape}."
			)
		mask = mask.copy()
		mask.setflags(write=False)
		object.__setattr__(self, "mask", mask)

	@classmethod
	def empty(cls, lattice: Lattice) -> "CellSet":
		return cls(lattice, np.zeros(lattice.shape, dtype=bool))

	@classmethod
	def full(cls, lattice: Lattice) -> "CellSet":
		return cls(lattice, np.ones(lattice.shape, dtype=bool))

	@classmethod
	def from_cubes(cls, lattice: Lattice, cubes: Sequence[Cube]) -> "CellSet":
		mask = np.zeros(lattice.shape, dtype=bool)
		for cube in cubes:
			mask[lattice.slices(cube)] = True
		return cls(lattice, mask)

	@property
	def count(self) -> int:
		return int(self.mask.sum())

	def is_empty(self) -> bool:
		return not self.mask.any()

	def is_full(self) -> bool:
		return bool(self.mask.all())

	def _check(self, other: "CellSet") -> None:
		self.lattice.require_same(other.lattice, "cell sets")

	def __or__(self, other: "CellSet") -> "CellSet":
		self._check(other)
		return CellSet(self.lattice, self.mask | other.mask)

	def __and__(self, other: "CellSet") -> "CellSet":
		self._check(other)
		return CellSet(self.lattice, self.mask & other.mask)

	def __sub__(self, other: "CellSet") -> "CellSet":
		self._check(other)
		return CellSet(self.lattice, self.mask & ~other.mask)

	def complement(self) -> "CellSet":
		return CellSet(self.lattice, ~self.mask)

	def issubset(self, other: "CellSet") -> bool:
		self._check(other)
		return not (self.mask & ~other.mask).any()

	def cubes(self) -> list[Cube]:
		return [self.lattice.cell_cube(idx) for idx in zip(*np.nonzero(self.mask))]


@dataclass(frozen=True)
class LatticeFunction:
	"""Nonnegative piecewise-constant function, zero outside its lattice."""

	lattice: Lattice
	values: np.ndarray = field(compare=False)

	def __post_init__(self) -> None:
		values = np.asarray(self.values, dtype=np.float64)
		if values.shape != self.lattice.shape:
			raise LatticeMismatchError(
				f"Value shape {values.shape} does not match lattice shape {self.lattice.shape}."
			)
		if not np.all(np.isfinite(values)):
			raise InvalidParameterError("Lattice function values must be finite.")
		if np.any(values < 0):
			raise InvalidParameterError("Lattice function values must be nonnegative.")
		values = values.copy()
		values.setflags(write=False)
		object.__setattr__(self, "values", values)

	@classmethod
	def constant(cls, lattice: Lattice, value: float = 1.0) -> "LatticeFunction":
		return cls(lattice, np.full(lattice.shape, float(value)))

	@classmethod
	def indicator(cls, lattice: Lattice, cube: Cube) -> "LatticeFunction":
		return cls(lattice, CellSet.from_cubes(lattice, [cube]).mask.astype(np.float64))

	@property
	def dim(self) -> int:
		return self.lattice.dim

	def restrict(self, cells: CellSet) -> "LatticeFunction":
		self.lattice.require_same(cells.lattice, "restriction")
		return LatticeFunction(self.lattice, np.where(cells.mask, self.values, 0.0))

	def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
		self.lattice.require_same(other.lattice, "sum")
		return LatticeFunction(self.lattice, self.values + other.values)

	def support(self) -> CellSet:
		return CellSet(self.lattice, self.values > 0)

	def is_zero(self) -> bool:
		return not np.any(self.values > 0)
