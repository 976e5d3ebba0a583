"""
Closed-form and lattice measures.

Closed forms are products of one-dimensional densities, so the mass of a box is
a product of per-axis antiderivative differences. Lattice measures carry one
mass per cell and spread it uniformly inside the cell, which makes mass
additive and monotone for every rational cube (proportional-overlap rule).
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import ClassVar, Optional, Sequence

import numpy as np

from twoweight.errors import InvalidParameterError, LatticeMismatchError
from twoweight.geometry.cubes import MAX_DIM, Cube
from twoweight.geometry.rational import as_rational, as_vector, format_rational
from twoweight.measures.lattice import CellSet, Lattice, LatticeFunction, transfer
from twoweight.measures.prefix import AxisFraction, PrefixTable


class Measure(ABC):
	"""Locally finite positive measure on ``R^n`` with exact box masses."""

	kind: ClassVar[str] = ""

	@property
	@abstractmethod
	def dim(self) -> int:
		...

	@abstractmethod
	def mass(self, cube: Cube) -> float:
		...

	@abstractmethod
	def mass_boxes(self, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
		"""Masses of the half-open boxes ``[lower[i], upper[i])``."""

	@abstractmethod
	def cell_masses(self, lattice: Lattice) -> np.ndarray:
		...

	@abstractmethod
	def density(self, points: np.ndarray) -> np.ndarray:
		"""Density at ``points`` (shape ``(..., n)``), mass per unit volume."""

	@abstractmethod
	def prefix_fraction(self) -> Optional[AxisFraction]:
		"""In-cell distribution used by prefix tables; ``None`` means uniform."""

	@abstractmethod
	def support(self) -> Optional[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
		"""Bounding box of the support, ``None`` when unbounded."""

	@abstractmethod
	def to_dict(self) -> dict:
		...

	def _check_dim(self, cube: Cube) -> None:
		if cube.dim != self.dim:
			raise InvalidParameterError(
				f"Cube dimension {cube.dim} does not match measure dimension {self.dim}."
			)


class ProductMeasure(Measure):
	"""Closed-form measure whose density factorizes over the axes."""

	@abstractmethod
	def axis_mass(self, axis: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
		"""Mass of ``[lo, hi)`` under the one-dimensional factor along ``axis``."""

	def mass(self, cube: Cube) -> float:
		self._check_dim(cube)
		lo = cube.lower_float()
		width = float(cube.side)
		out = 1.0
		for axis in range(self.dim):
			out *= float(self.axis_mass(axis, np.array([lo[axis]]), np.array([lo[axis] + width]))[0])
		return max(out, 0.0)

	def mass_boxes(self, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
		lower = np.atleast_2d(np.asarray(lower, dtype=np.float64))
		upper = np.atleast_2d(np.asarray(upper, dtype=np.float64))
		out = np.ones(lower.shape[0], dtype=np.float64)
		for axis in range(self.dim):
			out *= self.axis_mass(axis, lower[:, axis], upper[:, axis])
		return np.maximum(out, 0.0)

	def cell_masses(self, lattice: Lattice) -> np.ndarray:
		if lattice.dim != self.dim:
			raise LatticeMismatchError("Lattice and measure dimensions differ.")
		out = np.ones(lattice.shape, dtype=np.float64)
		for axis in range(self.dim):
			edges = lattice.edges(axis)
			factor = self.axis_mass(axis, edges[:-1], edges[1:])
			expand = [1] * self.dim
			expand[axis] = len(factor)
			out = out * factor.reshape(expand)
		return np.maximum(out, 0.0)

	def prefix_fraction(self) -> Optional[AxisFraction]:
		def fraction(axis: int, t: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
			whole = self.axis_mass(axis, lo, hi)
			part = self.axis_mass(axis, lo, t)
			with np.errstate(invalid="ignore", divide="ignore"):
				theta = np.where(whole > 0, part / np.where(whole > 0, whole, 1.0), 0.0)
			return theta

		return fraction


@dataclass(frozen=True)
class ExpDensity(ProductMeasure):
	"""Density ``exp(rate * (x_1 + ... + x_n))``."""

	kind: ClassVar[str] = "exp-density"
	n: int = 1
	rate: Fraction = Fraction(1)

	def __post_init__(self) -> None:
		rate = as_rational(self.rate)
		if rate == 0:
			raise InvalidParameterError("Exponential rate must be nonzero; use Lebesgue for rate 0.")
		if not 1 <= int(self.n) <= MAX_DIM:
			raise InvalidParameterError(f"Dimension must be 1..{MAX_DIM}, got {self.n}.")
		object.__setattr__(self, "rate", rate)
		object.__setattr__(self, "n", int(self.n))

	@property
	def dim(self) -> int:
		return self.n

	def axis_mass(self, axis: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
		r = float(self.rate)
		lo = np.asarray(lo, dtype=np.float64)
		hi = np.asarray(hi, dtype=np.float64)
		width = np.maximum(hi - lo, 0.0)
		if r > 0:
			return np.exp(r * lo) * np.expm1(r * width) / r
		return np.exp(r * hi) * np.expm1(-r * width) / -r

	def density(self, points: np.ndarray) -> np.ndarray:
		points = np.asarray(points, dtype=np.float64)
		return np.exp(float(self.rate) * points.sum(axis=-1))

	def support(self) -> None:
		return None

	def to_dict(self) -> dict:
		return {"kind": self.kind, "dim": self.n, "params": {"rate": format_rational(self.rate)}}


@dataclass(frozen=True)
class Lebesgue(ProductMeasure):
	kind: ClassVar[str] = "lebesgue"
	n: int = 1

	def __post_init__(self) -> None:
		if not 1 <= int(self.n) <= MAX_DIM:
			raise InvalidParameterError(f"Dimension must be 1..{MAX_DIM}, got {self.n}.")
		object.__setattr__(self, "n", int(self.n))

	@property
	def dim(self) -> int:
		return self.n

	def mass(self, cube: Cube) -> float:
		self._check_dim(cube)
		return float(cube.volume)

	def axis_mass(self, axis: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
		return np.maximum(np.asarray(hi, dtype=np.float64) - np.asarray(lo, dtype=np.float64), 0.0)

	def density(self, points: np.ndarray) -> np.ndarray:
		return np.ones(np.asarray(points).shape[:-1], dtype=np.float64)

	def prefix_fraction(self) -> None:
		return None

	def support(self) -> None:
		return None

	def to_dict(self) -> dict:
		return {"kind": self.kind, "dim": self.n, "params": {}}


@dataclass(frozen=True)
class IndicatorDensity(ProductMeasure):
	"""Lebesgue measure restricted to the half-open box ``[lower, upper)``."""

	kind: ClassVar[str] = "indicator-density"
	lower: tuple[Fraction, ...] = (Fraction(0),)
	upper: tuple[Fraction, ...] = (Fraction(1),)

	def __post_init__(self) -> None:
		lower = as_vector(self.lower)
		upper = as_vector(self.upper, dim=len(lower))
		if not 1 <= len(lower) <= MAX_DIM:
			raise InvalidParameterError(f"Dimension must be 1..{MAX_DIM}, got {len(lower)}.")
		if any(u <= l for l, u in zip(lower, upper)):
			raise InvalidParameterError(f"Indicator box {lower} .. {upper} is empty.")
		object.__setattr__(self, "lower", lower)
		object.__setattr__(self, "upper", upper)

	@property
	def dim(self) -> int:
		return len(self.lower)

	def mass(self, cube: Cube) -> float:
		self._check_dim(cube)
		volume = Fraction(1)
		for c, l, u in zip(cube.corner, self.lower, self.upper):
			length = min(c + cube.side, u) - max(c, l)
			if length <= 0:
				return 0.0
			volume *= length
		return float(volume)

	def axis_mass(self, axis: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
		a = float(self.lower[axis])
		b = float(self.upper[axis])
		return np.maximum(np.minimum(np.asarray(hi, dtype=np.float64), b) - np.maximum(np.asarray(lo, dtype=np.float64), a), 0.0)

	def density(self, points: np.ndarray) -> np.ndarray:
		points = np.asarray(points, dtype=np.float64)
		inside = np.ones(points.shape[:-1], dtype=bool)
		for axis in range(self.dim):
			inside &= (points[..., axis] >= float(self.lower[axis])) & (points[..., axis] < float(self.upper[axis]))
		return inside.astype(np.float64)

	def support(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
		return self.lower, self.upper

	def to_dict(self) -> dict:
		return {
			"kind": self.kind,
			"dim": self.dim,
			"params": {
				"lower": [format_rational(v) for v in self.lower],
				"upper": [format_rational(v) for v in self.upper],
			},
		}


@dataclass(frozen=True)
class LatticeMeasure(Measure):
	"""One nonnegative mass per lattice cell, uniform inside the cell."""

	kind: ClassVar[str] = "lattice"
	lattice: Lattice
	masses: np.ndarray = field(compare=False)

	def __post_init__(self) -> None:
		masses = np.asarray(self.masses, dtype=np.float64)
		if masses.shape != self.lattice.shape:
			raise LatticeMismatchError(
				f"Mass array shape {masses.shape} does not match lattice shape {self.lattice.shape}."
			)
		if not np.all(np.isfinite(masses)) or np.any(masses < 0):
			raise InvalidParameterError("Lattice masses must be finite and nonnegative.")
		masses = masses.copy()
		masses.setflags(write=False)
		object.__setattr__(self, "masses", masses)

	@classmethod
	def zero(cls, lattice: Lattice) -> "LatticeMeasure":
		return cls(lattice, np.zeros(lattice.shape))

	@property
	def dim(self) -> int:
		return self.lattice.dim

	@property
	def total(self) -> float:
		return float(self.masses.sum())

	@cached_property
	def _table(self) -> PrefixTable:
		return PrefixTable(self.lattice, self.masses)

	def mass(self, cube: Cube) -> float:
		self._check_dim(cube)
		return _contract_overlap(self.masses, self.lattice, cube)

	def mass_boxes(self, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
		return self._table.box_sums(lower, upper)

	def cell_masses(self, lattice: Lattice) -> np.ndarray:
		if lattice.dim != self.dim:
			raise LatticeMismatchError("Lattice and measure dimensions differ.")
		if lattice.h == self.lattice.h:
			try:
				return transfer(self.masses, self.lattice, lattice)
			except LatticeMismatchError:
				pass
		lower, upper = lattice.cell_bounds()
		sums = self._table.box_sums(lower.reshape(-1, self.dim), upper.reshape(-1, self.dim))
		return sums.reshape(lattice.shape)

	def density(self, points: np.ndarray) -> np.ndarray:
		points = np.asarray(points, dtype=np.float64)
		index = []
		inside = np.ones(points.shape[:-1], dtype=bool)
		for axis in range(self.dim):
			u = np.floor((points[..., axis] - float(self.lattice.origin[axis])) / float(self.lattice.h)).astype(np.int64)
			inside &= (u >= 0) & (u < self.lattice.shape[axis])
			index.append(np.clip(u, 0, self.lattice.shape[axis] - 1))
		values = self.masses[tuple(index)] / self.lattice.cell_volume
		return np.where(inside, values, 0.0)

	def prefix_fraction(self) -> None:
		return None

	def support(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
		return self.lattice.origin, self.lattice.upper

	def to_dict(self) -> dict:
		return {
			"kind": self.kind,
			"dim": self.dim,
			"h": format_rational(self.lattice.h),
			"support": {
				"origin": [format_rational(o) for o in self.lattice.origin],
				"shape": list(self.lattice.shape),
			},
			"params": {"masses": self.masses.tolist()},
		}


def _overlap_axes(lattice: Lattice, cube: Cube) -> Optional[tuple[tuple[slice, ...], list[np.ndarray]]]:
	"""Cell slices meeting ``cube`` and per-axis overlap fractions of those cells."""
	slices = []
	weights = []
	for axis in range(lattice.dim):
		o = lattice.origin[axis]
		a = cube.corner[axis]
		b = a + cube.side
		start = max(math.floor((a - o) / lattice.h), 0)
		stop = min(math.ceil((b - o) / lattice.h), lattice.shape[axis])
		if stop <= start:
			return None
		w = np.ones(stop - start, dtype=np.float64)
		for pos in {0, stop - start - 1}:
			lo = o + (start + pos) * lattice.h
			share = (min(lo + lattice.h, b) - max(lo, a)) / lattice.h
			w[pos] = float(max(share, Fraction(0)))
		slices.append(slice(start, stop))
		weights.append(w)
	return tuple(slices), weights


def _contract(values: np.ndarray, weights: Sequence[np.ndarray]) -> float:
	out = values
	for w in weights:
		out = np.tensordot(w, out, axes=([0], [0]))
	return float(out)


def _contract_overlap(values: np.ndarray, lattice: Lattice, cube: Cube) -> float:
	overlap = _overlap_axes(lattice, cube)
	if overlap is None:
		return 0.0
	slices, weights = overlap
	return max(_contract(values[slices], weights), 0.0)


def cell_weights(f: LatticeFunction, mu: Measure) -> np.ndarray:
	"""``f * mu(cell)`` for every cell of ``f``'s lattice."""
	if isinstance(mu, LatticeMeasure):
		f.lattice.offset_of(mu.lattice)
		return f.values * transfer(mu.masses, mu.lattice, f.lattice)
	return f.values * mu.cell_masses(f.lattice)


def weighted_integral(mu: Measure, f: LatticeFunction, cube: Cube) -> float:
	"""``int_Q f dmu`` with ``f`` piecewise constant on its lattice."""
	mu._check_dim(cube)
	if f.dim != mu.dim:
		raise LatticeMismatchError("Function and measure dimensions differ.")
	if isinstance(mu, LatticeMeasure):
		return _contract_overlap(cell_weights(f, mu), f.lattice, cube)
	lattice = f.lattice
	slices = []
	weights = []
	for axis in range(lattice.dim):
		edges = lattice.edges(axis)
		a = float(cube.corner[axis])
		b = float(cube.corner[axis] + cube.side)
		lo = np.maximum(edges[:-1], a)
		hi = np.minimum(edges[1:], b)
		active = np.nonzero(hi > lo)[0]
		if active.size == 0:
			return 0.0
		start, stop = int(active[0]), int(active[-1]) + 1
		slices.append(slice(start, stop))
		weights.append(mu.axis_mass(axis, lo[start:stop], hi[start:stop]))
	return max(_contract(f.values[tuple(slices)], weights), 0.0)


def discretize(mu: Measure, lattice: Lattice, method: str = "midpoint") -> LatticeMeasure:
	"""
	Lattice measure approximating ``mu`` on ``lattice``.

	``midpoint`` samples the density at cell midpoints; ``exact`` integrates it
	over each cell.
	"""
	if isinstance(mu, LatticeMeasure) and mu.lattice.same_as(lattice):
		return mu
	if method == "midpoint":
		masses = mu.density(lattice.midpoint_grid()) * lattice.cell_volume
	elif method == "exact":
		masses = mu.cell_masses(lattice)
	else:
		raise InvalidParameterError(f"Unknown discretization method {method!r}.")
	return LatticeMeasure(lattice, masses)


def restrict(mu: Measure, cells: CellSet) -> LatticeMeasure:
	"""``mu`` restricted to a finite union of lattice cells."""
	if isinstance(mu, LatticeMeasure):
		mask = transfer(cells.mask, cells.lattice, mu.lattice, fill=False)
		return LatticeMeasure(mu.lattice, np.where(mask, mu.masses, 0.0))
	base = discretize(mu, cells.lattice)
	return LatticeMeasure(cells.lattice, np.where(cells.mask, base.masses, 0.0))
