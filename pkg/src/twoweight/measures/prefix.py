"""
Prefix-sum tables over lattice cells.

The table answers box queries ``sum over cells of weight * fraction of the cell
inside the box`` in ``O(2^n)`` per box. Inside a cell the fraction along each
axis is either linear (proportional overlap) or given by a measure's own
cumulative distribution, so closed-form weights stay exact inside cells.
"""
from __future__ import annotations

import itertools
from typing import Callable, Optional, Sequence

import numpy as np

from twoweight.errors import LatticeMismatchError
from twoweight.measures.lattice import Lattice

AxisFraction = Callable[[int, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class PrefixTable:
	"""
	Summed-area table of per-cell weights.

	Parameters
	----------
	lattice : Lattice
		Lattice the weights live on.
	weights : numpy.ndarray
		Nonnegative weight per cell, shape ``lattice.shape``.
	fraction : callable, optional
		``fraction(axis, t, lo, hi)`` giving the share of a cell's weight below
		coordinate ``t`` for cells spanning ``[lo, hi)`` along ``axis``.
		Defaults to the linear share ``(t - lo) / (hi - lo)``.
	"""

	def __init__(
		self,
		lattice: Lattice,
		weights: np.ndarray,
		fraction: Optional[AxisFraction] = None,
	) -> None:
		weights = np.asarray(weights, dtype=np.float64)
		if weights.shape != lattice.shape:
			raise LatticeMismatchError(
				f"Weight shape {weights.shape} does not match lattice shape {lattice.shape}."
			)
		self.lattice = lattice
		self.weights = weights
		self._fraction = fraction
		table = weights
		for axis in range(lattice.dim):
			table = np.cumsum(table, axis=axis)
		self.table = np.pad(table, [(1, 0)] * lattice.dim)
		self._origin = np.array([float(o) for o in lattice.origin])
		self._h = float(lattice.h)

	@property
	def total(self) -> float:
		return float(self.table[(-1,) * self.lattice.dim])

	def _axis_position(self, axis: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
		count = self.lattice.shape[axis]
		u = (np.asarray(t, dtype=np.float64) - self._origin[axis]) / self._h
		idx = np.floor(u).astype(np.int64)
		inside = (idx >= 0) & (idx < count)
		idx = np.clip(idx, 0, count)
		theta = np.zeros_like(u)
		if np.any(inside):
			if self._fraction is None:
				theta[inside] = u[inside] - idx[inside]
			else:
				lo = self._origin[axis] + self._h * idx[inside]
				theta[inside] = self._fraction(axis, np.asarray(t, dtype=np.float64)[inside], lo, lo + self._h)
		theta = np.clip(theta, 0.0, 1.0)
		idx = np.where(np.asarray(u) >= count, count, idx)
		return idx, theta

	def cumulative(self, points: np.ndarray) -> np.ndarray:
		"""Weight of the orthant below each point, ``points`` of shape ``(m, n)``."""
		points = np.atleast_2d(np.asarray(points, dtype=np.float64))
		positions = [self._axis_position(axis, points[:, axis]) for axis in range(self.lattice.dim)]
		out = np.zeros(points.shape[0], dtype=np.float64)
		for eps in itertools.product((0, 1), repeat=self.lattice.dim):
			index = []
			weight = np.ones(points.shape[0], dtype=np.float64)
			for axis, e in enumerate(eps):
				idx, theta = positions[axis]
				index.append(np.minimum(idx + e, self.lattice.shape[axis]))
				weight = weight * (theta if e else 1.0 - theta)
			out += weight * self.table[tuple(index)]
		return out

	def box_sums(self, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
		"""Weight inside each half-open box ``[lower, upper)``."""
		lower = np.atleast_2d(np.asarray(lower, dtype=np.float64))
		upper = np.atleast_2d(np.asarray(upper, dtype=np.float64))
		dim = self.lattice.dim
		out = np.zeros(lower.shape[0], dtype=np.float64)
		for pick in itertools.product((0, 1), repeat=dim):
			corner = np.where(np.array(pick, dtype=bool)[None, :], upper, lower)
			sign = -1.0 if (dim - sum(pick)) % 2 else 1.0
			out += sign * self.cumulative(corner)
		return np.maximum(out, 0.0)

	def grid_cumulative(self, axis_points: Sequence[np.ndarray]) -> np.ndarray:
		"""Cumulative weight on the tensor grid spanned by ``axis_points``."""
		positions = [self._axis_position(axis, np.asarray(p, dtype=np.float64)) for axis, p in enumerate(axis_points)]
		shape = tuple(len(p) for p in axis_points)
		out = np.zeros(shape, dtype=np.float64)
		for eps in itertools.product((0, 1), repeat=self.lattice.dim):
			index = []
			weight = np.ones(shape, dtype=np.float64)
			for axis, e in enumerate(eps):
				idx, theta = positions[axis]
				index.append(np.minimum(idx + e, self.lattice.shape[axis]))
				factor = theta if e else 1.0 - theta
				expand = [1] * self.lattice.dim
				expand[axis] = len(factor)
				weight = weight * factor.reshape(expand)
			out += weight * self.table[np.ix_(*index)]
		return out


def grid_box_sums(cumulative: np.ndarray) -> np.ndarray:
	"""Per-box sums from cumulative values at consecutive breakpoints along every axis."""
	out = cumulative
	for axis in range(cumulative.ndim):
		out = np.diff(out, axis=axis)
	return np.maximum(out, 0.0)
