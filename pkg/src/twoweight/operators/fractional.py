"""
Fractional integrals ``I_alpha(f mu)(x) = int |x - y|^{alpha - n} f(y) dmu(y)``.

Source mass is taken per cell and spread uniformly over the cell. In one
dimension each cell is integrated against the kernel in closed form. In higher
dimensions the kernel is sampled at cell midpoints, except on the evaluation
cell itself, where the cell is replaced by the ball of equal volume and the
radial integral is done in closed form.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy.signal import convolve
from scipy.special import gamma as gamma_fn

from twoweight.errors import InvalidParameterError, SingularCellError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import RationalLike, as_rational, as_vector
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import Measure
from twoweight.measures.prefix import grid_box_sums
from twoweight.operators.fields import OperatorField, evaluation_lattice
from twoweight.operators.masstable import MassTable


def check_alpha(alpha: float, dim: int) -> float:
	alpha = float(alpha)
	if not 0 < alpha < dim:
		raise InvalidParameterError(f"alpha={alpha} outside (0, {dim}).")
	return alpha


def self_cell_kernel(alpha: float, dim: int, h: float) -> float:
	"""Mean of ``|x - y|^{alpha - n}`` over the equal-volume ball around ``x``, times ``h^n``."""
	ball_volume = math.pi ** (dim / 2) / gamma_fn(dim / 2 + 1)
	sphere_area = 2 * math.pi ** (dim / 2) / gamma_fn(dim / 2)
	radius = (h**dim / ball_volume) ** (1.0 / dim)
	return float(sphere_area * radius**alpha / alpha / h**dim)


def kernel_array(alpha: float, lattice: Lattice) -> np.ndarray:
	"""
	Cell-to-cell kernel for offsets ``-(N-1) .. N-1`` along every axis.

	Entry ``d`` is the potential at a cell midpoint produced by unit mass
	spread over the cell at offset ``d``.
	"""
	dim = lattice.dim
	h = float(lattice.h)
	offsets = [np.arange(-(n - 1), n, dtype=np.float64) for n in lattice.shape]
	if dim == 1:
		d = np.abs(offsets[0])
		with np.errstate(invalid="ignore"):
			kernel = ((d + 0.5) ** alpha - np.maximum(d - 0.5, 0.0) ** alpha) / alpha
		kernel[d == 0] = 2 * 0.5**alpha / alpha
		return kernel * h ** (alpha - 1)
	grids = np.meshgrid(*offsets, indexing="ij")
	radius = h * np.sqrt(sum(g**2 for g in grids))
	with np.errstate(divide="ignore"):
		kernel = np.where(radius > 0, radius ** (alpha - dim), 0.0)
	center = tuple(n - 1 for n in lattice.shape)
	kernel[center] = self_cell_kernel(alpha, dim, h)
	return kernel


def cell_integrals(table: MassTable, lattice: Lattice) -> np.ndarray:
	"""``int_cell f dmu`` for every cell of ``lattice``."""
	edges = [lattice.edges(axis) for axis in range(lattice.dim)]
	return grid_box_sums(table.grid_cumulative(edges))


def frac_integral_field(
	alpha: float,
	f: LatticeFunction,
	mu: Measure,
	res: RationalLike,
	window: Optional[Cube] = None,
) -> OperatorField:
	"""``I_alpha(f mu)`` at the cell midpoints of the evaluation lattice."""
	alpha = check_alpha(alpha, f.dim)
	res = as_rational(res)
	lattice = evaluation_lattice(f, res, window)
	table = MassTable.build(f, mu)
	sources = cell_integrals(table, lattice)
	values = convolve(sources, kernel_array(alpha, lattice), mode="same", method="auto")
	return OperatorField(
		lattice,
		np.maximum(values, 0.0),
		{"operator": "I_alpha", "alpha": alpha, "resolution": str(res)},
	)


def _interval_potential(alpha: float, x: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
	"""``int_a^b |x - y|^{alpha - 1} dy`` for every interval ``[a, b)``."""
	left = x <= a
	right = x >= b
	inside = ~(left | right)
	out = np.zeros_like(a)
	out[left] = ((b[left] - x) ** alpha - (a[left] - x) ** alpha) / alpha
	out[right] = ((x - a[right]) ** alpha - (x - b[right]) ** alpha) / alpha
	out[inside] = ((x - a[inside]) ** alpha + (b[inside] - x) ** alpha) / alpha
	return out


def frac_integral(
	alpha: float,
	f: LatticeFunction,
	mu: Measure,
	x: Sequence[RationalLike],
) -> float:
	"""
	Point value of ``I_alpha(f mu)``.

	Raises ``SingularCellError`` in dimension ``n >= 2`` when ``x`` lies inside a
	charged cell away from its midpoint.
	"""
	alpha = check_alpha(alpha, f.dim)
	x = as_vector(x, dim=f.dim)
	lattice = f.lattice
	weights = MassTable.build(f, mu).weights
	h = float(lattice.h)
	if f.dim == 1:
		edges = lattice.edges(0)
		potential = _interval_potential(alpha, float(x[0]), edges[:-1], edges[1:])
		return float(np.sum(weights / h * potential))
	index = lattice.cell_index(x)
	if index is not None and weights[index] > 0:
		midpoint = tuple(o + (i + as_rational("1/2")) * lattice.h for o, i in zip(lattice.origin, index))
		if midpoint != x:
			raise SingularCellError(
				f"Point {tuple(str(v) for v in x)} lies inside a charged cell off its midpoint."
			)
	point = np.array([float(v) for v in x])
	offsets = lattice.midpoint_grid() - point
	radius = np.sqrt(np.sum(offsets**2, axis=-1))
	with np.errstate(divide="ignore"):
		kernel = np.where(radius > 0, radius ** (alpha - f.dim), 0.0)
	total = float(np.sum(weights * kernel))
	if index is not None:
		total += float(weights[index]) * self_cell_kernel(alpha, f.dim, h)
	return total
