"""
Maximal operators by finite candidate families.

``M_alpha(f mu)(x) = sup |Q|^{alpha/n - 1} int_Q f dmu`` over cubes ``Q``
containing ``x``; ``alpha = 0`` is the Hardy-Littlewood maximal function.
Candidates are

* cubes with corners on the resolution lattice (aligned to ``f``'s origin)
  and side ``s * res`` up to a side cap fixed by the support and window;
* cubes of the shifted dyadic grids between the cell level and the cap level.

Every candidate is an honest cube containing the point, so the returned
values are lower bounds of the true supremum that grow when ``res`` shrinks.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.ndimage import maximum_filter

from twoweight.errors import DegenerateInputError, InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.grids import ShiftedGrid, all_shifted_grids, containing_cube
from twoweight.geometry.rational import RationalLike, as_rational, as_vector, ceil_log2, floor_log2, pow2
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import Measure
from twoweight.operators.fields import OperatorField, evaluation_lattice
from twoweight.operators.masstable import MassTable

GridChoice = Union[str, Sequence[ShiftedGrid], None]


def _check_alpha(alpha: float, dim: int, strict: bool) -> float:
	alpha = float(alpha)
	low_ok = alpha > 0 if strict else alpha >= 0
	if not (low_ok and alpha < dim):
		bound = "(0, n)" if strict else "[0, n)"
		raise InvalidParameterError(f"alpha={alpha} outside {bound} for n={dim}.")
	return alpha


def _resolve_grids(grids: GridChoice, dim: int) -> list[ShiftedGrid]:
	if grids is None or grids == "none":
		return []
	if grids == "all":
		return all_shifted_grids(dim)
	if grids == "standard":
		return [ShiftedGrid.standard(dim)]
	return list(grids)


def side_cap(f: LatticeFunction, lower: Sequence[Fraction], upper: Sequence[Fraction]) -> Fraction:
	"""
	Largest candidate side: a power of two at least twice the extent of the
	hull of ``f``'s lattice and the box ``[lower, upper)``.
	"""
	lo = [min(a, b) for a, b in zip(f.lattice.origin, lower)]
	hi = [max(a, b) for a, b in zip(f.lattice.upper, upper)]
	extent = max(h - l for l, h in zip(lo, hi))
	return pow2(ceil_log2(extent) + 1)


def dyadic_levels(f: LatticeFunction, res: Fraction, cap: Fraction) -> range:
	"""Grid levels from the finest cell scale up to one level above the cap."""
	j_min = floor_log2(min(f.lattice.h, as_rational(res)))
	j_max = ceil_log2(cap) + 1
	return range(j_min, j_max + 1)


def _window_cap(f: LatticeFunction, window: Optional[Cube]) -> Fraction:
	if window is None:
		return side_cap(f, f.lattice.origin, f.lattice.upper)
	return side_cap(f, window.corner, window.upper)


def _max_cells(cap: Fraction, res: Fraction, max_side: Optional[RationalLike]) -> int:
	if max_side is not None:
		cap = min(cap, as_rational(max_side))
	cells = math.floor(cap / res)
	if cells < 1:
		raise DegenerateInputError(f"No candidate cubes: side cap {cap} is below the resolution {res}.")
	return cells


def _lattice_candidates(table: MassTable, lattice: Lattice, exponent: float, max_cells: int) -> np.ndarray:
	"""Trailing-window sup over lattice-cornered cubes, evaluated per cell."""
	dim = lattice.dim
	res = float(lattice.h)
	S = max_cells
	axis_points = [
		float(lattice.origin[axis]) + res * np.arange(-S + 1, lattice.shape[axis] + S, dtype=np.float64)
		for axis in range(dim)
	]
	cumulative = table.grid_cumulative(axis_points)
	keep = tuple(slice(S - 1, S - 1 + n_cells) for n_cells in lattice.shape)
	best = np.zeros(lattice.shape, dtype=np.float64)
	for s in range(1, S + 1):
		sums = cumulative
		for axis in range(dim):
			upper = [slice(None)] * dim
			lower = [slice(None)] * dim
			upper[axis] = slice(s, None)
			lower[axis] = slice(None, -s)
			sums = sums[tuple(upper)] - sums[tuple(lower)]
		averages = np.maximum(sums, 0.0) / (s * res) ** exponent
		window_max = maximum_filter(
			averages,
			size=s,
			origin=s // 2 - s + 1,
			mode="constant",
			cval=-np.inf,
		)
		best = np.maximum(best, window_max[keep])
	return best


def _midpoint_levels(lattice: Lattice, axis: int, shift: Fraction, scale: Fraction) -> np.ndarray:
	"""Exact ``floor((midpoint - shift) / scale)`` for every cell along ``axis``."""
	a = (lattice.origin[axis] - shift) / scale
	b = lattice.h / (2 * scale)
	den = math.lcm(a.denominator, b.denominator)
	odd = 2 * np.arange(lattice.shape[axis], dtype=np.int64) + 1
	a_num = a.numerator * (den // a.denominator)
	b_num = b.numerator * (den // b.denominator)
	bound = abs(a_num) + abs(b_num) * int(odd[-1])
	if bound < 2**62:
		return np.floor_divide(a_num + b_num * odd, den)
	return np.array([(a_num + b_num * int(k)) // den for k in odd], dtype=np.int64)


def grid_level_sums(
	table: MassTable,
	lattice: Lattice,
	grid: ShiftedGrid,
	j: int,
) -> tuple[np.ndarray, list[np.ndarray], list[int], list[np.ndarray]]:
	"""
	Integrals over the level-``j`` grid cubes meeting the lattice midpoints.

	Returns ``(sums, indices, first, breakpoints)``: ``sums`` is indexed by grid
	cube relative to ``first``, ``indices[axis]`` maps every cell to its cube.
	"""
	grid.check_level(j)
	scale = pow2(j)
	shift = grid.shift(j)
	indices = []
	first = []
	breakpoints = []
	for axis in range(lattice.dim):
		k = _midpoint_levels(lattice, axis, shift[axis], scale)
		k_lo, k_hi = int(k.min()), int(k.max())
		indices.append(k - k_lo)
		first.append(k_lo)
		breakpoints.append(np.array(
			[float(scale * kk + shift[axis]) for kk in range(k_lo, k_hi + 2)],
			dtype=np.float64,
		))
	sums = table.grid_cumulative(breakpoints)
	for axis in range(lattice.dim):
		sums = np.diff(sums, axis=axis)
	return np.maximum(sums, 0.0), indices, first, breakpoints


def _grid_candidates(
	table: MassTable,
	lattice: Lattice,
	grid: ShiftedGrid,
	levels: range,
	exponent: float,
	denominator: Optional[Measure] = None,
) -> np.ndarray:
	"""Per-cell sup over the grid cubes containing each cell midpoint."""
	best = np.zeros(lattice.shape, dtype=np.float64)
	for j in levels:
		scale = pow2(j)
		sums, indices, _, breakpoints = grid_level_sums(table, lattice, grid, j)
		if denominator is None:
			averages = sums / float(scale) ** exponent
		else:
			edges = np.meshgrid(*(b[:-1] for b in breakpoints), indexing="ij")
			lower = np.stack([e.reshape(-1) for e in edges], axis=1)
			masses = denominator.mass_boxes(lower, lower + float(scale)).reshape(sums.shape)
			averages = np.where(masses > 0, sums / np.where(masses > 0, masses, 1.0), 0.0)
		best = np.maximum(best, averages[np.ix_(*indices)])
	return best


def maximal_field(
	f: LatticeFunction,
	sigma: Measure,
	res: RationalLike,
	window: Optional[Cube] = None,
	alpha: float = 0.0,
	grids: GridChoice = "all",
	max_side: Optional[RationalLike] = None,
	anchor: Optional[Sequence[RationalLike]] = None,
) -> OperatorField:
	"""
	``M_alpha(f sigma)`` at every cell midpoint of the evaluation lattice.

	The lattice has spacing ``res``, is aligned to ``anchor`` (default ``f``'s
	origin) and covers the support of ``f`` and ``window``.
	"""
	alpha = _check_alpha(alpha, f.dim, strict=False)
	res = as_rational(res)
	lattice = evaluation_lattice(f, res, window, anchor)
	cap = _window_cap(f, window)
	table = MassTable.build(f, sigma)
	exponent = f.dim - alpha
	values = _lattice_candidates(table, lattice, exponent, _max_cells(cap, res, max_side))
	grid_list = _resolve_grids(grids, f.dim)
	levels = dyadic_levels(f, res, cap)
	for grid in grid_list:
		values = np.maximum(values, _grid_candidates(table, lattice, grid, levels, exponent))
	return OperatorField(
		lattice,
		values,
		{
			"operator": "M" if alpha == 0 else "M_alpha",
			"alpha": alpha,
			"resolution": str(res),
			"max_side": str(_max_cells(cap, res, max_side) * res),
			"grids": [g.label for g in grid_list],
		},
	)


def maximal(
	f: LatticeFunction,
	sigma: Measure,
	x: Sequence[RationalLike],
	res: RationalLike,
	alpha: float = 0.0,
	grids: GridChoice = "all",
	max_side: Optional[RationalLike] = None,
) -> float:
	"""``M_alpha(f sigma)(x)`` over the candidate family at resolution ``res``."""
	alpha = _check_alpha(alpha, f.dim, strict=False)
	res = as_rational(res)
	x = as_vector(x, dim=f.dim)
	cap = side_cap(f, x, x)
	S = _max_cells(cap, res, max_side)
	table = MassTable.build(f, sigma)
	exponent = f.dim - alpha
	origin = f.lattice.origin
	cell = np.array([math.floor((xi - o) / res) for xi, o in zip(x, origin)], dtype=np.int64)
	base = np.array([float(o) for o in origin])
	step = float(res)
	best = 0.0
	for s in range(1, S + 1):
		offsets = np.array(list(itertools.product(range(s), repeat=f.dim)), dtype=np.int64)
		lower = base + step * (cell[None, :] - offsets)
		sums = table.box_sums(lower, lower + s * step)
		best = max(best, float(sums.max()) / (s * step) ** exponent)
	for grid in _resolve_grids(grids, f.dim):
		best = max(best, dyadic_maximal(grid, f, sigma, x, alpha=alpha, levels=dyadic_levels(f, res, cap)))
	return best


def dyadic_field(
	grid: ShiftedGrid,
	f: LatticeFunction,
	sigma: Measure,
	res: RationalLike,
	window: Optional[Cube] = None,
	alpha: float = 0.0,
	levels: Optional[range] = None,
	anchor: Optional[Sequence[RationalLike]] = None,
) -> OperatorField:
	"""``M^{D^gamma}_alpha(f sigma)`` at the cell midpoints of the evaluation lattice."""
	alpha = _check_alpha(alpha, f.dim, strict=False)
	res = as_rational(res)
	lattice = evaluation_lattice(f, res, window, anchor)
	if levels is None:
		levels = dyadic_levels(f, res, _window_cap(f, window))
	table = MassTable.build(f, sigma)
	values = _grid_candidates(table, lattice, grid, levels, f.dim - alpha)
	return OperatorField(
		lattice,
		values,
		{"operator": "M_dyadic", "grid": grid.label, "alpha": alpha, "resolution": str(res)},
	)


def dyadic_maximal(
	grid: ShiftedGrid,
	f: LatticeFunction,
	sigma: Measure,
	x: Sequence[RationalLike],
	alpha: float = 0.0,
	levels: Optional[range] = None,
) -> float:
	"""Sup of ``|Q|^{alpha/n - 1} int_Q f dsigma`` over grid cubes containing ``x``."""
	alpha = _check_alpha(alpha, f.dim, strict=False)
	x = as_vector(x, dim=f.dim)
	if levels is None:
		levels = dyadic_levels(f, f.lattice.h, side_cap(f, x, x))
	table = MassTable.build(f, sigma)
	exponent = f.dim - alpha
	best = 0.0
	for j in levels:
		cube = containing_cube(grid, x, j)
		best = max(best, table.integral(cube) / float(cube.side) ** exponent)
	return best


def weighted_dyadic_field(
	grid: ShiftedGrid,
	mu: Measure,
	f: LatticeFunction,
	res: RationalLike,
	window: Optional[Cube] = None,
	levels: Optional[range] = None,
	anchor: Optional[Sequence[RationalLike]] = None,
) -> OperatorField:
	"""``M_mu^gamma f``: sup of ``mu``-averages of ``f`` over grid cubes."""
	res = as_rational(res)
	lattice = evaluation_lattice(f, res, window, anchor)
	if levels is None:
		levels = dyadic_levels(f, res, _window_cap(f, window))
	table = MassTable.build(f, mu)
	values = _grid_candidates(table, lattice, grid, levels, 0.0, denominator=mu)
	return OperatorField(
		lattice,
		values,
		{"operator": "M_mu_dyadic", "grid": grid.label, "resolution": str(res)},
	)


def weighted_dyadic_maximal(
	grid: ShiftedGrid,
	mu: Measure,
	f: LatticeFunction,
	x: Sequence[RationalLike],
	levels: Optional[range] = None,
) -> float:
	"""Point value of ``M_mu^gamma f``; grid cubes of zero ``mu``-mass are skipped."""
	x = as_vector(x, dim=f.dim)
	if levels is None:
		levels = dyadic_levels(f, f.lattice.h, side_cap(f, x, x))
	table = MassTable.build(f, mu)
	best = 0.0
	for j in levels:
		cube = containing_cube(grid, x, j)
		denominator = mu.mass(cube)
		if denominator > 0:
			best = max(best, table.integral(cube) / denominator)
	return best


def frac_maximal_field(
	alpha: float,
	f: LatticeFunction,
	mu: Measure,
	res: RationalLike,
	window: Optional[Cube] = None,
	grids: GridChoice = "all",
	max_side: Optional[RationalLike] = None,
) -> OperatorField:
	_check_alpha(alpha, f.dim, strict=True)
	return maximal_field(f, mu, res, window=window, alpha=alpha, grids=grids, max_side=max_side)


def frac_maximal(
	alpha: float,
	f: LatticeFunction,
	mu: Measure,
	x: Sequence[RationalLike],
	res: RationalLike,
	grids: GridChoice = "all",
) -> float:
	_check_alpha(alpha, f.dim, strict=True)
	return maximal(f, mu, x, res, alpha=alpha, grids=grids)


def one_third_constant(
	f: LatticeFunction,
	sigma: Measure,
	res: RationalLike,
	window: Optional[Cube] = None,
) -> float:
	"""
	Largest ratio ``M(f sigma) / sum_gamma M^{D^gamma}(f sigma)`` over the
	evaluation cells, with ``M`` evaluated on lattice-cornered cubes only.
	"""
	res = as_rational(res)
	full = maximal_field(f, sigma, res, window=window, grids="none")
	lattice = full.lattice
	levels = dyadic_levels(f, res, _window_cap(f, window))
	total = np.zeros(lattice.shape, dtype=np.float64)
	for grid in all_shifted_grids(f.dim):
		total += dyadic_field(grid, f, sigma, res, window=window, levels=levels).values
	positive = total > 0
	if not positive.any():
		return 0.0
	return float(np.max(full.values[positive] / total[positive]))
