"""
Level cubes of the maximal-function argument.

For one grid ``gamma`` every field lives on the lattice ``L`` of the window
whose cells are finest-level cubes of that grid. ``Omega_k = {M(f sigma) > 2^k}``
is decomposed into Whitney cubes ``Q``, and each cube carries

* ``E = Q ∩ {M^gamma(f sigma) > 2^(k+m)} \\ Omega_(k+m+m0)``;
* ``H = {M^gamma(1_Q f sigma) > 2^(k+m-1)}`` together with ``H_in`` and
  ``H_out``, the superlevel sets at ``2^(k+m-2)`` of the parts of ``1_Q f``
  inside and outside ``Omega_(k+m+m0)``;
* the case label ``pi1`` / ``pi2`` / ``pi3``.

The ``H`` sets are only built for cubes with a nonempty ``E``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from twoweight.errors import ExhaustivenessError, LatticeMismatchError
from twoweight.geometry.cubes import Cube, dilate
from twoweight.geometry.grids import ShiftedGrid
from twoweight.geometry.literal import format_cube
from twoweight.geometry.rational import ceil_log2, floor_log2
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.operators.fields import OperatorField
from twoweight.operators.masstable import MassTable
from twoweight.operators.maximal import dyadic_field, maximal_field, side_cap
from twoweight.proofcheck.instance import ProofInstance
from twoweight.proofcheck.params import ProofParams
from twoweight.sweeps import parallel_map
from twoweight.whitney.decompose import WhitneyConfig, WhitneyFamily
from twoweight.whitney.superlevel import superlevel_families

CASES = ("pi1", "pi2", "pi3")
MAX_DEPTH = 16
MAX_WITNESSES = 5


def owner_indices(source: Lattice, target: Lattice) -> list[np.ndarray]:
	"""Per axis, the ``target`` cell holding each ``source`` cell."""
	ratio = target.h / source.h
	if ratio.denominator != 1:
		raise LatticeMismatchError(f"Cells of size {source.h} do not nest in cells of size {target.h}.")
	owners = []
	for axis in range(source.dim):
		offset = (source.origin[axis] - target.origin[axis]) / source.h
		if offset.denominator != 1:
			raise LatticeMismatchError("Source cells straddle target cells.")
		index = (int(offset) + np.arange(source.shape[axis], dtype=np.int64)) // int(ratio)
		if index.min() < 0 or index.max() >= target.shape[axis]:
			raise LatticeMismatchError("Source lattice leaves the target lattice.")
		owners.append(index)
	return owners


def pull_mask(mask: np.ndarray, owners: list[np.ndarray]) -> np.ndarray:
	"""A cell mask of the target lattice read on the source cells."""
	return mask[np.ix_(*owners)]


def boundary_max(values: OperatorField) -> float:
	"""Largest field value on the outer layer of cells."""
	best = 0.0
	for axis in range(values.values.ndim):
		best = max(best, float(np.take(values.values, 0, axis=axis).max()))
		best = max(best, float(np.take(values.values, -1, axis=axis).max()))
	return best


def level_range_for(full: OperatorField, params: ProofParams, depth: int = MAX_DEPTH) -> range:
	"""
	Levels ``k`` whose superlevel set is nonempty and stays off the outer cells,
	at most ``depth`` of them counted from the top.
	"""
	top = full.max
	if top <= 0:
		return range(0)
	k_hi = math.ceil(math.log2(top)) - 1
	edge = boundary_max(full)
	k_lo = math.ceil(math.log2(edge)) if edge > 0 else k_hi - int(depth) + 1
	k_lo = max(k_lo, k_hi - int(depth) + 1)
	if params.k_floor is not None:
		k_lo = max(k_lo, params.k_floor)
	return range(k_lo, k_hi + 1)


@dataclass
class LevelCube:
	k: int
	index: int
	cube: Cube
	floor: bool
	average: float
	cube_mass: float
	E: np.ndarray = field(repr=False)
	E_mass: float
	triple_mass: float
	H: Optional[np.ndarray] = field(default=None, repr=False)
	H_in: Optional[np.ndarray] = field(default=None, repr=False)
	H_out: Optional[np.ndarray] = field(default=None, repr=False)
	E_in_mass: float = 0.0
	E_out_mass: float = 0.0
	local_min: Optional[float] = None
	local_field: Optional[np.ndarray] = field(default=None, repr=False)
	out_field: Optional[np.ndarray] = field(default=None, repr=False)
	f_out: Optional[LatticeFunction] = field(default=None, repr=False)
	case: Optional[str] = None

	@property
	def has_E(self) -> bool:
		return bool(self.E.any())

	def to_dict(self) -> dict:
		return {
			"k": self.k,
			"cube": format_cube(self.cube),
			"floor": self.floor,
			"average": self.average,
			"E_cells": int(self.E.sum()),
			"E_mass": self.E_mass,
			"triple_mass": self.triple_mass,
			"E_in_mass": self.E_in_mass,
			"E_out_mass": self.E_out_mass,
			"local_min": self.local_min,
			"case": self.case,
		}


@dataclass
class LevelSets:
	grid: ShiftedGrid
	lattice: Lattice
	levels: range
	k_range: range
	params: ProofParams
	full: OperatorField = field(repr=False)
	dyadic: OperatorField = field(repr=False)
	omega_cells: np.ndarray = field(repr=False)
	families: dict[int, WhitneyFamily] = field(repr=False)
	cubes: list[LevelCube] = field(repr=False)

	def by_case(self, case: Optional[str]) -> list[LevelCube]:
		return [c for c in self.cubes if c.case == case]

	@property
	def unclassified(self) -> list[LevelCube]:
		return self.by_case(None)

	def case_counts(self) -> dict:
		counts = {case: len(self.by_case(case)) for case in CASES}
		counts["unclassified"] = len(self.unclassified)
		return counts


def shared_levels(instance: ProofInstance) -> range:
	"""Grid levels of every dyadic field: the cell level up to one above the cap."""
	cap = side_cap(instance.f, instance.window.corner, instance.window.upper)
	return range(floor_log2(instance.res), ceil_log2(cap) + 2)


def classify(cube: LevelCube, params: ProofParams) -> Optional[str]:
	"""Case label of one cube; ``None`` when neither half of ``E`` dominates."""
	if cube.E_mass == 0 or cube.E_mass < float(params.beta) * cube.triple_mass:
		return "pi1"
	if cube.E_out_mass >= 0.5 * cube.E_mass:
		return "pi2"
	if cube.E_in_mass >= 0.5 * cube.E_mass:
		return "pi3"
	return None


def build_level_sets(
	instance: ProofInstance,
	grid: ShiftedGrid,
	params: ProofParams,
	n_jobs: int = 1,
	progress: bool = False,
	strict: bool = True,
) -> LevelSets:
	"""
	Whitney cubes of every ``Omega_k`` for ``grid`` with their ``E`` and ``H``
	sets and case labels. With ``strict`` an unlabelled cube raises
	:class:`ExhaustivenessError`.
	"""
	f, sigma, omega = instance.f, instance.sigma, instance.omega
	lattice = instance.lattice(grid)
	owners = owner_indices(f.lattice, lattice)
	levels = shared_levels(instance)
	anchor = lattice.origin
	full = maximal_field(f, sigma, instance.res, window=instance.window, grids="all", anchor=anchor)
	full.lattice.require_same(lattice, "level-set fields")
	dyadic = dyadic_field(grid, f, sigma, instance.res, window=instance.window, levels=levels, anchor=anchor)
	k_range = level_range_for(full, params)
	config = WhitneyConfig(instance.whitney.R_W, instance.whitney.N, grid)
	families = superlevel_families(full, config, k_range, n_jobs=n_jobs, progress=progress)
	omega_cells = omega.cell_masses(lattice)
	table = MassTable.build(f, sigma)
	m, m0 = params.m, params.m0

	def local_dyadic(values: np.ndarray) -> np.ndarray:
		g = LatticeFunction(f.lattice, values)
		return dyadic_field(
			grid, g, sigma, instance.res, window=instance.window, levels=levels, anchor=anchor
		).values

	def build(item: tuple[int, int]) -> LevelCube:
		k, i = item
		family = families[k]
		cube = family.cubes[i]
		in_cube = np.zeros(lattice.shape, dtype=bool)
		in_cube[lattice.slices(cube)] = True
		top = full.values > 2.0 ** (k + m + m0)
		E = in_cube & (dyadic.values > 2.0 ** (k + m)) & ~top
		cube_mass = sigma.mass(cube)
		level = LevelCube(
			k=k,
			index=i,
			cube=cube,
			floor=family.floor[i],
			average=table.integral(cube) / cube_mass if cube_mass > 0 else 0.0,
			cube_mass=cube_mass,
			E=E,
			E_mass=float(omega_cells[E].sum()),
			triple_mass=omega.mass(dilate(cube, 3)),
		)
		if E.any():
			on_f = pull_mask(in_cube, owners)
			top_f = pull_mask(top, owners)
			local = local_dyadic(f.values * on_f)
			inner = local_dyadic(f.values * (on_f & top_f))
			out_values = f.values * (on_f & ~top_f)
			outer = local_dyadic(out_values)
			level.local_field = local
			level.out_field = outer
			level.f_out = LatticeFunction(f.lattice, out_values)
			level.H = local > 2.0 ** (k + m - 1)
			level.H_in = inner > 2.0 ** (k + m - 2)
			level.H_out = outer > 2.0 ** (k + m - 2)
			level.E_in_mass = float(omega_cells[E & level.H_in].sum())
			level.E_out_mass = float(omega_cells[E & level.H_out].sum())
			level.local_min = float(local[E].min()) / 2.0 ** (k + m - 1)
		level.case = classify(level, params)
		return level

	items = [(k, i) for k in k_range for i in range(len(families[k]))]
	cubes = parallel_map(build, items, n_jobs=n_jobs, progress=progress, desc=f"level sets {grid.label}")
	sets = LevelSets(grid, lattice, levels, k_range, params, full, dyadic, omega_cells, families, cubes)
	if strict and sets.unclassified:
		bad = sets.unclassified[0]
		raise ExhaustivenessError(
			f"Cube {format_cube(bad.cube)} at k={bad.k} is in none of the three cases: "
			f"|E|={bad.E_mass}, |E ∩ H_in|={bad.E_in_mass}, |E ∩ H_out|={bad.E_out_mass}."
		)
	return sets


def check_max_principle_maximal(sets: LevelSets) -> dict:
	"""``M^gamma(1_Q f sigma) > 2^(k+m-1)`` on every cell of every ``E``."""
	checked = [c for c in sets.cubes if c.has_E]
	violations = [c for c in checked if c.local_min is None or not c.local_min > 1.0]
	worst = min((c.local_min for c in checked if c.local_min is not None), default=None)
	return {
		"passed": not violations,
		"cubes_checked": len(checked),
		"cells_checked": int(sum(int(c.E.sum()) for c in checked)),
		"worst_margin": worst,
		"violations": len(violations),
		"witnesses": [
			{"k": c.k, "cube": format_cube(c.cube), "margin": c.local_min}
			for c in sorted(violations, key=lambda c: (c.local_min or 0.0))[:MAX_WITNESSES]
		],
	}


def check_h_cover(sets: LevelSets) -> dict:
	"""``H ⊂ H_in ∪ H_out`` for every cube carrying ``H`` sets."""
	bad = [
		c for c in sets.cubes
		if c.H is not None and np.any(c.H & ~(c.H_in | c.H_out))
	]
	return {
		"passed": not bad,
		"cubes_checked": sum(1 for c in sets.cubes if c.H is not None),
		"witnesses": [{"k": c.k, "cube": format_cube(c.cube)} for c in bad[:MAX_WITNESSES]],
	}


def check_exhaustive(sets: LevelSets) -> dict:
	return {
		"passed": not sets.unclassified,
		"counts": sets.case_counts(),
		"witnesses": [
			{"k": c.k, "cube": format_cube(c.cube), "E_mass": c.E_mass}
			for c in sets.unclassified[:MAX_WITNESSES]
		],
	}


def pi3_energy(sets: LevelSets, f_norm2: float) -> dict:
	"""``sum_{pi3} 2^(2k) |E|_omega`` relative to ``||f||^2``."""
	total = sum(4.0**c.k * c.E_mass for c in sets.by_case("pi3"))
	ratio = total / f_norm2 if f_norm2 > 0 else None
	return {
		"passed": ratio is None or math.isfinite(ratio),
		"sum": total,
		"ratio": ratio,
		"cubes": len(sets.by_case("pi3")),
	}
