"""
Linearizations of dyadic maximal functions on a set ``H``.

``L(h mu)(x) = sum_l avg_{I_l}(h dmu) 1_{I_l}(x)`` over the maximal grid cubes
``I_l`` of ``H``; the average is taken against Lebesgue measure, like the
dyadic maximal function it linearizes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from twoweight.constants.families import CubeFamily
from twoweight.constants.testing import a2
from twoweight.errors import NoMaximalCubeError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.grids import ShiftedGrid
from twoweight.geometry.literal import format_cube
from twoweight.measures.lattice import CellSet, Lattice, LatticeFunction
from twoweight.measures.measure import Measure
from twoweight.operators.masstable import MassTable
from twoweight.proofcheck.levels import MAX_WITNESSES, LevelSets
from twoweight.whitney.decompose import maximal_grid_cubes

RELATIVE_SLACK = 1e-9


@dataclass(frozen=True)
class Linearization:
	grid: ShiftedGrid
	lattice: Lattice
	cubes: tuple[Cube, ...]
	levels: tuple[int, ...]
	covered: np.ndarray = field(compare=False, repr=False)

	@classmethod
	def geometric(cls, H: CellSet, grid: ShiftedGrid) -> "Linearization":
		"""Maximal grid cubes contained in ``H``."""
		if H.is_full():
			raise NoMaximalCubeError("The set fills the whole window; it has no maximal grid cubes.")
		cubes, levels, covered = maximal_grid_cubes(H, grid, 1)
		return cls(grid, H.lattice, tuple(cubes), tuple(levels), covered)

	def __len__(self) -> int:
		return len(self.cubes)

	def averages(self, h: LatticeFunction, mu: Measure) -> np.ndarray:
		if not self.cubes:
			return np.zeros(0)
		volumes = np.array([float(q.volume) for q in self.cubes])
		return MassTable.build(h, mu).integrals(list(self.cubes)) / volumes

	def evaluate(self, h: LatticeFunction, mu: Measure) -> np.ndarray:
		"""``L(h mu)`` on every lattice cell."""
		out = np.zeros(self.lattice.shape, dtype=np.float64)
		for cube, value in zip(self.cubes, self.averages(h, mu)):
			out[self.lattice.slices(cube)] = value
		return out

	def is_disjoint(self) -> bool:
		return not any(a.intersects(b) for a, b in itertools.combinations(self.cubes, 2))


def build_linearization(H: CellSet, grid: ShiftedGrid) -> Linearization:
	"""Linearization over the maximal ``grid`` cubes of ``H``; a full ``H`` has none."""
	return Linearization.geometric(H, grid)


def check_linearization_comparability(sets: LevelSets, sigma: Measure) -> dict:
	"""
	On every ``H_out``: ``L > 2^(k+m-2)`` and ``L <= M^gamma`` cellwise, with the
	largest observed ``L / 2^(k+m-2)`` recorded.
	"""
	lower_ok = True
	dominated = True
	disjoint = True
	upper = 0.0
	checked = 0
	witnesses = []
	for level in sets.cubes:
		if level.H_out is None or not level.H_out.any():
			continue
		checked += 1
		threshold = 2.0 ** (level.k + sets.params.m - 2)
		try:
			lin = build_linearization(CellSet(sets.lattice, level.H_out), sets.grid)
		except NoMaximalCubeError:
			lower_ok = False
			witnesses.append({"k": level.k, "cube": format_cube(level.cube), "reason": "no-maximal-cube"})
			continue
		values = lin.evaluate(level.f_out, sigma)
		on_h = values[level.H_out]
		ok = bool(np.all(on_h > threshold))
		below = bool(np.all(values <= level.out_field * (1 + RELATIVE_SLACK) + 1e-300))
		disjoint = disjoint and lin.is_disjoint()
		upper = max(upper, float(on_h.max()) / threshold)
		if not (ok and below):
			witnesses.append({
				"k": level.k,
				"cube": format_cube(level.cube),
				"lower_bound": ok,
				"dominated": below,
			})
		lower_ok = lower_ok and ok
		dominated = dominated and below
	return {
		"passed": lower_ok and dominated and disjoint,
		"lower_bound": lower_ok,
		"dominated": dominated,
		"disjoint": disjoint,
		"upper_ratio": upper if checked else None,
		"cubes_checked": checked,
		"witnesses": witnesses[:MAX_WITNESSES],
	}


def check_a2ljk(
	cube: Cube,
	lin: Linearization,
	sigma: Measure,
	omega: Measure,
	a2_value: Optional[float] = None,
) -> dict:
	"""
	``int_Q L(1_Q omega)^2 dsigma <= sum_l A2(I_l) |I_l ∩ Q|_omega <= A2 |Q|_omega``
	with ``A2`` taken over the cubes ``I_l``; grid cubes nest so ``I_l ∩ Q`` is
	``I_l``, ``Q`` or empty.
	"""
	lhs = 0.0
	middle = 0.0
	for piece in lin.cubes:
		if cube.contains(piece):
			common = piece
		elif piece.contains(cube):
			common = cube
		else:
			continue
		volume = float(piece.volume)
		w_common = omega.mass(common)
		lhs += (w_common / volume) ** 2 * sigma.mass(common)
		middle += omega.mass(piece) * sigma.mass(piece) / volume**2 * w_common
	if a2_value is None:
		a2_value = a2(sigma, omega, CubeFamily.explicit(lin.cubes)).value if lin.cubes else 0.0
	rhs = a2_value * omega.mass(cube)
	passed = lhs <= middle * (1 + RELATIVE_SLACK) and middle <= rhs * (1 + RELATIVE_SLACK)
	return {
		"cube": format_cube(cube),
		"lhs": lhs,
		"middle": middle,
		"rhs": rhs,
		"a2": a2_value,
		"slack": (rhs - lhs) / rhs if rhs > 0 else (0.0 if lhs == 0 else -math.inf),
		"passed": bool(passed),
	}


def a2ljk_suite(sets: LevelSets, sigma: Measure, omega: Measure) -> dict:
	"""The ``A2`` bound for every cube whose ``H_out`` is nonempty."""
	rows = []
	for level in sets.cubes:
		if level.H_out is None or not level.H_out.any():
			continue
		try:
			lin = build_linearization(CellSet(sets.lattice, level.H_out), sets.grid)
		except NoMaximalCubeError:
			continue
		row = check_a2ljk(level.cube, lin, sigma, omega)
		row["k"] = level.k
		rows.append(row)
	failed = [r for r in rows if not r["passed"]]
	return {
		"passed": not failed,
		"cubes_checked": len(rows),
		"min_slack": min((r["slack"] for r in rows), default=None),
		"witnesses": failed[:MAX_WITNESSES],
	}
