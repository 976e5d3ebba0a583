"""
Parental packing below principal cubes.

A stopping cube ``Q`` is *doubling* when ``min_P |P|_sigma <= D |Q|_sigma`` over
its ``2^n`` parents. Below a principal cube ``U`` the cubes whose whole tree
path up to ``U`` is non-doubling pack: their total mass is at most
``2 |U|_sigma`` once ``D`` is twice the overlap of the grid parents of sibling
stopping cubes.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

import numpy as np

from twoweight.constants.testing import parent_min_masses
from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import cube_bounds
from twoweight.geometry.grids import grid_parent
from twoweight.geometry.literal import format_cube
from twoweight.geometry.rational import RationalLike, as_rational, format_rational
from twoweight.measures.lattice import Lattice
from twoweight.measures.measure import Measure
from twoweight.proofcheck.linearization import RELATIVE_SLACK
from twoweight.proofcheck.levels import MAX_WITNESSES
from twoweight.proofcheck.principal import PrincipalForest


def parent_overlap(forest: PrincipalForest, lattice: Lattice) -> int:
	"""
	Largest pointwise multiplicity of the grid parents of the tree children of
	any one stopping cube, painted on ``lattice``.
	"""
	if forest.grid is None:
		raise InvalidParameterError("Parent overlap needs the grid of the stopping family.")
	worst = 0
	for kids in forest.children.values():
		counts = np.zeros(lattice.shape, dtype=np.int64)
		for i in kids:
			counts[lattice.slices(grid_parent(forest.grid, forest.nodes[i].cube))] += 1
		worst = max(worst, int(counts.max()))
	return worst


def doubling_flags(forest: PrincipalForest, sigma: Measure, D: RationalLike) -> np.ndarray:
	if not forest.nodes:
		return np.zeros(0, dtype=bool)
	lower, upper = cube_bounds([node.cube for node in forest.nodes])
	masses = np.array([node.mass for node in forest.nodes])
	return parent_min_masses(sigma, lower, upper) <= float(as_rational(D)) * masses


def check_parental_packing(
	forest: PrincipalForest,
	sigma: Measure,
	lattice: Lattice,
	D: Optional[RationalLike] = None,
	C_W: int = 1,
) -> dict:
	"""
	``sum |Q|_sigma <= 2 |U|_sigma`` over the non-doubling chains below every
	principal ``U``. ``D`` defaults to ``2 max(C_W, overlap, 1)``.
	"""
	overlap = parent_overlap(forest, lattice) if forest.nodes else 0
	derived = D is None
	D = Fraction(2 * max(int(C_W), overlap, 1)) if derived else as_rational(D)
	if D <= 1:
		raise InvalidParameterError(f"D must exceed 1, got {D}.")
	doubling = doubling_flags(forest, sigma, D)
	rows = []
	for u in forest.principal:
		members = [i for i, node in enumerate(forest.nodes) if node.principal == u]
		chained = []
		first_doubling = 0
		for i in members:
			path = forest.chain(i, u)
			if not any(doubling[j] for j in path):
				chained.append(i)
			elif doubling[i] and not any(doubling[j] for j in path[1:]):
				first_doubling += 1
		packed = sum(forest.nodes[i].mass for i in chained)
		mass_u = forest.nodes[u].mass
		rows.append({
			"cube": format_cube(forest.nodes[u].cube),
			"packed": packed,
			"mass": mass_u,
			"theta": packed / mass_u if mass_u > 0 else None,
			"non_doubling": len(chained),
			"maximal_doubling": first_doubling,
			"passed": packed <= 2 * mass_u * (1 + RELATIVE_SLACK),
		})
	failed = [r for r in rows if not r["passed"]]
	return {
		"passed": not failed,
		"D": format_rational(D),
		"D_derived": derived,
		"parent_overlap": overlap,
		"principal_checked": len(rows),
		"doubling_cubes": int(doubling.sum()),
		"max_theta": max((r["theta"] for r in rows if r["theta"] is not None), default=None),
		"witnesses": failed[:MAX_WITNESSES],
	}
