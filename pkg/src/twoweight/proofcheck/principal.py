"""
Principal cubes over the stopping family.

The stopping family keeps the Whitney cubes of the levels
``k = k0 mod (m + m0)``; a cube appearing at several such levels is kept once,
with its largest ``k``. Principal cubes are chosen top-down: the maximal cubes
form the first generation, and below a principal cube ``U`` the maximal cubes
with ``A_Q > eta A_U`` start the next one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.grids import ShiftedGrid
from twoweight.geometry.literal import format_cube
from twoweight.geometry.rational import RationalLike, as_rational
from twoweight.proofcheck.levels import MAX_WITNESSES, LevelCube, LevelSets


@dataclass
class ForestNode:
	cube: Cube
	k: Optional[int]
	average: float
	mass: float
	parent: Optional[int] = None
	principal: Optional[int] = None
	principal_parent: Optional[int] = None
	generation: Optional[int] = None

	@property
	def is_principal(self) -> bool:
		return self.generation is not None


@dataclass
class PrincipalForest:
	nodes: list[ForestNode]
	eta: Fraction
	grid: Optional[ShiftedGrid] = None
	children: dict[int, list[int]] = field(default_factory=dict, repr=False)

	@property
	def principal(self) -> list[int]:
		return [i for i, node in enumerate(self.nodes) if node.is_principal]

	def generations(self) -> dict[int, list[int]]:
		out: dict[int, list[int]] = {}
		for i in self.principal:
			out.setdefault(self.nodes[i].generation, []).append(i)
		return dict(sorted(out.items()))

	def chain(self, i: int, stop: int) -> list[int]:
		"""Tree path from ``i`` up to and including ``stop``."""
		path = [i]
		while path[-1] != stop:
			parent = self.nodes[path[-1]].parent
			if parent is None:
				raise InvalidParameterError(f"Cube {i} does not lie below cube {stop}.")
			path.append(parent)
		return path

	def verify(self) -> dict:
		"""
		(i) ``A_Q <= eta A_P(Q)`` for every cube, (ii) ``A_U > eta A_U'`` for every
		principal ``U`` below the principal ``U'``, and ``P(Q)`` is the smallest
		principal cube containing ``Q``.
		"""
		eta = float(self.eta)
		stopping = []
		growth = []
		smallest = []
		principal = self.principal
		for i, node in enumerate(self.nodes):
			owner = self.nodes[node.principal]
			if not node.is_principal and not node.average <= eta * owner.average:
				stopping.append(i)
			if node.is_principal and node.principal_parent is not None:
				if not node.average > eta * self.nodes[node.principal_parent].average:
					growth.append(i)
			containing = [j for j in principal if self.nodes[j].cube.contains(node.cube)]
			best = min(containing, key=lambda j: self.nodes[j].cube.side)
			if best != node.principal:
				smallest.append(i)
		return {
			"passed": not (stopping or growth or smallest),
			"stopping": not stopping,
			"growth": not growth,
			"smallest": not smallest,
			"witnesses": [format_cube(self.nodes[i].cube) for i in (stopping + growth + smallest)[:MAX_WITNESSES]],
		}

	def energy(self, f_norm2: float) -> Optional[float]:
		"""``sum_U A_U^2 |U|_sigma / ||f||^2`` over the principal cubes."""
		if f_norm2 <= 0:
			return None
		return sum(self.nodes[i].average ** 2 * self.nodes[i].mass for i in self.principal) / f_norm2

	def to_dict(self) -> dict:
		return {
			"cubes": len(self.nodes),
			"principal": len(self.principal),
			"generations": {str(g): len(ids) for g, ids in self.generations().items()},
		}


def stopping_family(sets: LevelSets) -> list[LevelCube]:
	"""Cubes of the stopping levels, each cube once with its largest ``k``."""
	kept: dict[Cube, LevelCube] = {}
	for level in sets.cubes:
		if not sets.params.in_stopping_family(level.k):
			continue
		current = kept.get(level.cube)
		if current is None or level.k > current.k:
			kept[level.cube] = level
	return list(kept.values())


def build_principal_cubes(
	cubes: Sequence[Cube],
	averages: Sequence[float],
	eta: RationalLike,
	masses: Optional[Sequence[float]] = None,
	ks: Optional[Sequence[int]] = None,
	grid: Optional[ShiftedGrid] = None,
) -> PrincipalForest:
	"""
	Principal cubes of a nested-or-disjoint family. Cubes are visited by
	decreasing side, so every ancestor is settled before its descendants.
	"""
	eta = as_rational(eta)
	if eta <= 1:
		raise InvalidParameterError(f"eta must exceed 1, got {eta}.")
	if len(set(cubes)) != len(cubes):
		raise InvalidParameterError("Principal cubes need a family without repeated cubes.")
	nodes = [
		ForestNode(
			cube,
			None if ks is None else int(ks[i]),
			float(averages[i]),
			0.0 if masses is None else float(masses[i]),
		)
		for i, cube in enumerate(cubes)
	]
	order = sorted(range(len(nodes)), key=lambda i: (-nodes[i].cube.side, nodes[i].cube))
	children: dict[int, list[int]] = {}
	settled: list[int] = []
	for i in order:
		node = nodes[i]
		above = [j for j in settled if nodes[j].cube.side > node.cube.side and nodes[j].cube.contains(node.cube)]
		if above:
			node.parent = min(above, key=lambda j: nodes[j].cube.side)
			children.setdefault(node.parent, []).append(i)
		owners = [j for j in above if nodes[j].is_principal]
		if not owners:
			node.generation = 0
			node.principal = i
		else:
			owner = min(owners, key=lambda j: nodes[j].cube.side)
			if node.average > float(eta) * nodes[owner].average:
				node.generation = nodes[owner].generation + 1
				node.principal = i
				node.principal_parent = owner
			else:
				node.principal = owner
		settled.append(i)
	return PrincipalForest(nodes, eta, grid, children)


def principal_forest(sets: LevelSets, sigma_masses: bool = True) -> PrincipalForest:
	"""The forest of one grid's stopping family."""
	family = stopping_family(sets)
	return build_principal_cubes(
		[c.cube for c in family],
		[c.average for c in family],
		sets.params.eta,
		masses=[c.cube_mass for c in family] if sigma_masses else None,
		ks=[c.k for c in family],
		grid=sets.grid,
	)
