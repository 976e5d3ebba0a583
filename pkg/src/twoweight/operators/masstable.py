"""Prefix tables of ``f * mu`` used by every operator evaluation."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from twoweight.errors import LatticeMismatchError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import LatticeFunction
from twoweight.measures.measure import LatticeMeasure, Measure, cell_weights
from twoweight.measures.prefix import PrefixTable


class MassTable(PrefixTable):
	"""
	Box integrals ``int_box f dmu`` for a lattice function ``f``.

	Lattice measures on a compatible lattice are carried over cell by cell.
	Lattice measures on any other lattice are first redistributed onto ``f``'s
	cells by proportional overlap.
	"""

	@classmethod
	def build(cls, f: LatticeFunction, mu: Measure) -> "MassTable":
		try:
			weights = cell_weights(f, mu)
		except LatticeMismatchError:
			if not isinstance(mu, LatticeMeasure):
				raise
			weights = f.values * mu.cell_masses(f.lattice)
		table = cls(f.lattice, weights, mu.prefix_fraction())
		table.function = f
		table.measure = mu
		return table

	def integral(self, cube: Cube) -> float:
		lower = cube.lower_float()[None, :]
		upper = cube.upper_float()[None, :]
		return float(self.box_sums(lower, upper)[0])

	def integrals(self, cubes: Sequence[Cube]) -> np.ndarray:
		if not cubes:
			return np.zeros(0)
		lower = np.array([q.lower_float() for q in cubes])
		upper = np.array([q.upper_float() for q in cubes])
		return self.box_sums(lower, upper)
