"""
Corroboration of the maximal-function norm bound on random lattice weight pairs.

For each pair the strong norm lower bound ``N_M`` is compared with
``P_M^D + sqrt(A2)``, the ``d_parental`` testing constant plus the square
root of the Muckenhoupt constant. Both terms are on the scale of an operator
norm. A single ``C`` dominating every ratio is what a finite sweep can show.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from twoweight.constants.families import CubeFamily
from twoweight.constants.testing import TestingOptions, a2, norm_lower_bound, testing_constant
from twoweight.constants.variants import Variant
from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import RationalLike, as_rational, floor_log2, format_rational, pow2
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import LatticeMeasure, Measure
from twoweight.sweeps import argmax_smallest, parallel_map

DEFAULT_PAIRS = 50
MAX_CELLS = 64
MIN_CELLS = 8
UNIT = Cube((Fraction(0),), Fraction(1))
NORM_WINDOW = Cube((Fraction(-1),), Fraction(3))


def corroboration_ratio(
	sigma: Measure,
	omega: Measure,
	family: CubeFamily,
	functions: Sequence[LatticeFunction],
	D: RationalLike,
	window: Optional[Cube] = None,
	options: TestingOptions = TestingOptions(),
) -> dict:
	"""``N_M / (P_M^D + sqrt(A2))`` for one weight pair, with its ingredients."""
	norm = norm_lower_bound("M", sigma, omega, functions, window=window, grids=options.grids)
	parental = testing_constant("M", sigma, omega, family, Variant("d_parental", D=D), options=options)
	muckenhoupt = a2(sigma, omega, family)
	bound = parental.value + math.sqrt(muckenhoupt.value)
	return {
		"norm": norm.value,
		"parental": parental.value,
		"a2": muckenhoupt.value,
		"ratio": norm.value / bound if bound > 0 else math.inf,
	}


def _check_cells(max_cells: int) -> int:
	max_cells = int(max_cells)
	if max_cells < MIN_CELLS or pow2(floor_log2(Fraction(max_cells))) != max_cells:
		raise InvalidParameterError(f"max_cells must be a power of two of at least {MIN_CELLS}, got {max_cells}.")
	return max_cells


def random_weight_pair(rng: np.random.Generator, max_cells: int = MAX_CELLS) -> tuple[LatticeMeasure, LatticeMeasure]:
	"""Lognormal cell densities on ``[0, 1)`` with a random dyadic cell count."""
	top = floor_log2(Fraction(_check_cells(max_cells)))
	cells = 2 ** int(rng.integers(floor_log2(Fraction(MIN_CELLS)), top + 1))
	lattice = Lattice((Fraction(0),), Fraction(1, cells), (cells,))
	sigma = LatticeMeasure(lattice, rng.lognormal(0.0, 1.0, cells) / cells)
	omega = LatticeMeasure(lattice, rng.lognormal(0.0, 1.0, cells) / cells)
	return sigma, omega


def sample_functions(lattice: Lattice, rng: np.random.Generator, count: int = 2) -> list[LatticeFunction]:
	"""``1``, the indicators of both halves and ``count`` sparse random functions."""
	half = lattice.shape[0] // 2
	functions = [LatticeFunction.constant(lattice)]
	for start in (0, half):
		values = np.zeros(lattice.shape)
		values[start:start + half] = 1.0
		functions.append(LatticeFunction(lattice, values))
	for _ in range(int(count)):
		values = rng.random(lattice.shape) * (rng.random(lattice.shape) < 0.5)
		if not values.any():
			values[0] = 1.0
		functions.append(LatticeFunction(lattice, values))
	return functions


def corroboration_pair(
	index: int,
	seed: int = 0,
	D: RationalLike = 2,
	max_cells: int = MAX_CELLS,
	options: TestingOptions = TestingOptions(cells=8),
) -> dict:
	"""Ratio of one seeded pair; the stream depends on ``(seed, index)`` only."""
	rng = np.random.default_rng([int(seed), int(index)])
	sigma, omega = random_weight_pair(rng, max_cells)
	lattice = sigma.lattice
	family = CubeFamily.dyadic(UNIT, floor_log2(lattice.h), 0)
	row = corroboration_ratio(sigma, omega, family, sample_functions(lattice, rng), D, NORM_WINDOW, options)
	return {"index": int(index), "cells": lattice.shape[0], **row}


def corroboration_sweep(
	count: int = DEFAULT_PAIRS,
	seed: int = 0,
	D: RationalLike = 2,
	max_cells: int = MAX_CELLS,
	options: TestingOptions = TestingOptions(cells=8),
	n_jobs: int = 1,
	progress: bool = False,
) -> dict:
	"""``C = max N_M / (P_M^D + sqrt(A2))`` over ``count`` seeded pairs."""
	if int(count) <= 0:
		raise InvalidParameterError("count must be positive.")
	_check_cells(max_cells)
	D = as_rational(D)
	rows = parallel_map(
		lambda index: corroboration_pair(index, seed, D, max_cells, options),
		list(range(int(count))),
		n_jobs=n_jobs,
		progress=progress,
		desc="corroboration",
	)
	ratios = [row["ratio"] for row in rows]
	worst = argmax_smallest(ratios, [row["index"] for row in rows])
	C = None if worst is None else float(ratios[worst])
	return {
		"count": len(rows),
		"seed": int(seed),
		"D": format_rational(D),
		"max_cells": int(max_cells),
		"C": C,
		"witness": worst,
		"uniform": C is not None and math.isfinite(C),
		"rows": rows,
	}
