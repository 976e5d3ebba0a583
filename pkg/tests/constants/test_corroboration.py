import math
from fractions import Fraction

import numpy as np
import pytest

from twoweight.constants.corroboration import (
	corroboration_pair,
	corroboration_ratio,
	corroboration_sweep,
	random_weight_pair,
	sample_functions,
)
from twoweight.constants.families import CubeFamily
from twoweight.constants.testing import TestingOptions
from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import Lebesgue

OPTIONS = TestingOptions(cells=8, grids="none")


@pytest.fixture(scope="module")
def sweep():
	return corroboration_sweep(50, seed=0)


def test_corroboration_ratio_for_lebesgue():
	family = CubeFamily.default(Cube((0,), 2), "1/2")
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 8), (8,)), 1.0)
	report = corroboration_ratio(Lebesgue(1), Lebesgue(1), family, [f], 2, window=Cube((-1,), 3), options=OPTIONS)

	assert report["a2"] == pytest.approx(1.0)
	assert report["parental"] == pytest.approx(1.0)
	assert report["norm"] >= 1.0 - 1e-12
	assert report["ratio"] == pytest.approx(report["norm"] / (report["parental"] + math.sqrt(report["a2"])))
	assert math.isfinite(report["ratio"])


def test_random_pairs_stay_small():
	rng = np.random.default_rng(3)
	for _ in range(10):
		sigma, omega = random_weight_pair(rng)
		assert sigma.lattice == omega.lattice
		assert 8 <= sigma.lattice.shape[0] <= 64
		assert sigma.lattice.upper == (Fraction(1),)
	functions = sample_functions(sigma.lattice, rng)
	assert len(functions) == 5
	assert all(f.values.any() for f in functions)
	with pytest.raises(InvalidParameterError):
		random_weight_pair(rng, max_cells=48)


def test_sweep_finds_one_constant_for_fifty_pairs(sweep):
	assert sweep["count"] == 50
	assert sweep["uniform"]
	ratios = [row["ratio"] for row in sweep["rows"]]
	assert all(math.isfinite(r) and r > 0 for r in ratios)
	assert sweep["C"] == max(ratios)
	assert sweep["rows"][sweep["witness"]]["ratio"] == sweep["C"]
	assert all(row["cells"] <= 64 for row in sweep["rows"])


def test_pairs_do_not_depend_on_the_sweep(sweep):
	assert corroboration_pair(7, seed=0) == sweep["rows"][7]
	with pytest.raises(InvalidParameterError):
		corroboration_sweep(0)
