from fractions import Fraction

import pytest

from twoweight.errors import ResolutionError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import Lebesgue
from twoweight.operators.fields import OperatorField
from twoweight.whitney.decompose import WhitneyConfig
from twoweight.whitney.superlevel import level_range, superlevel_families, superlevel_field, superlevel_whitney
from twoweight.whitney.verify import verify_nested, verify_whitney


@pytest.fixture(scope="module")
def bump_field():
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 16), (16,)), 1.0)
	return superlevel_field(Lebesgue(1), f, WhitneyConfig(), "1/16", window=Cube((-8,), 16), grids="standard")


def test_field_lives_on_grid_cells(bump_field):
	assert bump_field.lattice.origin == (Fraction(-8),)
	assert bump_field.lattice.shape == (256,)


def test_superlevel_families_verify_and_nest(bump_field):
	families = superlevel_families(bump_field, WhitneyConfig(), [-2, -1])
	assert sorted(families) == [-2, -1]
	for k, family in families.items():
		assert family.k == k
		assert len(family) > 0
		report = verify_whitney(family)
		assert report.interior_passed, report.violations
		assert report.passed == (report.n_floor == 0)
	nested = verify_nested(families)
	assert nested["nested"]
	assert nested["compatible"]


def test_level_range_counts_down_from_the_top():
	field = OperatorField(Lattice((0,), 1, (2,)), [3.0, 0.5])
	assert list(level_range(field, 3)) == [-1, 0, 1]
	assert list(level_range(OperatorField(Lattice((0,), 1, (2,)), [0.0, 0.0]), 3)) == []


def test_superlevel_touching_the_edge_warns():
	field = OperatorField(Lattice((0,), Fraction(1, 4), (8,)), [4.0] * 2 + [0.0] * 6)
	with pytest.warns(RuntimeWarning):
		superlevel_families(field, WhitneyConfig(), [0])


def test_non_dyadic_resolution_is_rejected():
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 3), (3,)), 1.0)
	with pytest.raises(ResolutionError):
		superlevel_field(Lebesgue(1), f, WhitneyConfig(), "1/3")


def test_superlevel_whitney_matches_field_families(bump_field):
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 16), (16,)), 1.0)
	direct = superlevel_whitney(
		Lebesgue(1), f, WhitneyConfig(), [-1], "1/16", window=Cube((-8,), 16), grids="standard"
	)
	expected = superlevel_families(bump_field, WhitneyConfig(), [-1])
	assert direct[-1].cubes == expected[-1].cubes
