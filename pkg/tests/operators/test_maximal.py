from fractions import Fraction

import numpy as np
import pytest

from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.grids import ShiftedGrid
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import ExpDensity, Lebesgue
from twoweight.operators import evaluate_field
from twoweight.operators.masstable import MassTable
from twoweight.operators.maximal import (
	dyadic_maximal,
	frac_maximal,
	maximal,
	maximal_field,
	one_third_constant,
	weighted_dyadic_field,
	weighted_dyadic_maximal,
)


@pytest.fixture
def unit_bump():
	lattice = Lattice((0,), Fraction(1, 8), (8,))
	return LatticeFunction.constant(lattice, 1.0)


def test_mass_table_integral_matches_measure(unit_bump):
	sigma = ExpDensity(1, 1)
	table = MassTable.build(unit_bump, sigma)
	q = Cube((Fraction(1, 3),), Fraction(1, 2))
	assert table.integral(q) == pytest.approx(sigma.mass(q), rel=1e-9)
	assert table.integrals([]).size == 0


def test_maximal_inside_support_is_one(unit_bump):
	field = maximal_field(unit_bump, Lebesgue(1), "1/8", grids="none")
	assert field.at((Fraction(1, 2),)) == pytest.approx(1.0)
	assert field.max == pytest.approx(1.0)
	assert field.provenance["operator"] == "M"


def test_maximal_far_point_bounds(unit_bump):
	value = maximal(unit_bump, Lebesgue(1), (2,), "1/16")
	assert 16 / 33 - 1e-12 <= value <= 0.5 + 1e-12


def test_maximal_is_at_least_every_dyadic_maximal(unit_bump):
	x = (Fraction(5, 4),)
	total = maximal(unit_bump, Lebesgue(1), x, "1/8")
	for gamma in (0, Fraction(1, 3)):
		grid = ShiftedGrid((gamma,))
		assert dyadic_maximal(grid, unit_bump, Lebesgue(1), x) <= total + 1e-12


def test_weighted_dyadic_average_of_constant(unit_bump):
	grid = ShiftedGrid.standard(1)
	value = weighted_dyadic_maximal(grid, ExpDensity(1, 1), unit_bump, (Fraction(1, 2),))
	assert value == pytest.approx(1.0)


def test_alpha_range_is_checked(unit_bump):
	with pytest.raises(InvalidParameterError):
		maximal(unit_bump, Lebesgue(1), (0,), "1/8", alpha=1.0)
	with pytest.raises(InvalidParameterError):
		evaluate_field("M_alpha", unit_bump, Lebesgue(1), "1/8")
	with pytest.raises(InvalidParameterError):
		evaluate_field("Hilbert", unit_bump, Lebesgue(1), "1/8")


def test_fractional_maximal_scales_average(unit_bump):
	field = evaluate_field("M_alpha", unit_bump, Lebesgue(1), "1/8", alpha=0.5, grids="none")
	assert np.all(field.values >= 0)
	assert field.provenance["operator"] == "M_alpha"


def test_one_third_constant_is_positive(unit_bump):
	assert one_third_constant(unit_bump, Lebesgue(1), "1/8", Cube((-1,), 4)) > 0


def test_frac_maximal_on_the_support(unit_bump):
	value = frac_maximal(0.5, unit_bump, Lebesgue(1), (Fraction(1, 2),), "1/8", grids="none")
	assert value == pytest.approx(1.0)
	with pytest.raises(InvalidParameterError):
		frac_maximal(0.0, unit_bump, Lebesgue(1), (Fraction(1, 2),), "1/8")


def test_weighted_dyadic_field_of_constant(unit_bump):
	grid = ShiftedGrid.standard(1)
	field = weighted_dyadic_field(grid, Lebesgue(1), unit_bump, "1/8", window=Cube((0,), 1))
	assert field.lattice.shape == (8,)
	assert field.values == pytest.approx(np.ones(8))
	assert field.provenance["operator"] == "M_mu_dyadic"
