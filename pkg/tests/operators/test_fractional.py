import math
from fractions import Fraction

import pytest

from twoweight.errors import InvalidParameterError, SingularCellError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import Lebesgue
from twoweight.operators.fractional import check_alpha, frac_integral, frac_integral_field


def test_one_dimensional_potential_closed_form():
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 8), (8,)), 1.0)
	value = frac_integral(0.5, f, Lebesgue(1), (2,))
	assert value == pytest.approx(2 * (math.sqrt(2) - 1), rel=1e-12)


def test_field_agrees_with_point_values_at_midpoints():
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 8), (8,)), 1.0)
	field = frac_integral_field(0.5, f, Lebesgue(1), "1/8", window=Cube((0,), 2))
	for x in (Fraction(1, 16), Fraction(25, 16)):
		assert field.at((x,)) == pytest.approx(frac_integral(0.5, f, Lebesgue(1), (x,)), rel=1e-8)


def test_off_midpoint_point_in_charged_cell_is_singular():
	f = LatticeFunction.constant(Lattice((0, 0), Fraction(1, 2), (2, 2)), 1.0)
	with pytest.raises(SingularCellError):
		frac_integral(1.0, f, Lebesgue(2), (Fraction(1, 8), Fraction(1, 8)))
	assert frac_integral(1.0, f, Lebesgue(2), (Fraction(1, 4), Fraction(1, 4))) > 0


def test_alpha_must_lie_inside_the_dimension():
	with pytest.raises(InvalidParameterError):
		check_alpha(0.0, 1)
	with pytest.raises(InvalidParameterError):
		check_alpha(2.0, 2)
