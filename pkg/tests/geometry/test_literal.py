from fractions import Fraction

import pytest

from twoweight.errors import InvalidCubeError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.literal import format_cube, format_point, parse_cube, parse_point


def test_parse_one_and_two_dimensional_cubes():
	assert parse_cube("[0,1)") == Cube((0,), 1)
	assert parse_cube("[-1/2, 1/2) x [1/3,4/3)") == Cube((Fraction(-1, 2), Fraction(1, 3)), 1)


def test_decimal_coordinates_are_exact():
	assert parse_cube("[0.25,0.75)") == Cube((Fraction(1, 4),), Fraction(1, 2))


def test_format_uses_fractions_and_round_trips():
	cube = Cube((Fraction(-2, 3), 5), Fraction(7, 4))
	text = format_cube(cube)
	assert text == "[-2/3,13/12)x[5,27/4)"
	assert parse_cube(text) == cube


@pytest.mark.parametrize("text", ["[0,1]", "(0,1)", "[0,1)x[0,2)", "[a,1)"])
def test_malformed_literals_raise(text):
	with pytest.raises(InvalidCubeError):
		parse_cube(text)


def test_points():
	point = parse_point("1/2,-3")
	assert point == (Fraction(1, 2), Fraction(-3))
	assert format_point(point) == "1/2,-3"
