from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoweight.errors import InvalidCubeError, InvalidDilationError
from twoweight.geometry.cubes import Cube, bounding_cube, children, cube_bounds, dilate, parents
from twoweight.geometry.rational import as_rational, ceil_log2, floor_log2, format_rational, pow2

rationals = st.fractions(min_value=-64, max_value=64, max_denominator=64)
sides = st.fractions(min_value=Fraction(1, 64), max_value=32, max_denominator=64)
factors = st.fractions(min_value=Fraction(1, 8), max_value=16, max_denominator=16)


def test_cube_rejects_non_positive_side():
	with pytest.raises(InvalidCubeError):
		Cube((0,), 0)
	with pytest.raises(InvalidCubeError):
		Cube((0, 0), -1)


def test_cube_rejects_bad_bounds():
	with pytest.raises(InvalidCubeError):
		Cube.from_bounds((0, 0), (1, 2))


def test_contains_and_intersects_are_half_open():
	q = Cube((0,), 1)
	assert q.contains_point((0,))
	assert not q.contains_point((1,))
	assert not q.intersects(Cube((1,), 1))
	assert q.intersects(Cube((Fraction(1, 2),), 1))
	assert Cube((0,), 2).contains(q)
	assert not q.contains(Cube((0,), 2))


def test_dilate_keeps_center():
	q = Cube((Fraction(1, 3), 2), Fraction(1, 2))
	big = dilate(q, 3)
	assert big.center == q.center
	assert big.side == Fraction(3, 2)


def test_dilate_rejects_non_positive_factor():
	with pytest.raises(InvalidDilationError):
		dilate(Cube((0,), 1), 0)


@settings(max_examples=60, deadline=None)
@given(rationals, rationals, sides, factors)
def test_dilation_round_trip_is_exact(a, b, side, factor):
	q = Cube((a, b), side)
	assert dilate(dilate(q, factor), 1 / factor) == q


@settings(max_examples=60, deadline=None)
@given(rationals, sides)
def test_children_partition_the_cube(a, side):
	q = Cube((a, a), side)
	kids = children(q)
	assert len(kids) == 4
	assert sum(k.volume for k in kids) == q.volume
	assert all(q.contains(k) for k in kids)
	for i, k in enumerate(kids):
		for other in kids[i + 1:]:
			assert not k.intersects(other)


@settings(max_examples=60, deadline=None)
@given(rationals, sides)
def test_every_parent_contains_the_cube(a, side):
	q = Cube((a,), side)
	for p in parents(q):
		assert p.contains(q)
		assert p.side == 2 * side


def test_overlap_volume_and_bounding_cube():
	a = Cube((0, 0), 2)
	b = Cube((1, 1), 2)
	assert a.overlap_volume(b) == 1
	assert a.overlap_volume(Cube((5, 5), 1)) == 0
	box = bounding_cube([a, b])
	assert box.corner == (0, 0)
	assert box.side == 3


def test_cube_bounds_shapes():
	lower, upper = cube_bounds([Cube((0, 1), 1), Cube((2, 3), Fraction(1, 2))])
	assert lower.shape == (2, 2)
	assert upper[1].tolist() == [2.5, 3.5]


def test_rational_helpers():
	assert as_rational("0.4") == Fraction(2, 5)
	assert as_rational(0.5) == Fraction(1, 2)
	assert format_rational(Fraction(-3, 4)) == "-3/4"
	assert as_rational(format_rational(Fraction(7, 3))) == Fraction(7, 3)
	assert floor_log2(Fraction(3, 16)) == -3
	assert ceil_log2(Fraction(3, 16)) == -2
	assert pow2(-2) == Fraction(1, 4)
	with pytest.raises(TypeError):
		as_rational(True)
