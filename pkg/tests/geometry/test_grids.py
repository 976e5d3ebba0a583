from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoweight.errors import InvalidParameterError, ScaleRangeError
from twoweight.geometry.cubes import Cube, dilate
from twoweight.geometry.grids import (
	ShiftedGrid,
	all_shifted_grids,
	containing_chain,
	containing_cube,
	cover_cube,
	grid_cube,
	grid_parent,
	is_grid_cube,
	iter_level_cubes,
)

thirds = st.sampled_from([Fraction(0), Fraction(1, 3), Fraction(2, 3)])
levels = st.integers(min_value=-6, max_value=6)
indices = st.integers(min_value=-40, max_value=40)


def test_there_are_three_to_the_n_grids_standard_first():
	grids = all_shifted_grids(2)
	assert len(grids) == 9
	assert grids[0] == ShiftedGrid.standard(2)


def test_grid_rejects_bad_shift():
	with pytest.raises(InvalidParameterError):
		ShiftedGrid((Fraction(1, 2),))


def test_levels_beyond_scale_bound_are_rejected():
	grid = ShiftedGrid((Fraction(0),), scale_bound=4)
	with pytest.raises(ScaleRangeError):
		grid_cube(grid, 5, (0,))


@settings(max_examples=80, deadline=None)
@given(thirds, levels, indices)
def test_grid_parent_contains_its_child(gamma, j, k):
	grid = ShiftedGrid((gamma,))
	q = grid_cube(grid, j, (k,))
	parent = grid_parent(grid, q)
	assert parent.side == 2 * q.side
	assert parent.contains(q)
	assert is_grid_cube(grid, parent)


@settings(max_examples=80, deadline=None)
@given(thirds, levels, indices, levels, indices)
def test_two_cubes_of_one_grid_are_nested_or_disjoint(gamma, j1, k1, j2, k2):
	grid = ShiftedGrid((gamma,))
	a = grid_cube(grid, j1, (k1,))
	b = grid_cube(grid, j2, (k2,))
	assert a.contains(b) or b.contains(a) or not a.intersects(b)


def test_containing_chain_is_increasing():
	grid = ShiftedGrid((Fraction(1, 3), Fraction(2, 3)))
	chain = containing_chain(grid, (Fraction(1, 5), Fraction(-3, 7)), -3, 3)
	for small, big in zip(chain, chain[1:]):
		assert big.contains(small)
	assert all(q.contains_point((Fraction(1, 5), Fraction(-3, 7))) for q in chain)


@settings(max_examples=60, deadline=None)
@given(
	st.fractions(min_value=-8, max_value=8, max_denominator=32),
	st.fractions(min_value=Fraction(1, 32), max_value=4, max_denominator=32),
)
def test_every_cube_sits_inside_nine_tenths_of_a_grid_cube(a, side):
	cube = Cube((a,), side)
	result = cover_cube(cube)
	assert dilate(result.cube, Fraction(9, 10)).contains(cube)
	assert is_grid_cube(result.grid, result.cube)
	assert result.ratio == result.cube.side / side


def test_iter_level_cubes_tiles_the_window():
	window = Cube((0,), 4)
	cubes = list(iter_level_cubes(ShiftedGrid.standard(1), window, 0))
	assert [q.corner[0] for q in cubes] == [0, 1, 2, 3]
	assert containing_cube(ShiftedGrid.standard(1), (Fraction(5, 2),), 0) == cubes[2]
