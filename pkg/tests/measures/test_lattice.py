from fractions import Fraction

import numpy as np
import pytest

from twoweight.errors import InvalidParameterError, LatticeMismatchError, ResolutionError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import CellSet, Lattice, LatticeFunction, transfer
from twoweight.measures.prefix import PrefixTable, grid_box_sums


def test_covering_lattice_is_anchored():
	lattice = Lattice.covering((Fraction(-1, 3),), (Fraction(5, 3),), Fraction(1, 2))
	assert lattice.origin == (Fraction(-1, 2),)
	assert lattice.upper == (Fraction(2),)
	assert lattice.shape == (5,)


def test_cell_index_and_cube():
	lattice = Lattice((0, 0), Fraction(1, 4), (4, 4))
	assert lattice.cell_index((Fraction(1, 3), Fraction(3, 4))) == (1, 3)
	assert lattice.cell_index((1, 0)) is None
	assert lattice.cell_cube((1, 3)) == Cube((Fraction(1, 4), Fraction(3, 4)), Fraction(1, 4))


def test_slices_need_aligned_cubes():
	lattice = Lattice((0,), Fraction(1, 4), (8,))
	assert lattice.slices(Cube((Fraction(1, 2),), 1)) == (slice(2, 6),)
	assert lattice.slices(Cube((Fraction(-1, 2),), 1)) == (slice(0, 2),)
	with pytest.raises(ResolutionError):
		lattice.slices(Cube((Fraction(1, 3),), 1))


def test_transfer_copies_the_overlap():
	source = Lattice((1,), 1, (3,))
	target = Lattice((0,), 1, (3,))
	assert transfer(np.array([1.0, 2.0, 3.0]), source, target).tolist() == [0.0, 1.0, 2.0]
	with pytest.raises(LatticeMismatchError):
		transfer(np.ones(3), Lattice((Fraction(1, 2),), 1, (3,)), target)


def test_cell_set_algebra():
	lattice = Lattice((0,), 1, (4,))
	a = CellSet(lattice, [True, True, False, False])
	b = CellSet(lattice, [False, True, True, False])
	assert (a | b).count == 3
	assert (a & b).count == 1
	assert (a - b).mask.tolist() == [True, False, False, False]
	assert a.complement().count == 2
	assert (a & b).issubset(a)
	assert not CellSet.empty(lattice).mask.any()
	assert CellSet.full(lattice).is_full()


def test_lattice_function_validation_and_restrict():
	lattice = Lattice((0,), 1, (3,))
	with pytest.raises(InvalidParameterError):
		LatticeFunction(lattice, [1.0, -1.0, 0.0])
	f = LatticeFunction(lattice, [1.0, 2.0, 3.0])
	g = f.restrict(CellSet(lattice, [True, False, True]))
	assert g.values.tolist() == [1.0, 0.0, 3.0]
	assert not g.is_zero()
	assert f.support().count == 3


def test_prefix_table_box_sums_proportional_overlap():
	lattice = Lattice((0, 0), 1, (2, 2))
	table = PrefixTable(lattice, np.array([[1.0, 2.0], [3.0, 4.0]]))
	assert table.total == pytest.approx(10.0)
	sums = table.box_sums(np.array([[0.5, 0.0]]), np.array([[1.5, 1.0]]))
	assert sums[0] == pytest.approx(0.5 * 1.0 + 0.5 * 3.0)


def test_grid_box_sums_recovers_cells():
	lattice = Lattice((0,), 1, (4,))
	weights = np.array([1.0, 0.0, 2.0, 5.0])
	table = PrefixTable(lattice, weights)
	cumulative = table.grid_cumulative([np.arange(5, dtype=np.float64)])
	np.testing.assert_allclose(grid_box_sums(cumulative), weights)
