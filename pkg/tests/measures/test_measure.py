import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoweight.errors import InvalidParameterError, LatticeMismatchError
from twoweight.geometry.cubes import Cube, children
from twoweight.measures.lattice import CellSet, Lattice, LatticeFunction
from twoweight.measures.measure import (
	ExpDensity,
	IndicatorDensity,
	LatticeMeasure,
	Lebesgue,
	cell_weights,
	discretize,
	restrict,
	weighted_integral,
)

corners = st.fractions(min_value=-4, max_value=4, max_denominator=16)
sides = st.fractions(min_value=Fraction(1, 16), max_value=4, max_denominator=16)


def _random_lattice_measure(seed: int = 0) -> LatticeMeasure:
	rng = np.random.default_rng(seed)
	lattice = Lattice((Fraction(-4), Fraction(-4)), Fraction(1, 4), (32, 32))
	return LatticeMeasure(lattice, rng.random(lattice.shape))


def test_exp_density_closed_form():
	sigma = ExpDensity(1, 1)
	assert sigma.mass(Cube((0,), 5)) == pytest.approx(math.expm1(5.0))
	assert sigma.mass(Cube((-1,), 1)) == pytest.approx(1 - math.exp(-1.0))


def test_exp_density_rejects_zero_rate():
	with pytest.raises(InvalidParameterError):
		ExpDensity(1, 0)


def test_indicator_density_is_exact():
	omega = IndicatorDensity((0,), (1,))
	assert omega.mass(Cube((Fraction(-1, 2),), 1)) == 0.5
	assert omega.mass(Cube((2,), 1)) == 0.0
	assert omega.support() == ((Fraction(0),), (Fraction(1),))


def test_lebesgue_mass_is_volume():
	assert Lebesgue(2).mass(Cube((0, 0), Fraction(3, 2))) == 2.25


@settings(max_examples=50, deadline=None)
@given(corners, corners, sides)
def test_lattice_mass_is_additive_over_children(a, b, side):
	mu = _random_lattice_measure()
	q = Cube((a, b), side)
	assert sum(mu.mass(k) for k in children(q)) == pytest.approx(mu.mass(q), rel=1e-9, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(corners, sides)
def test_exp_mass_is_additive_over_children(a, side):
	mu = ExpDensity(1, Fraction(1, 2))
	q = Cube((a,), side)
	assert sum(mu.mass(k) for k in children(q)) == pytest.approx(mu.mass(q), rel=1e-12)


def test_mass_boxes_matches_mass():
	mu = _random_lattice_measure(3)
	cubes = [Cube((Fraction(-3, 8), Fraction(1, 3)), Fraction(5, 4)), Cube((0, 0), 2)]
	lower = np.array([[float(c) for c in q.corner] for q in cubes])
	upper = lower + np.array([[float(q.side)] for q in cubes])
	np.testing.assert_allclose(mu.mass_boxes(lower, upper), [mu.mass(q) for q in cubes], rtol=1e-9)


def test_lattice_measure_validates_masses():
	lattice = Lattice((0,), 1, (3,))
	with pytest.raises(InvalidParameterError):
		LatticeMeasure(lattice, [1.0, -1.0, 0.0])
	with pytest.raises(LatticeMismatchError):
		LatticeMeasure(lattice, [1.0, 1.0])


def test_exact_discretization_preserves_mass():
	lattice = Lattice((0,), Fraction(1, 8), (40,))
	sigma = ExpDensity(1, 1)
	exact = discretize(sigma, lattice, "exact")
	assert exact.total == pytest.approx(math.expm1(5.0))
	midpoint = discretize(sigma, lattice, "midpoint")
	assert midpoint.total == pytest.approx(exact.total, rel=1e-2)
	with pytest.raises(InvalidParameterError):
		discretize(sigma, lattice, "simpson")


def test_weighted_integral_of_indicator_is_mass():
	lattice = Lattice((0,), Fraction(1, 4), (8,))
	f = LatticeFunction.constant(lattice, 2.0)
	sigma = ExpDensity(1, 1)
	q = Cube((Fraction(1, 2),), 1)
	assert weighted_integral(sigma, f, q) == pytest.approx(2.0 * sigma.mass(q))
	assert cell_weights(f, sigma).sum() == pytest.approx(2.0 * sigma.mass(Cube((0,), 2)))


def test_restrict_keeps_only_the_cells():
	lattice = Lattice((0,), 1, (4,))
	mu = LatticeMeasure(lattice, [1.0, 2.0, 3.0, 4.0])
	cells = CellSet(lattice, [False, True, True, False])
	assert restrict(mu, cells).masses.tolist() == [0.0, 2.0, 3.0, 0.0]
	restricted = restrict(Lebesgue(1), cells)
	assert restricted.total == pytest.approx(2.0)
