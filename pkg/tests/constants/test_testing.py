import math
from fractions import Fraction

import pytest

from twoweight.constants.families import CubeFamily
from twoweight.constants.testing import (
	TestingOptions,
	a2,
	a2_alpha,
	check_variant_implications,
	norm_lower_bound,
	testing_quotient,
	testing_table,
	weak_norm_lower_bound,
)
from twoweight.constants.variants import Variant
from twoweight.errors import DegenerateInputError, InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import ExpDensity, IndicatorDensity, Lebesgue

OPTIONS = TestingOptions(cells=8, grids="none")


@pytest.fixture(scope="module")
def family():
	return CubeFamily.default(Cube((0,), 2), "1/2")


@pytest.fixture(scope="module")
def lebesgue_table(family):
	return testing_table("M", Lebesgue(1), Lebesgue(1), family, options=OPTIONS)


def test_default_family_sides(family):
	assert len(family) == 8
	assert family.max_side() == 2


def test_a2_of_lebesgue_pair_is_one(family):
	report = a2(Lebesgue(1), Lebesgue(1), family)
	assert report.value == pytest.approx(1.0)
	assert report.family_size == 8


def test_a2_alpha_is_attained_on_the_largest_cube(family):
	report = a2_alpha(0.5, Lebesgue(1), Lebesgue(1), family)
	assert report.value == pytest.approx(2.0)
	assert report.witness == Cube((0,), 2)
	with pytest.raises(InvalidParameterError):
		a2_alpha(1.0, Lebesgue(1), Lebesgue(1), family)


def test_a2_keeps_an_overflowing_product_as_its_maximum():
	small, huge = Cube((0,), 1), Cube((0,), 800)
	report = a2(ExpDensity(1, 1), Lebesgue(1), CubeFamily.explicit([small, huge]))
	assert report.value == math.inf
	assert report.witness == huge
	assert "infinite" in report.flags


def test_a2_of_a_single_overflowing_cube():
	report = a2(ExpDensity(1, 1), Lebesgue(1), CubeFamily.explicit([Cube((0,), 800)]))
	assert report.value == math.inf
	assert report.witness == Cube((0,), 800)
	assert report.to_dict()["witness"] == "[0,800)"


@pytest.mark.parametrize(
	"text, expected",
	[
		("plain", 1.0),
		("parental", 0.5),
		("lambda(3)", 1 / 3),
		("d_parental(2)", 1.0),
		("d_lambda(3, 27)", 1.0),
	],
)
def test_maximal_testing_on_lebesgue(lebesgue_table, text, expected):
	report = lebesgue_table.constant(Variant.parse(text))
	assert report.squared == pytest.approx(expected, rel=1e-9)
	assert report.constant == "T_M"


def test_d_lambda_excludes_cubes_with_heavy_dilations(lebesgue_table):
	report = lebesgue_table.constant(Variant("d_lambda", lam=3, D=2))
	assert report.admissible_size == 0
	assert report.flags == ["no-admissible-cubes"]


def test_variant_implications_hold(lebesgue_table):
	result = check_variant_implications(lebesgue_table, 3, 27)
	assert result["passed"]
	assert result["checks"]["d_lambda_within_d_parental"] is True


def test_null_cube_is_not_admissible():
	sigma = IndicatorDensity((0,), (1,))
	assert testing_quotient("M", sigma, Lebesgue(1), Cube((2,), 1), options=OPTIONS) == -math.inf


def test_operator_needs_alpha(family):
	with pytest.raises(InvalidParameterError):
		testing_table("I_alpha", Lebesgue(1), Lebesgue(1), family, options=OPTIONS)


def test_testing_options_validation():
	with pytest.raises(InvalidParameterError):
		TestingOptions(domain="ball")
	with pytest.raises(InvalidParameterError):
		TestingOptions(domain="window")
	assert TestingOptions(dilation="5/2").dilation == Fraction(5, 2)


def test_norm_lower_bounds_on_an_indicator():
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 8), (8,)), 1.0)
	window = Cube((-1,), 3)
	strong = norm_lower_bound("M", Lebesgue(1), Lebesgue(1), [f], window=window, grids="none")
	assert strong.value >= 1.0 - 1e-12
	assert strong.witness_function == 0
	weak = weak_norm_lower_bound("M", Lebesgue(1), Lebesgue(1), [f], [0.5], window=window, grids="none")
	assert weak.squared >= 0.25 - 1e-12
	with pytest.raises(DegenerateInputError):
		norm_lower_bound("M", Lebesgue(1), Lebesgue(1), [])
	with pytest.raises(InvalidParameterError):
		weak_norm_lower_bound("M", Lebesgue(1), Lebesgue(1), [f], [0.0])
