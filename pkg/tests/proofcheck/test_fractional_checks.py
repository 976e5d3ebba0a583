import warnings
from fractions import Fraction

import numpy as np
import pytest

from twoweight.errors import DegenerateInputError, InvalidParameterError
from twoweight.geometry.cubes import Cube, dilate
from twoweight.measures.lattice import CellSet, Lattice
from twoweight.operators.fields import OperatorField
from twoweight.operators.fractional import frac_integral_field
from twoweight.proofcheck.fractional import (
	build_fractional,
	check_absorption,
	check_f_case,
	check_frac_max_principle,
	check_good_lambda,
	check_partition,
	derive_epsilon,
	fractional_setup,
	lambda_grid,
	tail_bound_suite,
)
from twoweight.proofcheck.instance import bundled_instance
from twoweight.proofcheck.runner import resolve_params


def test_absorption_coefficient_is_exact():
	report = check_absorption(1, Fraction(27), Fraction(1, 27))
	assert report == {"passed": True, "coefficient": "2/3", "two_thirds": True}
	assert check_absorption(3, Fraction(81), Fraction(1, 27))["two_thirds"]
	assert not check_absorption(3, Fraction(9), Fraction(1, 27))["passed"]


def test_epsilon_from_annuli():
	epsilon, details = derive_epsilon(2.0, 1, 0.5, 9)
	assert details["reach_ratio"] == pytest.approx(0.8)
	assert details["annuli"] == 5
	assert epsilon == pytest.approx(0.5 / (5 * np.sqrt(8.0)))
	with pytest.raises(InvalidParameterError):
		derive_epsilon(1.5, 1, 0.5, 9)
	with pytest.raises(InvalidParameterError):
		derive_epsilon(2.0, 1, 1.0, 9)


def test_lambda_grid_stays_above_the_edge():
	lattice = Lattice((0,), 1, (8,))
	levels = lambda_grid(OperatorField(lattice, [0, 1, 8, 16, 8, 1, 0, 0]), 4)
	assert levels[0] == pytest.approx(16 / 1024)
	assert levels[-1] == pytest.approx(8.0)
	assert lambda_grid(OperatorField(lattice, np.zeros(8)), 4).size == 0
	with pytest.raises(DegenerateInputError):
		lambda_grid(OperatorField(lattice, [16, 1, 1, 1, 1, 1, 1, 1]), 4)


def test_setup_of_the_smoke_instance():
	setup = fractional_setup(bundled_instance("lebesgue-smoke"))
	assert setup.f_mass == pytest.approx(1.0)
	assert setup.f_norm2 == pytest.approx(1.0)
	assert setup.I.max > 0
	assert setup.lattice.shape == (128,)
	with pytest.raises(InvalidParameterError):
		fractional_setup(bundled_instance("lacunary-sigma"))


@pytest.fixture(scope="module")
def smoke_run():
	instance = bundled_instance("lebesgue-smoke")
	params, _ = resolve_params(instance)
	return build_fractional(instance, params)


def test_smoke_run_classes_partition_the_whitney_cubes(smoke_run):
	report = check_partition(smoke_run)
	assert report["passed"], report["witnesses"]
	assert len(smoke_run.levels) == 16
	assert sum(sum(level.counts().values()) for level in smoke_run.levels) == sum(len(level.family) for level in smoke_run.levels)


def test_smoke_run_maximum_principle(smoke_run):
	report = check_frac_max_principle(smoke_run)
	assert report["passed"], report["witnesses"]
	assert report["worst_ratio"] is None or report["worst_ratio"] <= 1 + 1e-9


def test_smoke_run_f_case(smoke_run):
	report = check_f_case(smoke_run)
	assert report["passed"], report["witnesses"]
	assert report["T2"] >= 0.0


def test_smoke_run_good_lambda(smoke_run):
	report = check_good_lambda(smoke_run)
	assert report["passed"], report["witnesses"]
	assert report["lambdas"] == 16
	assert all(row["lhs"] <= row["rhs"] * (1 + 1e-9) for row in report["rows"])


def test_smoke_run_tail_bound(smoke_run):
	with warnings.catch_warnings():
		warnings.simplefilter("ignore", RuntimeWarning)
		report = tail_bound_suite(smoke_run)
	assert report["passed"], report["witnesses"]
	assert report["in_regime"] + report["out_of_regime"] == 16


@pytest.mark.parametrize(
	"cube",
	[
		Cube((Fraction(0),), Fraction(1, 4)),
		Cube((Fraction(-1, 2),), Fraction(1, 8)),
		Cube((Fraction(3, 4),), Fraction(1, 2)),
		Cube((Fraction(-4),), Fraction(1, 4)),
	],
)
def test_near_field_matches_the_restricted_potential(cube):
	setup = fractional_setup(bundled_instance("lebesgue-smoke"))
	triple = CellSet.from_cubes(setup.lattice, [dilate(cube, 3)])
	full = frac_integral_field(setup.alpha, setup.f.restrict(triple), setup.sigma, setup.res, setup.window)
	expected = full.values[setup.lattice.slices(cube)]
	assert setup.near_field(cube).shape == expected.shape
	assert setup.near_field(cube) == pytest.approx(expected, rel=1e-9, abs=1e-9)
