import numpy as np
import pytest

from twoweight.geometry.cubes import Cube
from twoweight.proofcheck.instance import bundled_instance, random_instance
from twoweight.proofcheck.levels import CASES, LevelCube, build_level_sets, check_exhaustive, classify
from twoweight.proofcheck.linearization import a2ljk_suite
from twoweight.proofcheck.params import ProofParams
from twoweight.proofcheck.runner import MAXIMAL_CHECKS, resolve_params, verify_instance


@pytest.fixture(scope="module")
def m1_report():
	with pytest.warns(RuntimeWarning):
		return verify_instance(bundled_instance("m1-negative"))


def test_small_m_breaks_the_maximum_principle(m1_report):
	assert not m1_report["passed"]
	assert not m1_report["checks"]["max_principle"]["passed"]
	assert m1_report["warnings"]
	assert set(m1_report["checks"]) == set(MAXIMAL_CHECKS)


def test_whitney_families_of_the_level_sets_verify(m1_report):
	assert m1_report["checks"]["whitney"]["passed"]
	(grid,) = m1_report["grids"].values()
	assert grid["k_range"][0] <= -2
	assert grid["checks"]["max_principle"]["witnesses"]


def test_level_sets_label_every_cube_or_report_it():
	instance = bundled_instance("m1-negative")
	sets = build_level_sets(instance, instance.grid_list()[0], instance.params, strict=False)
	counts = sets.case_counts()
	assert set(counts) == set(CASES) | {"unclassified"}
	assert sum(counts.values()) == len(sets.cubes)
	assert check_exhaustive(sets)["passed"] == (counts["unclassified"] == 0)


@pytest.fixture(scope="module", params=["lebesgue-smoke", "lacunary-sigma", "counterexample-pair"])
def bundled_report(request):
	return verify_instance(bundled_instance(request.param))


def test_bundled_instances_pass_every_check(bundled_report):
	failed = [name for name, check in bundled_report["checks"].items() if not check["passed"]]
	assert not failed
	assert bundled_report["passed"]
	assert bundled_report["checks"]["whitney"]["passed"]


def test_lacunary_sigma_reports_margins():
	report = verify_instance(bundled_instance("lacunary-sigma"))
	assert report["passed"]
	assert report["fractional"] is None
	for grid in report["grids"].values():
		checks = grid["checks"]
		assert checks["max_principle"]["violations"] == 0
		assert checks["max_principle"]["worst_margin"] is None or checks["max_principle"]["worst_margin"] > 1.0
		assert checks["linearization"]["passed"]
		assert checks["a2ljk"]["min_slack"] is None or checks["a2ljk"]["min_slack"] >= -1e-9
		assert checks["packing"]["passed"]
		assert checks["packing"]["principal_checked"] == checks["principal"]["principal"]
		assert checks["whitney"]["n_floor"] >= 0
		assert checks["whitney"]["sandwich_failures"] == checks["whitney"]["n_floor"]


@pytest.mark.parametrize("seed", range(20))
def test_random_fractional_instances_pass(seed):
	report = verify_instance(random_instance(seed, alpha=0.5))
	(grid,) = report["grids"].values()
	assert grid["checks"]["max_principle"]["violations"] == 0
	assert grid["checks"]["principal"]["passed"]
	assert grid["checks"]["a2ljk"]["passed"]
	good_lambda = report["fractional"]["checks"]["good_lambda"]
	assert good_lambda["lambdas"] == 16
	assert good_lambda["passed"], good_lambda["witnesses"]
	assert report["passed"], [name for name, check in report["checks"].items() if not check["passed"]]


@pytest.mark.parametrize("seed", range(20, 100))
def test_a2ljk_holds_on_random_instances(seed):
	instance = random_instance(seed)
	params, _ = resolve_params(instance)
	sets = build_level_sets(instance, instance.grid_list()[0], params, strict=False)
	report = a2ljk_suite(sets, instance.sigma, instance.omega)
	assert report["passed"], report["witnesses"]


def _level_cube(E_mass, triple_mass, E_in_mass=0.0, E_out_mass=0.0):
	return LevelCube(
		0, 0, Cube((0,), 1), False, 1.0, 1.0, np.zeros(4, dtype=bool), E_mass, triple_mass,
		E_in_mass=E_in_mass, E_out_mass=E_out_mass,
	)


def test_case_table():
	params = ProofParams(m=3)
	assert classify(_level_cube(0.0, 0.0), params) == "pi1"
	assert classify(_level_cube(0.0, 5.0), params) == "pi1"
	assert classify(_level_cube(0.01, 1.0), params) == "pi1"
	assert classify(_level_cube(1.0, 1.0, E_out_mass=0.5), params) == "pi2"
	assert classify(_level_cube(1.0, 1.0, E_in_mass=0.6, E_out_mass=0.4), params) == "pi3"
	assert classify(_level_cube(1.0, 1.0, E_in_mass=0.3, E_out_mass=0.3), params) is None
