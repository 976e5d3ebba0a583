import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoweight.errors import ConfigError, InvalidParameterError, NoExteriorError, ResolutionError
from twoweight.geometry.cubes import Cube, dilate
from twoweight.measures.lattice import CellSet
from twoweight.whitney.decompose import (
	WhitneyConfig,
	WhitneyFamily,
	random_open_set,
	whitney_decompose,
	window_lattice,
)
from twoweight.whitney.verify import verify_whitney


def _unit_interval():
	lattice = window_lattice(Cube((-1,), 3), "1/64")
	return CellSet.from_cubes(lattice, [Cube((0,), 1)])


def test_unit_interval_cubes_cluster_at_the_ends():
	family = whitney_decompose(_unit_interval())
	resolved = [family.cubes[i] for i in family.resolved]
	assert resolved
	assert all(Cube((0,), 1).contains(dilate(q, 4)) for q in resolved)
	largest = max(resolved, key=lambda q: q.side)
	assert largest.side == Fraction(1, 8)
	smallest = min(resolved, key=lambda q: q.side)
	assert smallest.corner[0] < Fraction(1, 8) or smallest.upper[0] > Fraction(7, 8)


def _dilation_inside(family, cube):
	big = dilate(cube, family.config.R_W)
	lattice = family.lattice
	lo = [math.floor((c - o) / lattice.h) for c, o in zip(big.corner, lattice.origin)]
	hi = [math.ceil((u - o) / lattice.h) for u, o in zip(big.upper, lattice.origin)]
	if any(a < 0 for a in lo) or any(b > n for b, n in zip(hi, lattice.shape)):
		return False
	return bool(family.omega.mask[tuple(slice(a, b) for a, b in zip(lo, hi))].all())


def test_unit_interval_family_verifies():
	report = verify_whitney(whitney_decompose(_unit_interval()))
	assert report.interior_passed, report.violations
	assert report.boundary_layer
	assert report.C_W >= 1
	assert report.to_dict()["n_cubes"] == report.n_cubes


def test_floor_cells_fail_the_strict_whitney_condition():
	lattice = window_lattice(Cube((-8,), 16), "1/256")
	omega = random_open_set(lattice, np.random.default_rng(0))
	family = whitney_decompose(omega)
	report = verify_whitney(family)

	assert report.n_floor > 0
	assert not report.whitney_condition
	assert not report.passed
	assert report.n_sandwich_failures == sum(not _dilation_inside(family, q) for q in family.cubes)
	assert report.n_sandwich_failures >= report.n_floor
	assert report.interior_passed, report.violations
	assert report.to_dict()["passed"] is False


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**16), st.sampled_from(["1/4", "1/8", "1/16"]))
def test_passing_families_satisfy_the_sandwich(seed, h):
	lattice = window_lattice(Cube((-4,), 8), h)
	omega = random_open_set(lattice, np.random.default_rng(seed), boxes=2)
	if omega.is_full():
		return
	family = whitney_decompose(omega)
	report = verify_whitney(family)
	inside = [_dilation_inside(family, q) for q in family.cubes]
	assert report.passed == (report.interior_passed and all(inside))
	if report.passed:
		assert all(inside)
	assert all(inside[i] for i in family.resolved)


def test_unresolved_cube_outside_the_boundary_layer_is_flagged():
	family = whitney_decompose(_unit_interval())
	mid = next(i for i, q in enumerate(family.cubes) if q.side == Fraction(1, 8))
	broken = _with_cubes(family, family.cubes, tuple(i == mid or f for i, f in enumerate(family.floor)))
	report = verify_whitney(broken)
	assert not report.boundary_layer
	assert not report.interior_passed
	assert report.violations["boundary_layer"]


@pytest.mark.parametrize("dim, h", [(1, "1/256"), (2, "1/32")])
@pytest.mark.parametrize("seed", range(10))
def test_random_open_sets_verify(dim, h, seed):
	rng = np.random.default_rng(seed)
	lattice = window_lattice(Cube((-8,) * dim, 16), h)
	sets = [omega for omega in (random_open_set(lattice, rng) for _ in range(10)) if not omega.is_full()]
	measured = []
	for omega in sets:
		report = verify_whitney(whitney_decompose(omega))
		assert report.interior_passed, report.violations
		assert report.n_sandwich_failures == report.n_floor
		measured.append(report.C_W)
	assert [verify_whitney(whitney_decompose(omega)).C_W for omega in sets] == measured


def test_full_and_empty_sets():
	lattice = window_lattice(Cube((0,), 1), "1/8")
	with pytest.raises(NoExteriorError):
		whitney_decompose(CellSet.full(lattice))
	family = whitney_decompose(CellSet.empty(lattice))
	assert len(family) == 0
	assert verify_whitney(family).passed
	assert verify_whitney(family).interior_passed


def test_cells_must_be_dyadic():
	lattice = window_lattice(Cube((0,), 1), "1/3")
	omega = CellSet(lattice, [True, False, False])
	with pytest.raises(ResolutionError):
		whitney_decompose(omega)


def _with_cubes(family, cubes, floor):
	levels = tuple(0 for _ in cubes)
	return WhitneyFamily(tuple(cubes), levels, tuple(floor), family.omega, family.config)


def test_duplicated_cube_breaks_cover_and_nesting():
	family = whitney_decompose(_unit_interval())
	broken = _with_cubes(family, family.cubes + family.cubes[:1], family.floor + family.floor[:1])
	report = verify_whitney(broken)
	assert not report.disjoint_cover
	assert not report.nested
	assert not report.passed


def test_missing_cube_breaks_cover():
	family = whitney_decompose(_unit_interval())
	broken = _with_cubes(family, family.cubes[1:], family.floor[1:])
	report = verify_whitney(broken)
	assert not report.disjoint_cover


def test_oversized_cube_breaks_whitney_condition():
	family = whitney_decompose(_unit_interval())
	omega = family.omega
	cubes = [Cube((0,), Fraction(1, 2)), Cube((Fraction(1, 2),), Fraction(1, 2))]
	report = verify_whitney(WhitneyFamily(tuple(cubes), (-1, -1), (False, False), omega, family.config))
	assert report.disjoint_cover
	assert not report.whitney_condition
	assert report.violations["whitney_condition"]


def test_config_validation():
	with pytest.raises(InvalidParameterError):
		WhitneyConfig(R_W=2)
	with pytest.raises(InvalidParameterError):
		WhitneyConfig(N=2)
	with pytest.warns(RuntimeWarning):
		WhitneyConfig(R_W=3, N=4)
	with pytest.raises(ConfigError):
		WhitneyConfig.from_dict({"R_W": 4, "depth": 2})
	assert WhitneyConfig.from_dict({"R_W": "9/2"}).R_W == Fraction(9, 2)
	assert WhitneyConfig.from_dict(None) == WhitneyConfig()


def test_family_to_dict_lists_grid_indices():
	family = whitney_decompose(_unit_interval())
	data = family.to_dict()
	assert data["config"] == {"R_W": "4", "N": 3, "grid": None}
	assert len(data["cubes"]) == len(family)
	first = data["cubes"][0]
	assert set(first) == {"cube", "level", "index", "floor"}
