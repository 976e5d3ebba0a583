from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from twoweight.errors import ConfigError, InvalidParameterError, ResolutionError
from twoweight.geometry.cubes import Cube
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import Lebesgue
from twoweight.proofcheck.instance import (
	BUNDLED,
	ProofInstance,
	bundled_instance,
	instance_from_dict,
	load_instance,
	random_instance,
)

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_instances_build(name):
	instance = bundled_instance(name)
	assert instance.name == name
	assert instance.dim == 1
	assert load_instance(name) == instance


def test_unknown_bundled_instance():
	with pytest.raises(ConfigError):
		instance_from_dict({"bundled": "nope"})


def test_random_instances_are_seeded():
	a = random_instance(3)
	b = instance_from_dict({"random": {"seed": 3}})
	assert b.name == "random-3"
	np.testing.assert_array_equal(a.f.values, b.f.values)
	np.testing.assert_array_equal(a.sigma.masses, b.sigma.masses)
	assert not np.array_equal(a.f.values, random_instance(4).f.values)
	assert random_instance(0, grids="all").f.lattice.h == Fraction(1, 48)
	with pytest.raises(InvalidParameterError):
		random_instance(0, grids="all", alpha=0.5)


def test_instance_file():
	instance = load_instance(CONFIGS / "instances" / "bump_pair.yaml")
	assert instance.name == "bump-pair"
	assert instance.f.values[:16].tolist() == [2.0] * 16
	assert instance.window == Cube((-4,), 8)
	assert instance.to_dict()["omega"]["kind"] == "indicator-density"


def test_instance_validation():
	f = LatticeFunction.constant(Lattice((0,), Fraction(1, 16), (16,)))
	window = Cube((-4,), 8)
	with pytest.raises(ResolutionError):
		ProofInstance("x", Lebesgue(1), Lebesgue(1), f, window, Fraction(1, 3))
	with pytest.raises(InvalidParameterError):
		ProofInstance("x", Lebesgue(1), Lebesgue(1), f, Cube((2,), 2), Fraction(1, 16))
	with pytest.raises(InvalidParameterError):
		ProofInstance("x", Lebesgue(1), Lebesgue(1), f, window, Fraction(1, 8), alpha=0.5)
	with pytest.raises(ConfigError, match="missing 'omega'"):
		instance_from_dict({"sigma": {"kind": "lebesgue"}, "f": {"cube": "[0,1)", "h": "1/16"}})
	with pytest.raises(ConfigError):
		instance_from_dict({"sigma": {"kind": "lebesgue"}, "colour": "red"})
