from fractions import Fraction
from pathlib import Path

import pytest

from twoweight.config import (
	ConstantRequest,
	FamilyConfig,
	MeasuresConfig,
	RunConfig,
	WhitneySection,
	read_yaml,
)
from twoweight.errors import ConfigError
from twoweight.geometry.cubes import Cube
from twoweight.measures.spec_file import MeasureSpec, dump_measure_spec


CONFIGS = Path(__file__).resolve().parents[2] / "configs"


@pytest.mark.parametrize(
	"name",
	[
		"constants_counterexample.yaml",
		"constants_lebesgue.yaml",
		"whitney_random.yaml",
		"whitney_superlevel.yaml",
		"verify_random.yaml",
	],
)
def test_bundled_configs_parse(name):
	config = RunConfig.from_yaml(CONFIGS / name)

	assert config.command in ("constants", "whitney", "verify")
	assert config.base_dir == CONFIGS.resolve()


def test_counterexample_config_sections():
	config = RunConfig.from_yaml(CONFIGS / "constants_counterexample.yaml")

	sigma, omega = config.measures.pair(config.base_dir)
	assert sigma.measure.kind == "exp-density"
	assert omega.measure.kind == "indicator-density"
	assert config.measures.window_cube() == Cube((-3,), 8)
	assert [c.variant for c in config.constants] == ["plain", "lambda(3)", "d_lambda(3, 27)"]
	assert config.constants[1].parsed_variant().lam == 3
	family = config.family.build(config.measures.window_cube())
	assert len(family) > 0


def test_yaml_round_trip(tmp_path):
	config = RunConfig(
		command="constants",
		measures=MeasuresConfig(sigma={"kind": "lebesgue", "dim": 1}, omega={"kind": "lebesgue", "dim": 1}),
		family=FamilyConfig(kind="dyadic", step="1/4"),
		constants=[ConstantRequest(constant="testing", variant="parental", cells=8)],
		whitney=WhitneySection(R_W="9/2", N=4),
		seed=11,
		resolution="1/8",
	)
	path = tmp_path / "run.yaml"
	config.to_yaml(path)
	loaded = RunConfig.from_yaml(path)

	assert loaded == config
	assert loaded.to_dict() == config.to_dict()
	assert loaded.base_dir == tmp_path.resolve()


def test_unknown_top_level_key():
	with pytest.raises(ConfigError, match="Unexpected keys for RunConfig"):
		RunConfig.from_dict({"colour": "blue"})


def test_unknown_section_key():
	with pytest.raises(ConfigError, match="Unexpected keys for FamilyConfig"):
		RunConfig.from_dict({"family": {"kind": "default", "width": 2}})


def test_section_must_be_mapping():
	with pytest.raises(ConfigError, match="must be a mapping"):
		RunConfig.from_dict({"output": ["report.json"]})


def test_invalid_choices():
	with pytest.raises(ConfigError, match="family.kind"):
		FamilyConfig(kind="spiral")
	with pytest.raises(ConfigError, match="op must be one of"):
		ConstantRequest(op="H")
	with pytest.raises(ConfigError, match="needs at least one test function"):
		ConstantRequest(constant="norm")
	with pytest.raises(ConfigError, match="needs a level grid"):
		ConstantRequest(constant="weak_norm", functions=[{"cube": "[0,1)", "h": "1/4", "value": 1}])


def test_resolution_must_divide_window():
	data = {
		"measures": {"sigma": {"kind": "lebesgue", "dim": 1}, "window": "[-4,4)"},
		"resolution": "3/16",
	}
	with pytest.raises(ConfigError, match="does not divide"):
		RunConfig.from_dict(data)


def test_resolution_and_jobs_validation():
	with pytest.raises(ConfigError, match="resolution must be a rational"):
		RunConfig.from_dict({"resolution": "a/b"})
	with pytest.raises(ConfigError, match="resolution must be positive"):
		RunConfig.from_dict({"resolution": "-1/4"})
	with pytest.raises(ConfigError, match="n_jobs"):
		RunConfig.from_dict({"n_jobs": 0})


def test_measure_paths_resolve_against_config_dir(tmp_path):
	spec = MeasureSpec.from_dict({"kind": "exp-density", "dim": 1, "params": {"rate": 2}})
	dump_measure_spec(spec, tmp_path / "specs" / "sigma.json")
	(tmp_path / "run.yaml").write_text(
		"measures:\n  sigma: specs/sigma.json\n  omega: {kind: lebesgue, dim: 1}\n",
		encoding="utf-8",
	)
	config = RunConfig.from_yaml(tmp_path / "run.yaml")
	sigma, omega = config.measures.pair(config.base_dir)

	assert sigma.to_dict() == spec.to_dict()
	assert omega.measure.kind == "lebesgue"


def test_unset_measure():
	with pytest.raises(ConfigError, match="measures.omega is not set"):
		MeasuresConfig(sigma={"kind": "lebesgue", "dim": 1}).pair()


def test_bad_inline_measure_names_the_entry():
	with pytest.raises(ConfigError, match="measures.sigma"):
		MeasuresConfig(sigma={"kind": "gaussian", "dim": 1}).spec("sigma")


def test_whitney_section_builds_config_and_lattice():
	section = WhitneySection(R_W=5, N=3, dim=2, window="[-2,2)", h="1/4")
	lattice = section.lattice()

	assert section.config().R_W == 5
	assert lattice.shape == (16, 16)
	with pytest.raises(ConfigError, match="whitney"):
		WhitneySection(R_W=2).config()


def test_read_yaml_errors(tmp_path):
	with pytest.raises(ConfigError, match="not found"):
		read_yaml(tmp_path / "missing.yaml")

	broken = tmp_path / "broken.yaml"
	broken.write_text("measures:\n  window: [0, 4\nseed: 1\n", encoding="utf-8")
	with pytest.raises(ConfigError, match=r"line \d+, column \d+"):
		read_yaml(broken)


def test_empty_file_gives_defaults(tmp_path):
	path = tmp_path / "empty.yaml"
	path.write_text("", encoding="utf-8")
	config = RunConfig.from_yaml(path)

	assert config.command is None
	assert config.constants == []
	assert config.resolution_value == Fraction(1, 16)
