import json
from fractions import Fraction

import pytest

from twoweight.errors import ConfigError
from twoweight.measures.measure import ExpDensity, IndicatorDensity, LatticeMeasure
from twoweight.measures.spec_file import (
	MeasureSpec,
	dump_measure_spec,
	function_from_dict,
	function_to_dict,
	load_measure_spec,
)


def test_exp_density_spec_round_trip(tmp_path):
	spec = MeasureSpec.from_dict(
		{"kind": "exp-density", "dim": 1, "params": {"rate": "1/2"}, "support": {"lower": ["-3"], "upper": ["5"]}, "h": "1/4"}
	)
	assert spec.measure == ExpDensity(1, Fraction(1, 2))
	assert spec.lattice().shape == (32,)
	path = dump_measure_spec(spec, tmp_path / "sigma.json")
	assert load_measure_spec(path) == spec


def test_lattice_spec_reshapes_masses():
	spec = MeasureSpec.from_dict(
		{
			"kind": "lattice",
			"dim": 2,
			"h": "1/2",
			"support": {"origin": ["0", "0"], "shape": [2, 2]},
			"params": {"masses": [1, 2, 3, 4]},
		}
	)
	assert isinstance(spec.measure, LatticeMeasure)
	assert spec.measure.masses.tolist() == [[1.0, 2.0], [3.0, 4.0]]
	assert spec.lattice_measure() is spec.measure


def test_closed_form_without_support_cannot_be_discretized():
	spec = MeasureSpec(IndicatorDensity((0,), (1,)))
	assert spec.lattice() is None
	with pytest.raises(ConfigError, match="support"):
		spec.lattice_measure()


@pytest.mark.parametrize(
	"data, message",
	[
		({"kind": "gaussian"}, "Unknown measure kind"),
		({"kind": "lebesgue", "colour": 1}, "Unknown measure spec keys"),
		({"kind": "indicator-density", "params": {"lower": ["0"]}}, "missing 'upper'"),
		({"kind": "exp-density", "params": {"rate": "0"}}, "Invalid 'exp-density'"),
	],
)
def test_bad_measure_specs(data, message):
	with pytest.raises(ConfigError, match=message):
		MeasureSpec.from_dict(data)


def test_missing_and_malformed_files(tmp_path):
	with pytest.raises(ConfigError, match="not found"):
		load_measure_spec(tmp_path / "absent.json")
	broken = tmp_path / "broken.json"
	broken.write_text('{\n  "kind": "lebesgue",\n  "dim": ,\n  "params": {}\n}\n', encoding="utf-8")
	with pytest.raises(ConfigError, match="line 3"):
		load_measure_spec(broken)


def test_function_shorthand_is_a_scaled_indicator():
	f = function_from_dict({"cube": "[0,1)", "h": "1/16", "value": 2})
	assert f.lattice.shape == (16,)
	assert set(f.values.tolist()) == {2.0}
	with pytest.raises(ConfigError, match="does not divide"):
		function_from_dict({"cube": "[0,1)", "h": "2/3"})


def test_function_dict_round_trip():
	f = function_from_dict({"origin": ["0"], "h": "1/2", "shape": [3], "values": [0, 1, 2]})
	data = json.loads(json.dumps(function_to_dict(f)))
	assert function_from_dict(data).values.tolist() == [0.0, 1.0, 2.0]
	with pytest.raises(ConfigError):
		function_from_dict({"origin": ["0"], "h": "1/2", "shape": [2], "values": [1, -1]})
