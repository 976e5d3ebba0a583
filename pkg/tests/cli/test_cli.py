import json
import subprocess
import sys
from pathlib import Path

import pytest

from twoweight import cli


ROOT = Path(__file__).resolve().parents[2]
CONFIGS = ROOT / "configs"
SCRIPT = ROOT / "scripts" / "twoweight.py"


def _csv_body(path: Path) -> list[str]:
	return [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]


def test_script_help_runs():
	result = subprocess.run(
		[sys.executable, str(SCRIPT), "--help"],
		check=False,
		capture_output=True,
		text=True,
	)

	assert result.returncode == 0
	assert "counterexample" in result.stdout
	assert "verify" in result.stdout


def test_usage_errors_exit_2(tmp_path, capsys):
	assert cli.main(["counterexample", "nope"]) == 2
	assert cli.main(["verify"]) == 2
	assert cli.main(["constants"]) == 2
	assert cli.main(["constants", "--config", str(tmp_path / "missing.yaml")]) == 2
	assert "not found" in capsys.readouterr().err


def test_config_for_another_command_is_rejected(tmp_path, capsys):
	path = tmp_path / "run.yaml"
	path.write_text("command: verify\n", encoding="utf-8")

	assert cli.main(["constants", "--config", str(path)]) == 2
	assert "is for command 'verify'" in capsys.readouterr().err


def test_sweep_pair_writes_csv(tmp_path):
	out = tmp_path / "a2.csv"

	assert cli.main(["sweep", "--pair", "maximal", "--R", "2", "5", "--csv", str(out)]) == 0

	text = out.read_text(encoding="utf-8")
	assert text.startswith("# command: sweep\n")
	assert '# params: {"R": ["2", "5"], "pair": "maximal"}' in text
	body = _csv_body(out)
	assert body[0] == "R,computed,closed_form,rel_error"
	assert [row.split(",")[0] for row in body[1:]] == ["2", "5"]
	assert all(float(row.split(",")[3]) < 1e-6 for row in body[1:])


def test_sweep_output_is_deterministic(tmp_path):
	first, second = tmp_path / "first.csv", tmp_path / "second.csv"

	assert cli.main(["sweep", "--pair", "fractional", "--R", "2", "5", "--csv", str(first)]) == 0
	assert cli.main(["sweep", "--pair", "fractional", "--R", "2", "5", "--csv", str(second)]) == 0
	assert first.read_bytes() == second.read_bytes()


def test_sweep_rejects_pair_with_config(tmp_path):
	path = tmp_path / "run.yaml"
	path.write_text("command: sweep\n", encoding="utf-8")

	assert cli.main(["sweep", "--pair", "maximal", "--config", str(path)]) == 2


def test_sweep_corroboration_writes_one_row_per_pair(tmp_path):
	out = tmp_path / "corroboration.csv"

	assert cli.main(["sweep", "--corroboration", "3", "--max-cells", "16", "--seed", "4", "--csv", str(out)]) == 0

	text = out.read_text(encoding="utf-8")
	assert '"uniform": true' in text
	body = _csv_body(out)
	assert body[0] == "index,cells,norm,parental,a2,ratio"
	assert [row.split(",")[0] for row in body[1:]] == ["0", "1", "2"]
	assert all(int(row.split(",")[1]) <= 16 for row in body[1:])
	assert cli.main(["sweep", "--corroboration", "3", "--pair", "maximal"]) == 2


def test_counterexample_maximal_report(tmp_path, capsys):
	out = tmp_path / "maximal.json"

	code = cli.main(["counterexample", "maximal", "--step", "1/2", "--cells", "8", "--output", str(out)])
	payload = json.loads(out.read_text(encoding="utf-8"))

	assert code == 0
	assert payload["passed"] is True
	assert payload["metadata"]["command"] == "counterexample"
	assert payload["metadata"]["params"]["R"] == ["2", "5", "10"]
	assert json.loads(capsys.readouterr().out) == payload


def test_whitney_random_flags(tmp_path):
	out = tmp_path / "whitney.json"
	table = tmp_path / "whitney.csv"

	code = cli.main([
		"whitney", "--count", "3", "--window", "[-2,2)", "--h", "1/16", "--seed", "5",
		"--output", str(out), "--csv", str(table),
	])
	payload = json.loads(out.read_text(encoding="utf-8"))

	assert code == 0
	assert payload["mode"] == "random"
	assert payload["count"] == 3
	assert payload["interior_passed"] is True
	assert payload["passed"] == all(e["n_floor"] == 0 for e in payload["sets"])
	assert payload["metadata"]["seed"] == 5
	body = _csv_body(table)
	assert body[0] == "index,n_cubes,n_floor,C_W,passed,interior_passed"
	assert len(body) == 4


def test_verify_failure_exits_1(tmp_path):
	out = tmp_path / "verify.json"

	with pytest.warns(RuntimeWarning):
		code = cli.main(["verify", "m1-negative", "--output", str(out)])
	payload = json.loads(out.read_text(encoding="utf-8"))

	assert code == 1
	assert payload["passed"] is False
	assert payload["metadata"]["params"]["instances"] == ["m1-negative"]
	assert payload["instances"][0]["checks"]["max_principle"]["passed"] is False


def test_constants_from_config(tmp_path):
	out = tmp_path / "constants.json"

	code = cli.main(["constants", "--config", str(CONFIGS / "constants_lebesgue.yaml"), "--output", str(out)])
	payload = json.loads(out.read_text(encoding="utf-8"))

	assert code == 0
	assert payload["metadata"]["config_sha256"] is not None
	reports = payload["reports"]
	assert [r["constant"] for r in reports][:2] == ["A2", "A2_alpha"]
	assert reports[0]["value"] == pytest.approx(1.0)
	assert len(reports) == 5
	assert all(r["value"] > 0 for r in reports)
