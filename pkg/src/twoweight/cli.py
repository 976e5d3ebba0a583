"""
Command-line front end.

Commands: ``counterexample``, ``constants``, ``whitney``, ``verify`` and
``sweep``. JSON reports go to stdout (and ``--output``), CSV tables to
``--csv`` or stdout for ``sweep``; progress and summaries go to stderr.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage and
configuration errors. Values set in ``--config`` take precedence over flags.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence, TextIO

import numpy as np

from twoweight.config import RunConfig, WhitneySection
from twoweight.constants.corroboration import MAX_CELLS, corroboration_sweep
from twoweight.constants.counterexample import (
	DEFAULT_R,
	DEFAULT_STEP,
	WHICH,
	a2_table,
	counterexample_report,
	interval_rows,
	swapped_table,
)
from twoweight.constants.reports import write_reports
from twoweight.constants.testing import (
	a2,
	a2_alpha,
	a2_quotient,
	norm_lower_bound,
	testing_constant,
	testing_table,
	weak_norm_lower_bound,
)
from twoweight.constants.variants import Variant
from twoweight.errors import ConfigError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.literal import format_cube
from twoweight.geometry.rational import as_rational, format_rational
from twoweight.measures.spec_file import function_from_dict
from twoweight.operators.fields import write_field_csv
from twoweight.proofcheck.instance import GRID_CHOICES, instance_from_dict, load_instance
from twoweight.proofcheck.runner import verify_instance
from twoweight.run_metadata import build_run_metadata, metadata_lines
from twoweight.sweeps import parallel_map
from twoweight.whitney.decompose import random_open_set, whitney_decompose
from twoweight.whitney.superlevel import level_range, superlevel_families, superlevel_field
from twoweight.whitney.verify import verify_nested, verify_whitney

COMMANDS = ("counterexample", "constants", "whitney", "verify", "sweep")


def _json_default(value: Any) -> Any:
	if isinstance(value, Fraction):
		return format_rational(value)
	if isinstance(value, Cube):
		return format_cube(value)
	if isinstance(value, np.bool_):
		return bool(value)
	if isinstance(value, np.integer):
		return int(value)
	if isinstance(value, np.floating):
		return float(value)
	if isinstance(value, np.ndarray):
		return value.tolist()
	if isinstance(value, Path):
		return value.as_posix()
	raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(payload: dict) -> str:
	return json.dumps(payload, indent=2, sort_keys=False, default=_json_default)


def _emit_json(payload: dict, output: Optional[Path]) -> None:
	text = dumps(payload)
	if output is not None:
		output.parent.mkdir(parents=True, exist_ok=True)
		output.write_text(text + "\n", encoding="utf-8")
	print(text)


def _csv_value(value: Any) -> str:
	if value is None:
		return ""
	if isinstance(value, (float, np.floating)):
		return repr(float(value))
	return str(value)


def write_rows(rows: Sequence[dict], handle: TextIO, metadata: Optional[dict] = None) -> None:
	"""``# key: value`` header comments, then one CSV row per mapping."""
	for line in metadata_lines(metadata or {}):
		handle.write(f"# {line}\n")
	if not rows:
		return
	writer = csv.writer(handle, lineterminator="\n")
	columns = list(rows[0])
	writer.writerow(columns)
	for row in rows:
		writer.writerow([_csv_value(row.get(key)) for key in columns])


def _write_csv(rows: Sequence[dict], path: Optional[Path], metadata: dict) -> None:
	if path is None:
		write_rows(rows, sys.stdout, metadata)
		return
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", encoding="utf-8", newline="") as handle:
		write_rows(rows, handle, metadata)


def _log(message: str) -> None:
	print(message, file=sys.stderr)


class _Settings:
	"""Flags merged with the optional run config; the config wins."""

	def __init__(self, args: argparse.Namespace) -> None:
		self.args = args
		self.config: Optional[RunConfig] = None
		if args.config is not None:
			self.config = RunConfig.from_yaml(args.config)
			if self.config.command not in (None, args.command):
				raise ConfigError(
					f"Config {args.config} is for command {self.config.command!r}, not {args.command!r}."
				)
		cfg = self.config
		self.seed = cfg.seed if cfg is not None else int(args.seed)
		self.n_jobs = cfg.n_jobs if cfg is not None else int(args.n_jobs)
		self.progress = bool(args.progress or (cfg is not None and cfg.output.progress))
		self.output = self._path("json", args.output)
		self.csv = self._path("csv", args.csv)
		self.resolution = cfg.resolution_value if cfg is not None else as_rational(args.resolution)

	def _path(self, key: str, flag: Optional[Path]) -> Optional[Path]:
		if self.config is not None and getattr(self.config.output, key) is not None:
			path = Path(getattr(self.config.output, key))
			if not path.is_absolute() and self.config.base_dir is not None:
				path = self.config.base_dir / path
			return path
		return flag

	def require_config(self) -> RunConfig:
		if self.config is None:
			raise ConfigError(f"Command {self.args.command!r} needs --config.")
		return self.config

	def metadata(self, params: Optional[dict] = None) -> dict:
		return build_run_metadata(
			self.args.command,
			self.args.config,
			self.seed,
			format_rational(self.resolution),
			params,
		)


def cmd_counterexample(settings: _Settings) -> int:
	args = settings.args
	R_values = args.R or ((5, 10) if args.which == "swapped" else DEFAULT_R)
	R_values = [as_rational(R) for R in R_values]
	_log(f"counterexample {args.which}: R={[format_rational(R) for R in R_values]}")
	payload, table = counterexample_report(
		args.which,
		step=as_rational(args.step),
		cells=int(args.cells),
		R_values=R_values,
		alpha=float(args.alpha),
		n_jobs=settings.n_jobs,
		progress=settings.progress,
	)
	metadata = settings.metadata({
		"which": args.which,
		"step": args.step,
		"cells": int(args.cells),
		"R": [format_rational(R) for R in R_values],
		"alpha": float(args.alpha),
	})
	if settings.csv is not None:
		rows = payload["rows"] if table is None else interval_rows(table, Variant("lambda", lam=3))
		_write_csv(rows, settings.csv, metadata)
	_emit_json({"metadata": metadata, **payload}, settings.output)
	failed = [name for name, ok in payload["checks"].items() if not ok]
	_log("all checks passed" if not failed else f"failed checks: {failed}")
	return 0 if payload["passed"] else 1


def _constant_report(request, sigma, omega, family, window, res, settings: _Settings) -> dict:
	if request.constant == "a2":
		report = a2(sigma, omega, family)
	elif request.constant == "a2_alpha":
		if request.alpha is None:
			raise ConfigError("Constant 'a2_alpha' needs alpha.")
		report = a2_alpha(float(request.alpha), sigma, omega, family)
	elif request.constant == "testing":
		report = testing_constant(
			request.op,
			sigma,
			omega,
			family,
			request.parsed_variant(),
			alpha=request.alpha,
			options=request.options(window),
			dual=bool(request.dual),
			n_jobs=settings.n_jobs,
			progress=settings.progress,
		)
	elif request.constant == "norm":
		report = norm_lower_bound(
			request.op,
			sigma,
			omega,
			request.test_functions(),
			res=res,
			window=window,
			alpha=request.alpha,
			grids=request.grids,
			n_jobs=settings.n_jobs,
		)
	else:
		report = weak_norm_lower_bound(
			request.op,
			sigma,
			omega,
			request.test_functions(),
			[float(t) for t in request.levels],
			res=res,
			window=window,
			alpha=request.alpha,
			grids=request.grids,
			n_jobs=settings.n_jobs,
		)
	if report.resolution is None:
		report.resolution = format_rational(res)
	data = report.to_dict()
	data["family"] = family.label
	data["request"] = request.to_dict()
	return data


def cmd_constants(settings: _Settings) -> int:
	config = settings.require_config()
	if not config.constants:
		raise ConfigError("The config lists no constants.")
	window = config.measures.window_cube()
	sigma, omega = (spec.measure for spec in config.measures.pair(config.base_dir))
	family = config.family.build(window)
	_log(f"constants: {len(config.constants)} requests over {len(family)} cubes ({family.label})")
	reports = []
	for request in config.constants:
		report = _constant_report(request, sigma, omega, family, window, settings.resolution, settings)
		_log(f"  {report['constant']} {report['variant'] or ''}: {report['value']:.6g}")
		reports.append(report)
	metadata = settings.metadata({"family": family.label, "family_size": len(family)})
	if settings.output is not None:
		write_reports(reports, settings.output, metadata)
	print(dumps({"metadata": metadata, "reports": reports}))
	return 0


def _whitney_superlevel(settings: _Settings) -> tuple[dict, Optional[list[dict]]]:
	"""The field goes to the CSV path instead of a per-level table."""
	config = settings.require_config()
	section = config.whitney
	cfg = section.config()
	sigma = config.measures.spec("sigma", config.base_dir).measure
	f = function_from_dict(section.function)
	window = config.measures.window_cube()
	values = superlevel_field(sigma, f, cfg, settings.resolution, window)
	k_range = level_range(values, int(section.depth))
	families = superlevel_families(values, cfg, k_range, settings.n_jobs, settings.progress)
	levels = []
	for k, family in families.items():
		report = verify_whitney(family)
		entry = {"k": k, **report.to_dict()}
		if section.families:
			entry["family"] = family.to_dict()
		levels.append(entry)
	nested = verify_nested(families)
	payload = {
		"mode": "superlevel",
		"config": cfg.to_dict(),
		"field_max": values.max,
		"levels": levels,
		"nested": nested,
		"C_W": max([lvl["C_W"] for lvl in levels] + [0]),
		"passed": all(lvl["passed"] for lvl in levels) and nested["nested"] and nested["compatible"],
		"interior_passed": all(lvl["interior_passed"] for lvl in levels) and nested["nested"] and nested["compatible"],
	}
	if settings.csv is not None:
		write_field_csv(values, settings.csv, settings.metadata({"mode": "superlevel", "whitney": payload["config"]}))
	return payload, None


def _whitney_random(settings: _Settings) -> tuple[dict, list[dict]]:
	args = settings.args
	section = settings.config.whitney if settings.config is not None else None
	if section is None:
		section = WhitneySection(
			R_W=args.R_W, N=args.N, count=args.count, dim=args.dim, window=args.window, h=args.h,
			boxes=args.boxes, families=args.families,
		)
	cfg = section.config()
	lattice = section.lattice()
	rng = np.random.default_rng(settings.seed)
	sets = [random_open_set(lattice, rng, int(section.boxes), float(section.max_fraction)) for _ in range(int(section.count))]

	def decompose(omega):
		family = whitney_decompose(omega, cfg)
		return family, verify_whitney(family)

	results = parallel_map(decompose, sets, n_jobs=settings.n_jobs, progress=settings.progress, desc="whitney")
	entries = []
	for index, (family, report) in enumerate(results):
		entry = {"index": index, **report.to_dict()}
		if section.families:
			entry["family"] = family.to_dict()
		entries.append(entry)
	payload = {
		"mode": "random",
		"config": cfg.to_dict(),
		"lattice": lattice.to_dict(),
		"count": len(entries),
		"sets": entries,
		"C_W": max([e["C_W"] for e in entries] + [0]),
		"passed": all(e["passed"] for e in entries),
		"interior_passed": all(e["interior_passed"] for e in entries),
	}
	rows = [
		{
			"index": e["index"],
			"n_cubes": e["n_cubes"],
			"n_floor": e["n_floor"],
			"C_W": e["C_W"],
			"passed": e["passed"],
			"interior_passed": e["interior_passed"],
		}
		for e in entries
	]
	return payload, rows


def cmd_whitney(settings: _Settings) -> int:
	superlevel = settings.config is not None and settings.config.whitney.function is not None
	payload, rows = _whitney_superlevel(settings) if superlevel else _whitney_random(settings)
	metadata = settings.metadata({"mode": payload["mode"], "whitney": payload["config"]})
	if settings.csv is not None and rows is not None:
		_write_csv(rows, settings.csv, metadata)
	_emit_json({"metadata": metadata, **payload}, settings.output)
	_log(
		f"whitney {payload['mode']}: C_W={payload['C_W']} "
		f"passed={payload['passed']} interior_passed={payload['interior_passed']}"
	)
	# exit status follows the resolved cubes and the boundary layer
	return 0 if payload["interior_passed"] else 1


def _verify_instances(settings: _Settings) -> list:
	args = settings.args
	if settings.config is not None:
		instances = settings.config.proof.instances(settings.config.base_dir)
	else:
		instances = []
		if args.instance is not None:
			instances.append(load_instance(args.instance))
		random = {"dim": args.dim, "grids": args.grids, "alpha": args.alpha}
		for seed in args.seeds or []:
			instances.append(instance_from_dict({"random": dict(random, seed=int(seed))}))
	if not instances:
		raise ConfigError("Nothing to verify: name an instance, pass --seeds or set the proof section.")
	return instances


def cmd_verify(settings: _Settings) -> int:
	instances = _verify_instances(settings)
	reports = []
	for instance in instances:
		_log(f"verify {instance.name}")
		report = verify_instance(instance, n_jobs=settings.n_jobs, progress=settings.progress)
		failed = [name for name, check in report["checks"].items() if not check["passed"]]
		_log(f"  {'passed' if not failed else 'failed: ' + ', '.join(failed)}")
		reports.append(report)
	metadata = settings.metadata({"instances": [i.name for i in instances]})
	passed = all(r["passed"] for r in reports)
	if settings.csv is not None:
		rows = [
			{"instance": r["instance"]["name"], "check": name, "passed": check["passed"]}
			for r in reports
			for name, check in r["checks"].items()
		]
		_write_csv(rows, settings.csv, metadata)
	_emit_json({"metadata": metadata, "instances": reports, "passed": passed}, settings.output)
	return 0 if passed else 1


def _quotient_rows(settings: _Settings) -> list[dict]:
	config = settings.require_config()
	if not config.constants:
		raise ConfigError("The config lists no constants.")
	window = config.measures.window_cube()
	sigma, omega = (spec.measure for spec in config.measures.pair(config.base_dir))
	family = config.family.build(window)
	rows = []
	for index, request in enumerate(config.constants):
		if request.constant in ("norm", "weak_norm"):
			raise ConfigError("Per-cube sweeps cover a2, a2_alpha and testing requests only.")
		if request.constant == "testing":
			variant = request.parsed_variant()
			options = request.options(window)
			if options.domain == "dilate" and variant.lam is not None:
				options = replace(options, dilation=variant.lam)
			table = testing_table(
				request.op, sigma, omega, family, request.alpha, options, bool(request.dual),
				settings.n_jobs, settings.progress,
			)
			quotient, admissible = table.quotients(variant)
			label = variant.label
		else:
			alpha = None if request.constant == "a2" else float(request.alpha)
			quotient = np.array([a2_quotient(sigma, omega, q, alpha) for q in family.cubes])
			admissible = np.ones(len(family), dtype=bool)
			label = None
		for cube, value, ok in zip(family.cubes, quotient, admissible):
			rows.append({
				"request": index,
				"constant": request.constant,
				"variant": label,
				"cube": format_cube(cube),
				"quotient": float(value) if ok else None,
				"admissible": bool(ok),
			})
	return rows


def _r_rows(settings: _Settings) -> list[dict]:
	args = settings.args
	R_values = [as_rational(R) for R in (args.R or DEFAULT_R)]
	if args.pair == "swapped":
		return swapped_table(R_values, cells=int(args.cells))
	alpha = float(args.alpha) if args.pair == "fractional" else None
	return a2_table(R_values, alpha)


def _corroboration(settings: _Settings) -> int:
	args = settings.args
	if settings.config is not None or args.pair is not None:
		raise ConfigError("sweep --corroboration takes neither --pair nor --config.")
	result = corroboration_sweep(
		int(args.corroboration),
		seed=settings.seed,
		max_cells=int(args.max_cells),
		n_jobs=settings.n_jobs,
		progress=settings.progress,
	)
	rows = result.pop("rows")
	_log(f"corroboration: {result['count']} pairs, C={result['C']}")
	_write_csv(rows, settings.csv, settings.metadata({"corroboration": result}))
	return 0 if result["uniform"] else 1


def cmd_sweep(settings: _Settings) -> int:
	args = settings.args
	if args.corroboration is not None:
		return _corroboration(settings)
	if args.pair is not None and settings.config is not None:
		raise ConfigError("sweep takes either --pair or --config, not both.")
	rows = _r_rows(settings) if args.pair is not None else _quotient_rows(settings)
	params = {"pair": args.pair}
	if args.pair is not None:
		params["R"] = [format_rational(as_rational(R)) for R in (args.R or DEFAULT_R)]
	_log(f"sweep: {len(rows)} rows")
	_write_csv(rows, settings.csv, settings.metadata(params))
	return 0


def _common(parser: argparse.ArgumentParser) -> None:
	parser.add_argument("--config", type=Path, default=None, help="YAML run config; overrides flags")
	parser.add_argument("--output", type=Path, default=None, help="also write the JSON report here")
	parser.add_argument("--csv", type=Path, default=None, help="CSV table path")
	parser.add_argument("--n-jobs", type=int, default=1)
	parser.add_argument("--seed", type=int, default=0)
	parser.add_argument("--resolution", default="1/16")
	parser.add_argument("--progress", action="store_true")


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(
		prog="twoweight",
		description="Two-weight testing constants, Whitney decompositions and proof checks.",
	)
	sub = parser.add_subparsers(dest="command", required=True)

	p = sub.add_parser("counterexample", help="reproduce the exponential weight pair tables")
	p.add_argument("which", choices=WHICH)
	p.add_argument("--step", default=format_rational(DEFAULT_STEP))
	p.add_argument("--cells", type=int, default=32)
	p.add_argument("--R", nargs="+", default=None)
	p.add_argument("--alpha", type=float, default=0.5)
	_common(p)

	p = sub.add_parser("constants", help="estimate the constants listed in a run config")
	_common(p)

	p = sub.add_parser("whitney", help="decompose random open sets or superlevel sets")
	p.add_argument("--count", type=int, default=100)
	p.add_argument("--dim", type=int, default=1)
	p.add_argument("--window", default="[-8,8)")
	p.add_argument("--h", default="1/256")
	p.add_argument("--R-W", dest="R_W", default="4")
	p.add_argument("--N", type=int, default=3)
	p.add_argument("--boxes", type=int, default=4)
	p.add_argument("--families", action="store_true", help="include the cube lists")
	_common(p)

	p = sub.add_parser("verify", help="run the proof checks on instances")
	p.add_argument("instance", nargs="?", default=None, help="bundled instance name or YAML spec")
	p.add_argument("--seeds", type=int, nargs="+", default=None, help="random instances")
	p.add_argument("--dim", type=int, default=1)
	p.add_argument("--grids", choices=GRID_CHOICES, default="standard")
	p.add_argument("--alpha", type=float, default=None)
	_common(p)

	p = sub.add_parser("sweep", help="per-cube quotient tables or R-sweeps as CSV")
	p.add_argument("--pair", choices=WHICH, default=None)
	p.add_argument("--R", nargs="+", default=None)
	p.add_argument("--alpha", type=float, default=0.5)
	p.add_argument("--cells", type=int, default=256)
	p.add_argument("--corroboration", type=int, default=None, metavar="PAIRS", help="random weight pairs to sweep")
	p.add_argument("--max-cells", type=int, default=MAX_CELLS)
	_common(p)
	return parser


HANDLERS = {
	"counterexample": cmd_counterexample,
	"constants": cmd_constants,
	"whitney": cmd_whitney,
	"verify": cmd_verify,
	"sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
	parser = build_parser()
	try:
		args = parser.parse_args(argv)
	except SystemExit as exc:
		return int(exc.code or 0)
	try:
		settings = _Settings(args)
		return HANDLERS[args.command](settings)
	except (ValueError, OSError) as exc:
		_log(f"Error: {exc}")
		return 2


if __name__ == "__main__":
	sys.exit(main())
