"""
Structured YAML configuration for ``twoweight`` runs.

A run config has one section per concern::

	measures:   {sigma: <measure spec or path>, omega: ..., window: "[-4,4)"}
	family:     {kind: default, step: "1/4"}
	constants:  [{constant: testing, op: M, variant: "lambda(3)"}, ...]
	whitney:    {R_W: 4, N: 3, count: 100, dim: 1, ...}
	proof:      {instance: lebesgue-smoke}
	output:     {json: report.json, csv: table.csv}
	seed: 0
	resolution: "1/16"
	n_jobs: 1

Rationals are strings (``"1/3"``), ints, or floats with an exact binary value.
Measure entries are either inline spec mappings or paths to JSON spec files,
resolved against the directory of the config file.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from twoweight.constants.families import CubeFamily
from twoweight.constants.testing import DOMAINS, TestingOptions
from twoweight.constants.variants import Variant
from twoweight.errors import ConfigError, TwoWeightError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.literal import parse_cube
from twoweight.geometry.rational import as_rational, floor_log2, format_rational
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.spec_file import MeasureSpec, function_from_dict, load_measure_spec
from twoweight.operators import OPERATORS
from twoweight.whitney.decompose import WhitneyConfig, window_lattice

FAMILY_KINDS = ("default", "dyadic", "explicit", "sweep", "intervals")
CONSTANT_KINDS = ("a2", "a2_alpha", "testing", "norm", "weak_norm")


def _validate_keys(data, cls):
	field_names = {field.name for field in fields(cls)}
	extras = set(data) - field_names
	if extras:
		raise ConfigError(f"Unexpected keys for {cls.__name__}: {sorted(extras)}")


def _mapping(data, cls) -> dict:
	if data is None:
		return {}
	if not isinstance(data, dict):
		raise ConfigError(f"{cls.__name__} section must be a mapping, got {type(data).__name__}.")
	data = dict(data)
	_validate_keys(data, cls)
	return data


def _rational(value, name: str) -> Fraction:
	try:
		return as_rational(value)
	except (TypeError, ValueError, ZeroDivisionError) as exc:
		raise ConfigError(f"{name} must be a rational, got {value!r}.") from exc


def read_yaml(path: Union[str, Path]) -> Any:
	"""``yaml.safe_load`` of ``path``; syntax errors carry the line and column."""
	path = Path(path)
	if not path.exists():
		raise ConfigError(f"Config file not found: {path}")
	try:
		with open(path, "r", encoding="utf-8") as handle:
			return yaml.safe_load(handle)
	except yaml.YAMLError as exc:
		mark = getattr(exc, "problem_mark", None)
		where = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else "unknown position"
		problem = getattr(exc, "problem", None) or str(exc)
		raise ConfigError(f"{path}: {where}: {problem}") from exc


@dataclass
class MeasuresConfig:
	sigma: Union[dict, str, None] = None
	omega: Union[dict, str, None] = None
	window: str = "[-4,4)"

	def to_dict(self) -> dict:
		return {"sigma": self.sigma, "omega": self.omega, "window": self.window}

	@classmethod
	def from_dict(cls, data: Optional[dict]) -> "MeasuresConfig":
		data = _mapping(data, cls)
		return cls(**data)

	def window_cube(self) -> Cube:
		try:
			return parse_cube(str(self.window))
		except TwoWeightError as exc:
			raise ConfigError(f"measures.window: {exc}") from exc

	def spec(self, name: str, base: Optional[Path] = None) -> MeasureSpec:
		entry = getattr(self, name)
		if entry is None:
			raise ConfigError(f"measures.{name} is not set.")
		if isinstance(entry, str):
			path = Path(entry)
			if base is not None and not path.is_absolute():
				path = base / path
			return load_measure_spec(path)
		try:
			return MeasureSpec.from_dict(entry)
		except ConfigError as exc:
			raise ConfigError(f"measures.{name}: {exc}") from exc

	def pair(self, base: Optional[Path] = None) -> tuple[MeasureSpec, MeasureSpec]:
		return self.spec("sigma", base), self.spec("omega", base)


@dataclass
class FamilyConfig:
	kind: str = "default"
	step: Union[str, int, float] = "1/4"
	sides: list = field(default_factory=list)
	cubes: list = field(default_factory=list)
	j_min: Optional[int] = None
	j_max: Optional[int] = None
	a_range: list = field(default_factory=lambda: ["-3", "1"])
	b_range: list = field(default_factory=lambda: ["0", "5"])

	def __post_init__(self) -> None:
		if self.kind not in FAMILY_KINDS:
			raise ConfigError(f"family.kind must be one of {list(FAMILY_KINDS)}, got {self.kind!r}.")

	def to_dict(self) -> dict:
		return {
			"kind": self.kind,
			"step": self.step,
			"sides": list(self.sides),
			"cubes": list(self.cubes),
			"j_min": self.j_min,
			"j_max": self.j_max,
			"a_range": list(self.a_range),
			"b_range": list(self.b_range),
		}

	@classmethod
	def from_dict(cls, data: Optional[dict]) -> "FamilyConfig":
		data = _mapping(data, cls)
		return cls(**data)

	def build(self, window: Cube) -> CubeFamily:
		step = _rational(self.step, "family.step")
		try:
			if self.kind == "default":
				return CubeFamily.default(window, step)
			if self.kind == "sweep":
				if not self.sides:
					raise ConfigError("family.sides is required for a sweep family.")
				return CubeFamily.sweep(window, step, [_rational(s, "family.sides") for s in self.sides])
			if self.kind == "explicit":
				if not self.cubes:
					raise ConfigError("family.cubes is required for an explicit family.")
				return CubeFamily.explicit([parse_cube(str(c)) for c in self.cubes], window)
			if self.kind == "intervals":
				a_range = tuple(_rational(v, "family.a_range") for v in self.a_range)
				b_range = tuple(_rational(v, "family.b_range") for v in self.b_range)
				return CubeFamily.intervals(a_range, b_range, step)
			j_min = self.j_min if self.j_min is not None else floor_log2(step)
			return CubeFamily.dyadic(window, j_min, self.j_max)
		except ConfigError:
			raise
		except TwoWeightError as exc:
			raise ConfigError(f"family: {exc}") from exc


@dataclass
class ConstantRequest:
	"""One constant to estimate; ``functions`` feed the norm bounds."""

	constant: str = "testing"
	op: str = "M"
	variant: str = "plain"
	alpha: Optional[float] = None
	dual: bool = False
	domain: str = "cube"
	dilation: Union[str, int, float] = 3
	cells: int = 32
	grids: str = "all"
	functions: list = field(default_factory=list)
	levels: list = field(default_factory=list)

	def __post_init__(self) -> None:
		if self.constant not in CONSTANT_KINDS:
			raise ConfigError(f"constant must be one of {list(CONSTANT_KINDS)}, got {self.constant!r}.")
		if self.op not in OPERATORS:
			raise ConfigError(f"op must be one of {list(OPERATORS)}, got {self.op!r}.")
		if self.domain not in DOMAINS:
			raise ConfigError(f"domain must be one of {list(DOMAINS)}, got {self.domain!r}.")
		if self.constant in ("norm", "weak_norm") and not self.functions:
			raise ConfigError(f"Constant {self.constant!r} needs at least one test function.")
		if self.constant == "weak_norm" and not self.levels:
			raise ConfigError("Constant 'weak_norm' needs a level grid.")

	def to_dict(self) -> dict:
		return {
			"constant": self.constant,
			"op": self.op,
			"variant": self.variant,
			"alpha": self.alpha,
			"dual": self.dual,
			"domain": self.domain,
			"dilation": self.dilation,
			"cells": self.cells,
			"grids": self.grids,
			"functions": list(self.functions),
			"levels": list(self.levels),
		}

	@classmethod
	def from_dict(cls, data: Optional[dict]) -> "ConstantRequest":
		data = _mapping(data, cls)
		return cls(**data)

	def parsed_variant(self) -> Variant:
		try:
			return Variant.parse(str(self.variant))
		except TwoWeightError as exc:
			raise ConfigError(f"variant: {exc}") from exc

	def options(self, window: Cube) -> TestingOptions:
		return TestingOptions(
			cells=int(self.cells),
			domain=self.domain,
			dilation=_rational(self.dilation, "dilation"),
			window=window,
			grids=self.grids,
		)

	def test_functions(self) -> list[LatticeFunction]:
		return [function_from_dict(spec) for spec in self.functions]


@dataclass
class WhitneySection:
	"""
	Whitney runs: ``count`` seeded random open sets, or the superlevel sets of
	``M(f sigma)`` when ``function`` is given.
	"""

	R_W: Union[str, int, float] = 4
	N: int = 3
	count: int = 100
	dim: int = 1
	window: str = "[-8,8)"
	h: Union[str, int, float] = "1/256"
	boxes: int = 4
	max_fraction: float = 0.25
	function: Optional[dict] = None
	depth: int = 4
	families: bool = False

	def to_dict(self) -> dict:
		return {
			"R_W": self.R_W,
			"N": self.N,
			"count": self.count,
			"dim": self.dim,
			"window": self.window,
			"h": self.h,
			"boxes": self.boxes,
			"max_fraction": self.max_fraction,
			"function": self.function,
			"depth": self.depth,
			"families": self.families,
		}

	@classmethod
	def from_dict(cls, data: Optional[dict]) -> "WhitneySection":
		data = _mapping(data, cls)
		return cls(**data)

	def config(self) -> WhitneyConfig:
		try:
			return WhitneyConfig(_rational(self.R_W, "whitney.R_W"), int(self.N))
		except TwoWeightError as exc:
			if isinstance(exc, ConfigError):
				raise
			raise ConfigError(f"whitney: {exc}") from exc

	def lattice(self) -> Lattice:
		window = parse_cube(str(self.window))
		if window.dim != int(self.dim):
			window = Cube((window.corner[0],) * int(self.dim), window.side)
		return window_lattice(window, _rational(self.h, "whitney.h"))


@dataclass
class ProofSection:
	"""An instance name or spec path, an inline spec, or seeds of random instances."""

	instance: Optional[str] = None
	spec: Optional[dict] = None
	seeds: list = field(default_factory=list)
	random: dict = field(default_factory=dict)

	def to_dict(self) -> dict:
		return {
			"instance": self.instance,
			"spec": self.spec,
			"seeds": list(self.seeds),
			"random": dict(self.random),
		}

	@classmethod
	def from_dict(cls, data: Optional[dict]) -> "ProofSection":
		data = _mapping(data, cls)
		return cls(**data)

	def instances(self, base: Optional[Path] = None) -> list:
		from twoweight.proofcheck.instance import BUNDLED, instance_from_dict, load_instance

		out = []
		if self.instance is not None:
			source = str(self.instance)
			if source not in BUNDLED and base is not None and not Path(source).is_absolute():
				source = str(base / source)
			out.append(load_instance(source))
		if self.spec is not None:
			out.append(instance_from_dict(self.spec))
		for seed in self.seeds:
			out.append(instance_from_dict({"random": dict(self.random, seed=int(seed))}))
		return out


@dataclass
class OutputConfig:
	json: Optional[str] = None
	csv: Optional[str] = None
	progress: bool = False

	def to_dict(self) -> dict:
		return {"json": self.json, "csv": self.csv, "progress": self.progress}

	@classmethod
	def from_dict(cls, data: Optional[dict]) -> "OutputConfig":
		data = _mapping(data, cls)
		return cls(**data)


@dataclass
class RunConfig:
	command: Optional[str] = None
	measures: MeasuresConfig = field(default_factory=MeasuresConfig)
	family: FamilyConfig = field(default_factory=FamilyConfig)
	constants: list[ConstantRequest] = field(default_factory=list)
	whitney: WhitneySection = field(default_factory=WhitneySection)
	proof: ProofSection = field(default_factory=ProofSection)
	output: OutputConfig = field(default_factory=OutputConfig)
	seed: int = 0
	resolution: Union[str, int, float] = "1/16"
	n_jobs: int = 1
	base_dir: Optional[Path] = field(default=None, repr=False, compare=False)

	def __post_init__(self) -> None:
		res = self.resolution_value
		if res <= 0:
			raise ConfigError(f"resolution must be positive, got {self.resolution!r}.")
		if self.measures.sigma is not None or self.measures.omega is not None:
			window = self.measures.window_cube()
			if (window.side / res).denominator != 1:
				raise ConfigError(
					f"resolution {format_rational(res)} does not divide the window side {format_rational(window.side)}."
				)
		if int(self.n_jobs) == 0:
			raise ConfigError("n_jobs must be nonzero.")

	@property
	def resolution_value(self) -> Fraction:
		return _rational(self.resolution, "resolution")

	def to_dict(self) -> dict:
		return {
			"command": self.command,
			"measures": self.measures.to_dict(),
			"family": self.family.to_dict(),
			"constants": [c.to_dict() for c in self.constants],
			"whitney": self.whitney.to_dict(),
			"proof": self.proof.to_dict(),
			"output": self.output.to_dict(),
			"seed": self.seed,
			"resolution": self.resolution,
			"n_jobs": self.n_jobs,
		}

	@classmethod
	def from_dict(cls, data: Optional[dict], base_dir: Optional[Path] = None) -> "RunConfig":
		if data is None:
			data = {}
		if not isinstance(data, dict):
			raise ConfigError("Run config must be a mapping.")
		data = dict(data)
		_validate_keys(data, cls)
		if "base_dir" in data:
			raise ConfigError("Unexpected keys for RunConfig: ['base_dir']")
		constants = data.get("constants") or []
		if not isinstance(constants, list):
			raise ConfigError("constants must be a list of constant requests.")
		try:
			return cls(
				command=data.get("command"),
				measures=MeasuresConfig.from_dict(data.get("measures")),
				family=FamilyConfig.from_dict(data.get("family")),
				constants=[ConstantRequest.from_dict(c) for c in constants],
				whitney=WhitneySection.from_dict(data.get("whitney")),
				proof=ProofSection.from_dict(data.get("proof")),
				output=OutputConfig.from_dict(data.get("output")),
				seed=int(data.get("seed", 0)),
				resolution=data.get("resolution", "1/16"),
				n_jobs=int(data.get("n_jobs", 1)),
				base_dir=base_dir,
			)
		except TypeError as exc:
			raise ConfigError(f"Invalid run config: {exc}") from exc

	def to_yaml(self, path: Union[str, Path]) -> None:
		with open(path, "w", encoding="utf-8") as handle:
			yaml.safe_dump(self.to_dict(), handle, sort_keys=False)

	@classmethod
	def from_yaml(cls, path: Union[str, Path]) -> "RunConfig":
		path = Path(path)
		data = read_yaml(path)
		return cls.from_dict(data or {}, base_dir=path.resolve().parent)
