"""
Measure and test-function spec files.

A measure spec is a JSON object::

	{
	  "kind": "exp-density" | "indicator-density" | "lebesgue" | "lattice",
	  "dim": 1,
	  "params": {...},
	  "support": null | {"lower": [...], "upper": [...]} | {"origin": [...], "shape": [...]},
	  "h": null | "1/64"
	}

``params`` holds ``rate`` for ``exp-density``, ``lower``/``upper`` for
``indicator-density``, nothing for ``lebesgue`` and the nested ``masses`` list
for ``lattice``. Rationals are written as strings (``"1/3"``). For a lattice
measure ``support`` gives the lattice origin and shape. For a closed form,
``support`` and ``h`` are optional and name the truncation box and cell size
used whenever the measure has to be put on a lattice.

A test function is ``{"h", "origin", "shape", "values"}`` or the shorthand
``{"cube": "[0,1)", "h": "1/16", "value": 1}`` for a scaled indicator.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np

from twoweight.errors import ConfigError, TwoWeightError
from twoweight.geometry.literal import format_cube, parse_cube
from twoweight.geometry.rational import as_rational, as_vector, format_rational
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import (
	ExpDensity,
	IndicatorDensity,
	LatticeMeasure,
	Lebesgue,
	Measure,
	discretize,
)

MEASURE_KINDS = ("exp-density", "indicator-density", "lebesgue", "lattice")


@dataclass(frozen=True)
class MeasureSpec:
	measure: Measure
	support: Optional[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]] = None
	h: Optional[Fraction] = None

	def lattice(self) -> Optional[Lattice]:
		"""Truncation lattice, or ``None`` when no box/cell size was given."""
		if isinstance(self.measure, LatticeMeasure):
			return self.measure.lattice
		if self.support is None or self.h is None:
			return None
		lower, upper = self.support
		return Lattice.covering(lower, upper, self.h)

	def lattice_measure(self, method: str = "exact") -> LatticeMeasure:
		lattice = self.lattice()
		if lattice is None:
			raise ConfigError(f"Measure {self.measure.kind!r} needs 'support' and 'h' to be put on a lattice.")
		return discretize(self.measure, lattice, method)

	def to_dict(self) -> dict:
		data = self.measure.to_dict()
		if isinstance(self.measure, LatticeMeasure):
			return data
		data["support"] = None
		if self.support is not None:
			data["support"] = {
				"lower": [format_rational(v) for v in self.support[0]],
				"upper": [format_rational(v) for v in self.support[1]],
			}
		data["h"] = None if self.h is None else format_rational(self.h)
		return data

	@classmethod
	def from_dict(cls, data: dict) -> "MeasureSpec":
		if not isinstance(data, dict):
			raise ConfigError("Measure spec must be a mapping.")
		extra = set(data) - {"kind", "dim", "params", "support", "h"}
		if extra:
			raise ConfigError(f"Unknown measure spec keys: {sorted(extra)}")
		kind = data.get("kind")
		if kind not in MEASURE_KINDS:
			raise ConfigError(f"Unknown measure kind {kind!r}; expected one of {list(MEASURE_KINDS)}.")
		params = data.get("params") or {}
		try:
			dim = int(data.get("dim", 1))
			if kind == "lattice":
				support = data.get("support") or {}
				lattice = Lattice(as_vector(support["origin"]), as_rational(data["h"]), tuple(support["shape"]))
				masses = np.asarray(params["masses"], dtype=np.float64).reshape(lattice.shape)
				return cls(LatticeMeasure(lattice, masses))
			if kind == "exp-density":
				measure: Measure = ExpDensity(dim, as_rational(params.get("rate", 1)))
			elif kind == "lebesgue":
				measure = Lebesgue(dim)
			else:
				measure = IndicatorDensity(as_vector(params["lower"]), as_vector(params["upper"]))
			support = data.get("support")
			box = None
			if support is not None:
				box = (as_vector(support["lower"], dim), as_vector(support["upper"], dim))
			h = data.get("h")
			return cls(measure, box, None if h is None else as_rational(h))
		except KeyError as exc:
			raise ConfigError(f"Measure spec of kind {kind!r} is missing {exc.args[0]!r}.") from exc
		except ConfigError:
			raise
		except (TwoWeightError, TypeError, ValueError) as exc:
			raise ConfigError(f"Invalid {kind!r} measure spec: {exc}") from exc


def function_to_dict(f: LatticeFunction) -> dict:
	data = f.lattice.to_dict()
	data["values"] = f.values.tolist()
	return data


def function_from_dict(data: dict) -> LatticeFunction:
	if not isinstance(data, dict):
		raise ConfigError("Test function spec must be a mapping.")
	try:
		if "cube" in data:
			cube = parse_cube(str(data["cube"]))
			h = as_rational(data["h"])
			cells = cube.side / h
			if cells.denominator != 1:
				raise ConfigError(f"Cell size {h} does not divide the side of {format_cube(cube)}.")
			lattice = Lattice.over_cube(cube, int(cells))
			return LatticeFunction.constant(lattice, float(as_rational(data.get("value", 1))))
		lattice = Lattice.from_dict(data)
		return LatticeFunction(lattice, np.asarray(data["values"], dtype=np.float64).reshape(lattice.shape))
	except KeyError as exc:
		raise ConfigError(f"Test function spec is missing {exc.args[0]!r}.") from exc
	except ConfigError:
		raise
	except (TwoWeightError, TypeError, ValueError) as exc:
		raise ConfigError(f"Invalid test function spec: {exc}") from exc


def load_measure_spec(path: Union[str, Path]) -> MeasureSpec:
	path = Path(path)
	if not path.exists():
		raise ConfigError(f"Measure spec not found: {path}")
	try:
		data = json.loads(path.read_text(encoding="utf-8"))
	except json.JSONDecodeError as exc:
		raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
	return MeasureSpec.from_dict(data)


def dump_measure_spec(spec: MeasureSpec, path: Union[str, Path]) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8")
	return path
