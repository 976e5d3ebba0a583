"""Constant reports: value, witness and the metadata needed to reproduce them."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from twoweight.geometry.cubes import Cube
from twoweight.geometry.literal import format_cube


@dataclass
class ConstantReport:
	constant: str
	value: float
	squared: Optional[float] = None
	variant: Optional[str] = None
	witness: Optional[Cube] = None
	witness_function: Optional[int] = None
	family_size: int = 0
	admissible_size: int = 0
	resolution: Optional[str] = None
	params: dict = field(default_factory=dict)
	flags: list = field(default_factory=list)

	@classmethod
	def from_squared(cls, constant: str, squared: float, **kwargs: Any) -> "ConstantReport":
		return cls(constant, math.sqrt(max(squared, 0.0)), squared=squared, **kwargs)

	def to_dict(self) -> dict:
		return {
			"constant": self.constant,
			"variant": self.variant,
			"value": self.value,
			"squared": self.squared,
			"witness": None if self.witness is None else format_cube(self.witness),
			"witness_function": self.witness_function,
			"family_size": self.family_size,
			"admissible_size": self.admissible_size,
			"res": self.resolution,
			"params": self.params,
			"flags": list(self.flags),
		}


def write_reports(
	reports: list[dict],
	path: Union[str, Path],
	metadata: Optional[dict] = None,
) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	payload = {"metadata": metadata or {}, "reports": reports}
	with open(path, "w", encoding="utf-8") as handle:
		json.dump(payload, handle, indent=2, sort_keys=False)
		handle.write("\n")
	return path
