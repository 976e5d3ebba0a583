"""
Operator fields on evaluation lattices.

A field holds one value per cell, evaluated at the cell midpoint. Superlevel
sets of a field are cell sets on the same lattice.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import RationalLike, as_rational
from twoweight.measures.lattice import CellSet, Lattice, LatticeFunction


@dataclass(frozen=True)
class OperatorField:
	lattice: Lattice
	values: np.ndarray = field(compare=False)
	provenance: dict = field(default_factory=dict, compare=False)

	def __post_init__(self) -> None:
		values = np.asarray(self.values, dtype=np.float64)
		if values.shape != self.lattice.shape:
			raise InvalidParameterError(
				f"Field shape {values.shape} does not match lattice shape {self.lattice.shape}."
			)
		values = np.maximum(values, 0.0)
		values.setflags(write=False)
		object.__setattr__(self, "values", values)

	@property
	def max(self) -> float:
		return float(self.values.max()) if self.values.size else 0.0

	def at(self, x: Sequence[RationalLike]) -> float:
		"""Value on the cell containing ``x``; zero outside the lattice."""
		index = self.lattice.cell_index(x)
		if index is None:
			return 0.0
		return float(self.values[index])

	def restricted(self, window: Lattice) -> "OperatorField":
		"""The field on a sub-lattice sharing cells with this one."""
		offset = self.lattice.offset_of(window)
		slices = tuple(slice(o, o + s) for o, s in zip(offset, window.shape))
		return OperatorField(window, self.values[slices], dict(self.provenance))


def superlevel(values: OperatorField, t: float) -> CellSet:
	"""Cells where the field exceeds ``t``."""
	if not t > 0:
		raise InvalidParameterError(f"Superlevel threshold must be positive, got {t}.")
	return CellSet(values.lattice, values.values > float(t))


def evaluation_lattice(
	f: LatticeFunction,
	res: RationalLike,
	window: Optional[Cube] = None,
	anchor: Optional[Sequence[RationalLike]] = None,
) -> Lattice:
	"""
	Lattice of spacing ``res`` aligned to ``anchor`` (default ``f``'s origin),
	covering both the support of ``f`` and ``window``.
	"""
	res = as_rational(res)
	if res <= 0:
		raise InvalidParameterError(f"Resolution must be positive, got {res}.")
	lower = list(f.lattice.origin)
	upper = list(f.lattice.upper)
	if window is not None:
		lower = [min(a, b) for a, b in zip(lower, window.corner)]
		upper = [max(a, b) for a, b in zip(upper, window.upper)]
	return Lattice.covering(lower, upper, res, anchor=f.lattice.origin if anchor is None else anchor)


def field_rows(values: OperatorField) -> list[list[float]]:
	"""Rows ``(coords..., value)`` in lexicographic cell order."""
	points = values.lattice.midpoint_grid().reshape(-1, values.lattice.dim)
	flat = values.values.reshape(-1)
	return [list(map(float, p)) + [float(v)] for p, v in zip(points, flat)]


def write_field_csv(
	values: OperatorField,
	path: Union[str, Path],
	metadata: Optional[Mapping[str, object]] = None,
) -> Path:
	"""Write ``coords..., value`` rows, preceded by ``# key: value`` comment lines."""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", encoding="utf-8", newline="") as handle:
		for key, value in (metadata or {}).items():
			handle.write(f"# {key}: {value}\n")
		writer = csv.writer(handle, lineterminator="\n")
		writer.writerow([f"x{i}" for i in range(values.lattice.dim)] + ["value"])
		for row in field_rows(values):
			writer.writerow([repr(v) for v in row])
	return path
