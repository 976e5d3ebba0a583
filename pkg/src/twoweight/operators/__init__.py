"""Maximal, dyadic and fractional operator fields."""
from __future__ import annotations

from typing import Optional

from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import RationalLike
from twoweight.measures.lattice import LatticeFunction
from twoweight.measures.measure import Measure
from twoweight.operators.fields import (
	OperatorField,
	evaluation_lattice,
	field_rows,
	superlevel,
	write_field_csv,
)
from twoweight.operators.fractional import frac_integral, frac_integral_field
from twoweight.operators.masstable import MassTable
from twoweight.operators.maximal import (
	dyadic_field,
	dyadic_maximal,
	frac_maximal,
	frac_maximal_field,
	maximal,
	maximal_field,
	one_third_constant,
	weighted_dyadic_field,
	weighted_dyadic_maximal,
)

OPERATORS = ("M", "M_alpha", "I_alpha")


def evaluate_field(
	op: str,
	f: LatticeFunction,
	sigma: Measure,
	res: RationalLike,
	window: Optional[Cube] = None,
	alpha: Optional[float] = None,
	grids: str = "all",
	max_side: Optional[RationalLike] = None,
) -> OperatorField:
	"""
	Field of ``op`` applied to ``f sigma``; ``alpha`` is required for the
	fractional operators. ``max_side`` caps the lattice-cornered candidates of
	the maximal operators and is ignored by ``I_alpha``.
	"""
	if op == "M":
		return maximal_field(f, sigma, res, window=window, grids=grids, max_side=max_side)
	if op not in OPERATORS:
		raise InvalidParameterError(f"Unknown operator {op!r}; expected one of {list(OPERATORS)}.")
	if alpha is None:
		raise InvalidParameterError(f"Operator {op} needs alpha.")
	if op == "M_alpha":
		return frac_maximal_field(alpha, f, sigma, res, window=window, grids=grids, max_side=max_side)
	return frac_integral_field(alpha, f, sigma, res, window=window)


__all__ = [
	"MassTable",
	"OPERATORS",
	"OperatorField",
	"dyadic_field",
	"dyadic_maximal",
	"evaluate_field",
	"evaluation_lattice",
	"field_rows",
	"frac_integral",
	"frac_integral_field",
	"frac_maximal",
	"frac_maximal_field",
	"maximal",
	"maximal_field",
	"one_third_constant",
	"superlevel",
	"weighted_dyadic_field",
	"weighted_dyadic_maximal",
	"write_field_csv",
]
