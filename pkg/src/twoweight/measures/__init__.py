"""Weights: lattices, closed-form and lattice measures, spec files."""
from twoweight.measures.lattice import CellSet, Lattice, LatticeFunction, transfer
from twoweight.measures.measure import (
	ExpDensity,
	IndicatorDensity,
	LatticeMeasure,
	Lebesgue,
	Measure,
	ProductMeasure,
	cell_weights,
	discretize,
	restrict,
	weighted_integral,
)
from twoweight.measures.prefix import PrefixTable, grid_box_sums
from twoweight.measures.spec_file import (
	MeasureSpec,
	dump_measure_spec,
	function_from_dict,
	function_to_dict,
	load_measure_spec,
)


def mass(mu: Measure, cube) -> float:
	"""``|Q|_mu``."""
	return mu.mass(cube)


__all__ = [
	"CellSet",
	"ExpDensity",
	"IndicatorDensity",
	"Lattice",
	"LatticeFunction",
	"LatticeMeasure",
	"Lebesgue",
	"Measure",
	"MeasureSpec",
	"PrefixTable",
	"ProductMeasure",
	"cell_weights",
	"discretize",
	"dump_measure_spec",
	"function_from_dict",
	"function_to_dict",
	"grid_box_sums",
	"load_measure_spec",
	"mass",
	"restrict",
	"transfer",
	"weighted_integral",
]
