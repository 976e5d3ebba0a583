"""Muckenhoupt and testing constants over finite cube families."""
from twoweight.constants.corroboration import corroboration_pair, corroboration_ratio, corroboration_sweep
from twoweight.constants.counterexample import (
	CASES,
	HAND_BOUNDS,
	a2_closed_form,
	a2_table,
	counterexample_pair,
	counterexample_report,
	interval_case,
	swapped_oracle,
	swapped_ratio,
	triple_testing_sweep,
)
from twoweight.constants.families import CubeFamily
from twoweight.constants.reports import ConstantReport, write_reports
from twoweight.constants.testing import (
	TestingOptions,
	TestingTable,
	a2,
	a2_alpha,
	a2_quotient,
	check_variant_implications,
	norm_lower_bound,
	testing_constant,
	testing_quotient,
	testing_table,
	weak_norm_lower_bound,
)
from twoweight.constants.variants import Variant

__all__ = [
	"CASES",
	"ConstantReport",
	"CubeFamily",
	"HAND_BOUNDS",
	"TestingOptions",
	"TestingTable",
	"Variant",
	"a2",
	"a2_alpha",
	"a2_closed_form",
	"a2_quotient",
	"a2_table",
	"check_variant_implications",
	"corroboration_pair",
	"corroboration_ratio",
	"corroboration_sweep",
	"counterexample_pair",
	"counterexample_report",
	"interval_case",
	"norm_lower_bound",
	"swapped_oracle",
	"swapped_ratio",
	"testing_constant",
	"testing_quotient",
	"testing_table",
	"triple_testing_sweep",
	"weak_norm_lower_bound",
	"write_reports",
]
