"""Whitney decompositions and their property checks."""
from twoweight.whitney.decompose import (
	WhitneyConfig,
	WhitneyFamily,
	floor_level,
	maximal_grid_cubes,
	random_open_set,
	whitney_decompose,
	window_lattice,
)
from twoweight.whitney.superlevel import level_range, superlevel_families, superlevel_field, superlevel_whitney
from twoweight.whitney.verify import PropertyReport, verify_nested, verify_whitney

__all__ = [
	"PropertyReport",
	"WhitneyConfig",
	"WhitneyFamily",
	"floor_level",
	"level_range",
	"maximal_grid_cubes",
	"random_open_set",
	"superlevel_families",
	"superlevel_field",
	"superlevel_whitney",
	"verify_nested",
	"verify_whitney",
	"whitney_decompose",
	"window_lattice",
]
