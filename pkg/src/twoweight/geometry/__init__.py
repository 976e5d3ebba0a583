"""Exact cube arithmetic and shifted dyadic grids."""
from twoweight.geometry.cubes import (
	Cube,
	bounding_cube,
	children,
	cube_bounds,
	dilate,
	parents,
)
from twoweight.geometry.grids import (
	CoverResult,
	ShiftedGrid,
	all_shifted_grids,
	containing_chain,
	containing_cube,
	cover_cube,
	grid_cube,
	grid_parent,
	is_grid_cube,
	iter_level_cubes,
	level_index,
)
from twoweight.geometry.literal import format_cube, format_point, parse_cube, parse_point
from twoweight.geometry.rational import as_rational, as_vector, format_rational

__all__ = [
	"Cube",
	"CoverResult",
	"ShiftedGrid",
	"all_shifted_grids",
	"as_rational",
	"as_vector",
	"bounding_cube",
	"children",
	"containing_chain",
	"containing_cube",
	"cover_cube",
	"cube_bounds",
	"dilate",
	"format_cube",
	"format_point",
	"format_rational",
	"grid_cube",
	"grid_parent",
	"is_grid_cube",
	"iter_level_cubes",
	"level_index",
	"parents",
	"parse_cube",
	"parse_point",
]
