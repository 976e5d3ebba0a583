"""Checks of the five Whitney properties at lattice resolution.

Cubes below the cell level cannot be represented, so a decomposition leaves a
boundary layer of single-cell floor cubes next to the complement. ``passed``
holds the five properties over every cube, floor cubes included, and is
therefore false whenever a floor cube is present. ``interior_passed`` holds
them over the resolved cubes and requires every floor cube to sit in the
boundary layer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from twoweight.geometry.literal import format_cube
from twoweight.whitney.decompose import (
	WhitneyConfig,
	WhitneyFamily,
	dilation_offsets,
	padded_cumsum,
	paired_box_counts,
)

MAX_VIOLATIONS = 5


@dataclass
class PropertyReport:
	disjoint_cover: bool
	whitney_condition: bool
	bounded_overlap: bool
	crowd_control: bool
	nested: bool
	interior_whitney: bool = True
	interior_overlap: bool = True
	interior_crowd: bool = True
	boundary_layer: bool = True
	overlap_max: int = 0
	crowd_max: int = 0
	n_cubes: int = 0
	n_floor: int = 0
	n_sandwich_failures: int = 0
	violations: dict = field(default_factory=dict)

	@property
	def C_W(self) -> int:
		return max(self.overlap_max, self.crowd_max)

	@property
	def passed(self) -> bool:
		return all((
			self.disjoint_cover,
			self.whitney_condition,
			self.bounded_overlap,
			self.crowd_control,
			self.nested,
		))

	@property
	def interior_passed(self) -> bool:
		return all((
			self.disjoint_cover,
			self.interior_whitney,
			self.interior_overlap,
			self.interior_crowd,
			self.nested,
			self.boundary_layer,
		))

	def to_dict(self) -> dict:
		return {
			"disjoint_cover": self.disjoint_cover,
			"whitney_condition": self.whitney_condition,
			"bounded_overlap": self.bounded_overlap,
			"crowd_control": self.crowd_control,
			"nested": self.nested,
			"interior": {
				"whitney_condition": self.interior_whitney,
				"bounded_overlap": self.interior_overlap,
				"crowd_control": self.interior_crowd,
			},
			"boundary_layer": self.boundary_layer,
			"C_W": self.C_W,
			"overlap_max": self.overlap_max,
			"crowd_max": self.crowd_max,
			"n_cubes": self.n_cubes,
			"n_floor": self.n_floor,
			"n_sandwich_failures": self.n_sandwich_failures,
			"passed": self.passed,
			"interior_passed": self.interior_passed,
			"violations": self.violations,
		}


def _dilated_boxes(lo: np.ndarray, hi: np.ndarray, factor) -> tuple[np.ndarray, np.ndarray]:
	cells = (hi - lo)[:, 0]
	d_lo = np.empty_like(lo)
	d_hi = np.empty_like(hi)
	for size in np.unique(cells):
		rows = cells == size
		a, b = dilation_offsets(int(size), factor)
		d_lo[rows] = lo[rows] + a
		d_hi[rows] = lo[rows] + b
	return d_lo, d_hi


def _inside(lo: np.ndarray, hi: np.ndarray, shape: np.ndarray) -> np.ndarray:
	return np.all(lo >= 0, axis=1) & np.all(hi <= shape[None, :], axis=1)


def _clip(lo: np.ndarray, hi: np.ndarray, shape: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
	lo = np.clip(lo, 0, shape[None, :])
	hi = np.clip(hi, 0, shape[None, :])
	return lo, np.maximum(hi, lo)


def _record(violations: dict, name: str, family: WhitneyFamily, indices) -> None:
	bad = [format_cube(family.cubes[int(i)]) for i in list(indices)[:MAX_VIOLATIONS]]
	if bad:
		violations[name] = bad


def verify_whitney(
	family: WhitneyFamily,
	config: Optional[WhitneyConfig] = None,
	C_bound: Optional[int] = None,
) -> PropertyReport:
	"""
	Disjoint cover, Whitney condition, bounded overlap and crowd control over
	every cube, and again over the resolved cubes alone. ``NQ`` touching a cell
	counts as overlap. ``C_W`` is measured on the resolved cubes. With
	``C_bound`` the overlap and crowd counts must not exceed it.
	"""
	config = config or family.config
	omega = family.omega
	lattice = omega.lattice
	shape = np.array(lattice.shape, dtype=np.int64)
	violations: dict = {}
	if not family.cubes:
		empty = omega.is_empty()
		return PropertyReport(empty, True, True, True, True, n_cubes=0, n_floor=0)

	lo, hi = family.boxes
	counts = np.zeros(lattice.shape, dtype=np.int64)
	for i, cube in enumerate(family.cubes):
		counts[lattice.slices(cube)] += 1
	in_lattice = _inside(lo, hi, shape)
	disjoint_cover = bool(np.all(counts == omega.mask.astype(np.int64))) and bool(in_lattice.all())
	if not disjoint_cover:
		_record(violations, "disjoint_cover", family, np.nonzero(~in_lattice)[0])
		overlapping = [i for i, q in enumerate(family.cubes) if np.any(counts[lattice.slices(q)] != 1)]
		violations.setdefault("disjoint_cover", [])
		violations["disjoint_cover"] += [format_cube(family.cubes[i]) for i in overlapping[:MAX_VIOLATIONS]]

	# strict containment inside one family shows up as a doubly covered cell
	nested = int(counts.max()) <= 1

	floor = np.array(family.floor, dtype=bool)
	resolved = ~floor
	exterior = padded_cumsum(~omega.mask)

	w_lo, w_hi = _dilated_boxes(lo, hi, config.R_W)
	c_lo, c_hi = _clip(w_lo, w_hi, shape)
	inner = _inside(w_lo, w_hi, shape) & (paired_box_counts(exterior, c_lo, c_hi) == 0)
	o_lo, o_hi = _dilated_boxes(lo, hi, 3 * config.R_W)
	c_lo, c_hi = _clip(o_lo, o_hi, shape)
	outer = ~_inside(o_lo, o_hi, shape) | (paired_box_counts(exterior, c_lo, c_hi) > 0)
	sandwich = inner & outer
	_record(violations, "whitney_condition", family, np.nonzero(~sandwich)[0])

	# a floor cube is one cell whose 3 R_W dilation reaches the complement
	single_cell = np.all(hi - lo == 1, axis=1)
	layer_ok = ~floor | (single_cell & outer)
	_record(violations, "boundary_layer", family, np.nonzero(~layer_ok)[0])

	n_lo, n_hi = _dilated_boxes(lo, hi, config.N)
	c_lo, c_hi = _clip(n_lo, n_hi, shape)
	contained = _inside(n_lo, n_hi, shape) & (paired_box_counts(exterior, c_lo, c_hi) == 0)
	overlap_all = np.zeros(lattice.shape, dtype=np.int64)
	overlap_res = np.zeros(lattice.shape, dtype=np.int64)
	labels = family.labels
	crowd = np.zeros(len(family), dtype=np.int64)
	for row in range(len(family)):
		box = tuple(slice(a, b) for a, b in zip(c_lo[row], c_hi[row]))
		overlap_all[box] += 1
		if resolved[row]:
			overlap_res[box] += 1
		found = np.unique(labels[box])
		crowd[row] = int(np.count_nonzero(found >= 0))
	overlap_max = int(overlap_res.max())
	crowd_max = int(crowd[resolved].max()) if resolved.any() else 0
	_record(violations, "bounded_overlap", family, np.nonzero(~contained)[0])
	bounded_overlap = bool(contained.all())
	interior_overlap = bool(contained[resolved].all())
	crowd_control = interior_crowd = True
	if C_bound is not None:
		bound = int(C_bound)
		bounded_overlap = bounded_overlap and int(overlap_all.max()) <= bound
		interior_overlap = interior_overlap and overlap_max <= bound
		crowd_control = bool(np.all(crowd <= bound))
		interior_crowd = crowd_max <= bound
		_record(violations, "crowd_control", family, np.nonzero(crowd > bound)[0])
	return PropertyReport(
		disjoint_cover,
		bool(sandwich.all()),
		bounded_overlap,
		crowd_control,
		nested,
		interior_whitney=bool(sandwich[resolved].all()),
		interior_overlap=interior_overlap,
		interior_crowd=interior_crowd,
		boundary_layer=bool(layer_ok.all()),
		overlap_max=overlap_max,
		crowd_max=crowd_max,
		n_cubes=len(family),
		n_floor=int(floor.sum()),
		n_sandwich_failures=int(np.count_nonzero(~sandwich)),
		violations=violations,
	)


def verify_nested(families: Mapping[int, WhitneyFamily]) -> dict:
	"""
	Across superlevels: ``Q^k`` strictly inside ``Q^l`` only when ``k > l``, and
	every cube of ``W_{k+1}`` lies in some cube of ``W_k``.
	"""
	keys = sorted(families)
	violations = []
	uncovered = []
	for lower, upper in zip(keys, keys[1:]):
		coarse, fine = families[lower], families[upper]
		if not fine.cubes:
			continue
		if not coarse.cubes:
			uncovered += [(upper, format_cube(q)) for q in fine.cubes[:MAX_VIOLATIONS]]
			continue
		labels = coarse.labels
		lo, _ = fine.boxes
		for q, start in zip(fine.cubes, lo):
			owner = int(labels[tuple(start)])
			if owner < 0 or not coarse.cubes[owner].contains(q):
				uncovered.append((upper, format_cube(q)))
	for a in keys:
		for b in keys:
			if a >= b or not families[a].cubes or not families[b].cubes:
				continue
			# a < b: no cube of W_a may sit strictly inside a cube of W_b
			labels = families[b].labels
			lo, _ = families[a].boxes
			for q, start in zip(families[a].cubes, lo):
				owner = int(labels[tuple(start)])
				if owner >= 0:
					other = families[b].cubes[owner]
					if other.side > q.side and other.contains(q):
						violations.append((a, b, format_cube(q)))
	return {
		"nested": not violations,
		"compatible": not uncovered,
		"violations": violations[:MAX_VIOLATIONS],
		"uncovered": uncovered[:MAX_VIOLATIONS],
	}
