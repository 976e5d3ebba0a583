"""
Muckenhoupt constants, testing constants and norm lower bounds.

All constants are maxima over finite families (cubes or test functions) of
quantities evaluated with lower-bound operator fields, so every reported value
is a lower bound of the true supremum. Reports carry the family size and the
resolution so that convergence can be studied.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from twoweight.constants.families import CubeFamily
from twoweight.constants.reports import ConstantReport
from twoweight.constants.variants import Variant
from twoweight.errors import DegenerateInputError, InvalidParameterError
from twoweight.geometry.cubes import Cube, dilate
from twoweight.geometry.rational import RationalLike, as_rational
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import LatticeMeasure, Measure
from twoweight.operators import OPERATORS, OperatorField, evaluate_field
from twoweight.operators.masstable import MassTable
from twoweight.sweeps import argmax_smallest, parallel_map

DOMAINS = ("cube", "dilate", "window")


def _check_op(op: str, alpha: Optional[float], dim: int) -> Optional[float]:
	if op not in OPERATORS:
		raise InvalidParameterError(f"Unknown operator {op!r}; expected one of {list(OPERATORS)}.")
	if op == "M":
		return None
	if alpha is None or not 0 < float(alpha) < dim:
		raise InvalidParameterError(f"Operator {op} needs alpha in (0, {dim}), got {alpha}.")
	return float(alpha)


def a2(sigma: Measure, omega: Measure, family: CubeFamily) -> ConstantReport:
	"""``sup (|Q|_w / |Q|)(|Q|_s / |Q|)`` over the family."""
	return _a2_report("A2", sigma, omega, family, exponent=1.0, params={})


def a2_alpha(alpha: float, sigma: Measure, omega: Measure, family: CubeFamily) -> ConstantReport:
	"""``sup |Q|_s |Q|_w / |Q|^{2(1 - alpha/n)}`` over the family."""
	n = family.dim
	if not 0 < float(alpha) < n:
		raise InvalidParameterError(f"alpha={alpha} outside (0, {n}).")
	return _a2_report("A2_alpha", sigma, omega, family, exponent=1.0 - float(alpha) / n, params={"alpha": float(alpha)})


def _a2_report(
	name: str,
	sigma: Measure,
	omega: Measure,
	family: CubeFamily,
	exponent: float,
	params: dict,
) -> ConstantReport:
	lower, upper = family.bounds()
	volume = np.prod(upper - lower, axis=1)
	with np.errstate(over="ignore", invalid="ignore"):
		products = sigma.mass_boxes(lower, upper) * omega.mass_boxes(lower, upper) / volume ** (2 * exponent)
	best = argmax_smallest(products, family.cubes)
	report = ConstantReport(
		name,
		0.0,
		family_size=len(family),
		admissible_size=int(np.count_nonzero(~np.isnan(products))),
		params=params,
	)
	if best is None:
		report.flags.append("no-admissible-cubes")
		return report
	report.value = float(products[best])
	report.witness = family.cubes[best]
	if math.isinf(report.value):
		report.flags.append("infinite")
	return report


def a2_quotient(sigma: Measure, omega: Measure, cube: Cube, alpha: Optional[float] = None) -> float:
	exponent = 1.0 if alpha is None else 1.0 - float(alpha) / cube.dim
	return sigma.mass(cube) * omega.mass(cube) / float(cube.volume) ** (2 * exponent)


@dataclass(frozen=True)
class TestingOptions:
	"""
	How ``T(1_Q sigma)`` is put on a lattice.

	Cubes aligned with a lattice ``sigma`` use its cells when there are at most
	``cells`` per side; every other cube is cut into ``cells`` per side.
	``domain`` selects the integration set ``Q``, ``dilation * Q`` or ``window``.
	"""

	cells: int = 32
	domain: str = "cube"
	dilation: Fraction = Fraction(3)
	window: Optional[Cube] = None
	grids: str = "all"

	def __post_init__(self) -> None:
		if int(self.cells) <= 0:
			raise InvalidParameterError("cells must be positive.")
		if self.domain not in DOMAINS:
			raise InvalidParameterError(f"Unknown domain {self.domain!r}; expected one of {list(DOMAINS)}.")
		if self.domain == "window" and self.window is None:
			raise InvalidParameterError("Domain 'window' needs a window cube.")
		object.__setattr__(self, "dilation", as_rational(self.dilation))


def local_function(cube: Cube, sigma: Measure, cells: int) -> LatticeFunction:
	"""``1_Q`` on the lattice used to evaluate ``T(1_Q sigma)``."""
	if isinstance(sigma, LatticeMeasure) and sigma.lattice.is_aligned(cube):
		count = int(cube.side / sigma.lattice.h)
		if count <= int(cells):
			return LatticeFunction.constant(sigma.lattice.sub_lattice(cube))
	return LatticeFunction.constant(Lattice.over_cube(cube, int(cells)))


def region_masses(values: OperatorField, mu: Measure, region: Optional[Cube]) -> np.ndarray:
	"""``mu(cell ∩ region)`` for every cell of the field lattice."""
	lower, upper = values.lattice.cell_bounds()
	lower = lower.reshape(-1, values.lattice.dim)
	upper = upper.reshape(-1, values.lattice.dim)
	if region is not None:
		lower = np.maximum(lower, region.lower_float()[None, :])
		upper = np.minimum(upper, region.upper_float()[None, :])
		upper = np.maximum(upper, lower)
	return mu.mass_boxes(lower, upper).reshape(values.lattice.shape)


def _domain(cube: Cube, options: TestingOptions) -> Cube:
	if options.domain == "cube":
		return cube
	if options.domain == "dilate":
		return dilate(cube, options.dilation)
	return options.window


def testing_numerator(
	op: str,
	sigma: Measure,
	omega: Measure,
	cube: Cube,
	alpha: Optional[float] = None,
	options: TestingOptions = TestingOptions(),
) -> float:
	"""``int_domain T(1_Q sigma)^2 domega``."""
	f = local_function(cube, sigma, options.cells)
	# for x in Q no cube wider than Q beats Q itself on 1_Q
	max_side = cube.side if options.domain == "cube" else None
	region = _domain(cube, options)
	values = evaluate_field(op, f, sigma, f.lattice.h, window=region, alpha=alpha, grids=options.grids, max_side=max_side)
	masses = region_masses(values, omega, region)
	return float(np.sum(values.values**2 * masses))


def parent_min_masses(sigma: Measure, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
	"""``min_P |P|_s`` over the ``2^n`` parents of every box."""
	side = (upper - lower)[:, :1]
	best = np.full(lower.shape[0], np.inf)
	for bits in itertools.product((0, 1), repeat=lower.shape[1]):
		shift = side * np.array(bits, dtype=np.float64)[None, :]
		p_lower = lower - shift
		best = np.minimum(best, sigma.mass_boxes(p_lower, p_lower + 2 * side))
	return best


def _dilated_bounds(lower: np.ndarray, upper: np.ndarray, lam: float) -> tuple[np.ndarray, np.ndarray]:
	center = 0.5 * (lower + upper)
	half = 0.5 * lam * (upper - lower)
	return center - half, center + half


@dataclass
class TestingTable:
	"""Per-cube numerators and sigma masses; variants only change the reduction."""

	op: str
	family: CubeFamily
	sigma: Measure
	omega: Measure
	alpha: Optional[float]
	options: TestingOptions
	cube_mass: np.ndarray
	parent_min: np.ndarray
	numerators: np.ndarray
	dual: bool = False
	_dilated: dict = field(default_factory=dict)

	def dilated_mass(self, lam: Fraction) -> np.ndarray:
		key = as_rational(lam)
		if key not in self._dilated:
			lower, upper = self.family.bounds()
			d_lower, d_upper = _dilated_bounds(lower, upper, float(key))
			self._dilated[key] = self.sigma.mass_boxes(d_lower, d_upper)
		return self._dilated[key]

	def quotients(self, variant: Variant) -> tuple[np.ndarray, np.ndarray]:
		dilated = self.dilated_mass(variant.lam) if variant.lam is not None else None
		denominator, admissible = variant.apply(self.cube_mass, self.parent_min, dilated)
		admissible = admissible & (denominator > 0)
		with np.errstate(divide="ignore", invalid="ignore"):
			quotient = np.where(admissible, self.numerators / np.where(denominator > 0, denominator, 1.0), -np.inf)
		return quotient, admissible

	def constant(self, variant: Variant) -> ConstantReport:
		quotient, admissible = self.quotients(variant)
		name = {"M": "T_M", "M_alpha": "T_M_alpha", "I_alpha": "T_I_alpha"}[self.op]
		if self.dual:
			name += "_dual"
		report = ConstantReport(
			name,
			0.0,
			squared=0.0,
			variant=variant.label,
			family_size=len(self.family),
			admissible_size=int(admissible.sum()),
			params={
				"alpha": self.alpha,
				"domain": self.options.domain,
				"cells": self.options.cells,
				"grids": self.options.grids,
			},
		)
		best = argmax_smallest(quotient, self.family.cubes)
		if best is None:
			report.flags.append("no-admissible-cubes")
			return report
		report.squared = float(quotient[best])
		report.value = math.sqrt(max(report.squared, 0.0))
		report.witness = self.family.cubes[best]
		if math.isinf(report.squared):
			report.flags.append("infinite")
		return report


def testing_table(
	op: str,
	sigma: Measure,
	omega: Measure,
	family: CubeFamily,
	alpha: Optional[float] = None,
	options: TestingOptions = TestingOptions(),
	dual: bool = False,
	n_jobs: int = 1,
	progress: bool = False,
) -> TestingTable:
	"""
	Numerators ``int T(1_Q s)^2 dw`` for every cube with ``|Q|_s > 0``; cubes
	whose integration domain has no ``w``-mass get zero without evaluation.

	With ``dual=True`` the roles of the two measures are swapped.
	"""
	alpha = _check_op(op, alpha, family.dim)
	if dual:
		sigma, omega = omega, sigma
	lower, upper = family.bounds()
	cube_mass = sigma.mass_boxes(lower, upper)
	parent_min = parent_min_masses(sigma, lower, upper)
	domains = [_domain(q, options) for q in family.cubes]
	d_lower, d_upper = CubeFamily.explicit(domains).bounds()
	live = (cube_mass > 0) & (omega.mass_boxes(d_lower, d_upper) > 0)
	active = [q for q, keep in zip(family.cubes, live) if keep]

	def numerator(cube: Cube) -> float:
		return testing_numerator(op, sigma, omega, cube, alpha, options)

	values = parallel_map(numerator, active, n_jobs=n_jobs, progress=progress, desc=f"testing {op}")
	numerators = np.zeros(len(family), dtype=np.float64)
	numerators[live] = values
	return TestingTable(op, family, sigma, omega, alpha, options, cube_mass, parent_min, numerators, dual)


def testing_constant(
	op: str,
	sigma: Measure,
	omega: Measure,
	family: CubeFamily,
	variant: Variant = Variant(),
	alpha: Optional[float] = None,
	options: TestingOptions = TestingOptions(),
	dual: bool = False,
	n_jobs: int = 1,
	progress: bool = False,
) -> ConstantReport:
	"""Squared constant = max over admissible cubes of ``int T(1_Q s)^2 dw / denominator``."""
	if options.domain == "dilate" and variant.lam is not None:
		options = replace(options, dilation=variant.lam)
	table = testing_table(op, sigma, omega, family, alpha, options, dual, n_jobs, progress)
	return table.constant(variant)


def testing_quotient(
	op: str,
	sigma: Measure,
	omega: Measure,
	cube: Cube,
	variant: Variant = Variant(),
	alpha: Optional[float] = None,
	options: TestingOptions = TestingOptions(),
	dual: bool = False,
) -> float:
	"""The squared quotient of a single cube; ``-inf`` when it is not admissible."""
	table = testing_table(op, sigma, omega, CubeFamily.explicit([cube]), alpha, options, dual)
	quotient, _ = table.quotients(variant)
	return float(quotient[0])


def check_variant_implications(table: TestingTable, lam: RationalLike, D: RationalLike) -> dict:
	"""
	Instance-level relations between the variants on one table.

	* ``plain >= lambda(lam)`` since ``|lam Q|_s >= |Q|_s``;
	* ``d_parental(D)^2 <= D * parental^2`` and ``d_lambda^2 <= D * lambda^2``;
	* for ``lam >= 3`` every ``d_lambda(lam, D)`` cube is ``d_parental(D)``
	  admissible, because ``3Q`` contains every parent of ``Q``.
	"""
	lam = as_rational(lam)
	D = as_rational(D)
	tol = 1e-12
	reports = {
		key: table.constant(variant)
		for key, variant in {
			"plain": Variant("plain"),
			"parental": Variant("parental"),
			"lambda": Variant("lambda", lam=lam),
			"d_parental": Variant("d_parental", D=D),
			"d_lambda": Variant("d_lambda", lam=lam, D=D),
		}.items()
	}
	sq = {key: (r.squared or 0.0) for key, r in reports.items()}
	_, adm_dl = table.quotients(Variant("d_lambda", lam=lam, D=D))
	_, adm_dp = table.quotients(Variant("d_parental", D=D))
	checks = {
		"plain_dominates_lambda": sq["lambda"] <= sq["plain"] * (1 + tol),
		"d_parental_vs_parental": sq["d_parental"] <= float(D) * sq["parental"] * (1 + tol),
		"d_lambda_vs_lambda": sq["d_lambda"] <= float(D) * sq["lambda"] * (1 + tol),
		"d_lambda_within_d_parental": bool(np.all(~adm_dl | adm_dp)) if lam >= 3 else None,
	}
	return {
		"checks": checks,
		"passed": all(v is not False for v in checks.values()),
		"values": {key: r.value for key, r in reports.items()},
		"admissible": {key: r.admissible_size for key, r in reports.items()},
	}


def _square_norm(f: LatticeFunction, sigma: Measure) -> float:
	squared = LatticeFunction(f.lattice, f.values**2)
	return float(MassTable.build(squared, sigma).weights.sum())


def _function_fields(
	op: str,
	sigma: Measure,
	omega: Measure,
	functions: Sequence[LatticeFunction],
	res: Optional[RationalLike],
	window: Optional[Cube],
	alpha: Optional[float],
	grids: str,
	n_jobs: int,
) -> tuple[np.ndarray, list]:
	if not functions:
		raise DegenerateInputError("No test functions supplied.")
	alpha = _check_op(op, alpha, functions[0].dim)
	norms = np.array([_square_norm(f, sigma) for f in functions])
	if not np.any(norms > 0):
		raise DegenerateInputError("Every test function is sigma-null.")

	def evaluate(index: int) -> Optional[tuple[np.ndarray, np.ndarray]]:
		if norms[index] <= 0:
			return None
		f = functions[index]
		values = evaluate_field(op, f, sigma, res if res is not None else f.lattice.h, window=window, alpha=alpha, grids=grids)
		return values.values, region_masses(values, omega, window)

	return norms, parallel_map(evaluate, list(range(len(functions))), n_jobs=n_jobs)


def norm_lower_bound(
	op: str,
	sigma: Measure,
	omega: Measure,
	functions: Sequence[LatticeFunction],
	res: Optional[RationalLike] = None,
	window: Optional[Cube] = None,
	alpha: Optional[float] = None,
	grids: str = "all",
	n_jobs: int = 1,
) -> ConstantReport:
	"""``max_f ||T(f s)||_{L2(w)} / ||f||_{L2(s)}`` over the supplied functions."""
	norms, fields = _function_fields(op, sigma, omega, functions, res, window, alpha, grids, n_jobs)
	ratios = np.full(len(functions), -np.inf)
	for idx, item in enumerate(fields):
		if item is not None:
			values, masses = item
			ratios[idx] = float(np.sum(values**2 * masses)) / norms[idx]
	best = argmax_smallest(ratios, list(range(len(functions))))
	report = ConstantReport.from_squared(
		f"N_{op}",
		0.0 if best is None else float(ratios[best]),
		witness_function=best,
		family_size=len(functions),
		admissible_size=int(np.sum(norms > 0)),
		resolution=None if res is None else str(as_rational(res)),
		params={"alpha": alpha, "grids": grids},
	)
	if best is None:
		report.flags.append("no-admissible-functions")
	return report


def weak_norm_lower_bound(
	op: str,
	sigma: Measure,
	omega: Measure,
	functions: Sequence[LatticeFunction],
	levels: Sequence[float],
	res: Optional[RationalLike] = None,
	window: Optional[Cube] = None,
	alpha: Optional[float] = None,
	grids: str = "all",
	n_jobs: int = 1,
) -> ConstantReport:
	"""``max_{f, lam} lam^2 |{T(f s) > lam}|_w / ||f||^2_{L2(s)}``, square-rooted."""
	levels = [float(t) for t in levels]
	if not levels or any(not (t > 0 and math.isfinite(t)) for t in levels):
		raise InvalidParameterError("Level grid must be nonempty, positive and finite.")
	norms, fields = _function_fields(op, sigma, omega, functions, res, window, alpha, grids, n_jobs)
	best_value = -np.inf
	best_key: Optional[tuple[int, float]] = None
	for idx, item in enumerate(fields):
		if item is None:
			continue
		values, masses = item
		for t in levels:
			quotient = t**2 * float(np.sum(masses[values > t])) / norms[idx]
			if quotient > best_value or (quotient == best_value and (idx, t) < best_key):
				best_value, best_key = quotient, (idx, t)
	witness, level = best_key if best_key is not None else (None, None)
	report = ConstantReport.from_squared(
		f"N_weak_{op}",
		0.0 if best_key is None else float(best_value),
		witness_function=witness,
		family_size=len(functions),
		admissible_size=int(np.sum(norms > 0)),
		resolution=None if res is None else str(as_rational(res)),
		params={"alpha": alpha, "level": level, "levels": len(levels)},
	)
	if best_key is None:
		report.flags.append("no-admissible-functions")
	return report

