"""Run every proof check on one instance and collect a single report."""
from __future__ import annotations

from typing import Optional

from twoweight.errors import DegenerateInputError
from twoweight.measures.lattice import LatticeFunction
from twoweight.operators.masstable import MassTable
from twoweight.operators.maximal import one_third_constant
from twoweight.proofcheck.fractional import FRACTIONAL_CHECKS, fractional_checks
from twoweight.proofcheck.instance import ProofInstance
from twoweight.proofcheck.levels import (
	build_level_sets,
	check_exhaustive,
	check_h_cover,
	check_max_principle_maximal,
	pi3_energy,
)
from twoweight.proofcheck.linearization import a2ljk_suite, check_linearization_comparability
from twoweight.proofcheck.packing import check_parental_packing
from twoweight.proofcheck.params import ProofParams
from twoweight.proofcheck.principal import principal_forest
from twoweight.whitney.verify import verify_nested, verify_whitney

MAXIMAL_CHECKS = (
	"whitney",
	"exhaustive",
	"h_cover",
	"max_principle",
	"linearization",
	"a2ljk",
	"principal",
	"packing",
	"pi3_energy",
)


def square_norm(instance: ProofInstance) -> float:
	"""``||f||^2`` in ``L^2(sigma)``."""
	squared = LatticeFunction(instance.f.lattice, instance.f.values**2)
	return float(MassTable.build(squared, instance.sigma).weights.sum())


def resolve_params(instance: ProofInstance) -> tuple[ProofParams, Optional[float]]:
	"""The instance parameters, or defaults with ``m0`` fitted to the measured ``C_n``."""
	if instance.params is not None:
		return instance.params, None
	C_n = one_third_constant(instance.f, instance.sigma, instance.res, instance.window)
	return instance.proof_params(C_n), C_n


def maximal_checks(
	instance: ProofInstance,
	params: ProofParams,
	f_norm2: float,
	n_jobs: int = 1,
	progress: bool = False,
) -> dict:
	"""Per-grid reports of the maximal-function checks."""
	out = {}
	for grid in instance.grid_list():
		sets = build_level_sets(instance, grid, params, n_jobs=n_jobs, progress=progress, strict=False)
		whitney = [verify_whitney(family) for family in sets.families.values()]
		nested = verify_nested(sets.families)
		C_W = max([r.C_W for r in whitney] + [1])
		forest = principal_forest(sets)
		principal = forest.verify()
		principal.update(forest.to_dict())
		principal["energy"] = forest.energy(f_norm2)
		checks = {
			"whitney": {
				"passed": all(r.interior_passed for r in whitney) and nested["nested"] and nested["compatible"],
				"strict_passed": all(r.passed for r in whitney),
				"C_W": C_W,
				"families": len(whitney),
				"n_floor": sum(r.n_floor for r in whitney),
				"sandwich_failures": sum(r.n_sandwich_failures for r in whitney),
				"nested": nested,
				"failed_levels": [k for k, r in zip(sets.families, whitney) if not r.interior_passed],
			},
			"exhaustive": check_exhaustive(sets),
			"h_cover": check_h_cover(sets),
			"max_principle": check_max_principle_maximal(sets),
			"linearization": check_linearization_comparability(sets, instance.sigma),
			"a2ljk": a2ljk_suite(sets, instance.sigma, instance.omega),
			"principal": principal,
			"packing": check_parental_packing(forest, instance.sigma, sets.lattice, params.D, C_W),
			"pi3_energy": pi3_energy(sets, f_norm2),
		}
		out[grid.label] = {
			"k_range": [sets.k_range.start, sets.k_range.stop - 1] if len(sets.k_range) else None,
			"cubes": len(sets.cubes),
			"cases": sets.case_counts(),
			"checks": checks,
		}
	return out


def verify_instance(instance: ProofInstance, n_jobs: int = 1, progress: bool = False) -> dict:
	"""
	Maximal checks on every grid of the instance and, when it sets ``alpha``,
	the fractional checks. A check passes when it passes on every grid.
	"""
	params, C_n = resolve_params(instance)
	messages = params.check_bounds(instance.whitney.R_W, instance.dim)
	f_norm2 = square_norm(instance)
	grids = maximal_checks(instance, params, f_norm2, n_jobs, progress)
	checks = {
		name: {
			"passed": all(g["checks"][name]["passed"] for g in grids.values()),
			"grids": [label for label, g in grids.items() if not g["checks"][name]["passed"]],
		}
		for name in MAXIMAL_CHECKS
	}
	fractional = None
	if instance.alpha is not None:
		try:
			fractional = fractional_checks(instance, params, n_jobs, progress)
		except DegenerateInputError as exc:
			fractional = {
				"summary": {"flags": ["degenerate"], "reason": str(exc)},
				"checks": {name: {"passed": False, "flags": ["degenerate"]} for name in FRACTIONAL_CHECKS},
			}
		for name, report in fractional["checks"].items():
			checks[name] = {"passed": bool(report["passed"])}
	return {
		"instance": instance.to_dict(),
		"params": params.to_dict(),
		"C_n": C_n,
		"warnings": messages,
		"f_norm2": f_norm2,
		"grids": grids,
		"fractional": fractional,
		"checks": checks,
		"passed": all(c["passed"] for c in checks.values()),
	}
