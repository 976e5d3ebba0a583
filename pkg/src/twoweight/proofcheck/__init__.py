"""Executable checks of the proof machinery on concrete instances."""
from twoweight.proofcheck.fractional import (
	FRACTIONAL_CHECKS,
	build_fractional,
	check_absorption,
	check_f_case,
	check_frac_max_principle,
	check_good_lambda,
	check_partition,
	check_tail_bound,
	classify_EFG,
	derive_epsilon,
	fractional_checks,
	fractional_setup,
	lambda_grid,
)
from twoweight.proofcheck.instance import (
	BUNDLED,
	ProofInstance,
	bundled_instance,
	instance_from_dict,
	load_instance,
	random_instance,
)
from twoweight.proofcheck.levels import (
	LevelCube,
	LevelSets,
	build_level_sets,
	check_exhaustive,
	check_h_cover,
	check_max_principle_maximal,
	pi3_energy,
)
from twoweight.proofcheck.linearization import (
	Linearization,
	a2ljk_suite,
	build_linearization,
	check_a2ljk,
	check_linearization_comparability,
)
from twoweight.proofcheck.packing import check_parental_packing, doubling_flags, parent_overlap
from twoweight.proofcheck.params import ProofParams, m_bound
from twoweight.proofcheck.principal import PrincipalForest, build_principal_cubes, principal_forest
from twoweight.proofcheck.runner import MAXIMAL_CHECKS, verify_instance

__all__ = [
	"BUNDLED",
	"FRACTIONAL_CHECKS",
	"LevelCube",
	"LevelSets",
	"Linearization",
	"MAXIMAL_CHECKS",
	"PrincipalForest",
	"ProofInstance",
	"ProofParams",
	"a2ljk_suite",
	"build_fractional",
	"build_level_sets",
	"build_linearization",
	"build_principal_cubes",
	"bundled_instance",
	"check_a2ljk",
	"check_absorption",
	"check_exhaustive",
	"check_f_case",
	"check_frac_max_principle",
	"check_good_lambda",
	"check_h_cover",
	"check_linearization_comparability",
	"check_max_principle_maximal",
	"check_parental_packing",
	"check_partition",
	"check_tail_bound",
	"classify_EFG",
	"derive_epsilon",
	"doubling_flags",
	"fractional_checks",
	"fractional_setup",
	"instance_from_dict",
	"lambda_grid",
	"load_instance",
	"m_bound",
	"parent_overlap",
	"pi3_energy",
	"principal_forest",
	"random_instance",
	"verify_instance",
]
