"""Whitney families of the superlevel sets ``{M(f nu) > 2^k}``."""
from __future__ import annotations

import math
import warnings
from typing import Optional, Sequence

import numpy as np

from twoweight.errors import ResolutionError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import RationalLike, as_rational, floor_log2, pow2
from twoweight.measures.lattice import LatticeFunction
from twoweight.measures.measure import Measure
from twoweight.operators.fields import OperatorField, superlevel
from twoweight.operators.maximal import maximal_field
from twoweight.sweeps import parallel_map
from twoweight.whitney.decompose import WhitneyConfig, WhitneyFamily, whitney_decompose


def level_range(values: OperatorField, depth: int) -> range:
	"""The ``depth`` highest ``k`` with a nonempty superlevel set."""
	if values.max <= 0:
		return range(0)
	k_max = math.ceil(math.log2(values.max)) - 1
	return range(k_max - int(depth) + 1, k_max + 1)


def _touches_boundary(mask: np.ndarray) -> bool:
	for axis in range(mask.ndim):
		if np.take(mask, 0, axis=axis).any() or np.take(mask, -1, axis=axis).any():
			return True
	return False


def superlevel_families(
	values: OperatorField,
	config: WhitneyConfig,
	k_range: Sequence[int],
	n_jobs: int = 1,
	progress: bool = False,
) -> dict[int, WhitneyFamily]:
	"""One Whitney family per ``k`` of ``{values > 2^k}``."""

	def decompose(k: int) -> WhitneyFamily:
		omega = superlevel(values, 2.0 ** int(k))
		if _touches_boundary(omega.mask):
			warnings.warn(
				f"Superlevel set k={k} reaches the edge of the window; its Whitney cubes are truncated there.",
				RuntimeWarning,
			)
		return whitney_decompose(omega, config, k=int(k))

	keys = [int(k) for k in k_range]
	families = parallel_map(decompose, keys, n_jobs=n_jobs, progress=progress, desc="whitney")
	return dict(zip(keys, families))


def superlevel_field(
	nu: Measure,
	f: LatticeFunction,
	config: WhitneyConfig,
	res: RationalLike,
	window: Optional[Cube] = None,
	grids: str = "all",
) -> OperatorField:
	"""``M(f nu)`` on a lattice whose cells are finest-level cubes of the Whitney grid."""
	res = as_rational(res)
	j0 = floor_log2(res)
	if pow2(j0) != res:
		raise ResolutionError(f"Resolution {res} is not a power of two.")
	grid = config.grid_for(f.dim)
	return maximal_field(f, nu, res, window=window, grids=grids, anchor=grid.shift(j0))


def superlevel_whitney(
	nu: Measure,
	f: LatticeFunction,
	config: WhitneyConfig,
	k_range: Sequence[int],
	res: RationalLike,
	window: Optional[Cube] = None,
	grids: str = "all",
	n_jobs: int = 1,
	progress: bool = False,
) -> dict[int, WhitneyFamily]:
	values = superlevel_field(nu, f, config, res, window, grids)
	return superlevel_families(values, config, k_range, n_jobs, progress)
