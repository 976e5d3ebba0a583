"""Deterministic sharding and parallel max-reductions for sweeps.

Work items are split by *item index* with modulo arithmetic, so every shard
sees a fixed subset regardless of how many workers run. Results are merged
back in item order, which makes reductions independent of ``n_jobs``.
"""
from __future__ import annotations

from typing import Any, Callable, Optional, Sequence, TypeVar

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")


def select_shard(items: Sequence[T], num_shards: int, shard_index: int) -> list[T]:
	"""Select the modulo shard of ``items``."""
	if int(num_shards) <= 0:
		raise ValueError("num_shards must be positive")
	if int(num_shards) <= 1:
		return list(items)
	if int(shard_index) < 0 or int(shard_index) >= int(num_shards):
		raise ValueError("shard_index must be in [0, num_shards)")
	return [item for idx, item in enumerate(items) if (idx % int(num_shards)) == int(shard_index)]


def _run_shard(fn: Callable[[T], R], items: Sequence[T], num_shards: int, shard_index: int) -> list[tuple[int, R]]:
	indices = select_shard(list(range(len(items))), num_shards, shard_index)
	return [(idx, fn(items[idx])) for idx in indices]


def parallel_map(
	fn: Callable[[T], R],
	items: Sequence[T],
	n_jobs: int = 1,
	progress: bool = False,
	desc: Optional[str] = None,
) -> list[R]:
	"""``[fn(item) for item in items]`` evaluated over modulo shards."""
	items = list(items)
	if not items:
		return []
	if int(n_jobs) == 1:
		iterator = tqdm(items, desc=desc, disable=not progress)
		return [fn(item) for item in iterator]
	num_shards = min(len(items), max(int(n_jobs), 1) * 4)
	gen = (delayed(_run_shard)(fn, items, num_shards, idx) for idx in range(num_shards))
	shards = Parallel(n_jobs=n_jobs)(
		tqdm(gen, total=num_shards, desc=desc, disable=not progress)
	)
	out: list[Any] = [None] * len(items)
	for shard in shards:
		for idx, result in shard:
			out[idx] = result
	return out


def argmax_smallest(values: Sequence[float], keys: Sequence[Any]) -> Optional[int]:
	"""
	Index of the largest value; ties go to the smallest key.

	``+inf`` is a legitimate maximum. NaN and ``-inf`` (the inadmissible
	marker) are ignored. Returns ``None`` when nothing qualifies.
	"""
	values = np.asarray(values, dtype=np.float64)
	usable = ~np.isnan(values) & (values > -np.inf)
	if not usable.any():
		return None
	best = float(values[usable].max())
	candidates = [idx for idx in np.nonzero(usable & (values == best))[0]]
	return int(min(candidates, key=lambda idx: keys[idx]))
