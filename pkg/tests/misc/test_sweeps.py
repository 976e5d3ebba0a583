import pytest

from twoweight.sweeps import argmax_smallest, parallel_map, select_shard


def _square(x):
	return x * x


def test_select_shard_is_modulo():
	assert select_shard(list(range(7)), 3, 1) == [1, 4]
	assert select_shard([1, 2], 1, 0) == [1, 2]
	with pytest.raises(ValueError):
		select_shard([1], 0, 0)
	with pytest.raises(ValueError):
		select_shard([1], 2, 2)


def test_parallel_map_keeps_item_order():
	items = list(range(11))
	assert parallel_map(_square, items, n_jobs=2) == [x * x for x in items]
	assert parallel_map(_square, [], n_jobs=2) == []


def test_argmax_ties_go_to_the_smallest_key():
	assert argmax_smallest([1.0, 3.0, 3.0], ["c", "b", "a"]) == 2
	assert argmax_smallest([float("-inf"), float("nan")], [0, 1]) is None


def test_argmax_counts_positive_infinity_and_skips_nan():
	inf, nan = float("inf"), float("nan")
	assert argmax_smallest([1.0, inf, 2.0], [0, 1, 2]) == 1
	assert argmax_smallest([nan, inf], [0, 1]) == 1
	assert argmax_smallest([inf, inf], ["b", "a"]) == 1
	assert argmax_smallest([nan, float("-inf"), 0.5], [0, 1, 2]) == 2
