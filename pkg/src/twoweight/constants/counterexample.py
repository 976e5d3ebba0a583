"""
The exponential weight pair ``sigma = e^y dy``, ``omega = 1_[0,1) dx`` on the line.

Its Muckenhoupt constant diverges along ``[0, R]`` while the triple testing
constant stays bounded; swapping the two measures makes the triple testing
constant blow up like ``e^R / R^2``. The same pair also separates ``A2_alpha``
from the fractional triple testing constant.

Swept intervals ``[a, b)`` only matter when they meet ``[0, 1)``, i.e. when
``a < 1`` and ``b > 0``. They fall into three cases with explicit bounds on
``int_I M(1_I sigma)^2 domega / |3I|_sigma``:

==============  ==============================
case            bound
==============  ==============================
``b>2``         ``e / (1 - 1/e)``
``b<=2,a>=-1``  ``e^6 / 3``
``b<=2,a<-1``   ``e^2 / (1 - 1/e)``
==============  ==============================

For ``b > 2`` the maximal function on ``[0, 1]`` is at most
``(e^b - 1) / (b - 1)`` and ``|3I|_sigma >= e^{2b-a} (1 - 1/e)``, which gives
``e^a / ((b - 1)^2 (1 - 1/e)) < e / (1 - 1/e)``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from twoweight.constants.families import CubeFamily
from twoweight.constants.testing import TestingOptions, TestingTable, a2, a2_alpha, testing_table
from twoweight.constants.variants import Variant
from twoweight.errors import InvalidParameterError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.rational import RationalLike, as_rational, format_rational
from twoweight.measures.measure import ExpDensity, IndicatorDensity, Measure
from twoweight.sweeps import argmax_smallest

CASES = ("b>2", "b<=2,a>=-1", "b<=2,a<-1")
HAND_BOUNDS = {
	"b>2": math.e / (1.0 - math.exp(-1.0)),
	"b<=2,a>=-1": math.exp(6.0) / 3.0,
	"b<=2,a<-1": math.exp(2.0) / (1.0 - math.exp(-1.0)),
}
TRIPLE_BOUND = math.exp(6.0) / 3.0
WHICH = ("maximal", "fractional", "swapped")

DEFAULT_R = (2, 5, 10)
DEFAULT_STEP = Fraction(1, 32)
A_RANGE = (Fraction(-3), Fraction(1))
B_RANGE = (Fraction(0), Fraction(5))


def counterexample_pair() -> tuple[Measure, Measure]:
	"""``(sigma, omega) = (e^y dy, 1_[0,1) dx)``."""
	return ExpDensity(1, 1), IndicatorDensity((0,), (1,))


def a2_closed_form(R: RationalLike, alpha: Optional[float] = None) -> float:
	"""``|[0,R]|_s |[0,R]|_w / R^{2(1 - alpha)}`` for the pair."""
	R = float(as_rational(R))
	if R <= 0:
		raise InvalidParameterError(f"R must be positive, got {R}.")
	exponent = 1.0 if alpha is None else 1.0 - float(alpha)
	try:
		growth = math.expm1(R)
	except OverflowError:
		return math.inf
	return min(R, 1.0) * growth / R ** (2 * exponent)


def a2_table(R_values: Sequence[RationalLike] = DEFAULT_R, alpha: Optional[float] = None) -> list[dict]:
	"""Computed and closed-form Muckenhoupt quotients on ``[0, R]``."""
	sigma, omega = counterexample_pair()
	rows = []
	for R in R_values:
		family = CubeFamily.explicit([Cube((0,), as_rational(R))])
		if alpha is None:
			report = a2(sigma, omega, family)
		else:
			report = a2_alpha(alpha, sigma, omega, family)
		exact = a2_closed_form(R, alpha)
		rows.append({
			"R": format_rational(as_rational(R)),
			"computed": report.value,
			"closed_form": exact,
			"rel_error": 0.0 if report.value == exact else abs(report.value - exact) / exact,
		})
	return rows


def interval_case(cube: Cube) -> str:
	if cube.dim != 1:
		raise InvalidParameterError("Interval cases are one-dimensional.")
	a = cube.corner[0]
	b = cube.upper[0]
	if b > 2:
		return "b>2"
	return "b<=2,a>=-1" if a >= -1 else "b<=2,a<-1"


def interval_family(
	step: RationalLike = DEFAULT_STEP,
	a_range: tuple[RationalLike, RationalLike] = A_RANGE,
	b_range: tuple[RationalLike, RationalLike] = B_RANGE,
) -> CubeFamily:
	return CubeFamily.intervals(a_range, b_range, step)


def case_maxima(table: TestingTable, variant: Variant) -> dict:
	"""Largest quotient, its witness and the hand bound for each case."""
	quotient, admissible = table.quotients(variant)
	cases = [interval_case(q) for q in table.family.cubes]
	out = {}
	for case in CASES:
		mask = np.array([c == case for c in cases]) & admissible
		values = np.where(mask, quotient, -np.inf)
		best = argmax_smallest(values, table.family.cubes)
		entry = {
			"count": int(mask.sum()),
			"max": None if best is None else float(values[best]),
			"witness": None if best is None else _interval_label(table.family.cubes[best]),
		}
		if table.op == "M":
			entry["bound"] = HAND_BOUNDS[case]
			entry["within_bound"] = entry["max"] is None or entry["max"] <= HAND_BOUNDS[case]
		out[case] = entry
	return out


def _interval_label(cube: Cube) -> str:
	return f"[{format_rational(cube.corner[0])},{format_rational(cube.upper[0])})"


def interval_rows(table: TestingTable, variant: Variant) -> list[dict]:
	"""One row per swept interval: endpoints, case and quotient."""
	quotient, admissible = table.quotients(variant)
	return [
		{
			"a": format_rational(q.corner[0]),
			"b": format_rational(q.upper[0]),
			"case": interval_case(q),
			"ratio": float(value) if ok else None,
		}
		for q, value, ok in zip(table.family.cubes, quotient, admissible)
	]


def triple_testing_sweep(
	op: str = "M",
	alpha: Optional[float] = None,
	step: RationalLike = DEFAULT_STEP,
	cells: int = 32,
	grids: str = "none",
	n_jobs: int = 1,
	progress: bool = False,
) -> tuple[TestingTable, dict]:
	"""
	Triple testing quotients of the pair over the interval sweep.

	Returns the table and a summary with the overall maximum, its witness and
	the per-case maxima.
	"""
	sigma, omega = counterexample_pair()
	family = interval_family(step)
	variant = Variant("lambda", lam=3)
	options = TestingOptions(cells=cells, grids=grids)
	table = testing_table(op, sigma, omega, family, alpha=alpha, options=options, n_jobs=n_jobs, progress=progress)
	report = table.constant(variant)
	summary = {
		"report": report.to_dict(),
		"family_size": len(family),
		"max_ratio": report.squared,
		"cases": case_maxima(table, variant),
	}
	return table, summary


def swapped_oracle(R: RationalLike) -> float:
	"""``int_1^R e^y / y^2 dy``."""
	R = float(as_rational(R))
	if R <= 1:
		return 0.0
	value, _ = quad(lambda y: math.exp(y) / y**2, 1.0, R)
	return value


def swapped_ratio(R: RationalLike, cells: int = 256, grids: str = "none") -> float:
	"""
	``int_I M(1_I omega)^2 dsigma / |3I|_omega`` on ``I = [0, R)``, the triple
	testing quotient of the pair with the roles swapped.
	"""
	sigma, omega = counterexample_pair()
	family = CubeFamily.explicit([Cube((0,), as_rational(R))])
	table = testing_table("M", sigma, omega, family, options=TestingOptions(cells=cells, grids=grids), dual=True)
	quotient, _ = table.quotients(Variant("lambda", lam=3))
	return float(quotient[0])


def swapped_table(R_values: Sequence[RationalLike] = (5, 10), cells: int = 256) -> list[dict]:
	return [
		{
			"R": format_rational(as_rational(R)),
			"ratio": swapped_ratio(R, cells),
			"oracle": swapped_oracle(R),
		}
		for R in R_values
	]


def counterexample_report(
	which: str,
	step: RationalLike = DEFAULT_STEP,
	cells: int = 32,
	R_values: Sequence[RationalLike] = DEFAULT_R,
	alpha: float = 0.5,
	n_jobs: int = 1,
	progress: bool = False,
) -> tuple[dict, Optional[TestingTable]]:
	"""
	Tables and pass/fail checks for one of ``maximal``, ``fractional`` or
	``swapped``. The sweep table is returned alongside for CSV output.
	"""
	if which not in WHICH:
		raise InvalidParameterError(f"Unknown counterexample {which!r}; expected one of {list(WHICH)}.")
	if which == "swapped":
		rows = swapped_table(R_values if len(R_values) >= 2 else (5, 10))
		first, last = rows[0], rows[-1]
		growth = last["ratio"] / first["ratio"] if first["ratio"] > 0 else math.inf
		oracle_growth = last["oracle"] / first["oracle"] if first["oracle"] > 0 else math.inf
		checks = {
			"growth_at_least_10": growth >= 10,
			"within_factor_4_of_oracle": oracle_growth / 4 <= growth <= 4 * oracle_growth,
		}
		payload = {"which": which, "rows": rows, "growth": growth, "oracle_growth": oracle_growth}
		return _with_checks(payload, checks), None

	frac = which == "fractional"
	rows = a2_table(R_values, alpha if frac else None)
	table, sweep = triple_testing_sweep(
		"I_alpha" if frac else "M",
		alpha=alpha if frac else None,
		step=step,
		cells=cells,
		n_jobs=n_jobs,
		progress=progress,
	)
	checks = {
		"a2_matches_closed_form": all(row["rel_error"] <= 0.01 for row in rows),
		"a2_grows": rows[-1]["computed"] > rows[0]["computed"],
		"sweep_finite": sweep["max_ratio"] is not None and math.isfinite(sweep["max_ratio"]),
	}
	if not frac:
		checks["sweep_below_e6_over_3"] = sweep["max_ratio"] is not None and sweep["max_ratio"] <= TRIPLE_BOUND
		checks["cases_within_hand_bounds"] = all(c["within_bound"] for c in sweep["cases"].values())
	payload = {
		"which": which,
		"alpha": alpha if frac else None,
		"a2": rows,
		"sweep": sweep,
	}
	return _with_checks(payload, checks), table


def _with_checks(payload: dict, checks: dict) -> dict:
	payload["checks"] = checks
	payload["passed"] = all(checks.values())
	return payload
