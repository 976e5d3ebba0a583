"""
Concrete instances the proof checks run on.

An instance fixes the weight pair, the test function, the window and the
resolution of the evaluation lattices. With ``grids="all"`` the function must
be constant on the cells of every shifted grid lattice, which holds when its
cell size divides a third of the resolution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np

from twoweight.errors import ConfigError, InvalidParameterError, ResolutionError
from twoweight.geometry.cubes import Cube
from twoweight.geometry.grids import ShiftedGrid, all_shifted_grids
from twoweight.geometry.literal import format_cube, parse_cube
from twoweight.geometry.rational import RationalLike, as_rational, floor_log2, format_rational, pow2
from twoweight.measures.lattice import Lattice, LatticeFunction
from twoweight.measures.measure import IndicatorDensity, ExpDensity, LatticeMeasure, Lebesgue, Measure
from twoweight.measures.spec_file import MeasureSpec, function_from_dict, function_to_dict
from twoweight.proofcheck.params import ProofParams
from twoweight.whitney.decompose import WhitneyConfig, window_lattice

BUNDLED = ("lebesgue-smoke", "lacunary-sigma", "counterexample-pair", "m1-negative")
GRID_CHOICES = ("standard", "all")
FRACTIONAL_WHITNEY = WhitneyConfig(Fraction(9), 9)
DEFAULT_WINDOW = "[-4,4)"
DEFAULT_RES = Fraction(1, 16)


@dataclass(frozen=True)
class ProofInstance:
	name: str
	sigma: Measure
	omega: Measure
	f: LatticeFunction
	window: Cube
	res: Fraction
	params: Optional[ProofParams] = None
	whitney: WhitneyConfig = field(default_factory=WhitneyConfig)
	frac_whitney: WhitneyConfig = FRACTIONAL_WHITNEY
	grids: str = "standard"
	alpha: Optional[float] = None
	lambdas: int = 16
	seed: Optional[int] = None

	def __post_init__(self) -> None:
		res = as_rational(self.res)
		if res <= 0 or pow2(floor_log2(res)) != res:
			raise ResolutionError(f"Instance resolution {res} is not a power of two.")
		dim = self.window.dim
		if {self.sigma.dim, self.omega.dim, self.f.dim} != {dim}:
			raise InvalidParameterError(f"Instance {self.name!r} mixes dimensions.")
		inside = all(
			lo >= c and hi <= c + self.window.side
			for lo, hi, c in zip(self.f.lattice.origin, self.f.lattice.upper, self.window.corner)
		)
		if not inside:
			raise InvalidParameterError(
				f"Test function of instance {self.name!r} leaves the window {format_cube(self.window)}."
			)
		if self.grids not in GRID_CHOICES:
			raise InvalidParameterError(f"grids must be one of {list(GRID_CHOICES)}, got {self.grids!r}.")
		if self.alpha is not None:
			if not 0 < float(self.alpha) < dim:
				raise InvalidParameterError(f"alpha={self.alpha} outside (0, {dim}).")
			if self.f.lattice.h != res:
				raise InvalidParameterError(
					f"Instance {self.name!r} sets alpha, so f needs cells of size {format_rational(res)}, "
					f"got {format_rational(self.f.lattice.h)}."
				)
			object.__setattr__(self, "alpha", float(self.alpha))
		if int(self.lambdas) < 2:
			raise InvalidParameterError("An instance needs at least two lambda values.")
		object.__setattr__(self, "res", res)
		object.__setattr__(self, "lambdas", int(self.lambdas))

	@property
	def dim(self) -> int:
		return self.window.dim

	def grid_list(self) -> list[ShiftedGrid]:
		if self.grids == "standard":
			return [ShiftedGrid.standard(self.dim)]
		return all_shifted_grids(self.dim)

	def lattice(self, grid: Optional[ShiftedGrid] = None) -> Lattice:
		return window_lattice(self.window, self.res, grid)

	def proof_params(self, C_n: Optional[float] = None) -> ProofParams:
		if self.params is not None:
			return self.params
		return ProofParams.default(self.whitney.R_W, self.dim, C_n)

	def to_dict(self) -> dict:
		return {
			"name": self.name,
			"sigma": MeasureSpec(self.sigma).to_dict(),
			"omega": MeasureSpec(self.omega).to_dict(),
			"f": function_to_dict(self.f),
			"window": format_cube(self.window),
			"resolution": format_rational(self.res),
			"grids": self.grids,
			"alpha": self.alpha,
			"lambdas": self.lambdas,
			"seed": self.seed,
			"proof": None if self.params is None else self.params.to_dict(),
			"whitney": self.whitney.to_dict(),
			"frac_whitney": self.frac_whitney.to_dict(),
		}


def _indicator(cube: str, h: Fraction, value: float = 1.0) -> LatticeFunction:
	return function_from_dict({"cube": cube, "h": format_rational(h), "value": value})


def _lacunary_sigma(window: Cube, res: Fraction) -> LatticeMeasure:
	"""Thin background plus masses ``4^-i`` on the cells at ``2^-i``."""
	lattice = window_lattice(window, res)
	masses = np.full(lattice.shape, 0.01 * float(res))
	for i in range(5):
		index = lattice.cell_index((pow2(-i),))
		masses[index] += 4.0**-i
	return LatticeMeasure(lattice, masses)


def bundled_instance(name: str) -> ProofInstance:
	window = parse_cube(DEFAULT_WINDOW)
	res = DEFAULT_RES
	if name == "lebesgue-smoke":
		return ProofInstance(
			name, Lebesgue(1), Lebesgue(1), _indicator("[0,1)", res), window, res, alpha=0.5,
		)
	if name == "lacunary-sigma":
		return ProofInstance(
			name, _lacunary_sigma(window, res), Lebesgue(1), _indicator("[0,2)", res), window, res,
		)
	if name == "counterexample-pair":
		return ProofInstance(
			name,
			ExpDensity(1, 1),
			IndicatorDensity((0,), (1,)),
			_indicator("[-1,1)", res),
			window,
			res,
			alpha=0.5,
		)
	if name == "m1-negative":
		# all mass sits in the sibling of the Whitney cube [0,1/2) of Omega_{-2}
		sibling = _indicator("[1/2,1)", res, 1.2)
		return ProofInstance(
			name, Lebesgue(1), Lebesgue(1), sibling, window, res, params=ProofParams(m=1, m0=1),
		)
	raise ConfigError(f"Unknown bundled instance {name!r}; expected one of {list(BUNDLED)}.")


def random_instance(
	seed: int,
	dim: int = 1,
	grids: str = "standard",
	alpha: Optional[float] = None,
	res: RationalLike = DEFAULT_RES,
	params: Optional[ProofParams] = None,
) -> ProofInstance:
	"""
	Lognormal lattice weights on ``[-4, 4)^n`` and a sparse random ``f`` on
	``[-1, 1)^n``; the same seed gives the same instance.
	"""
	if alpha is not None and grids != "standard":
		raise InvalidParameterError("Random fractional instances use the standard grid only.")
	rng = np.random.default_rng(int(seed))
	res = as_rational(res)
	window = Cube((Fraction(-4),) * int(dim), Fraction(8))
	lattice = window_lattice(window, res)
	weights = []
	for _ in range(2):
		masses = rng.lognormal(0.0, 1.0, lattice.shape) * float(res) ** int(dim)
		weights.append(LatticeMeasure(lattice, masses))
	h = res if grids == "standard" else res / 3
	f_lattice = Lattice((Fraction(-1),) * int(dim), h, (int(2 / h),) * int(dim))
	values = rng.random(f_lattice.shape) * (rng.random(f_lattice.shape) < 0.6)
	if not values.any():
		values[(0,) * int(dim)] = 1.0
	return ProofInstance(
		f"random-{int(seed)}",
		weights[0],
		weights[1],
		LatticeFunction(f_lattice, values),
		window,
		res,
		params=params,
		grids=grids,
		alpha=alpha,
		seed=int(seed),
	)


def instance_from_dict(data: dict) -> ProofInstance:
	if not isinstance(data, dict):
		raise ConfigError("Instance spec must be a mapping.")
	allowed = {
		"name", "sigma", "omega", "f", "window", "resolution", "grids", "alpha",
		"lambdas", "seed", "proof", "whitney", "frac_whitney", "random", "bundled",
	}
	extra = set(data) - allowed
	if extra:
		raise ConfigError(f"Unknown keys for ProofInstance: {sorted(extra)}")
	whitney = WhitneyConfig.from_dict(data.get("whitney"))
	frac_whitney = WhitneyConfig.from_dict(data.get("frac_whitney"), FRACTIONAL_WHITNEY)
	if "bundled" in data:
		return bundled_instance(str(data["bundled"]))
	if "random" in data:
		spec = data["random"] or {}
		dim = int(spec.get("dim", 1))
		params = None if data.get("proof") is None else ProofParams.from_dict(data["proof"], whitney.R_W, dim)
		return random_instance(
			int(spec.get("seed", data.get("seed", 0))),
			dim=dim,
			grids=spec.get("grids", data.get("grids", "standard")),
			alpha=spec.get("alpha", data.get("alpha")),
			res=spec.get("resolution", data.get("resolution", DEFAULT_RES)),
			params=params,
		)
	try:
		window = parse_cube(str(data.get("window", DEFAULT_WINDOW)))
		sigma = MeasureSpec.from_dict(data["sigma"]).measure
		omega = MeasureSpec.from_dict(data["omega"]).measure
		f = function_from_dict(data["f"])
	except KeyError as exc:
		raise ConfigError(f"Instance spec is missing {exc.args[0]!r}.") from exc
	params = None if data.get("proof") is None else ProofParams.from_dict(data["proof"], whitney.R_W, window.dim)
	return ProofInstance(
		str(data.get("name", "instance")),
		sigma,
		omega,
		f,
		window,
		as_rational(data.get("resolution", DEFAULT_RES)),
		params=params,
		whitney=whitney,
		frac_whitney=frac_whitney,
		grids=str(data.get("grids", "standard")),
		alpha=data.get("alpha"),
		lambdas=int(data.get("lambdas", 16)),
		seed=data.get("seed"),
	)


def load_instance(source: Union[str, Path]) -> ProofInstance:
	"""A bundled instance by name, or an instance spec file (YAML)."""
	if str(source) in BUNDLED:
		return bundled_instance(str(source))
	from twoweight.config import read_yaml

	return instance_from_dict(read_yaml(Path(source)))
