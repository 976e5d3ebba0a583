"""
Parameters of the maximal and fractional verifications.

``m`` and ``m0`` separate the superlevel sets used by the case split, ``beta``
is the small-mass threshold, ``eta`` the growth factor of principal cubes and
``D`` the parental doubling constant of the packing step. ``D_frac``, ``gamma``
and ``epsilon`` belong to the good-lambda argument. ``D``, ``D_frac`` and
``epsilon`` left as ``None`` are derived from measured quantities at run time.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Optional

from twoweight.errors import ConfigError, InvalidParameterError
from twoweight.geometry.rational import RationalLike, as_rational, ceil_log2, format_rational

DEFAULT_BETA = Fraction(1, 27)
DEFAULT_ETA = Fraction(4)
DEFAULT_GAMMA = Fraction(2)


def m_bound(R_W: RationalLike, dim: int) -> int:
	"""``ceil(1 + log2(2 (3 R_W)^n))``, below which the maximum principle can fail."""
	return 1 + ceil_log2(2 * (3 * as_rational(R_W)) ** int(dim))


def default_m(R_W: RationalLike, dim: int) -> int:
	return m_bound(R_W, dim) + 1


def default_m0(C_n: Optional[float], dim: int) -> int:
	"""Smallest ``m0 >= 1`` with ``3^n C_n 4^{-m0} <= 1/2``."""
	if C_n is None or not C_n > 0:
		return 1
	target = 2.0 * 3 ** int(dim) * float(C_n)
	return max(1, math.ceil(math.log2(target) / 2))


def _fraction_or_none(value) -> Optional[Fraction]:
	return None if value is None else as_rational(value)


@dataclass(frozen=True)
class ProofParams:
	m: int
	m0: int = 1
	beta: Fraction = DEFAULT_BETA
	eta: Fraction = DEFAULT_ETA
	D: Optional[Fraction] = None
	k0: int = 0
	k_floor: Optional[int] = None
	D_frac: Optional[Fraction] = None
	gamma: Fraction = DEFAULT_GAMMA
	epsilon: Optional[float] = None

	def __post_init__(self) -> None:
		if int(self.m) != self.m or int(self.m) < 1:
			raise InvalidParameterError(f"m must be a positive integer, got {self.m}.")
		if int(self.m0) != self.m0 or int(self.m0) < 1:
			raise InvalidParameterError(f"m0 must be a positive integer, got {self.m0}.")
		beta = as_rational(self.beta)
		eta = as_rational(self.eta)
		gamma = as_rational(self.gamma)
		if not 0 < beta < 1:
			raise InvalidParameterError(f"beta must lie in (0, 1), got {beta}.")
		if eta <= 1:
			raise InvalidParameterError(f"eta must exceed 1, got {eta}.")
		if gamma <= 0:
			raise InvalidParameterError(f"gamma must be positive, got {gamma}.")
		for name in ("D", "D_frac"):
			value = _fraction_or_none(getattr(self, name))
			if value is not None and value <= 1:
				raise InvalidParameterError(f"{name} must exceed 1, got {value}.")
			object.__setattr__(self, name, value)
		period = int(self.m) + int(self.m0)
		if not 0 <= int(self.k0) < period:
			raise InvalidParameterError(f"k0 must lie in [0, {period - 1}], got {self.k0}.")
		if self.epsilon is not None and not float(self.epsilon) > 0:
			raise InvalidParameterError(f"epsilon must be positive, got {self.epsilon}.")
		object.__setattr__(self, "m", int(self.m))
		object.__setattr__(self, "m0", int(self.m0))
		object.__setattr__(self, "k0", int(self.k0))
		object.__setattr__(self, "beta", beta)
		object.__setattr__(self, "eta", eta)
		object.__setattr__(self, "gamma", gamma)
		if self.k_floor is not None:
			object.__setattr__(self, "k_floor", int(self.k_floor))
		if self.epsilon is not None:
			object.__setattr__(self, "epsilon", float(self.epsilon))

	@classmethod
	def default(cls, R_W: RationalLike, dim: int, C_n: Optional[float] = None, **overrides) -> "ProofParams":
		base = cls(m=default_m(R_W, dim), m0=default_m0(C_n, dim))
		return replace(base, **overrides) if overrides else base

	@property
	def period(self) -> int:
		return self.m + self.m0

	def in_stopping_family(self, k: int) -> bool:
		"""``k = k0 mod (m + m0)`` and ``k`` not below the floor level."""
		if self.k_floor is not None and k < self.k_floor:
			return False
		return (int(k) - self.k0) % self.period == 0

	def check_bounds(self, R_W: RationalLike, dim: int) -> list[str]:
		"""Warn for every parameter below the value its argument needs."""
		messages = []
		bound = m_bound(R_W, dim)
		if self.m < bound:
			messages.append(
				f"m={self.m} is below ceil(1 + log2(2 (3 R_W)^n)) = {bound} for R_W={format_rational(as_rational(R_W))}, "
				f"n={dim}; maximum principle violations are expected."
			)
		for message in messages:
			warnings.warn(message, RuntimeWarning)
		return messages

	def to_dict(self) -> dict:
		data = asdict(self)
		for name in ("beta", "eta", "gamma", "D", "D_frac"):
			if data[name] is not None:
				data[name] = format_rational(data[name])
		return data

	@classmethod
	def from_dict(cls, data: dict, R_W: RationalLike = 4, dim: int = 1) -> "ProofParams":
		"""Missing ``m`` and ``m0`` fall back to their defaults for ``R_W`` and ``dim``."""
		if not isinstance(data, dict):
			raise ConfigError("Proof parameters must be a mapping.")
		extra = set(data) - set(cls.__dataclass_fields__)
		if extra:
			raise ConfigError(f"Unknown keys for ProofParams: {sorted(extra)}")
		values = dict(data)
		values.setdefault("m", default_m(R_W, dim))
		try:
			return cls(**values)
		except (TypeError, ValueError) as exc:
			if isinstance(exc, InvalidParameterError):
				raise
			raise ConfigError(f"Invalid proof parameters: {exc}") from exc
