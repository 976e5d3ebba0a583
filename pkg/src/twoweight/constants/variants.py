"""
Testing-condition variants.

============  =========================  ======================
variant       admissible cubes           denominator
============  =========================  ======================
plain         all                        ``|Q|_s``
parental      all                        ``min_P |P|_s``
lambda        all                        ``|lam Q|_s``
d_parental    ``min_P |P|_s <= D |Q|_s``  ``|Q|_s``
d_lambda      ``|lam Q|_s <= D |Q|_s``    ``|Q|_s``
============  =========================  ======================

``P`` runs over the ``2^n`` parents of ``Q``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from twoweight.errors import InvalidParameterError
from twoweight.geometry.rational import RationalLike, as_rational, format_rational

KINDS = ("plain", "parental", "lambda", "d_parental", "d_lambda")
_PATTERN = re.compile(r"^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$")


@dataclass(frozen=True)
class Variant:
	kind: str = "plain"
	lam: Optional[Fraction] = None
	D: Optional[Fraction] = None

	def __post_init__(self) -> None:
		if self.kind not in KINDS:
			raise InvalidParameterError(f"Unknown variant {self.kind!r}; expected one of {list(KINDS)}.")
		lam = None if self.lam is None else as_rational(self.lam)
		D = None if self.D is None else as_rational(self.D)
		if self.kind in ("lambda", "d_lambda"):
			if lam is None or lam <= 1:
				raise InvalidParameterError(f"Variant {self.kind} needs lambda > 1, got {lam}.")
		elif lam is not None:
			raise InvalidParameterError(f"Variant {self.kind} takes no lambda.")
		if self.kind in ("d_parental", "d_lambda"):
			if D is None or D <= 1:
				raise InvalidParameterError(f"Variant {self.kind} needs D > 1, got {D}.")
		elif D is not None:
			raise InvalidParameterError(f"Variant {self.kind} takes no D.")
		object.__setattr__(self, "lam", lam)
		object.__setattr__(self, "D", D)

	@classmethod
	def parse(cls, text: str) -> "Variant":
		"""Parse ``plain``, ``parental``, ``lambda(3)``, ``d_parental(2)`` or ``d_lambda(3, 27)``."""
		match = _PATTERN.match(text or "")
		if match is None:
			raise InvalidParameterError(f"Malformed variant {text!r}.")
		kind, raw = match.group(1), match.group(2)
		args = [a.strip() for a in raw.split(",")] if raw else []
		try:
			if kind in ("plain", "parental") and not args:
				return cls(kind)
			if kind == "lambda" and len(args) == 1:
				return cls(kind, lam=as_rational(args[0]))
			if kind == "d_parental" and len(args) == 1:
				return cls(kind, D=as_rational(args[0]))
			if kind == "d_lambda" and len(args) == 2:
				return cls(kind, lam=as_rational(args[0]), D=as_rational(args[1]))
		except InvalidParameterError:
			raise
		except (TypeError, ValueError) as exc:
			raise InvalidParameterError(f"Malformed variant arguments in {text!r}.") from exc
		raise InvalidParameterError(f"Malformed variant {text!r}.")

	@classmethod
	def build(cls, kind: str, lam: Optional[RationalLike] = None, D: Optional[RationalLike] = None) -> "Variant":
		return cls(kind, lam, D)

	@property
	def label(self) -> str:
		if self.kind in ("plain", "parental"):
			return self.kind
		if self.kind == "lambda":
			return f"lambda({format_rational(self.lam)})"
		if self.kind == "d_parental":
			return f"d_parental({format_rational(self.D)})"
		return f"d_lambda({format_rational(self.lam)},{format_rational(self.D)})"

	@property
	def dilation(self) -> Optional[Fraction]:
		return self.lam

	def apply(
		self,
		cube_mass: np.ndarray,
		parent_min: np.ndarray,
		dilated_mass: Optional[np.ndarray],
	) -> tuple[np.ndarray, np.ndarray]:
		"""
		``(denominator, admissible)`` arrays from the per-cube sigma masses.

		Cubes with ``|Q|_s = 0`` are never admissible.
		"""
		positive = cube_mass > 0
		if self.kind in ("lambda", "d_lambda") and dilated_mass is None:
			raise InvalidParameterError(f"Variant {self.label} needs dilated masses.")
		if self.kind == "plain":
			return cube_mass, positive
		if self.kind == "parental":
			return parent_min, positive
		if self.kind == "lambda":
			return dilated_mass, positive
		D = float(self.D)
		if self.kind == "d_parental":
			return cube_mass, positive & (parent_min <= D * cube_mass)
		return cube_mass, positive & (dilated_mass <= D * cube_mass)
