from fractions import Fraction

import pytest

from twoweight.constants.variants import Variant
from twoweight.errors import InvalidParameterError


@pytest.mark.parametrize(
	"text, label",
	[
		("plain", "plain"),
		(" parental ", "parental"),
		("lambda(3)", "lambda(3)"),
		("lambda(5/2)", "lambda(5/2)"),
		("d_parental(2)", "d_parental(2)"),
		("d_lambda(3, 27)", "d_lambda(3,27)"),
	],
)
def test_parse_and_label(text, label):
	variant = Variant.parse(text)
	assert variant.label == label
	assert Variant.parse(variant.label) == variant


def test_parse_keeps_exact_parameters():
	variant = Variant.parse("d_lambda(3, 27)")
	assert variant.lam == Fraction(3)
	assert variant.D == Fraction(27)
	assert variant.dilation == 3


@pytest.mark.parametrize(
	"text",
	["", "lambda", "lambda(1)", "plain(2)", "d_lambda(3)", "d_parental(1/2)", "cubic", "lambda(x)"],
)
def test_malformed_variants(text):
	with pytest.raises(InvalidParameterError):
		Variant.parse(text)


def test_lambda_variant_needs_dilated_masses():
	import numpy as np

	with pytest.raises(InvalidParameterError):
		Variant("lambda", lam=3).apply(np.ones(2), np.ones(2), None)
