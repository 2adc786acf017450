"""
Exact rational literals

Weights are read and written as `int`, `int/int` or a terminating decimal.
Everything is held as fractions.Fraction, never as float.
"""

import re
from fractions import Fraction

_INTEGER = re.compile(r"^[+-]?\d+$")
_RATIO = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.\d*|\.\d+)$")


def parse_rational(text: str) -> Fraction:
    """
    Parse an exact rational literal.

    Args:
        text: `3`, `2/3` or `0.25`

    Returns:
        The value as a Fraction in lowest terms

    Raises:
        ValueError: If the literal is not one of the accepted forms
    """
    token = text.strip()
    if _INTEGER.match(token) or _DECIMAL.match(token):
        return Fraction(token)
    if _RATIO.match(token):
        numerator, denominator = token.split("/")
        if int(denominator) == 0:
            raise ValueError(f"Zero denominator in rational literal: {text!r}")
        return Fraction(int(numerator), int(denominator))
    raise ValueError(f"Not a rational literal: {text!r}")


def format_rational(value: Fraction) -> str:
    """Write `value` as `p` or `p/q`; parse_rational reads it back exactly."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
