"""Number helpers: exact rationals alongside floats, extended reals.

Throughout the package a "Real" is either a ``fractions.Fraction`` (exact
mode) or a ``float``.  Exactness is decided at input time: integer, Fraction
and string literals like ``"3/4"`` become Fractions; float literals stay
floats and never promote.  Infinite endpoints are plain ``math.inf`` /
``-math.inf`` floats.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .errors import InputFormatError

Real = Union[Fraction, float]


def parse_number(value) -> Real:
    """Parse a JSON-ish scalar into a Real.

    int -> Fraction, str "p/q" or "p" -> Fraction, float -> float.
    """
    if isinstance(value, bool):
        raise InputFormatError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputFormatError(f"cannot parse number {value!r}") from exc
    raise InputFormatError(f"expected a number, got {type(value).__name__}")


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def is_finite(x: Real) -> bool:
    if isinstance(x, float):
        return math.isfinite(x)
    return True


def as_float(x: Real) -> float:
    return float(x)


def format_real(x: Real) -> object:
    """JSON-friendly rendering: Fractions as "p/q" strings, infinities as
    "inf"/"-inf", finite floats as-is."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x
