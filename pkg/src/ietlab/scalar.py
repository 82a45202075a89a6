"""Two arithmetic modes for lengths and points.

Exact mode uses :class:`fractions.Fraction`. Interval mode uses mpmath's
``iv`` context: every operation returns an interval guaranteed to contain the
true value, and sign queries raise :class:`PrecisionExhausted` instead of
guessing when zero is interior to the interval.

mpmath keeps the interval precision in a process-wide context, so
:func:`set_precision` is global. The escalation helper re-runs a computation
from scratch at doubled precision.
"""
from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational

from mpmath import iv, mpf

from .errors import PrecisionExhausted

DEFAULT_BITS = int(os.environ.get("IETLAB_PRECISION_BITS", "256"))
MAX_BITS = 1 << 14

ivmpf = type(iv.mpf(0))


def set_precision(bits: int) -> None:
    iv.prec = max(int(bits), 53)


set_precision(DEFAULT_BITS)


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def is_interval(x) -> bool:
    return isinstance(x, ivmpf)


def exact(x) -> Fraction:
    """Parse ``x`` (int, Fraction, ``"p/q"`` string, decimal string) exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def interval(x, radius=0) -> "ivmpf":
    """An interval around ``x``; strings are parsed at the current precision."""
    if is_interval(x):
        return x
    if isinstance(x, Fraction):
        v = iv.mpf(x.numerator) / x.denominator
    else:
        v = iv.mpf(x)
    if radius:
        r = iv.mpf(radius)
        v = v + iv.mpf([-r.b, r.b])
    return v


def sign(x) -> int:
    if is_interval(x):
        if x.a > 0:
            return 1
        if x.b < 0:
            return -1
        if x.a == 0 and x.b == 0:
            return 0
        raise PrecisionExhausted(f"sign undecidable: interval {x} contains 0")
    return (x > 0) - (x < 0)


def less(x, y) -> bool:
    return sign(y - x) > 0


def less_equal(x, y) -> bool:
    return sign(y - x) >= 0


def radius(x):
    if is_interval(x):
        return (x.b - x.a) / 2
    return mpf(0)


def midpoint(x):
    if is_interval(x):
        return (x.a + x.b) / 2
    return x


def to_float(x) -> float:
    if is_interval(x):
        return float(midpoint(x))
    return float(x)


def with_escalation(build, bits: int = DEFAULT_BITS, cap: int = MAX_BITS):
    """Call ``build(bits)``, doubling ``bits`` on PrecisionExhausted up to ``cap``."""
    old = iv.prec
    try:
        while True:
            set_precision(bits)
            try:
                return build(bits)
            except PrecisionExhausted:
                if bits * 2 > cap:
                    raise
                bits *= 2
    finally:
        iv.prec = old
