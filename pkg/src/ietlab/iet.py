"""Interval exchange transformations: evaluation, orbits and Birkhoff sums.

Lengths may be exact (:class:`fractions.Fraction`), certified intervals (mpmath
``iv``) or plain floats. Floats are a fast uncertified mode used by the
statistical experiments; everything that claims exactness runs on Fractions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import scalar
from .errors import (DimensionMismatch, NonPositiveLength, OutOfDomain,
                     ReduciblePermutation, SingularOrbit)
from .permutation import Permutation


def _coerce(x):
    if scalar.is_interval(x) or isinstance(x, float):
        return x
    return scalar.exact(x)


@dataclass(frozen=True)
class IET:
    """``T`` on ``[0, total)`` exchanging the top intervals into bottom order.

    ``lengths[i]`` is the length of the interval labelled ``perm.alphabet[i]``.
    The total need not be 1: induced maps are kept unnormalized so that they can
    be compared with first-return maps directly.
    """

    perm: Permutation
    lengths: tuple

    @property
    def d(self) -> int:
        return self.perm.d

    def length(self, label):
        return self.lengths[self.perm.index[label]]

    @cached_property
    def total(self):
        return sum(self.lengths[1:], self.lengths[0])

    @cached_property
    def _top_lefts(self):
        out, acc = {}, 0
        for a in self.perm.top:
            out[a] = acc
            acc = acc + self.length(a)
        return out

    @cached_property
    def _bottom_lefts(self):
        out, acc = {}, 0
        for a in self.perm.bottom:
            out[a] = acc
            acc = acc + self.length(a)
        return out

    def top_left(self, label):
        return self._top_lefts[label]

    def bottom_left(self, label):
        return self._bottom_lefts[label]

    def translation(self, label):
        return self._bottom_lefts[label] - self._top_lefts[label]

    @property
    def translations(self) -> tuple:
        """Translation vector in alphabet order."""
        return tuple(self.translation(a) for a in self.perm.alphabet)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.lengths)

    @property
    def is_interval(self) -> bool:
        return any(scalar.is_interval(v) for v in self.lengths)

    @cached_property
    def discontinuities(self) -> tuple:
        """Interior left endpoints of the top partition."""
        return tuple(self._top_lefts[a] for a in self.perm.top[1:])

    # -- evaluation ------------------------------------------------------------

    def locate(self, x):
        """Label of the top interval containing ``x`` (left-closed convention)."""
        if scalar.sign(x) < 0 or not scalar.less(x, self.total):
            raise OutOfDomain(f"{x} is outside [0, {self.total})")
        for a in self.perm.top[:-1]:
            if scalar.less(x, self._top_lefts[a] + self.length(a)):
                return a
        return self.perm.top[-1]

    def apply(self, x):
        x = _coerce(x) if not isinstance(x, float) else x
        return x + self.translation(self.locate(x))

    __call__ = apply

    def inverse(self) -> "IET":
        return IET(Permutation(self.perm.bottom, self.perm.top, self.perm.alphabet), self.lengths)

    def is_singular(self, x) -> bool:
        return any(scalar.sign(x - c) == 0 for c in self.discontinuities)

    def orbit(self, x, n: int, strict: bool = True) -> list:
        """``[x, Tx, ..., T^n x]``.

        With ``strict`` a point landing on a discontinuity raises
        :class:`SingularOrbit` carrying the step index.
        """
        x = _coerce(x)
        pts = [x]
        for k in range(n):
            if strict and self.is_singular(x):
                raise SingularOrbit(k, x)
            x = x + self.translation(self.locate(x))
            pts.append(x)
        if strict and n > 0 and self.is_singular(x):
            raise SingularOrbit(n, x)
        return pts

    def find_period(self, x, max_steps: int = 100_000):
        """Smallest ``p >= 1`` with ``T^p x = x``, or None within the budget."""
        x0 = _coerce(x)
        y = x0
        for p in range(1, max_steps + 1):
            y = y + self.translation(self.locate(y))
            if y == x0:
                return p
        return None

    def birkhoff_sum(self, f, x, n: int):
        """``sum_{i<n} f(T^i x)``; exact when both ``f`` and the orbit are exact."""
        if n == 0:
            return 0
        pts = self.orbit(x, n - 1)
        if self.is_interval:
            pts = [scalar.to_float(p) for p in pts]
        return sum((f(p) for p in pts), 0)

    def twisted_birkhoff_sum(self, f, x, theta, N: int) -> complex:
        """``sum_{n<N} exp(2 pi i n theta) f(T^n x)``."""
        pts = self.orbit(x, N - 1)
        total = 0j
        for n, p in enumerate(pts):
            phase = (n * theta) % 1 if isinstance(theta, Fraction) else n * theta
            total += cmath.exp(2j * math.pi * float(phase)) * complex(f(scalar.to_float(p) if self.is_interval else p))
        return total

    # -- vectorized float path -----------------------------------------------

    @cached_property
    def _float_tables(self):
        lefts = np.array([scalar.to_float(self._top_lefts[a]) for a in self.perm.top])
        shifts = np.array([scalar.to_float(self.translation(a)) for a in self.perm.top])
        return lefts, shifts

    def apply_array(self, xs: np.ndarray) -> np.ndarray:
        lefts, shifts = self._float_tables
        idx = np.searchsorted(lefts, xs, side="right") - 1
        return xs + shifts[idx]

    def orbit_array(self, xs, n: int) -> np.ndarray:
        """Float orbits of many points at once; row ``k`` holds ``T^k xs``."""
        xs = np.asarray(xs, dtype=float)
        out = np.empty((n + 1,) + xs.shape)
        out[0] = xs
        total = scalar.to_float(self.total)
        for k in range(n):
            y = self.apply_array(out[k])
            # keep float drift from pushing points outside [0, total)
            out[k + 1] = np.clip(y, 0.0, np.nextafter(total, 0.0))
        return out

    # -- comparison helpers ----------------------------------------------------

    def canonical_pieces(self) -> tuple:
        """``(start, length, translation)`` in top order, merging equal neighbours.

        Two IETs with different labellings but the same map have equal
        canonical pieces.
        """
        pieces = []
        for a in self.perm.top:
            start, ln, w = self._top_lefts[a], self.length(a), self.translation(a)
            if pieces and pieces[-1][2] == w:
                s0, l0, _ = pieces[-1]
                pieces[-1] = (s0, l0 + ln, w)
            else:
                pieces.append((start, ln, w))
        return tuple(pieces)

    def normalized(self) -> "IET":
        t = self.total
        return IET(self.perm, tuple(v / t for v in self.lengths))

    def __str__(self):
        lens = ", ".join(f"{a}={v}" for a, v in zip(self.perm.alphabet, self.lengths))
        return f"IET({self.perm}; {lens})"


def make_iet(perm, lengths, normalize: bool = True, strict: bool = False) -> IET:
    """Build an IET from a permutation and lengths in alphabet order (or a dict)."""
    if isinstance(perm, str):
        perm = Permutation.parse(perm)
    if isinstance(lengths, dict):
        if set(lengths) != set(perm.alphabet):
            raise DimensionMismatch("length labels do not match the alphabet")
        lengths = [lengths[a] for a in perm.alphabet]
    lengths = [_coerce(v) for v in lengths]
    if any(scalar.is_interval(v) for v in lengths):
        # iv arithmetic does not mix with Fractions
        lengths = [v if scalar.is_interval(v) else scalar.interval(v) for v in lengths]
    if len(lengths) != perm.d:
        raise DimensionMismatch(f"{len(lengths)} lengths for d = {perm.d}")
    for a, v in zip(perm.alphabet, lengths):
        if scalar.sign(v) <= 0:
            raise NonPositiveLength(f"length of {a} is {v}")
    if strict and not perm.is_irreducible():
        raise ReduciblePermutation(str(perm))
    iet = IET(perm, tuple(lengths))
    return iet.normalized() if normalize else iet


def rotation_iet(alpha) -> IET:
    """The rotation ``x -> x + alpha mod 1`` as a 2-IET (labels A, B)."""
    alpha = _coerce(alpha)
    return make_iet(Permutation(("A", "B"), ("B", "A")), (1 - alpha, alpha))
