"""Piecewise observables on [0, 1) with exact piece integrals.

An :class:`Observable` is a finite sum of pieces supported on disjoint
left-closed subintervals plus a global constant ``offset``. Linear pieces with
rational coefficients integrate exactly (Fraction); exponential pieces carry
closed-form integrals in floating point.
"""
from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .scalar import exact

TWO_PI = 2 * math.pi

# 8-point Gauss-Legendre rule on [-1, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class LinearPiece:
    """``c0 + c1 * x`` on ``[left, right)``."""

    left: Fraction
    right: Fraction
    c0: Fraction
    c1: Fraction = Fraction(0)

    exact = True

    def value(self, x):
        return self.c0 + self.c1 * x

    def values(self, xs):
        return float(self.c0) + float(self.c1) * xs

    def integral(self, a, b):
        return self.c0 * (b - a) + self.c1 * (b * b - a * a) / 2

    def abs_integral(self, a, b):
        if self.c1 != 0:
            root = -self.c0 / self.c1
            if a < root < b:
                return abs(self.integral(a, root)) + abs(self.integral(root, b))
        return abs(self.integral(a, b))

    def sq_integral(self, a, b):
        c0, c1 = self.c0, self.c1
        return c0 * c0 * (b - a) + c0 * c1 * (b * b - a * a) + c1 * c1 * (b ** 3 - a ** 3) / 3

    @property
    def lipschitz(self):
        return abs(self.c1)

    @property
    def sup(self):
        return max(abs(self.value(self.left)), abs(self.value(self.right)))


@dataclass(frozen=True)
class ExpPiece:
    """``amp * exp(2 pi i freq x)`` on ``[left, right)``, optionally its real/imag part."""

    left: Fraction
    right: Fraction
    amp: complex = 1.0
    freq: int = 1
    part: str = "complex"

    exact = False

    def _select(self, z):
        if self.part == "real":
            return z.real
        if self.part == "imag":
            return z.imag
        return z

    def value(self, x):
        return self._select(self.amp * cmath.exp(2j * math.pi * self.freq * float(x)))

    def values(self, xs):
        return self._select(self.amp * np.exp(2j * np.pi * self.freq * xs))

    def _complex_integral(self, a, b):
        a, b = float(a), float(b)
        if self.freq == 0:
            return self.amp * (b - a)
        k = 2j * math.pi * self.freq
        return self.amp * (cmath.exp(k * b) - cmath.exp(k * a)) / k

    def integral(self, a, b):
        z = self._complex_integral(a, b)
        if self.part == "real":
            return z.real
        if self.part == "imag":
            return z.imag
        return z

    def abs_integral(self, a, b):
        return _gauss(lambda x: np.abs(self.values(x)), float(a), float(b), panels=64)

    def sq_integral(self, a, b):
        return _gauss(lambda x: np.abs(self.values(x)) ** 2, float(a), float(b), panels=64)

    @property
    def lipschitz(self):
        return TWO_PI * abs(self.freq) * abs(self.amp)

    @property
    def sup(self):
        return abs(self.amp)


def _gauss(fn, a, b, panels=1):
    edges = np.linspace(a, b, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    xs = mid[:, None] + half[:, None] * _GL_X[None, :]
    return float(np.sum(half[:, None] * _GL_W[None, :] * fn(xs)))


@dataclass(frozen=True)
class Observable:
    """Sum of disjoint pieces plus a constant ``offset`` on all of [0, 1)."""

    pieces: tuple
    offset: object = 0
    name: str = ""

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: p.left))
        for p in pieces:
            if not (0 <= p.left < p.right <= 1):
                raise ConfigError(f"piece [{p.left}, {p.right}) not inside [0, 1)")
        for p, q in zip(pieces, pieces[1:]):
            if q.left < p.right:
                raise ConfigError("observable pieces overlap")
        object.__setattr__(self, "pieces", pieces)

    # -- evaluation ------------------------------------------------------------

    @cached_property
    def _lefts(self):
        return [p.left for p in self.pieces]

    @property
    def is_exact(self) -> bool:
        return all(p.exact for p in self.pieces) and isinstance(self.offset, (int, Fraction))

    def piece_at(self, x):
        i = bisect.bisect_right(self._lefts, x) - 1
        if i >= 0 and x < self.pieces[i].right:
            return self.pieces[i]
        return None

    def __call__(self, x):
        p = self.piece_at(x)
        return self.offset + (p.value(x) if p is not None else 0)

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.full(xs.shape, complex(self.offset) if self.is_complex else float(self.offset),
                      dtype=complex if self.is_complex else float)
        for p in self.pieces:
            mask = (xs >= float(p.left)) & (xs < float(p.right))
            if mask.any():
                out[mask] += p.values(xs[mask])
        return out

    @property
    def is_complex(self) -> bool:
        return isinstance(self.offset, complex) or any(
            isinstance(p, ExpPiece) and p.part == "complex" for p in self.pieces)

    @cached_property
    def breakpoints(self) -> tuple:
        pts = set()
        for p in self.pieces:
            pts.add(p.left)
            pts.add(p.right)
        return tuple(sorted(pts))

    @property
    def support(self):
        """Smallest interval outside of which the observable vanishes."""
        if self.offset != 0 or not self.pieces:
            return (Fraction(0), Fraction(1)) if self.offset != 0 else None
        return (self.pieces[0].left, self.pieces[-1].right)

    # -- integrals and norms ---------------------------------------------------

    def integral(self, a=Fraction(0), b=Fraction(1)):
        total = self.offset * (b - a)
        for p in self.pieces:
            lo, hi = max(a, p.left), min(b, p.right)
            if lo < hi:
                total += p.integral(lo, hi)
        return total

    @property
    def mean(self):
        return self.integral()

    def centered(self) -> "Observable":
        return Observable(self.pieces, self.offset - self.mean, self.name + "-centered")

    def _gaps(self):
        cur = Fraction(0)
        for p in self.pieces:
            if cur < p.left:
                yield cur, p.left
            cur = p.right
        if cur < 1:
            yield cur, Fraction(1)

    @property
    def l1_norm(self):
        if self.offset != 0:
            return _gauss(lambda x: np.abs(self.values(x)), 0.0, 1.0, panels=512)
        return sum((p.abs_integral(p.left, p.right) for p in self.pieces), Fraction(0))

    @property
    def l2_norm_sq(self):
        if self.offset != 0:
            if self.is_exact:
                c = self.offset
                total = sum((hi - lo) * c * c for lo, hi in self._gaps())
                for p in self.pieces:
                    shifted = LinearPiece(p.left, p.right, p.c0 + c, p.c1)
                    total += shifted.sq_integral(p.left, p.right)
                return total
            return _gauss(lambda x: np.abs(self.values(x)) ** 2, 0.0, 1.0, panels=512)
        return sum((p.sq_integral(p.left, p.right) for p in self.pieces), Fraction(0))

    @property
    def sup_norm(self):
        c = abs(self.offset)
        vals = [c]
        for p in self.pieces:
            if isinstance(p, LinearPiece):
                vals.append(abs(p.value(p.left) + self.offset))
                vals.append(abs(p.value(p.right) + self.offset))
            else:
                vals.append(p.sup + c)
        return max(vals)

    @property
    def lipschitz(self):
        """Largest Lipschitz constant over the pieces (and the constant gaps)."""
        return max((p.lipschitz for p in self.pieces), default=0)

    def is_continuous(self) -> bool:
        """No jumps at breakpoints inside (0, 1); jumps at 0 and 1 are not counted."""
        for x in self.breakpoints:
            if x <= 0 or x >= 1:
                continue
            right = self(x)
            left_piece = None
            for p in self.pieces:
                if p.right == x:
                    left_piece = p
            left = self.offset + (left_piece.value(x) if left_piece is not None else 0)
            if abs(complex(right) - complex(left)) > 1e-12:
                return False
        return True

    @property
    def lipschitz_norm(self):
        return self.sup_norm + self.lipschitz

    def scaled(self, c) -> "Observable":
        pieces = []
        for p in self.pieces:
            if isinstance(p, LinearPiece):
                pieces.append(LinearPiece(p.left, p.right, p.c0 * c, p.c1 * c))
            else:
                pieces.append(ExpPiece(p.left, p.right, p.amp * c, p.freq, p.part))
        return Observable(tuple(pieces), self.offset * c, self.name)


# -- constructors --------------------------------------------------------------

def constant(c=1) -> Observable:
    return Observable((), exact(c) if not isinstance(c, complex) else c, name=f"const({c})")


def indicator(a, b) -> Observable:
    a, b = exact(a), exact(b)
    return Observable((LinearPiece(a, b, Fraction(1)),), name=f"1[{a},{b})")


def piecewise_linear(points) -> Observable:
    """Continuous interpolation of ``[(x0, y0), (x1, y1), ...]``; zero outside [x0, xn)."""
    pts = [(exact(x), exact(y)) for x, y in points]
    pieces = []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x1 <= x0:
            raise ConfigError("interpolation nodes must increase")
        if y0 == 0 and y1 == 0:
            continue
        slope = (y1 - y0) / (x1 - x0)
        pieces.append(LinearPiece(x0, x1, y0 - slope * x0, slope))
    return Observable(tuple(pieces), name="pl")


def bump(a, b) -> Observable:
    """Trapezoid on [a, b): 1 on the middle half, 0 on collars of width (b-a)/10.

    With s = b - a the ramps have width 3s/20, so the Lipschitz constant is
    20/(3s) and the Lipschitz norm 1 + 20/(3s) stays below 15/s for s < 1.
    """
    a, b = exact(a), exact(b)
    s = b - a
    c = (a + b) / 2
    obs = piecewise_linear([
        (a + s / 10, 0), (c - s / 4, 1), (c + s / 4, 1), (b - s / 10, 0),
    ])
    return Observable(obs.pieces, name=f"bump[{a},{b})")


def tent(a, b) -> Observable:
    a, b = exact(a), exact(b)
    return Observable(piecewise_linear([(a, 0), ((a + b) / 2, 1), (b, 0)]).pieces, name=f"tent[{a},{b})")


def character(k=1, amp=1.0) -> Observable:
    """``x -> amp * exp(2 pi i k x)`` on [0, 1)."""
    return Observable((ExpPiece(Fraction(0), Fraction(1), amp, k, "complex"),), name=f"e({k}x)")


def cosine(k=1, amp=1.0) -> Observable:
    return Observable((ExpPiece(Fraction(0), Fraction(1), amp, k, "real"),), name=f"cos({k})")
