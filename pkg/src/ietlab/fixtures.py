"""Named IET fixtures with fixed seeds, shared by tests, scripts and the CLI."""
from __future__ import annotations

from fractions import Fraction

import mpmath

from . import scalar
from .errors import ConfigError
from .iet import IET, make_iet
from .permutation import Permutation
from .renormalize import iet_from_path, random_kinds

REVERSAL_3 = "A B C / C B A"
SYMMETRIC_4 = "A B C D / D C B A"
ROTATION_2 = "A B / B A"


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def golden_fraction(k: int = 40) -> Fraction:
    """``F_k / F_{k+1}``, a convergent of ``1/phi``."""
    return Fraction(fibonacci(k), fibonacci(k + 1))


def golden_lengths(bits: int):
    """Interval lengths ``(1/(1+x), x/(1+x))`` with ``x = 1/phi``, at ``bits`` of precision."""
    scalar.set_precision(bits)
    iv = mpmath.iv
    x = (iv.sqrt(iv.mpf(5)) - 1) / 2
    return [1 / (1 + x), x / (1 + x)]


def golden_rotation(k: int = 90) -> IET:
    """2-IET with lengths ``(1/(1+x), x/(1+x))`` for ``x = F_k/F_{k+1}``; its Zorich blocks are 1s."""
    x = golden_fraction(k)
    return make_iet(ROTATION_2, [1 / (1 + x), x / (1 + x)])


def three_reversal_golden(k: int = 40) -> IET:
    """3-IET inducing after one step onto a rotation by ``theta = F_k/F_{k+1}`` of ``[0, 4/5)``.

    The roof is 2 on the first fifth of the base and 1 elsewhere.
    """
    th = golden_fraction(k)
    return make_iet(REVERSAL_3, [Fraction(1, 5), Fraction(3, 5) - 4 * th / 5, Fraction(1, 5) + 4 * th / 5])


def path_fixture(perm: str, seed: int, depth: int) -> IET:
    """IET following a seeded fair-coin Rauzy path of the given depth."""
    iet, _ = iet_from_path(Permutation.parse(perm), random_kinds(seed, depth), depth)
    return iet


def d3_reversal_path(seed: int = 7, depth: int = 160) -> IET:
    return path_fixture(REVERSAL_3, seed, depth)


def d4_symmetric_path(seed: int = 7, depth: int = 160) -> IET:
    return path_fixture(SYMMETRIC_4, seed, depth)


FIXTURES = {
    "golden-rotation": golden_rotation,
    "three-reversal-golden": three_reversal_golden,
    "d3-reversal": d3_reversal_path,
    "d4-symmetric": d4_symmetric_path,
}


def get_fixture(name: str, **kwargs) -> IET:
    try:
        build = FIXTURES[name]
    except KeyError:
        raise ConfigError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None
    return build(**kwargs)
