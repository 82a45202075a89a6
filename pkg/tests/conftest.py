from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from ietlab.iet import make_iet
from ietlab.permutation import Permutation

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

IRREDUCIBLE_SMALL = [
    "A B / B A",
    "A B C / C B A",
    "A B C / C A B",
    "A B C / B C A",
    "A B C D / D C B A",
    "A B C D / D B C A",
    "A B C D / C D A B",
    "A B C D / D A B C",
]


@st.composite
def rational_iets(draw, perms=IRREDUCIBLE_SMALL, den=60):
    """Rational IETs on [0, 1) with distinct small-denominator lengths."""
    perm = Permutation.parse(draw(st.sampled_from(perms)))
    nums = draw(st.lists(st.integers(1, den), min_size=perm.d, max_size=perm.d))
    return make_iet(perm, [Fraction(n) for n in nums])


@pytest.fixture
def reversal3():
    return Permutation.parse("A B C / C B A")


@pytest.fixture
def symmetric4():
    return Permutation.parse("A B C D / D C B A")
