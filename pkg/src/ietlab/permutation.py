"""Labelled permutation pairs (top order, bottom order)."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import ConfigError, DimensionMismatch

TOP = "t"
BOTTOM = "b"


@dataclass(frozen=True)
class Permutation:
    """A pair of bijections alphabet -> {1..d}, stored as the two orders.

    ``top[i]`` is the label of the (i+1)-th interval before the exchange and
    ``bottom[i]`` the label of the (i+1)-th interval after it. ``alphabet``
    fixes the row/column order used by every matrix attached to this
    permutation and is carried unchanged through Rauzy moves; it does not take
    part in equality.
    """

    top: tuple
    bottom: tuple
    alphabet: tuple = field(default=None, compare=False)

    def __post_init__(self):
        top, bottom = tuple(self.top), tuple(self.bottom)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", top)
        else:
            object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(top) < 2:
            raise ConfigError("need at least two intervals")
        if len(set(top)) != len(top):
            raise ConfigError(f"repeated label in top order {top}")
        if set(top) != set(bottom) or len(bottom) != len(top):
            raise DimensionMismatch(f"top {top} and bottom {bottom} are not orders of one alphabet")
        if set(self.alphabet) != set(top) or len(self.alphabet) != len(top):
            raise DimensionMismatch("alphabet does not match the permutation labels")

    # -- construction --------------------------------------------------------

    @classmethod
    def parse(cls, text: str, alphabet=None) -> "Permutation":
        """Parse ``"A B C D / D C B A"`` (also accepts a newline separator)."""
        sep = "/" if "/" in text else "\n"
        parts = text.split(sep)
        if len(parts) != 2:
            raise ConfigError(f"expected 'TOP / BOTTOM', got {text!r}")
        top = parts[0].split()
        bottom = parts[1].split()
        return cls(tuple(top), tuple(bottom), alphabet)

    @classmethod
    def from_images(cls, images, labels=None) -> "Permutation":
        """Permutation with top = labels in order and bottom given by top positions.

        ``images`` lists, for each bottom position, the (1-based) top position of
        the label sitting there; ``(3, 2, 1)`` is the 3-interval reversal.
        """
        d = len(images)
        labels = tuple(labels) if labels is not None else tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ"[:d])
        return cls(labels, tuple(labels[i - 1] for i in images))

    @classmethod
    def symmetric(cls, d: int) -> "Permutation":
        return cls.from_images(tuple(range(d, 0, -1)))

    @classmethod
    def rotation(cls, d: int, shift: int = 1) -> "Permutation":
        """The rotation sending top position i to bottom position i + shift (mod d)."""
        images = [0] * d
        for i in range(d):
            images[(i + shift) % d] = i + 1
        return cls.from_images(tuple(images))

    # -- basic data ----------------------------------------------------------

    @property
    def d(self) -> int:
        return len(self.top)

    @cached_property
    def _top_pos(self):
        return {a: i + 1 for i, a in enumerate(self.top)}

    @cached_property
    def _bottom_pos(self):
        return {a: i + 1 for i, a in enumerate(self.bottom)}

    @cached_property
    def index(self):
        """label -> row index in ``alphabet`` order."""
        return {a: i for i, a in enumerate(self.alphabet)}

    def top_pos(self, label) -> int:
        return self._top_pos[label]

    def bottom_pos(self, label) -> int:
        return self._bottom_pos[label]

    @property
    def top_last(self):
        return self.top[-1]

    @property
    def bottom_last(self):
        return self.bottom[-1]

    def __str__(self):
        return " ".join(map(str, self.top)) + " / " + " ".join(map(str, self.bottom))

    def with_alphabet(self, alphabet) -> "Permutation":
        return Permutation(self.top, self.bottom, alphabet)

    # -- predicates ----------------------------------------------------------

    def is_irreducible(self) -> bool:
        seen_top, seen_bottom = set(), set()
        for k in range(self.d - 1):
            seen_top.add(self.top[k])
            seen_bottom.add(self.bottom[k])
            if seen_top == seen_bottom:
                return False
        return True

    def is_rotation(self) -> bool:
        """True when bottom o top^-1 is a nontrivial power of the cyclic shift."""
        d = self.d
        shifts = {(self.bottom_pos(a) - self.top_pos(a)) % d for a in self.top}
        return len(shifts) == 1 and shifts != {0}

    def is_standard(self) -> bool:
        return self.top[0] == self.bottom[-1] and self.top[-1] == self.bottom[0]

    # -- Rauzy moves -----------------------------------------------------------

    def winner_loser(self, kind):
        if kind == TOP:
            return self.top_last, self.bottom_last
        if kind == BOTTOM:
            return self.bottom_last, self.top_last
        raise ConfigError(f"unknown Rauzy move {kind!r}")

    def rauzy_move(self, kind) -> "Permutation":
        """Combinatorial part of one Rauzy step of the given type.

        Top type: the bottom-last letter is re-inserted in the bottom order right
        after the top-last letter. Bottom type: symmetric, on the top order.
        """
        winner, loser = self.winner_loser(kind)
        if kind == TOP:
            row = [a for a in self.bottom if a != loser]
            row.insert(row.index(winner) + 1, loser)
            return Permutation(self.top, tuple(row), self.alphabet)
        row = [a for a in self.top if a != loser]
        row.insert(row.index(winner) + 1, loser)
        return Permutation(tuple(row), self.bottom, self.alphabet)

    # -- canonical form --------------------------------------------------------

    def canonical(self) -> tuple:
        """Relabel so the top order is 1..d; return the bottom order as top positions."""
        return tuple(self.top_pos(a) for a in self.bottom)

    def canonical_str(self) -> str:
        return "".join(str(i) if self.d < 10 else f"{i}," for i in self.canonical()).rstrip(",")

    def relabelled(self) -> "Permutation":
        """Canonical representative with labels A, B, C... in top order."""
        return Permutation.from_images(self.canonical())
