"""Substitutions attached to Rauzy steps, and symbolic codings of IET orbits.

Words are tuples of labels. A top-type step with winner ``w`` and loser ``l``
gives ``l -> l w``; a bottom-type step gives ``l -> w l``; every other letter is
fixed. With these rules the substitution matrix of a step is the transpose of
its Rauzy matrix, and ``zeta_1 o ... o zeta_k`` has matrix ``B_gamma^T``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy

from .errors import ConfigError, OutOfDomain
from .permutation import TOP
from .renormalize import RauzyPath, RauzyStep, identity, rauzy_step


def as_word(w) -> tuple:
    return tuple(w)


@dataclass(frozen=True)
class Substitution:
    alphabet: tuple
    images: tuple           # images[i] is the word for alphabet[i]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "images", tuple(tuple(w) for w in self.images))
        if len(self.images) != len(self.alphabet):
            raise ConfigError("one image per letter required")
        if any(len(w) == 0 for w in self.images):
            raise ConfigError("images must be nonempty")
        letters = set(self.alphabet)
        if any(c not in letters for w in self.images for c in w):
            raise ConfigError("image uses a letter outside the alphabet")

    @classmethod
    def from_dict(cls, mapping: dict, alphabet=None) -> "Substitution":
        alphabet = tuple(alphabet) if alphabet is not None else tuple(mapping)
        return cls(alphabet, tuple(as_word(mapping[a]) for a in alphabet))

    @classmethod
    def identity(cls, alphabet) -> "Substitution":
        return cls(tuple(alphabet), tuple((a,) for a in alphabet))

    @cached_property
    def _map(self) -> dict:
        return dict(zip(self.alphabet, self.images))

    @property
    def d(self) -> int:
        return len(self.alphabet)

    def image(self, letter) -> tuple:
        return self._map[letter]

    def __call__(self, word) -> tuple:
        out = []
        for c in word:
            out.extend(self._map[c])
        return tuple(out)

    def compose(self, other: "Substitution") -> "Substitution":
        """``self o other``: first ``other``, then ``self`` on the result."""
        if self.alphabet != other.alphabet:
            raise ConfigError("alphabets differ")
        return Substitution(self.alphabet, tuple(self(w) for w in other.images))

    __matmul__ = compose

    def matrix(self) -> np.ndarray:
        """``S[a, b]`` = number of occurrences of ``a`` in the image of ``b``."""
        d = self.d
        idx = {a: i for i, a in enumerate(self.alphabet)}
        S = np.zeros((d, d), dtype=object)
        for j, w in enumerate(self.images):
            for c in w:
                S[idx[c], j] += 1
        return S

    def lengths(self) -> tuple:
        return tuple(len(w) for w in self.images)

    def is_admissible(self) -> bool:
        used = {c for w in self.images for c in w}
        return used == set(self.alphabet) and max(self.lengths()) > 1

    def population(self, word) -> tuple:
        return population_vector(word, self.alphabet)

    def to_json(self) -> str:
        sep = "" if all(len(str(a)) == 1 for a in self.alphabet) else " "
        return json.dumps({str(a): sep.join(map(str, w)) for a, w in zip(self.alphabet, self.images)})

    @classmethod
    def from_json(cls, text: str) -> "Substitution":
        data = json.loads(text)
        spaced = any(" " in v for v in data.values()) or any(len(k) > 1 for k in data)
        return cls.from_dict({k: (v.split() if spaced else tuple(v)) for k, v in data.items()})

    def __str__(self):
        return ", ".join(f"{a}->{''.join(map(str, w))}" for a, w in zip(self.alphabet, self.images))


def substitution_from_step(step: RauzyStep) -> Substitution:
    al = step.start.alphabet
    w, l = step.winner, step.loser
    new = (l, w) if step.kind == TOP else (w, l)
    return Substitution(al, tuple(new if a == l else (a,) for a in al))


def compose_all(subs) -> Substitution:
    """``zeta_1 o zeta_2 o ... o zeta_k``."""
    subs = list(subs)
    if not subs:
        raise ConfigError("empty composition")
    out = subs[0]
    for z in subs[1:]:
        out = out.compose(z)
    return out


def path_substitution(path: RauzyPath) -> Substitution:
    if not path.steps:
        return Substitution.identity(path.start.alphabet)
    return compose_all(substitution_from_step(s) for s in path.steps)


def matrix_product(mats, d: int | None = None) -> np.ndarray:
    mats = list(mats)
    out = identity(d if d is not None else mats[0].shape[0])
    for m in mats:
        out = out.dot(m)
    return out


# -- words -----------------------------------------------------------------------

def population_vector(word, alphabet) -> tuple:
    idx = {a: i for i, a in enumerate(alphabet)}
    v = [0] * len(alphabet)
    for c in word:
        v[idx[c]] += 1
    return tuple(v)


def tiling_length(word, s, alphabet):
    """``|v|_s = <l(v), s>``."""
    return sum((c * x for c, x in zip(population_vector(word, alphabet), s)), 0)


def occurs(needle, hay) -> bool:
    n, m = len(needle), len(hay)
    return any(hay[i:i + n] == needle for i in range(m - n + 1))


def good_return_words(zeta: Substitution, cap: int | None = None) -> list:
    """All ``v = c...`` with ``vc`` a factor of every image, ``|v| <= cap``.

    ``cap`` defaults to the longest image length. Candidates are read off the
    shortest image, since ``vc`` has to occur there in particular.
    """
    cap = cap if cap is not None else max(zeta.lengths())
    shortest = min(zeta.images, key=len)
    found = set()
    for i in range(len(shortest)):
        for j in range(i + 2, min(len(shortest), i + cap + 1) + 1):
            w = shortest[i:j]
            if w[0] != w[-1]:
                continue
            if all(occurs(w, img) for img in zeta.images):
                found.add(w[:-1])
    return sorted(found, key=lambda v: (len(v), v))


def lattice_index(vectors, d: int) -> int:
    """Index of the lattice spanned by ``vectors`` in Z^d; 0 when not of full rank."""
    if not vectors:
        return 0
    M = sympy.Matrix([list(v) for v in vectors])
    if M.rank() < d:
        return 0
    from sympy.matrices.normalforms import smith_normal_form
    snf = smith_normal_form(M, domain=sympy.ZZ)
    prod = 1
    for i in range(d):
        prod *= int(snf[i, i])
    return abs(prod)


# -- symbolic coding -------------------------------------------------------------

def _levels(iet, upto: int):
    """Unrenormalized induced IETs ``T_0 = iet, T_1, ...`` and the substitutions."""
    iets, subs = [iet], []
    cur = iet
    for _ in range(upto):
        cur, step = rauzy_step(cur, renormalize=False)
        iets.append(cur)
        subs.append(substitution_from_step(step))
    return iets, subs


def symbolic_coding(iet, x, n: int, level: int = 0) -> tuple:
    """Labels of ``x, T_l x, ..., T_l^{n-1} x`` for the level-``l`` induced map."""
    iets, _ = _levels(iet, level)
    T = iets[-1]
    if not (0 <= x < T.total):
        raise OutOfDomain(f"{x} is outside the level-{level} base [0, {T.total})")
    pts = T.orbit(x, max(n - 1, 0))
    return tuple(T.locate(p) for p in pts[:n])


@dataclass
class Decomposition:
    """``W = Z_l(u_l) ... Z_{n-1}(u_{n-1}) Z_n(u_n) Z_n(v_n) Z_{n-1}(v_{n-1}) ... Z_l(v_l)``.

    ``Z_j = zeta_{l+1} o ... o zeta_j`` expands level-j letters into level-l
    words. ``u[j]`` is a proper suffix and ``v[j]`` a proper prefix of some
    ``zeta_{j+1}(b)``; when the top level sees no boundary of level ``n+1``, its
    letters form one factor of a single image and ``middle`` is set.
    """

    word: tuple
    level: int
    top: int
    u: dict
    v: dict
    middle: bool
    expand: dict            # j -> Substitution Z_j
    substitutions: list     # zeta_{level+1}, ..., zeta_{top+1}

    def reassemble(self) -> tuple:
        out = []
        for j in range(self.level, self.top + 1):
            out.extend(self.expand[j](self.u[j]))
        for j in range(self.top, self.level - 1, -1):
            out.extend(self.expand[j](self.v[j]))
        return tuple(out)

    def block_lengths(self, j: int) -> tuple:
        return self.expand[j].lengths()


def prefix_suffix_decomposition(iet, x, N: int, level: int = 0, max_levels: int = 200) -> Decomposition:
    """Split the first ``N`` level-``level`` symbols of ``x`` along the tower hierarchy."""
    if N < 1:
        raise ConfigError("N must be >= 1")
    iets, subs = _levels(iet, level)
    T = iets[-1]
    if not (0 <= x < T.total):
        raise OutOfDomain(f"{x} is outside the level-{level} base")
    pts = T.orbit(x, N - 1)
    word = tuple(T.locate(p) for p in pts)
    # visit times J_j of the T_level orbit to the level-j base, for j >= level
    visits = {level: list(range(N))}
    j = level
    while True:
        if len(iets) <= j + 1:
            cur, step = rauzy_step(iets[-1], renormalize=False)
            iets.append(cur)
            subs.append(substitution_from_step(step))
        nxt = iets[j + 1]
        visits[j + 1] = [t for t in visits[j] if pts[t] < nxt.total]
        if len(visits[j + 1]) < 2:
            break
        j += 1
        if j - level > max_levels:
            raise ConfigError("decomposition exceeded the level budget")
    top = j
    # Z_j maps level-j letters to level-`level` words
    expand = {level: Substitution.identity(T.perm.alphabet)}
    for k in range(level + 1, top + 1):
        expand[k] = expand[k - 1].compose(subs[k - 1])

    def letters(k, lo, hi):
        return tuple(iets[k].locate(pts[t]) for t in visits[k] if lo <= t < hi)

    u, v = {}, {}
    first = {k: visits[k][0] for k in range(level, top + 1)}
    last = {k: visits[k][-1] for k in range(level, top + 1)}
    for k in range(level, top):
        u[k] = letters(k, first[k], first[k + 1])
        v[k] = letters(k, last[k + 1], last[k] if k > level else N)
    boundary = visits[top + 1]
    middle = not boundary
    if boundary:
        t = boundary[0]
        u[top] = letters(top, first[top], t)
        v[top] = letters(top, t, last[top] if top > level else N)
    else:
        u[top] = letters(top, first[top], last[top] if top > level else N)
        v[top] = ()
    return Decomposition(word, level, top, u, v, middle, expand, subs[level:top + 1])
