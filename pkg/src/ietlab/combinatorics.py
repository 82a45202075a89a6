"""Rauzy classes, intersection forms and loop searches.

Rauzy classes are enumerated on canonical permutations (top order relabelled to
1..d), so a class is a set of tuples of top positions in bottom order. Loop
searches run on labelled permutations because the cocycle and the
substitutions depend on labels.
"""
from __future__ import annotations

import itertools
import math
import json
from collections import deque
from dataclasses import dataclass, field

import sympy

from .errors import BudgetExceeded, ConfigError, ReduciblePermutation
from .permutation import BOTTOM, TOP, Permutation
from .renormalize import RauzyPath, is_positive, path_matrix


# -- intersection form -----------------------------------------------------------

def omega_matrix(perm: Permutation) -> list:
    """``Omega[a][b]``: +1 if b is after a on top but before it on the bottom, -1 reversed."""
    al = perm.alphabet
    out = []
    for a in al:
        row = []
        for b in al:
            if perm.top_pos(b) > perm.top_pos(a) and perm.bottom_pos(b) < perm.bottom_pos(a):
                row.append(1)
            elif perm.top_pos(b) < perm.top_pos(a) and perm.bottom_pos(b) > perm.bottom_pos(a):
                row.append(-1)
            else:
                row.append(0)
        out.append(row)
    return out


def _integral(vec) -> tuple:
    """Scale a rational vector to a primitive integer vector."""
    vals = [sympy.Rational(x) for x in vec]
    den = math.lcm(*[int(v.q) for v in vals])
    ints = [int(v * den) for v in vals]
    g = math.gcd(*ints)
    return tuple(v // g for v in ints) if g else tuple(ints)


@dataclass(frozen=True)
class SurfaceData:
    omega: tuple
    genus: int
    kappa: int
    h_basis: tuple
    n_basis: tuple

    @property
    def rank(self) -> int:
        return 2 * self.genus


def surface_data(perm: Permutation) -> SurfaceData:
    if not perm.is_irreducible():
        raise ReduciblePermutation(str(perm))
    om = omega_matrix(perm)
    M = sympy.Matrix(om)
    rank = M.rank()
    genus = rank // 2
    kappa = perm.d - 2 * genus + 1
    h_basis = tuple(_integral(list(c)) for c in M.columnspace())
    n_basis = tuple(_integral(list(c)) for c in M.nullspace())
    return SurfaceData(tuple(map(tuple, om)), genus, kappa, h_basis, n_basis)


def is_type_w(perm: Permutation) -> bool:
    """True when ``(1,...,1)`` is not in the column space of Omega (exact over Q)."""
    if not perm.is_irreducible():
        raise ReduciblePermutation(str(perm))
    M = sympy.Matrix(omega_matrix(perm))
    h = sympy.ones(perm.d, 1)
    return M.row_join(h).rank() > M.rank()


# -- Rauzy classes ---------------------------------------------------------------

@dataclass
class RauzyDiagram:
    start: tuple
    vertices: list
    edges: list            # (from, kind, to) on canonical tuples
    class_id: str = ""

    def __len__(self):
        return len(self.vertices)

    def permutation(self, vertex) -> Permutation:
        return Permutation.from_images(vertex)

    def to_json(self) -> str:
        fmt = lambda v: "".join(map(str, v)) if len(v) < 10 else ",".join(map(str, v))
        return json.dumps({
            "class_id": self.class_id,
            "start": fmt(self.start),
            "vertices": [fmt(v) for v in self.vertices],
            "edges": [[fmt(a), k, fmt(b)] for a, k, b in self.edges],
        }, indent=2)

    def to_dot(self) -> str:
        fmt = lambda v: "".join(map(str, v)) if len(v) < 10 else ",".join(map(str, v))
        lines = [f'digraph "{self.class_id}" {{']
        for v in self.vertices:
            lines.append(f'  "{fmt(v)}";')
        for a, k, b in self.edges:
            lines.append(f'  "{fmt(a)}" -> "{fmt(b)}" [label="{k}"];')
        lines.append("}")
        return "\n".join(lines)


def canonical_move(vertex: tuple, kind: str) -> tuple:
    return Permutation.from_images(vertex).rauzy_move(kind).canonical()


def rauzy_class(perm: Permutation) -> RauzyDiagram:
    if not perm.is_irreducible():
        raise ReduciblePermutation(str(perm))
    start = perm.canonical()
    seen = {start}
    order = [start]
    edges = []
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for kind in (TOP, BOTTOM):
            w = canonical_move(v, kind)
            edges.append((v, kind, w))
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    cid = "".join(map(str, min(order)))
    return RauzyDiagram(start, order, edges, class_id=cid)


def is_rotation_class(perm: Permutation) -> bool:
    return any(Permutation.from_images(v).is_rotation() for v in rauzy_class(perm).vertices)


def irreducible_permutations(d: int):
    """All irreducible canonical permutations of size d, as Permutation objects."""
    for images in itertools.permutations(range(1, d + 1)):
        p = Permutation.from_images(images)
        if p.is_irreducible():
            yield p


def rauzy_classes(d: int) -> list:
    seen, classes = set(), []
    for p in irreducible_permutations(d):
        if p.canonical() in seen:
            continue
        diag = rauzy_class(p)
        seen.update(diag.vertices)
        classes.append(diag)
    return classes


# -- loop searches ---------------------------------------------------------------

def _support_after(support: frozenset, perm: Permutation, kind: str) -> frozenset:
    """Support of ``(I + E[l, w]) B`` given the support of ``B``."""
    w, l = perm.winner_loser(kind)
    idx = perm.index
    iw, il = idx[w], idx[l]
    added = {(il, j) for (i, j) in support if i == iw}
    return support | added


def find_positive_loop(perm: Permutation, budget: int = 200_000) -> RauzyPath:
    """Shortest loop at ``perm`` (labelled) whose path matrix is entrywise positive.

    Breadth-first search on pairs (permutation, support of the partial product);
    the support of a product only depends on the supports of the factors, so the
    state space is finite and the first hit is a shortest positive loop.
    """
    if not perm.is_irreducible():
        raise ReduciblePermutation(str(perm))
    d = perm.d
    full = frozenset((i, j) for i in range(d) for j in range(d))
    start_support = frozenset((i, i) for i in range(d))
    seen = {(perm, start_support)}
    queue = deque([(perm, start_support, "")])
    expanded = 0
    while queue:
        if expanded >= budget:
            raise BudgetExceeded(f"no positive loop within {budget} states")
        p, sup, word = queue.popleft()
        expanded += 1
        for kind in (TOP, BOTTOM):
            q = p.rauzy_move(kind)
            nsup = _support_after(sup, p, kind)
            nword = word + kind
            if q == perm and nsup == full:
                path = RauzyPath.from_kinds(perm, nword)
                assert is_positive(path_matrix(path))
                return path
            if (q, nsup) not in seen:
                seen.add((q, nsup))
                queue.append((q, nsup, nword))
    raise BudgetExceeded(f"no positive loop at {perm}")


def is_simple(word) -> bool:
    """No proper prefix of ``word`` equals the suffix of the same length."""
    m = len(word)
    return m > 0 and all(word[:i] != word[m - i:] for i in range(1, m))


def _distance_to(perm: Permutation, max_depth: int = 10_000) -> dict:
    """Distances to ``perm`` in the labelled Rauzy diagram (reverse BFS)."""
    forward, order = {}, [perm]
    queue, seen = deque([perm]), {perm}
    while queue:
        p = queue.popleft()
        forward[p] = [p.rauzy_move(TOP), p.rauzy_move(BOTTOM)]
        for q in forward[p]:
            if q not in seen:
                seen.add(q)
                queue.append(q)
    reverse = {p: [] for p in seen}
    for p, outs in forward.items():
        for q in outs:
            reverse[q].append(p)
    dist = {perm: 0}
    queue = deque([perm])
    while queue:
        p = queue.popleft()
        for q in reverse[p]:
            if q not in dist:
                dist[q] = dist[p] + 1
                queue.append(q)
    return dist


def loop_words(perm: Permutation, max_len: int):
    """Loop words at ``perm`` in order of increasing length."""
    dist = _distance_to(perm)
    for length in range(1, max_len + 1):
        stack = [(perm, "")]
        while stack:
            p, w = stack.pop()
            if len(w) == length:
                if p == perm:
                    yield w
                continue
            for kind in (BOTTOM, TOP):
                q = p.rauzy_move(kind)
                if dist.get(q, 10 ** 9) <= length - len(w) - 1:
                    stack.append((q, w + kind))


@dataclass
class GoodWord:
    path: RauzyPath
    substitution: object
    good_words: tuple
    lattice_index: int
    candidates_tried: int = 0
    notes: list = field(default_factory=list)

    @property
    def word(self) -> str:
        return self.path.kinds


def find_good_word(perm: Permutation, budget: int = 50_000, max_len: int = 40) -> GoodWord:
    """Simple positive loop whose composed substitution has generating good return words.

    Candidates are loop words by increasing length; each must be simple and have
    an entrywise positive matrix before the good return words and the lattice
    index of their population vectors are computed. Raises BudgetExceeded with the
    best (smallest nonzero) lattice index seen.
    """
    from .substitutions import good_return_words, lattice_index, path_substitution

    if not perm.is_irreducible():
        raise ReduciblePermutation(str(perm))
    best = None
    tried = 0
    for w in loop_words(perm, max_len):
        if tried >= budget:
            break
        tried += 1
        if not is_simple(w):
            continue
        path = RauzyPath.from_kinds(perm, w)
        if not is_positive(path_matrix(path)):
            continue
        zeta = path_substitution(path)
        gr = good_return_words(zeta)
        if not gr:
            continue
        idx = lattice_index([zeta.population(v) for v in gr], perm.d)
        if idx == 1:
            return GoodWord(path, zeta, tuple(gr), 1, tried)
        if idx and (best is None or idx < best):
            best = idx
    raise BudgetExceeded(f"no good word within {tried} candidates (best index {best})", best)


def loop_word_check(perm: Permutation, word: str) -> RauzyPath:
    path = RauzyPath.from_kinds(perm, word)
    if not path.is_loop():
        raise ConfigError(f"{word!r} is not a loop at {perm}")
    return path
