"""Rauzy-Veech and Zorich induction, cocycle matrices and Lyapunov estimates.

Matrices are numpy arrays of Python ints (``dtype=object``) so products never
overflow. Conventions: a top-type step removes the bottom-last interval from the
right end of the top-last one; the step matrix is ``I + E[loser, winner]`` and
the path matrix ``B = B_k ... B_1`` satisfies ``lam_after @ B == lam_before``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import scalar
from .errors import (ConfigError, DegenerateFrame, NonContractingPath, PathMismatch,
                     ReturnBudgetExceeded, StepBudgetExceeded, TieLengths)
from .iet import IET, make_iet
from .permutation import BOTTOM, TOP, Permutation

ZORICH_BUDGET = 10 ** 6


def identity(d: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=object)
    for i in range(d):
        m[i, i] = 1
    return m


@dataclass(frozen=True)
class RauzyStep:
    kind: str
    winner: object
    loser: object
    start: Permutation

    @property
    def end(self) -> Permutation:
        return self.start.rauzy_move(self.kind)

    def matrix(self) -> np.ndarray:
        """``I + E[loser, winner]`` in the alphabet order of ``start``."""
        m = identity(self.start.d)
        idx = self.start.index
        m[idx[self.loser], idx[self.winner]] = 1
        return m


def step_of(perm: Permutation, kind: str) -> RauzyStep:
    winner, loser = perm.winner_loser(kind)
    return RauzyStep(kind, winner, loser, perm)


@dataclass(frozen=True)
class RauzyPath:
    start: Permutation
    steps: tuple = ()

    @property
    def end(self) -> Permutation:
        return self.steps[-1].end if self.steps else self.start

    @property
    def kinds(self) -> str:
        return "".join(s.kind for s in self.steps)

    def __len__(self):
        return len(self.steps)

    def extend(self, other: "RauzyPath") -> "RauzyPath":
        return RauzyPath(self.start, self.steps + other.steps)

    @classmethod
    def from_kinds(cls, perm: Permutation, kinds) -> "RauzyPath":
        steps, p = [], perm
        for k in kinds:
            s = step_of(p, k)
            steps.append(s)
            p = s.end
        return cls(perm, tuple(steps))

    def is_loop(self) -> bool:
        return self.end == self.start


def path_matrix(path: RauzyPath) -> np.ndarray:
    """``B_gamma = B_k ... B_1`` as an exact integer matrix."""
    d = path.start.d
    B = identity(d)
    expected = path.start
    for s in path.steps:
        if s.start != expected:
            raise PathMismatch(f"step starts at {s.start}, expected {expected}")
        idx = s.start.index
        # left multiplication by I + E[l, w]: row l += row w
        B[idx[s.loser], :] = B[idx[s.loser], :] + B[idx[s.winner], :]
        expected = s.end
    return B


def is_positive(m) -> bool:
    return all(v > 0 for v in np.asarray(m).ravel())


# -- induction on IETs ---------------------------------------------------------

def step_kind(iet: IET) -> str:
    p = iet.perm
    diff = iet.length(p.top_last) - iet.length(p.bottom_last)
    sgn = scalar.sign(diff)
    if sgn == 0:
        raise TieLengths(f"equal last lengths at {p}")
    return TOP if sgn > 0 else BOTTOM


def rauzy_step(iet: IET, renormalize: bool = True):
    """One Rauzy-Veech step; returns ``(induced iet, RauzyStep)``."""
    kind = step_kind(iet)
    step = step_of(iet.perm, kind)
    idx = iet.perm.index
    lengths = list(iet.lengths)
    lengths[idx[step.winner]] = lengths[idx[step.winner]] - lengths[idx[step.loser]]
    out = IET(step.end, tuple(lengths))
    return (out.normalized() if renormalize else out), step


def induce(iet: IET, n: int, renormalize: bool = False):
    """``n`` Rauzy steps; returns ``(iet after n steps, RauzyPath)``."""
    steps = []
    for _ in range(n):
        iet, s = rauzy_step(iet, renormalize=False)
        steps.append(s)
    path = RauzyPath(steps[0].start if steps else iet.perm, tuple(steps))
    return (iet.normalized() if renormalize else iet), path


def zorich_step(iet: IET, renormalize: bool = True, budget: int = ZORICH_BUDGET):
    """Maximal run of same-type Rauzy steps; returns ``(iet', [RauzyStep, ...])``.

    The run stops before the type changes, or when the next comparison is a tie
    (which then surfaces as :class:`TieLengths` on the following call).
    """
    cur, first = rauzy_step(iet, renormalize=False)
    steps = [first]
    while True:
        try:
            kind = step_kind(cur)
        except TieLengths:
            break
        if kind != first.kind:
            break
        if len(steps) >= budget:
            raise StepBudgetExceeded(f"Zorich block longer than {budget} steps")
        cur, s = rauzy_step(cur, renormalize=False)
        steps.append(s)
    return (cur.normalized() if renormalize else cur), steps


def zorich_blocks(iet: IET, n_blocks: int, budget: int = ZORICH_BUDGET) -> list:
    """Lengths of the first ``n_blocks`` Zorich blocks."""
    out = []
    for _ in range(n_blocks):
        iet, steps = zorich_step(iet, budget=budget)
        out.append(len(steps))
    return out


def certified_zorich(perm: Permutation, make_lengths, n_blocks: int, bits: int = 512,
                     cap: int = scalar.MAX_BITS):
    """Zorich blocks in interval mode, doubling precision when a sign is undecidable.

    ``make_lengths(bits)`` must rebuild the interval lengths at the given
    precision. Returns ``(blocks, final iet, bits used)``.
    """
    def run_final(b):
        iet = make_iet(perm, make_lengths(b))
        blocks = []
        for _ in range(n_blocks):
            iet, steps = zorich_step(iet)
            blocks.append(len(steps))
        return blocks, iet, b

    return scalar.with_escalation(run_final, bits, cap)


# -- paths to IETs ---------------------------------------------------------------

def random_kinds(seed: int, n: int) -> str:
    rng = np.random.default_rng(seed)
    return "".join(TOP if b else BOTTOM for b in rng.integers(0, 2, size=n))


def iet_from_path(perm: Permutation, kinds, depth: int, window: int | None = None):
    """IET whose first ``depth`` Rauzy steps follow ``kinds``.

    The lengths are ``(1,...,1) @ B`` normalized, the image of the simplex
    barycentre; the returned radius is the sup-norm diameter of the simplex
    image, i.e. the spread of the normalized rows of ``B``. ``kinds`` may be a
    string or any iterable of 't'/'b'.
    """
    d = perm.d
    window = window if window is not None else max(64, 8 * d * d)
    kinds = list(itertools.islice(kinds, depth))
    if len(kinds) < depth:
        raise ConfigError(f"path has only {len(kinds)} steps, depth {depth} requested")
    path = RauzyPath.from_kinds(perm, kinds)
    # contraction check: every window must complete a positive block
    block = identity(d)
    since, seen_positive = 0, False
    for s in path.steps:
        idx = s.start.index
        block[idx[s.loser], :] = block[idx[s.loser], :] + block[idx[s.winner], :]
        since += 1
        if is_positive(block):
            block, since, seen_positive = identity(d), 0, True
        elif since >= window:
            raise NonContractingPath(f"no positive block within {window} steps")
    if not seen_positive:
        raise NonContractingPath("path never completes a positive block")
    B = path_matrix(path)
    col = [sum(B[:, j]) for j in range(d)]
    total = sum(col)
    lengths = tuple(Fraction(c, total) for c in col)
    rows = [[Fraction(int(x), sum(B[i, :])) for x in B[i, :]] for i in range(d)]
    radius = max(max(r[j] for r in rows) - min(r[j] for r in rows) for j in range(d))
    return IET(perm, lengths), radius


# -- first return oracle -----------------------------------------------------------

def first_return_map(iet: IET, ell, budget: int = 10 ** 6) -> IET:
    """Induced map on ``[0, ell)`` by direct simulation of interval pieces.

    Each piece of ``[0, ell)`` is pushed forward by ``T``, cut at the
    discontinuities, until it lands back in ``[0, ell)``. No induction formula is
    used, so this is an independent oracle for :func:`rauzy_step`.
    """
    ell = scalar.exact(ell)
    if not (0 < ell <= iet.total):
        raise ConfigError(f"inducing length {ell} outside (0, {iet.total}]")
    cuts = sorted(set(iet.discontinuities))
    active = [(Fraction(0), ell, Fraction(0))]   # (orig start, orig end, accumulated shift)
    done = []
    work = 0
    while active:
        a, b, w = active.pop()
        # cut the current image [a+w, b+w) at the discontinuities
        lo, hi = a + w, b + w
        bounds = [lo] + [c for c in cuts if lo < c < hi] + [hi]
        for u, v in zip(bounds, bounds[1:]):
            work += 1
            if work > budget:
                raise ReturnBudgetExceeded(f"first return not reached within {budget} pieces")
            shift = w + iet.translation(iet.locate(u))
            oa, ob = u - w, v - w
            ia, ib = oa + shift, ob + shift
            if ib <= ell:
                done.append((oa, ob, shift))
            elif ia >= ell:
                active.append((oa, ob, shift))
            else:
                cut = ell - shift
                done.append((oa, cut, shift))
                active.append((cut, ob, shift))
    done.sort()
    merged = []
    for a, b, w in done:
        if merged and merged[-1][2] == w and merged[-1][1] == a:
            merged[-1] = (merged[-1][0], b, w)
        else:
            merged.append((a, b, w))
    labels = tuple(f"P{i}" for i in range(len(merged)))
    bottom = tuple(lab for _, lab in sorted(zip([a + w for a, _, w in merged], labels)))
    if len(labels) == 1:
        # a single piece is the identity; represent it as a trivially split IET
        half = ell / 2
        return IET(Permutation(("P0", "P1"), ("P0", "P1")), (half, half))
    return IET(Permutation(labels, bottom), tuple(b - a for a, b, _ in merged))


def pieces_of(iet: IET) -> tuple:
    """Canonical merged pieces; equal for two IETs defining the same map."""
    return iet.canonical_pieces()


# -- Lyapunov exponents --------------------------------------------------------------

@dataclass
class LyapunovEstimate:
    theta1: float
    theta2: float | None
    stderr1: float
    stderr2: float | None
    per_log_norm: tuple = ()
    samples: list = field(default_factory=list)
    flagged: bool = False

    @property
    def ratio(self):
        return None if self.theta2 is None else self.theta2 / self.theta1


def _omega(perm: Permutation) -> np.ndarray:
    from .combinatorics import omega_matrix
    return np.array(omega_matrix(perm), dtype=float)


def _float_zorich_run(perm, lam, n_steps, frame, orth_every):
    """Float Zorich induction carrying a frame of height vectors ``v -> B v``."""
    d = perm.d
    top, bottom = list(perm.top), list(perm.bottom)
    idx = perm.index
    lam = lam.copy()
    logs = np.zeros(frame.shape[1])
    log_norm_total = 0.0
    prev_kind = None
    blocks = 0
    B = np.eye(d)
    while True:
        t, b = top[-1], bottom[-1]
        it, ib = idx[t], idx[b]
        if lam[it] == lam[ib]:
            raise TieLengths("float tie during Lyapunov run")
        kind = TOP if lam[it] > lam[ib] else BOTTOM
        if prev_kind is not None and kind != prev_kind:
            # close the Zorich block
            frame = B @ frame
            log_norm_total += math.log(np.abs(B).sum(axis=0).max())
            B = np.eye(d)
            blocks += 1
            if blocks % orth_every == 0 or blocks == n_steps:
                q, r = np.linalg.qr(frame)
                diag = np.abs(np.diag(r))
                if not np.all(np.isfinite(diag)) or np.any(diag <= 1e-300):
                    raise DegenerateFrame("frame collapsed during re-orthonormalization")
                logs += np.log(diag)
                frame = q
            if blocks == n_steps:
                return logs / blocks, log_norm_total / blocks
        prev_kind = kind
        if kind == TOP:
            w, l = it, ib
            bottom.pop()
            bottom.insert(bottom.index(t) + 1, b)
        else:
            w, l = ib, it
            top.pop()
            top.insert(top.index(b) + 1, t)
        lam[w] -= lam[l]
        B[l, :] += B[w, :]
        s = lam.sum()
        lam /= s


def lyapunov_estimate(perm: Permutation, seed: int = 0, n_steps: int = 10 ** 5,
                      n_samples: int = 4, orth_every: int = 16) -> LyapunovEstimate:
    """Top two exponents of the Zorich cocycle on ``H(pi)`` per Zorich step.

    Each sample draws lengths uniformly on the simplex and a random frame in
    ``H(pi)``, runs ``n_steps`` Zorich blocks in floating point and accumulates
    the QR log-diagonal. ``per_log_norm`` gives the same exponents divided by the
    mean log of the block-matrix norm, a second normalization convention.
    """
    if n_steps < 1:
        raise ConfigError("n_steps must be >= 1")
    rng = np.random.default_rng(seed)
    om = _omega(perm)
    rank = np.linalg.matrix_rank(om)
    k = 2 if rank >= 4 else 1
    res, norms = [], []
    for _ in range(n_samples):
        lam = rng.dirichlet(np.ones(perm.d))
        frame = om @ rng.standard_normal((perm.d, k))
        frame, _ = np.linalg.qr(frame)
        exps, lognorm = _float_zorich_run(perm, lam, n_steps, frame, orth_every)
        res.append(exps)
        norms.append(lognorm)
    arr = np.array(res)
    mean = arr.mean(axis=0)
    if n_samples > 1:
        err = arr.std(axis=0, ddof=1) / math.sqrt(n_samples)
        flagged = False
    else:
        err = np.full(k, math.inf)
        flagged = True
    mean_norm = float(np.mean(norms))
    per_norm = tuple(float(m / mean_norm) for m in mean)
    return LyapunovEstimate(
        theta1=float(mean[0]),
        theta2=float(mean[1]) if k == 2 else None,
        stderr1=float(err[0]),
        stderr2=float(err[1]) if k == 2 else None,
        per_log_norm=per_norm,
        samples=[list(map(float, r)) for r in res],
        flagged=flagged,
    )
