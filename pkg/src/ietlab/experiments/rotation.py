"""Rotation-class IETs as integer-roof towers over a rotation, and the lower-bound certificate.

Rauzy induction on a rotation-class IET eventually reaches a rotation
permutation. The induced map on ``I0 = [0, a)`` is then ``x -> x + beta mod a``
and every induced interval carries a tower of height ``h_alpha``, the return
time. Those towers tile ``[0, 1)``; level ``t`` of tower ``alpha`` is the
translate of the base interval by ``T^t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..combinatorics import is_rotation_class
from ..errors import ConfigError, NoGapFound, NotRotationClass, StepBudgetExceeded, TooSmallN
from ..iet import IET
from ..observables import bump
from ..renormalize import rauzy_step
from .correlations import _split_exact, correlations_exact


@dataclass
class RotationRepresentation:
    iet: IET
    a: Fraction                  # length of the base I0 = [0, a)
    beta: Fraction               # rotation amount, so theta = beta / a
    labels: tuple                # induced intervals in base order
    lefts: tuple                 # left ends in I0
    widths: tuple
    roof: tuple                  # integer return times
    shifts: dict = field(repr=False)   # label -> [T^t(left) - left for t < roof]
    path: str = ""
    degenerate: bool = False     # base of length 1 (input was already a rotation)

    @property
    def theta(self) -> Fraction:
        return self.beta / self.a

    @property
    def variation(self) -> int:
        """Total variation of the roof on the circle ``R / aZ``."""
        r = list(self.roof)
        return sum(abs(x - y) for x, y in zip(r, r[1:] + r[:1]))

    @property
    def kac_sum(self) -> Fraction:
        """``sum_alpha |I_alpha| r_alpha``; equals 1 for a tiling of [0, 1)."""
        return sum((w * h for w, h in zip(self.widths, self.roof)), Fraction(0))

    def roof_at(self, x) -> int:
        for left, w, h in zip(self.lefts, self.widths, self.roof):
            if left <= x < left + w:
                return h
        raise ConfigError(f"{x} is outside the base [0, {self.a})")

    def rotate(self, x):
        y = x + self.beta
        return y - self.a if y >= self.a else y

    def lift(self, y):
        """``i(y) = (x, t)``: base point and level of ``y`` in the tower picture."""
        for lab, left, w in zip(self.labels, self.lefts, self.widths):
            for t, tau in enumerate(self.shifts[lab]):
                if left + tau <= y < left + tau + w:
                    return y - tau, t
        raise ConfigError(f"{y} is not covered by the towers")

    def project(self, x, t):
        """``i^-1(x, t)``."""
        for lab, left, w in zip(self.labels, self.lefts, self.widths):
            if left <= x < left + w:
                return x + self.shifts[lab][t]
        raise ConfigError(f"{x} is outside the base")

    def flow_step(self, y):
        """One unit of the special flow: climb the tower, or return through the rotation."""
        x, t = self.lift(y)
        if t + 1 < self.roof_at(x):
            return self.project(x, t + 1)
        return self.project(self.rotate(x), 0)

    def roof_function(self):
        """``(breakpoints, values)`` on the unit circle, for float sampling."""
        bps = np.array([float(l / self.a) for l in self.lefts])
        return bps, np.array(self.roof, dtype=float)


def rotation_representation(iet: IET, max_steps: int = 10_000) -> RotationRepresentation:
    """Induce until the permutation is a rotation and read off base, rotation and roof."""
    if not iet.is_exact:
        raise ConfigError("rotation representation runs in rational mode")
    if not is_rotation_class(iet.perm):
        raise NotRotationClass(str(iet.perm))
    T = iet.normalized() if iet.total != 1 else iet
    cur, kinds = T, []
    while not cur.perm.is_rotation():
        if len(kinds) >= max_steps:
            raise StepBudgetExceeded(f"no rotation vertex within {max_steps} steps")
        cur, step = rauzy_step(cur, renormalize=False)
        kinds.append(step.kind)
    a = cur.total
    first = cur.perm.top[0]
    beta = cur.translation(first) % a
    for lab in cur.perm.alphabet:
        if cur.translation(lab) % a != beta:
            raise ConfigError("induced map is not a rotation")
    labels = tuple(cur.perm.top)
    lefts = tuple(cur.top_left(l) for l in labels)
    widths = tuple(cur.length(l) for l in labels)
    roof, shifts = [], {}
    for lab, left, w in zip(labels, lefts, widths):
        # return time of the base interval, and the translation at every level
        taus, y, h = [Fraction(0)], T(left), 1
        while not (0 <= y < a):
            taus.append(y - left)
            y = T(y)
            h += 1
        roof.append(h)
        shifts[lab] = taus
    return RotationRepresentation(T, a, beta, labels, lefts, widths, tuple(roof), shifts,
                                  "".join(kinds), degenerate=(a == 1))


# -- Denjoy-Koksma deviations ------------------------------------------------------

def dk_scale(k, eps: float) -> float:
    """``log k (log log k)^(1+eps)``, evaluated at ``max(k, 16)`` so it stays away from 0."""
    k = max(float(k), 16.0)
    return math.log(k) * math.log(math.log(k)) ** (1 + eps)


@dataclass
class DKTable:
    k_grid: list
    deviations: np.ndarray       # shape (len(k_grid), n_x)
    variation: float
    constant: float              # smallest C with dev <= C Var(r) L(k) on the grid
    per_point: np.ndarray        # the same constant for each base point
    eps: float


def denjoy_koksma_check(theta: float, roof, k_grid, eps: float = 0.1, n_x: int = 16,
                        seed: int = 0, xs=None) -> DKTable:
    """Measured ``|sum_{i<k} r(x + i theta) - k int r|`` on the unit circle.

    ``roof`` is ``(breakpoints, values)``: the roof equals ``values[j]`` on
    ``[breakpoints[j], breakpoints[j+1])`` (cyclically). The returned constant is
    empirical; it is only as good as the grid and the sample points.
    """
    bps, vals = (np.asarray(x, dtype=float) for x in roof)
    widths = np.diff(np.append(bps, bps[0] + 1.0))
    mean = float(np.sum(widths * vals))
    var = float(np.sum(np.abs(vals - np.roll(vals, -1))))
    grid = sorted({int(k) for k in k_grid})
    K = grid[-1]
    rng = np.random.default_rng(seed)
    xs = rng.random(n_x) if xs is None else np.asarray(xs, dtype=float)
    dev = np.zeros((len(grid), len(xs)))
    for j, x in enumerate(xs):
        pts = np.mod(x + float(theta) * np.arange(K), 1.0)
        idx = np.searchsorted(bps, pts, side="right") - 1   # -1 wraps to the last cell
        s = np.cumsum(vals[idx])
        dev[:, j] = np.abs(s[np.array(grid) - 1] - np.array(grid) * mean)
    scale = np.array([dk_scale(k, eps) for k in grid])
    if var == 0:
        per = np.where(dev.max(axis=0) > 1e-9, np.inf, 0.0)
    else:
        per = (dev / (var * scale[:, None])).max(axis=0)
    return DKTable(grid, dev, var, float(per.max()), per, eps)


# -- lower-bound certificate -------------------------------------------------------

@dataclass
class LowerBoundCertificate:
    N: int
    eps: float
    C: float
    A: float
    c0: float
    s: Fraction
    J: tuple
    J_prime: tuple
    J_second: tuple
    S: list
    H_measure: Fraction
    f_l1: Fraction
    g_l1: Fraction
    f_lip: Fraction
    g_lip: Fraction
    Q: Fraction
    disjoint: bool
    checks: dict

    @property
    def ratio(self) -> Fraction:
        return self.Q / (self.f_l1 ** 2 * self.g_l1 ** 2 * len(self.S))

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _arcs_in_base(starts, length, a):
    """Union of ``[x, x + length) mod a`` as sorted disjoint intervals of ``[0, a)``."""
    segs = []
    for x in starts:
        y = x + length
        if y <= a:
            segs.append((x, y))
        else:
            segs.append((x, a))
            segs.append((Fraction(0), y - a))
    segs.sort()
    out = []
    for lo, hi in segs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _rationalize(x: float, den: int = 10 ** 9) -> Fraction:
    q = Fraction(x).limit_denominator(den)
    return q if q > 0 else Fraction(1, den)


def lower_bound_construct(rep: RotationRepresentation, N: int, eps: float = 0.1,
                          c0: float | None = None, C: float | None = None,
                          dk_points: int = 16, seed: int = 0) -> LowerBoundCertificate:
    """Build ``J_N``, ``S``, ``J_N''`` and bumps, then certify ``Q_N`` from below exactly.

    ``g`` sits on ``J_N`` and ``f`` on ``J_N''``, so that the correlation
    ``int f(T^n y) g(y) dy`` vanishes whenever ``T^n J_N`` misses ``J_N''``.
    """
    if N < 3:
        raise TooSmallN(f"N = {N} < 3")
    a, beta = rep.a, rep.beta
    L = dk_scale(N, eps)
    if C is None:
        grid = np.unique(np.geomspace(1, max(N, 16), 48).astype(int))
        dk = denjoy_koksma_check(float(rep.theta), rep.roof_function(), grid, eps, dk_points, seed)
        C = dk.constant * dk.variation
    A = 2 * float(a) * C + 1
    c0 = 1 / (30 * A) if c0 is None else c0
    s = _rationalize(c0 * float(a) / L)
    if 3 * s >= a:
        raise TooSmallN(f"s = {s} is too large for the base of length {a}")
    J, Jp = (s, 2 * s), (Fraction(0), 3 * s)
    aN = math.floor(a * N)
    S = [n for n in range(1, N) if ((aN - math.floor(a * n)) * beta) % a < s / 2]
    if not S:
        raise TooSmallN(f"no return times n < {N} land in the window of width s/2 = {s / 2}")
    lo = aN - math.floor(float(a) * C * L)
    hi = aN + math.ceil((1 + float(a) * C) * L)
    H = _arcs_in_base([(l * beta) % a for l in range(lo, hi + 1)], 3 * s, a)
    H_measure = sum((y - x for x, y in H), Fraction(0))
    gaps, prev = [], Fraction(0)
    for x, y in H:
        if x > prev:
            gaps.append((prev, x))
        prev = max(prev, y)
    if prev < a:
        gaps.append((prev, a))
    big = max(gaps, key=lambda g: g[1] - g[0], default=None)
    if big is None or big[1] - big[0] < s:
        raise NoGapFound(f"no gap of length {s} outside H_N(J'); |H| = {float(H_measure):.6g}",
                         float(H_measure))
    mid = (big[0] + big[1]) / 2
    J2 = (mid - s / 2, mid + s / 2)
    g = bump(*J)
    f = bump(*J2)
    # exact disjointness of J'' from T^n(J) for n in S, and the exact correlations
    corr = correlations_exact(rep.iet, f, g, N)
    Sset = set(S)
    disjoint = True
    pieces = [(J[0], J[1], Fraction(0))]
    for n in range(1, N):
        pieces = _split_exact(rep.iet, pieces)
        if n in Sset:
            for u, v, tau in pieces:
                if u + tau < J2[1] and J2[0] < v + tau:
                    disjoint = False
    Q = sum((c * c for c in corr), Fraction(0))
    f1, g1 = f.l1_norm, g.l1_norm
    flip, glip = f.lipschitz_norm, g.lipschitz_norm
    checks = {
        "card_S": len(S) >= a * N * s / 4,
        "disjoint": disjoint,
        "lipschitz": flip <= 15 / s and glip <= 15 / s,
        "l1_floor": f1 ** 2 * g1 ** 2 >= (s / 2) ** 4,
        "Q_lower": len(S) > 0 and Q >= f1 ** 2 * g1 ** 2 * len(S),
    }
    return LowerBoundCertificate(N, eps, C, A, c0, s, J, Jp, J2, S, H_measure, f1, g1,
                                 flip, glip, Q, disjoint, checks)
