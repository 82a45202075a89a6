"""Correlations ``<f o T^n, g>`` by pushing the support of ``g`` forward.

``T^n`` restricted to an interval is a finite union of translations, so
``int f(T^n y) g(y) dy`` splits into cells on which both factors are given by
a single piece. On linear pieces the product is quadratic and Simpson's rule
is exact; that is the rational mode. The float mode vectorizes the same
bookkeeping with numpy and uses Gauss-Legendre on each cell, which is exact
for linear pieces up to rounding and accurate for smooth exponential ones.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import ConfigError, QuadratureBlowup
from ..observables import ExpPiece, LinearPiece, Observable

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)

DEFAULT_PIECE_BUDGET = 2_000_000


@dataclass
class DecaySeries:
    N: list
    C: list                 # (1/N) sum_{n<N} |c_n|^2
    Q: list                 # sum_{n<N} |c_n|^2
    mean_abs: list          # (1/N) sum_{n<N} |c_n|
    f_name: str = ""
    g_name: str = ""
    iet_id: str = ""
    seed: int = 0
    correlations: list = field(default_factory=list, repr=False)

    def rows(self):
        return list(zip(self.N, self.C, self.Q, self.mean_abs))


# -- exact mode -------------------------------------------------------------------

def _affine_on(obs: Observable, a, b):
    """``(c0, c1)`` with ``obs = c0 + c1 x`` on the open cell (a, b), or None if not linear there."""
    m = (a + b) / 2
    p = obs.piece_at(m)
    if p is None:
        return obs.offset, 0
    if isinstance(p, LinearPiece):
        return obs.offset + p.c0, p.c1
    return None


def _cut_points(obs: Observable, lo, hi, shift=0):
    bps = obs.breakpoints
    i = bisect.bisect_right(bps, lo + shift)
    j = bisect.bisect_left(bps, hi + shift)
    return [x - shift for x in bps[i:j]]


def _cell_integral(f: Observable, g: Observable, a, b, tau):
    """``int_a^b f(y + tau) g(y) dy`` over a cell where both are single pieces."""
    lf = _affine_on(f, a + tau, b + tau)
    lg = _affine_on(g, a, b)
    if lf is not None and lg is not None:
        (f0, f1), (g0, g1) = lf, lg
        F = lambda y: f0 + f1 * (y + tau)
        G = lambda y: g0 + g1 * y
        m = (a + b) / 2
        return (b - a) * (F(a) * G(a) + 4 * F(m) * G(m) + F(b) * G(b)) / 6
    fa, fb = float(a), float(b)
    half = (fb - fa) / 2
    xs = fa + half * (_GL_X + 1)
    return complex(np.sum(half * _GL_W * f.values(xs + float(tau)) * g.values(xs)))


def _split_exact(iet, pieces):
    """Apply one step of ``T`` to ``[(u, v, tau)]`` where ``T^n y = y + tau`` on [u, v)."""
    out = []
    cuts = iet.discontinuities
    for u, v, tau in pieces:
        lo, hi = u + tau, v + tau
        edges = [lo] + [c for c in cuts if lo < c < hi] + [hi]
        for a, b in zip(edges, edges[1:]):
            w = iet.translation(iet.locate(a))
            out.append((a - tau, b - tau, tau + w))
    return out


def _support_pieces(g: Observable):
    if g.offset != 0:
        return [(Fraction(0), Fraction(1), Fraction(0))]
    return [(p.left, p.right, Fraction(0)) for p in g.pieces]


def _raw_exact(iet, f, g, pieces):
    total = 0
    for u, v, tau in pieces:
        edges = sorted({u, v, *_cut_points(g, u, v), *_cut_points(f, u, v, tau)})
        for a, b in zip(edges, edges[1:]):
            total += _cell_integral(f, g, a, b, tau)
    return total


def correlations_exact(iet, f: Observable, g: Observable, n_max: int,
                       budget: int = DEFAULT_PIECE_BUDGET) -> list:
    """``c_n = int f(T^n y) g(y) dy - int f int g`` for ``0 <= n < n_max`` in rational mode."""
    if not iet.is_exact:
        raise ConfigError("exact correlations need rational lengths")
    if iet.total != 1:
        raise ConfigError("correlations are defined for IETs on [0, 1)")
    mean = f.integral() * g.integral()
    pieces = _support_pieces(g)
    out = []
    for n in range(n_max):
        out.append(_raw_exact(iet, f, g, pieces) - mean)
        if n + 1 < n_max:
            pieces = _split_exact(iet, pieces)
            if len(pieces) > budget:
                raise QuadratureBlowup(f"{len(pieces)} pieces at n = {n + 1}")
    return out


# -- float mode -------------------------------------------------------------------

def _tables(obs: Observable):
    """Breakpoints and, per cell, ``(c0, c1)`` for linear observables (None otherwise)."""
    bps = np.array([0.0] + [float(x) for x in obs.breakpoints] + [1.0])
    bps = np.unique(bps)
    if any(isinstance(p, ExpPiece) for p in obs.pieces):
        return bps, None
    mids = (bps[:-1] + bps[1:]) / 2
    c0 = np.full(len(mids), float(obs.offset))
    c1 = np.zeros(len(mids))
    for k, m in enumerate(mids):
        p = obs.piece_at(Fraction(m))
        if p is not None:
            c0[k] += float(p.c0)
            c1[k] = float(p.c1)
    return bps, (c0, c1)


def _split_float(lefts, cuts, w, u, v, ids, taus):
    """One step of ``T`` on pieces ``[u, v)`` carrying translation ``taus[ids]``.

    Translations are kept exactly (``w`` are the exact translations of the top
    intervals) and renumbered per step, so equal translations share a float.
    """
    tau = np.array([float(x) for x in taus])[ids]
    lo, hi = u + tau, v + tau
    k = len(cuts)
    c = np.clip(cuts[None, :], lo[:, None], hi[:, None])
    edges = np.concatenate([lo[:, None], c, hi[:, None]], axis=1)
    a, b = edges[:, :-1].ravel(), edges[:, 1:].ravel()
    t = np.repeat(tau, k + 1)
    i = np.repeat(ids, k + 1)
    keep = b > a
    a, b, t, i = a[keep], b[keep], t[keep], i[keep]
    pos = np.clip(np.searchsorted(lefts, a, side="right") - 1, 0, len(lefts) - 1)
    pairs, new_ids = np.unique(i * len(w) + pos, return_inverse=True)
    merged, remap = {}, []
    for p in pairs.tolist():
        remap.append(merged.setdefault(taus[p // len(w)] + w[p % len(w)], len(merged)))
    return a - t, b - t, np.asarray(remap, dtype=np.int64)[new_ids.ravel()], list(merged)


def _raw_float(f, g, ftab, gtab, u, v, tau):
    fb, fl = ftab
    gb, gl = gtab
    inner_f = fb[1:-1]
    inner_g = gb[1:-1]
    # refine each piece at g's breakpoints and at f's breakpoints pulled back by tau
    cuts = np.concatenate([np.broadcast_to(inner_g, (len(u), len(inner_g))),
                           inner_f[None, :] - tau[:, None]], axis=1)
    cuts = np.clip(cuts, u[:, None], v[:, None])
    edges = np.sort(np.concatenate([u[:, None], cuts, v[:, None]], axis=1), axis=1)
    a, b = edges[:, :-1].ravel(), edges[:, 1:].ravel()
    t = np.repeat(tau, edges.shape[1] - 1)
    keep = b > a
    a, b, t = a[keep], b[keep], t[keep]
    if fl is not None and gl is not None:
        m = (a + b) / 2
        kf = np.clip(np.searchsorted(fb, m + t, side="right") - 1, 0, len(fl[0]) - 1)
        kg = np.clip(np.searchsorted(gb, m, side="right") - 1, 0, len(gl[0]) - 1)
        F = lambda y: fl[0][kf] + fl[1][kf] * (y + t)
        G = lambda y: gl[0][kg] + gl[1][kg] * y
        return float(np.sum((b - a) * (F(a) * G(a) + 4 * F(m) * G(m) + F(b) * G(b)) / 6))
    half = (b - a) / 2
    xs = a[:, None] + half[:, None] * (_GL_X[None, :] + 1)
    vals = f.values(xs + t[:, None]) * g.values(xs)
    return complex(np.sum(half[:, None] * _GL_W[None, :] * vals))


class _ProductTables:
    """Antiderivatives ``Phi_tau(x) = int_0^x f(y + tau) g(y) dy`` for linear observables.

    One row per translation, all built in one vectorized pass and stacked in a
    flat, globally sorted array so every piece is evaluated by one searchsorted.
    """

    SPACING = 10.0

    def __init__(self, ftab, gtab):
        self.fb, (self.f0, self.f1) = ftab
        self.gb, (self.g0, self.g1) = gtab

    def integrate(self, u, v, ids, taus) -> float:
        tau = np.array([float(x) for x in taus])
        G = len(tau)
        ng, nf = len(self.gb), len(self.fb)
        inner = np.concatenate([np.broadcast_to(self.gb, (G, ng)), self.fb[None, :] - tau[:, None]], axis=1)
        e = np.sort(np.concatenate([np.zeros((G, 1)), np.clip(inner, 0.0, 1.0), np.ones((G, 1))], axis=1), axis=1)
        lo, hi = e[:, :-1], e[:, 1:]
        m = (lo + hi) / 2
        kf = np.clip(np.searchsorted(self.fb, m + tau[:, None], side="right") - 1, 0, len(self.f0) - 1)
        kg = np.clip(np.searchsorted(self.gb, m, side="right") - 1, 0, len(self.g0) - 1)
        a1 = self.f1[kf]
        a0 = self.f0[kf] + a1 * tau[:, None]
        b0, b1 = self.g0[kg], self.g1[kg]
        k0, k1, k2 = a0 * b0, a0 * b1 + a1 * b0, a1 * b1
        P = lambda y: k0 * y + k1 * y * y / 2 + k2 * y ** 3 / 3
        cells = P(hi) - P(lo)
        cum = np.cumsum(cells, axis=1) - cells - P(lo)
        off = self.SPACING * np.arange(G)[:, None]
        flat = (lo + off).ravel()
        cum, k0, k1, k2 = cum.ravel(), k0.ravel(), k1.ravel(), k2.ravel()
        shift = self.SPACING * ids

        def phi(x):
            i = np.searchsorted(flat, x + shift, side="right") - 1
            return cum[i] + k0[i] * x + k1[i] * x * x / 2 + k2[i] * x ** 3 / 3

        return float(np.sum(phi(v) - phi(u)))


def correlations_float(iet, f: Observable, g: Observable, n_max: int,
                       budget: int = DEFAULT_PIECE_BUDGET) -> np.ndarray:
    """Float version of :func:`correlations_exact`, vectorized over pieces."""
    lefts, _ = iet._float_tables
    cuts = np.array([float(c) for c in iet.discontinuities])
    mean = complex(f.integral()) * complex(g.integral())
    ftab, gtab = _tables(f), _tables(g)
    sp = _support_pieces(g)
    u = np.array([float(p[0]) for p in sp])
    v = np.array([float(p[1]) for p in sp])
    ids = np.zeros(len(u), dtype=np.int64)
    taus = [Fraction(0)]
    w = [iet.translation(a) for a in iet.perm.top]
    tables = _ProductTables(ftab, gtab) if ftab[1] is not None and gtab[1] is not None else None
    out = np.empty(n_max, dtype=complex)
    for n in range(n_max):
        if tables:
            raw = tables.integrate(u, v, ids, taus)
        else:
            raw = _raw_float(f, g, ftab, gtab, u, v, np.array([float(x) for x in taus])[ids])
        out[n] = raw - mean
        if n + 1 < n_max:
            u, v, ids, taus = _split_float(lefts, cuts, w, u, v, ids, taus)
            if len(u) > budget:
                raise QuadratureBlowup(f"{len(u)} pieces at n = {n + 1}")
    if not (f.is_complex or g.is_complex):
        return out.real
    return out


def correlations_bruteforce(iet, f: Observable, g: Observable, n_max: int,
                            grid: int = 4096) -> np.ndarray:
    """Oracle: midpoint rule on a fine grid with direct orbit evaluation."""
    xs = (np.arange(grid) + 0.5) / grid
    orbit = iet.orbit_array(xs, max(n_max - 1, 0))
    gv = g.values(xs)
    mean = complex(f.integral()) * complex(g.integral())
    out = np.array([np.mean(f.values(orbit[n]) * gv) for n in range(n_max)]) - mean
    return out if (f.is_complex or g.is_complex) else out.real


def _poly_product_integral(f0, f1, g0, g1, a, b):
    """``int_a^b (f0 + f1 y)(g0 + g1 y) dy`` from the monomial antiderivative."""
    k0, k1, k2 = f0 * g0, f0 * g1 + f1 * g0, f1 * g1
    P = lambda y: k0 * y + k1 * y * y / 2 + k2 * y * y * y / 3
    return P(b) - P(a)


def q_bruteforce_exact(iet, f: Observable, g: Observable, N: int):
    """Independent double loop for ``Q_N`` on linear observables.

    For each ``n`` the cells of ``T^n`` are cut out by the backward orbits of
    the discontinuities, the translation is read off from the forward image of
    the left end (advanced one application of ``T`` per step), and products are
    integrated through their antiderivatives.
    """
    inv = iet.inverse()
    mean = f.integral() * g.integral()
    frontier = list(iet.discontinuities)
    starts = {Fraction(0), *g.breakpoints, *frontier}
    starts.discard(Fraction(1))
    image = {u: u for u in starts}        # u -> T^n(u)
    total = 0
    for n in range(N):
        if n:
            image = {u: iet(y) for u, y in image.items()}
            frontier = [inv(c) for c in frontier]
            for c in frontier:
                if c != 0 and c not in image:
                    y = c
                    for _ in range(n):
                        y = iet(y)
                    image[c] = y
        cells = sorted(image) + [Fraction(1)]
        raw = 0
        for u, v in zip(cells, cells[1:]):
            tau = image[u] - u
            inner = sorted({u, v, *[x - tau for x in f.breakpoints if u < x - tau < v]})
            for a, b in zip(inner, inner[1:]):
                lf, lg = _affine_on(f, a + tau, b + tau), _affine_on(g, a, b)
                if lf is None or lg is None:
                    raise ConfigError("brute-force oracle needs linear observables")
                raw += _poly_product_integral(lf[0] + lf[1] * tau, lf[1], lg[0], lg[1], a, b)
        c = raw - mean
        total += c * c
    return total


# -- series -----------------------------------------------------------------------

def cesaro_decay(iet, f: Observable, g: Observable, N_grid, mode: str = "float",
                 iet_id: str = "", seed: int = 0, budget: int = DEFAULT_PIECE_BUDGET) -> DecaySeries:
    """``C_N``, ``Q_N`` and the mean of ``|c_n|`` for every ``N`` in the grid.

    ``f`` need not be centred: the exact mean product is subtracted, which is
    the same as correlating the centred ``f`` with ``g``.
    """
    grid = sorted({int(n) for n in N_grid})
    if not grid or grid[0] < 1:
        raise ConfigError("N grid must contain positive integers")
    n_max = grid[-1]
    if f.support is None or g.support is None:
        zeros = [0.0] * len(grid)
        return DecaySeries(grid, zeros, zeros[:], zeros[:], f.name, g.name, iet_id, seed, [0.0] * n_max)
    if mode == "exact":
        c = correlations_exact(iet, f, g, n_max, budget)
        sq = [abs(x) ** 2 if isinstance(x, complex) else x * x for x in c]
        ab = [abs(x) for x in c]
        Q, C, A = [], [], []
        acc_q, acc_a, k = 0, 0, 0
        for N in grid:
            while k < N:
                acc_q += sq[k]
                acc_a += ab[k]
                k += 1
            Q.append(acc_q)
            C.append(acc_q / N)
            A.append(acc_a / N)
        return DecaySeries(grid, C, Q, A, f.name, g.name, iet_id, seed, c)
    if mode != "float":
        raise ConfigError(f"unknown mode {mode!r}")
    c = correlations_float(iet, f, g, n_max, budget)
    cq = np.cumsum(np.abs(c) ** 2)
    ca = np.cumsum(np.abs(c))
    idx = np.array(grid) - 1
    N = np.array(grid, dtype=float)
    return DecaySeries(grid, list(cq[idx] / N), list(cq[idx]), list(ca[idx] / N),
                       f.name, g.name, iet_id, seed, list(c))


def q_upper_bound(f: Observable, g: Observable, N: int) -> float:
    """``N (||f||_2 ||g||_2 + |int f int g|)^2``, a trivial ceiling for ``Q_N``."""
    nf = math.sqrt(float(f.l2_norm_sq))
    ng = math.sqrt(float(g.l2_norm_sq))
    return N * (nf * ng + abs(complex(f.integral()) * complex(g.integral()))) ** 2
