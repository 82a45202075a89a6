"""Exponential sums over substitution words and spectral-measure estimates.

Covers the sums ``Phi``, the twisted cocycle ``M``/``Pi``, the contraction
bound for structured substitution sequences, Fejer-kernel mass bounds, Monte
Carlo spectral masses, the Veech frequency and the exponent bookkeeping used
to turn those into decay rates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from .errors import ColumnGuardError, ConfigError, DomainError, StructureViolation
from .permutation import Permutation
from .renormalize import RauzyPath
from .substitutions import Substitution, compose_all, good_return_words, population_vector

TWO_PI = 2 * math.pi


# -- torus norms ----------------------------------------------------------------

def dist_to_int(x):
    """``||x||_{R/Z}``; exact for rationals."""
    if isinstance(x, Fraction):
        r = x - math.floor(x)
        return min(r, 1 - r)
    r = x - math.floor(x)
    return min(r, 1.0 - r)


def torus_norm(vec):
    """Sup-metric distance of ``vec`` to the integer lattice."""
    return max(dist_to_int(v) for v in vec)


# -- exponential sums -------------------------------------------------------------

def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool)


def _prefix_lengths(word, s, alphabet) -> np.ndarray:
    idx = {a: i for i, a in enumerate(alphabet)}
    svec = np.asarray([float(x) for x in s])
    lens = np.fromiter((svec[idx[c]] for c in word), dtype=float, count=len(word))
    out = np.zeros(len(word))
    if len(word) > 1:
        np.cumsum(lens[:-1], out=out[1:])
    return out


def _phases(word, s, omega, alphabet) -> np.ndarray:
    """``omega |v_1 ... v_{j-1}|_s mod 1`` for every position ``j``.

    With rational ``s`` and ``omega`` the reduction mod 1 is done in integers,
    so long words lose no accuracy; otherwise in floating point.
    """
    if _is_rational(omega) and all(_is_rational(x) for x in s):
        fr = [Fraction(x) for x in s]
        L = math.lcm(*(x.denominator for x in fr))
        om = Fraction(omega)
        m = om.denominator * L                      # phase = (p * prefix mod m) / m
        p = om.numerator % m
        idx = {a: i for i, a in enumerate(alphabet)}
        ints = [int(x * L) % m for x in fr]
        dtype = np.int64 if m * max(p, 1) < 2 ** 62 and m * len(word) < 2 ** 62 else object
        lens = np.array([ints[idx[c]] for c in word], dtype=dtype)
        pre = np.zeros(len(word), dtype=dtype)
        if len(word) > 1:
            pre[1:] = np.cumsum(lens[:-1]) % m
        red = (pre * p) % m
        return red.astype(float) / m if dtype is np.int64 else np.array([int(r) / m for r in red])
    return np.mod(float(omega) * _prefix_lengths(word, s, alphabet), 1.0)


def phi(word, letter, s, omega, alphabet) -> complex:
    """``sum_j [v_j = letter] exp(-2 pi i omega |v_1 ... v_{j-1}|_s)``."""
    word = tuple(word)
    if not word:
        return 0j
    mask = np.fromiter((c == letter for c in word), dtype=bool, count=len(word))
    return complex(np.exp(-2j * np.pi * _phases(word, s, omega, alphabet)[mask]).sum())


def phi_all(word, s, omega, alphabet) -> np.ndarray:
    """``Phi_a(word)`` for every letter ``a`` in alphabet order."""
    word = tuple(word)
    out = np.zeros(len(alphabet), dtype=complex)
    if not word:
        return out
    idx = {a: i for i, a in enumerate(alphabet)}
    terms = np.exp(-2j * np.pi * _phases(word, s, omega, alphabet))
    np.add.at(out, [idx[c] for c in word], terms)
    return out


def dual_lengths(xi: Substitution, s) -> tuple:
    """``S_xi^T s``: the ``s``-length of each image of ``xi``."""
    S = xi.matrix()
    d = xi.d
    return tuple(sum(S[a, b] * s[a] for a in range(d)) for b in range(d))


def twisted_matrix(xi: Substitution, zeta: Substitution, s, omega) -> np.ndarray:
    """``M(b, c) = Phi_c^{S_xi^T s}(zeta(b), omega)``."""
    s2 = dual_lengths(xi, s)
    return np.array([phi_all(w, s2, omega, zeta.alphabet) for w in zeta.images])


def pi_n(subs, s, omega, n: int | None = None) -> np.ndarray:
    """``Pi_n = M_n ... M_1`` with ``M_k = M_{zeta^[k-1], zeta_k}``."""
    subs = list(subs)
    n = len(subs) if n is None else n
    if n > len(subs):
        raise ConfigError(f"need {n} substitutions, have {len(subs)}")
    al = subs[0].alphabet
    d = len(al)
    P = np.array([[int(i == j) for j in range(d)] for i in range(d)], dtype=object)
    out = np.eye(d, dtype=complex)
    for k in range(n):
        # S_{zeta^[k]}^T s, the s-lengths of the level-k prefix images
        s2 = tuple(P.T.dot(np.array(list(s), dtype=object)))
        Mk = np.array([phi_all(w, s2, omega, al) for w in subs[k].images])
        out = Mk @ out
        P = P.dot(subs[k].matrix())
    return out


def pi_direct(subs, s, omega, n: int | None = None) -> np.ndarray:
    """``Pi_n(b, a) = Phi_a(zeta^[n](b))`` by direct expansion (test oracle)."""
    subs = list(subs)
    n = len(subs) if n is None else n
    al = subs[0].alphabet
    z = compose_all(subs[:n]) if n else Substitution.identity(al)
    return np.array([phi_all(w, s, omega, al) for w in z.images])


# -- column constants and the contraction bound ------------------------------------

def col(A) -> Fraction | float:
    """``max_{i,j,k} A[i,j] / A[k,j]``; every entry must be positive."""
    A = np.asarray(A, dtype=object)
    if any(v <= 0 for v in A.ravel()):
        raise ColumnGuardError("col() needs strictly positive entries")
    best = None
    for j in range(A.shape[1]):
        colj = list(A[:, j])
        hi, lo = max(colj), min(colj)
        r = Fraction(hi, lo) if all(isinstance(v, int) for v in colj) else hi / lo
        best = r if best is None or r > best else best
    return best


def c1(Q) -> Fraction:
    """``(2 d max(Q) col(Q^T))^{-1}`` for a strictly positive integer matrix."""
    Q = np.asarray(Q, dtype=object)
    d = Q.shape[0]
    return 1 / (2 * d * Fraction(int(max(Q.ravel()))) * col(Q.T))


def norm1(A) -> int:
    """Largest column sum (the operator 1-norm of a non-negative matrix)."""
    A = np.asarray(A, dtype=object)
    return max(sum(A[:, j]) for j in range(A.shape[1]))


@dataclass(frozen=True)
class MainBound:
    value: float
    norm: int
    factors: tuple
    c1: Fraction


def structured_sequence(core: Substitution, middles) -> list:
    """``zeta_j = core o xi_j o core`` as factor triples."""
    return [(core, xi, core) for xi in middles]


def mainbound(seq, core: Substitution, s, omega, N: int, gr=None) -> MainBound:
    """Contraction bound for ``|Phi_a(zeta^[N](b), omega)|``.

    ``seq`` lists each ``zeta_j`` as a tuple of factor substitutions whose first
    and last factor must be ``core``; otherwise StructureViolation is raised.
    """
    if N > len(seq):
        raise ConfigError(f"sequence has {len(seq)} terms, N = {N}")
    for j, factors in enumerate(seq[:N]):
        if not isinstance(factors, tuple) or len(factors) < 2 \
                or factors[0] != core or factors[-1] != core:
            raise StructureViolation(f"term {j + 1} does not begin and end with the core substitution")
    gr = good_return_words(core) if gr is None else list(gr)
    if not gr:
        raise StructureViolation("core substitution has no good return words")
    Q = core.matrix()
    const = c1(Q)
    cf = float(const)
    # |zeta^[n](v)|_s = l(v) . S_[n]^T s, so only matrices are needed
    pops = [np.array(population_vector(v, core.alphabet), dtype=object) for v in gr]
    svec = np.array(list(s), dtype=object)
    P = np.array([[int(i == j) for j in range(core.d)] for i in range(core.d)], dtype=object)
    exact = isinstance(omega, (int, Fraction)) and all(isinstance(x, (int, Fraction)) for x in s)
    factors = []
    for n in range(N):
        lens = P.T.dot(svec)
        phases = [omega * pv.dot(lens) if exact else float(omega) * float(pv.dot(lens)) for pv in pops]
        worst = float(max(dist_to_int(x) for x in phases)) ** 2
        factors.append(1.0 - cf * worst)
        for z in seq[n]:
            P = P.dot(z.matrix())
    norm = norm1(P)
    return MainBound(float(norm) * float(np.prod(factors)), int(norm), tuple(factors), const)


# -- Fejer kernel and spectral masses ---------------------------------------------

def fejer_kernel(R: float, xi: float) -> float:
    """``int_{-R}^{R} (R - |l|) exp(2 pi i l xi) dl = (sin(pi R xi) / (pi xi))^2``."""
    if xi == 0:
        return R * R
    return (math.sin(math.pi * R * xi) / (math.pi * xi)) ** 2


def fejer_kernel_quad(R: float, xi: float) -> float:
    """The same integral by adaptive quadrature (the odd part vanishes)."""
    if xi == 0:
        val, _ = integrate.quad(lambda l: R - l, 0.0, R)
    else:
        # cosine-weighted QUADPACK rule, robust for oscillatory integrands
        val, _ = integrate.quad(lambda l: R - l, 0.0, R, weight="cos", wvar=TWO_PI * xi,
                                epsabs=1e-13, epsrel=1e-13, limit=500)
    return 2 * val


def fejer_mass_bound(C1: float, alpha: float, R0: float, omega: float, r: float) -> float:
    """Mass of ``[omega - r, omega + r]`` allowed by ``|S_R| <= C1 R^alpha`` for ``R >= R0``."""
    if not (0 < alpha < 1):
        raise DomainError(f"alpha = {alpha} must lie in (0, 1)")
    if not (0 < r <= 1 / (2 * R0)):
        raise DomainError(f"r = {r} must lie in (0, 1/(2 R0)] = (0, {1 / (2 * R0)}]")
    return math.pi ** 2 * 2 ** (-2 * alpha) * C1 ** 2 * r ** (2 * (1 - alpha))


@dataclass
class SpectralEstimate:
    omega: float
    r: float
    N: int
    estimate: float
    certified_upper: float
    alpha: float
    C1: float
    growth: tuple          # (R, rms |S_R|) pairs
    n_points: int
    seed: int


def _twisted_rms(orbit_vals: np.ndarray, omega: float, horizons) -> list:
    """RMS over base points of ``|sum_{n<R} e^{-2 pi i n omega} f(T^n x)|``."""
    n = orbit_vals.shape[0]
    phases = np.exp(-2j * np.pi * np.mod(np.arange(n) * omega, 1.0))
    partial = np.cumsum(phases[:, None] * orbit_vals, axis=0)
    return [float(np.sqrt(np.mean(np.abs(partial[R - 1]) ** 2))) for R in horizons]


def empirical_spectral_mass(iet, f, omega: float, r: float, n_points: int = 64,
                            seed: int = 0, xs=None) -> SpectralEstimate:
    """Monte Carlo mass of ``sigma_f`` near ``omega`` plus a certified-style upper value.

    With ``N = ceil(1/(2r))`` the estimate is ``E_x |S_N(x)|^2 / N^2``, the
    Fejer-smoothed mass of the window. The upper value plugs the measured growth
    ``|S_R| <= C1 R^alpha`` (fitted on dyadic horizons up to ``N``, with ``C1``
    large enough to dominate every measured point) into :func:`fejer_mass_bound`.
    Because ``r >= 1/(2N)`` it is always at least ``pi^2/4`` times the estimate.
    """
    N = max(1, math.ceil(1 / (2 * r)))
    rng = np.random.default_rng(seed)
    if xs is None:
        xs = rng.random(n_points) * float(iet.total)
    xs = np.asarray(xs, dtype=float)
    orbit = iet.orbit_array(xs, N - 1)
    vals = f.values(orbit)
    horizons = sorted({2 ** k for k in range(int(math.log2(N)) + 1)} | {N})
    rms = _twisted_rms(vals, omega, horizons)
    est = rms[-1] ** 2 / N ** 2
    pos = [(R, g) for R, g in zip(horizons, rms) if g > 0]
    if len(pos) >= 2:
        slope = np.polyfit(np.log([p[0] for p in pos]), np.log([p[1] for p in pos]), 1)[0]
    else:
        slope = 0.5
    alpha = float(min(max(slope, 0.01), 0.99))
    C1 = max((g / R ** alpha for R, g in zip(horizons, rms)), default=0.0)
    upper = fejer_mass_bound(C1, alpha, 1.0, omega, min(r, 0.5)) if C1 > 0 else 0.0
    return SpectralEstimate(omega, r, N, est, upper, alpha, C1, tuple(zip(horizons, rms)),
                            len(xs), seed)


def spectral_partition(iet, f, N: int, n_points: int = 64, seed: int = 0) -> np.ndarray:
    """Estimates at the ``N`` frequencies ``k/N``; they sum to the orbit mean of ``|f|^2``."""
    rng = np.random.default_rng(seed)
    xs = rng.random(n_points) * float(iet.total)
    vals = f.values(iet.orbit_array(xs, N - 1))
    spectrum = np.fft.fft(vals, axis=0)       # sum_n e^{-2 pi i n k/N} a_n
    return np.mean(np.abs(spectrum) ** 2, axis=1) / N ** 2


# -- Veech frequency ---------------------------------------------------------------

@dataclass
class VeechFrequency:
    fraction: Fraction
    n: int
    count: int
    norms: list


def veech_frequency(perm: Permutation, kinds, t: Fraction, eps, n: int, h=None) -> VeechFrequency:
    """Fraction of ``i <= n`` with ``||A_i t h||_{R^d/Z^d} > eps``.

    ``A_i`` is the path matrix of the first ``i`` Rauzy steps, acting on column
    vectors (heights). Fractional parts are exact: ``A_i h`` is an integer vector
    and ``t`` is rational.
    """
    t = Fraction(t)
    if not (0 < t < 1):
        raise DomainError("t must lie in (0, 1)")
    d = perm.d
    hv = [1] * d if h is None else [int(x) for x in h]
    path = RauzyPath.from_kinds(perm, list(itertools.islice(kinds, n)))
    if len(path) < n:
        raise ConfigError(f"path shorter than n = {n}")
    count = 0
    norms = []
    q, p = t.denominator, t.numerator
    for s in path.steps:
        idx = s.start.index
        hv[idx[s.loser]] += hv[idx[s.winner]]
        nv = max(min((p * x) % q, q - (p * x) % q) for x in hv)
        val = Fraction(nv, q)
        norms.append(val)
        if val > eps:
            count += 1
    return VeechFrequency(Fraction(count, n), n, count, norms)


def norm_equivalence_constant(vectors, grid) -> float:
    """Smallest ``C`` with ``C^-1 ||x|| <= max_v ||<l(v), x>|| <= C ||x||`` on ``grid``."""
    vecs = np.asarray(vectors, dtype=float)
    best = 1.0
    for x in grid:
        x = np.asarray(x, dtype=float)
        tn = torus_norm(x)
        if tn == 0:
            continue
        val = max(dist_to_int(float(v @ x)) for v in vecs)
        if val == 0:
            return math.inf
        best = max(best, val / tn, tn / val)
    return best


# -- exponent bookkeeping ----------------------------------------------------------

def qvc_gamma(eps: float, c1p: float, theta1: float) -> float:
    """``min(eps/16, -eps log(1 - c1' eps^2) / (8 theta1))``."""
    if not (0 < eps and 0 < c1p * eps * eps < 1 and theta1 > 0):
        raise DomainError("need eps > 0, 0 < c1' eps^2 < 1, theta1 > 0")
    return min(eps / 16, -eps * math.log1p(-c1p * eps * eps) / (8 * theta1))


@dataclass(frozen=True)
class ExponentBundle:
    eps: float
    c1p: float
    theta1: float
    gamma: float
    beta: float
    alpha: float
    eta: float
    alpha_prime: float

    @property
    def ordered(self) -> bool:
        """``alpha' < min(alpha, gamma)``; true exactly when ``gamma < alpha + beta``."""
        return self.alpha_prime < min(self.alpha, self.gamma)


def exponent_bundle(eps, c1p, theta1, alpha, beta) -> ExponentBundle:
    if alpha <= 0 or beta <= 0:
        raise DomainError("alpha and beta must be positive")
    g = qvc_gamma(eps, c1p, theta1)
    eta = g / (alpha + beta)
    return ExponentBundle(eps, c1p, theta1, g, beta, alpha, eta, alpha * g / (alpha + beta))


def _u_function(u: float, M: float, delta: float) -> float:
    lu = math.log(u)
    llu = math.log(lu)
    return u * u * (lu - llu - (1 + delta) * math.log(llu)) / M


@dataclass(frozen=True)
class RotationRate:
    u: float
    eps: float
    exponent: float          # M / u^2, the power of N in the bound
    log_N: float
    residual: float
    sandwich: bool           # N^{-M/u^2} < (log N)^{-1/6}
    bracket: bool            # u^2 log u / (2M) < log N < u^3


def rotation_class_rate(M: float, delta: float, N=None, log_N: float | None = None,
                        tol: float = 0.0) -> RotationRate:
    """Solve ``u^2 (log u - log log u - (1+delta) log log log u) / M = log N``.

    The left side tends to infinity as ``u -> e+`` and as ``u -> infinity``;
    the root is taken on the increasing branch, past the minimum. Below the
    minimum value no root exists and DomainError is raised.
    """
    if M <= 0 or delta < 0:
        raise DomainError("need M > 0 and delta >= 0")
    if log_N is None:
        if N is None or N <= 1:
            raise DomainError("N must exceed 1")
        log_N = math.log(N)
    F = lambda u: _u_function(u, M, delta)
    lo = math.e * (1 + 1e-9)
    res = optimize.minimize_scalar(F, bounds=(lo, 1e3), method="bounded",
                                   options={"xatol": 1e-12})
    u_min, f_min = float(res.x), float(res.fun)
    if log_N <= f_min:
        raise DomainError(f"log N = {log_N:.6g} is below the attainable minimum {f_min:.6g}")
    a, b = u_min, 2 * u_min
    while F(b) < log_N:
        a, b = b, 2 * b
    while b - a > tol * max(1.0, a):
        m = 0.5 * (a + b)
        if m <= a or m >= b:        # interval is down to adjacent floats
            break
        if F(m) < log_N:
            a = m
        else:
            b = m
    u = 0.5 * (a + b)
    expo = M / (u * u)
    lhs = -expo * log_N
    rhs = -math.log(log_N) / 6
    bracket = u * u * math.log(u) / (2 * M) < log_N < u ** 3
    return RotationRate(u, 1 / u, expo, log_N, F(u) - log_N, lhs < rhs, bracket)
