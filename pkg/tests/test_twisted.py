import cmath
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ietlab.combinatorics import find_good_word
from ietlab.errors import ColumnGuardError, DomainError, StructureViolation
from ietlab.fixtures import SYMMETRIC_4, d4_symmetric_path, golden_rotation
from ietlab.observables import constant, indicator
from ietlab.permutation import Permutation
from ietlab.renormalize import random_kinds
from ietlab.substitutions import Substitution, compose_all, good_return_words, population_vector
from ietlab.twisted import (c1, col, dist_to_int, empirical_spectral_mass, exponent_bundle,
                            fejer_kernel, fejer_kernel_quad, fejer_mass_bound, mainbound,
                            norm1, norm_equivalence_constant, phi, phi_all, pi_direct, pi_n,
                            qvc_gamma, rotation_class_rate, spectral_partition,
                            structured_sequence, twisted_matrix, veech_frequency)

FIB = Substitution.from_dict({"A": "AB", "B": "A"})
AB = ("A", "B")

subs2 = st.lists(st.lists(st.sampled_from("AB"), min_size=1, max_size=3), min_size=2,
                 max_size=2).map(lambda ims: Substitution(AB, tuple(map(tuple, ims))))


def _phi_oracle(word, letter, s, omega, alphabet):
    idx = {a: i for i, a in enumerate(alphabet)}
    total, pos = 0j, 0.0
    for c in word:
        if c == letter:
            total += cmath.exp(-2j * math.pi * omega * pos)
        pos += float(s[idx[c]])
    return total


def test_phi_at_zero_counts_letters():
    w = tuple("ABBABAB")
    assert phi_all(w, (1, 1), 0.0, AB).tolist() == [3, 4]


def test_phi_fibonacci_term_by_term():
    v = compose_all([FIB] * 3)(("B",))
    s = (1.0, (5 ** 0.5 - 1) / 2)
    for a in AB:
        assert abs(phi(v, a, s, 0.3, AB) - _phi_oracle(v, a, s, 0.3, AB)) < 1e-12


def test_twisted_matrix_at_zero_is_transpose():
    xi = Substitution.from_dict({"A": "ABB", "B": "BA"})
    M = twisted_matrix(xi, FIB, (F(1), F(2)), 0)
    assert (M == FIB.matrix().T.astype(complex)).all()


def test_col_guard_and_c1():
    with pytest.raises(ColumnGuardError):
        col(np.array([[1, 0], [0, 1]], dtype=object))
    assert col(np.array([[1, 2], [3, 1]], dtype=object)) == F(3)
    assert c1(np.array([[2, 1], [1, 1]], dtype=object)) == F(1, 16)
    assert norm1(np.array([[2, 1], [1, 1]], dtype=object)) == 3


def _core(perm):
    return find_good_word(Permutation.parse(perm)).substitution


def test_mainbound_at_zero_is_matrix_norm():
    core = _core("A B / B A")
    seq = structured_sequence(core, [core, core])
    mb = mainbound(seq, core, (1, 1), 0, 2)
    S = compose_all([z for f in seq for z in f]).matrix()
    assert mb.norm == norm1(S) and mb.value == float(norm1(S))
    assert all(f == 1.0 for f in mb.factors)


def test_mainbound_structure_violation():
    core = _core("A B / B A")
    with pytest.raises(StructureViolation):
        mainbound([(FIB, core)], core, (1, 1), 0.3, 1)
    with pytest.raises(StructureViolation):
        mainbound([(FIB, FIB)], FIB, (1, 1), 0.3, 1)


def _flat(seq, N):
    return [z for f in seq[:N] for z in f]


@pytest.mark.parametrize("perm", ["A B / B A", "A B C / C B A"])
def test_mainbound_dominates_phi(perm):
    core = _core(perm)
    d = core.d
    seq = [(core, core, core) if k % 2 else (core, core) for k in range(2)]
    s = tuple(F(k + 2, k + 3) for k in range(d))
    for N in (1, 2):
        for omega in np.linspace(0.0, 1.0, 40):
            mb = mainbound(seq, core, s, float(omega), N)
            P = pi_n(_flat(seq, N), s, float(omega))
            assert np.abs(P).max() <= mb.value * (1 + 1e-9)


@given(st.lists(subs2, min_size=1, max_size=5), st.floats(0, 1),
       st.tuples(st.floats(0.1, 2), st.floats(0.1, 2)))
def test_pi_cocycle_matches_direct(subs, omega, s):
    assert np.abs(pi_n(subs, s, omega) - pi_direct(subs, s, omega)).max() < 1e-9


@given(st.lists(subs2, min_size=1, max_size=5), st.floats(0, 1))
def test_pi_bounded_by_population(subs, omega):
    P = pi_n(subs, (1.0, 0.7), omega)
    S = compose_all(subs).matrix().T.astype(float)
    assert (np.abs(P) <= S + 1e-9).all()


def test_fejer_closed_form_and_limit():
    assert fejer_kernel(3.0, 0.0) == 9.0
    assert fejer_kernel(3.0, 1e-9) == pytest.approx(9.0, rel=1e-12)
    assert fejer_kernel(2.5, 0.37) == pytest.approx(fejer_kernel_quad(2.5, 0.37), abs=1e-9)


def test_fejer_mass_bound_domain():
    with pytest.raises(DomainError):
        fejer_mass_bound(1.0, 1.2, 1.0, 0.0, 0.1)
    with pytest.raises(DomainError):
        fejer_mass_bound(1.0, 0.5, 10.0, 0.0, 0.1)


def test_spectral_mass_constant_function():
    est = empirical_spectral_mass(golden_rotation(), constant(1), 0.0, 0.01, n_points=8)
    assert est.estimate == pytest.approx(1.0, rel=1e-12)
    assert est.certified_upper >= est.estimate


def test_spectral_upper_dominates_on_fixtures():
    f = indicator(F(1, 5), F(1, 2))
    for iet in (golden_rotation(), d4_symmetric_path(seed=7, depth=80)):
        for omega in (0.0, 0.13, 0.5):
            for r in (0.05, 0.01):
                est = empirical_spectral_mass(iet, f, omega, r, n_points=16, seed=1)
                assert est.estimate <= est.certified_upper


def test_spectral_partition_sums_to_l2():
    f = indicator(F(1, 5), F(1, 2))
    parts = spectral_partition(golden_rotation(), f, 256, n_points=32)
    assert parts.sum() == pytest.approx(f.l2_norm_sq, rel=0.05)


def test_veech_frequency_fixture():
    perm = Permutation.parse(SYMMETRIC_4)
    vf = veech_frequency(perm, random_kinds(7, 1000), F(1, 3), F(1, 20), 1000)
    assert vf.fraction == 1


def test_veech_frequency_integer_case():
    perm = Permutation.parse(SYMMETRIC_4)
    vf = veech_frequency(perm, random_kinds(7, 200), F(1, 3), F(1, 20), 200, h=(3, 3, 3, 3))
    assert vf.fraction == 0 and set(vf.norms) == {0}
    with pytest.raises(DomainError):
        veech_frequency(perm, random_kinds(7, 10), F(1), F(1, 20), 10)


def test_veech_norms_exact_oracle():
    perm = Permutation.parse(SYMMETRIC_4)
    kinds = random_kinds(11, 60)
    t = F(2, 7)
    vf = veech_frequency(perm, kinds, t, F(1, 20), 60)
    from ietlab.renormalize import RauzyPath, path_matrix
    for i in (1, 17, 60):
        A = path_matrix(RauzyPath.from_kinds(perm, kinds[:i]))
        h = A.dot(np.ones(4, dtype=object))
        assert vf.norms[i - 1] == max(dist_to_int(t * int(x)) for x in h)


def test_norm_equivalence_constant_finite():
    z = _core("A B C / C B A")
    vecs = [population_vector(v, z.alphabet) for v in good_return_words(z)]
    rng = np.random.default_rng(0)
    C = norm_equivalence_constant(vecs, rng.random((200, 3)) * 0.2)
    assert 1 <= C < math.inf


def test_qvc_gamma_values_and_monotone():
    g = qvc_gamma(0.1, 0.5, 1.0)
    assert g == pytest.approx(-0.1 * math.log(1 - 0.5 * 0.01) / 8, rel=1e-14)
    assert g == pytest.approx(6.265677279430354e-05, rel=1e-12)
    eps = [0.2 / 2 ** k for k in range(12)]
    gs = [qvc_gamma(e, 0.5, 1.0) for e in eps]
    assert all(a > b for a, b in zip(gs, gs[1:])) and gs[-1] < 1e-9


def test_exponent_bundle_identities():
    b = exponent_bundle(0.1, 0.5, 1.0, 0.3, 0.2)
    assert b.eta == pytest.approx(b.gamma / 0.5, rel=1e-12)
    assert b.alpha_prime == pytest.approx(0.3 * b.gamma / 0.5, rel=1e-12)
    assert b.ordered


def test_rotation_rate_sandwich():
    for N in (1e6, 1e9, 1e12):
        r = rotation_class_rate(5.0, 0.1, N)
        assert abs(r.residual) < 1e-9 and r.sandwich and r.bracket


def test_rotation_rate_domain_guard():
    # for M = 0.01 the left side never drops below ~3.2e3, far above log 1e9
    with pytest.raises(DomainError):
        rotation_class_rate(0.01, 0.1, 1e9)
    with pytest.raises(DomainError):
        rotation_class_rate(5.0, 0.1, 1.0)
