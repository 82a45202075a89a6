import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ietlab.combinatorics import (find_good_word, find_positive_loop, irreducible_permutations,
                                  is_rotation_class, is_simple, is_type_w, omega_matrix,
                                  rauzy_class, rauzy_classes, surface_data)
from ietlab.errors import BudgetExceeded, ReduciblePermutation
from ietlab.permutation import Permutation
from ietlab.renormalize import is_positive, path_matrix
from ietlab.substitutions import lattice_index, occurs

SWAP = Permutation.parse("A B / B A")
REV3 = Permutation.parse("A B C / C B A")
SYM4 = Permutation.parse("A B C D / D C B A")


def _brute_irreducible(d):
    out = []
    for images in itertools.permutations(range(1, d + 1)):
        if all(set(images[:k]) != set(range(1, k + 1)) for k in range(1, d)):
            out.append(images)
    return out


def test_swap_class_and_form():
    assert len(rauzy_class(SWAP)) == 1
    sd = surface_data(SWAP)
    assert sd.omega == ((0, 1), (-1, 0))
    assert (sd.genus, sd.kappa) == (1, 1)


def test_reversal3_class_is_all_irreducible():
    diag = rauzy_class(REV3)
    assert set(diag.vertices) == set(_brute_irreducible(3))
    assert len(diag) == 3
    sd = surface_data(REV3)
    assert (sd.rank, sd.genus, sd.kappa) == (2, 1, 2)


def test_symmetric4_surface():
    sd = surface_data(SYM4)
    assert (sd.rank, sd.genus, sd.kappa) == (4, 2, 1)
    assert sd.n_basis == ()
    assert len(rauzy_class(SYM4)) == 7


def test_rotation_class_examples():
    assert is_rotation_class(SWAP)
    assert not is_rotation_class(SYM4)
    for images in _brute_irreducible(3):
        assert is_rotation_class(Permutation.from_images(images))


def test_type_w_examples():
    assert not is_type_w(SWAP)
    assert not is_type_w(SYM4)
    # rotation class but not a rotation: (1,1,1) lies outside the image of Omega
    assert is_type_w(REV3)


def test_reducible_rejected():
    p = Permutation.parse("A B C / A C B")
    for fn in (rauzy_class, surface_data, is_type_w, find_positive_loop):
        with pytest.raises(ReduciblePermutation):
            fn(p)


def test_swap_positive_loop():
    path = find_positive_loop(SWAP)
    assert path.kinds == "tb"
    assert (path_matrix(path) == np.array([[1, 1], [1, 2]], dtype=object)).all()


def test_loop_budget_zero():
    with pytest.raises(BudgetExceeded):
        find_positive_loop(SWAP, budget=0)


def test_simplicity():
    assert not is_simple("tt")
    assert not is_simple("tbt")
    assert is_simple("ttb")
    assert not is_simple("")


def test_irreducible_counts():
    for d in range(2, 7):
        assert sum(1 for _ in irreducible_permutations(d)) == len(_brute_irreducible(d))


def test_class_json_and_dot():
    diag = rauzy_class(SYM4)
    data = json.loads(diag.to_json())
    assert len(data["vertices"]) == 7 and len(data["edges"]) == 14
    assert diag.to_dot().startswith("digraph")


def test_d_equals_2g_plus_kappa_minus_1_exhaustive():
    for d in range(2, 7):
        for diag in rauzy_classes(d):
            for v in diag.vertices[:3]:
                sd = surface_data(Permutation.from_images(v))
                assert d == 2 * sd.genus + sd.kappa - 1


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_rotation_class_is_class_invariant(d):
    for diag in rauzy_classes(d):
        flags = {any(Permutation.from_images(w).is_rotation() for w in diag.vertices)}
        for v in diag.vertices:
            flags.add(is_rotation_class(Permutation.from_images(v)))
        assert len(flags) == 1


@given(st.sampled_from(list(irreducible_permutations(4)) + list(irreducible_permutations(5))))
def test_omega_antisymmetric(p):
    om = np.array(omega_matrix(p))
    assert (om == -om.T).all()


@pytest.mark.parametrize("perm", [SWAP, REV3, Permutation.parse("A B C / C A B"), SYM4])
def test_positive_loop_is_positive(perm):
    path = find_positive_loop(perm)
    assert path.is_loop()
    assert min(path_matrix(path).ravel()) >= 1


@pytest.mark.parametrize("perm", [SWAP, REV3, SYM4])
def test_good_word_definition(perm):
    gw = find_good_word(perm)
    assert is_simple(gw.word) and gw.path.is_loop()
    assert is_positive(path_matrix(gw.path))
    z = gw.substitution
    assert gw.good_words
    for v in gw.good_words:
        vc = tuple(v) + (v[0],)
        assert all(occurs(vc, img) for img in z.images)
    assert lattice_index([z.population(v) for v in gw.good_words], perm.d) == 1


def test_good_word_frozen_values():
    assert find_good_word(SWAP).word == "ttbtb"
    assert find_good_word(REV3).word == "ttbtbttbb"
