import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbscl.errors import LengthMismatch, NotBijective, RankDeficient, Singular
from nbscl.galois import make_field
from nbscl.matrix import (Permutation, apply_inverse_permutation, apply_permutation, build_permutation,
                          gf2_inverse, gf2_matmul, kronecker_power, nb_inverse, nb_rank, nb_rref,
                          polar_transform)


def test_kronecker_small():
    assert kronecker_power(0).tolist() == [[1]]
    assert kronecker_power(1).tolist() == [[1, 0], [1, 1]]
    G = kronecker_power(3)
    assert G.shape == (8, 8)
    assert np.array_equal(np.triu(G, 1), np.zeros_like(G))
    assert np.all(np.diag(G) == 1)


@pytest.mark.parametrize("n", range(0, 11))
def test_kronecker_self_inverse(n):
    G = kronecker_power(n)
    assert np.array_equal(gf2_matmul(G, G), np.eye(1 << n, dtype=np.uint8))


@pytest.mark.parametrize("n", [1, 3, 5])
def test_gf2_inverse_of_kernel_power(n):
    G = kronecker_power(n)
    assert np.array_equal(gf2_inverse(G), G)


def test_gf2_inverse_random():
    rng = np.random.default_rng(1)
    assert np.array_equal(gf2_inverse(np.eye(8, dtype=np.uint8)), np.eye(8, dtype=np.uint8))
    found = 0
    while found < 20:
        M = rng.integers(0, 2, (8, 8)).astype(np.uint8)
        try:
            Mi = gf2_inverse(M)
        except Singular:
            continue
        found += 1
        assert np.array_equal(gf2_matmul(M, Mi), np.eye(8, dtype=np.uint8))
    with pytest.raises(Singular):
        gf2_inverse(np.array([[1, 1], [1, 1]]))


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_polar_transform_matches_matrix(n):
    rng = np.random.default_rng(n)
    G = kronecker_power(n)
    u = rng.integers(0, 2, (4, 1 << n))
    assert np.array_equal(polar_transform(u), gf2_matmul(u, G))
    # symbols: every bit plane transforms independently
    s = rng.integers(0, 32, 1 << n)
    out = polar_transform(s)
    for j in range(5):
        assert np.array_equal((out >> j) & 1, gf2_matmul((s >> j) & 1, G))
    assert np.array_equal(polar_transform(out), s)


def test_polar_transform_axis():
    x = np.arange(24).reshape(3, 8) % 2
    assert np.array_equal(polar_transform(x.T, axis=0), polar_transform(x).T)
    with pytest.raises(LengthMismatch):
        polar_transform(np.zeros(6, dtype=int))


def test_rref_already_reduced():
    f = make_field(3)
    M = np.array([[1, 0, 5, 0], [0, 1, 3, 0], [0, 0, 0, 1]])
    R, Mr, piv = nb_rref(f, M)
    assert np.array_equal(R, np.eye(3, dtype=np.int64))
    assert np.array_equal(Mr, M)
    assert piv == [0, 1, 3]


def test_rref_gf4_hand_example():
    f = make_field(2, 0b111)
    a = f.alpha
    R, Mr, piv = nb_rref(f, [[a, a], [0, 1]])
    assert Mr.tolist() == [[1, 0], [0, 1]]
    assert piv == [0, 1]


def test_rref_random_gf16():
    f = make_field(4)
    rng = np.random.default_rng(5)
    for _ in range(20):
        M = rng.integers(0, 16, (7, 16))
        if nb_rank(f, M) < 7:
            continue
        R, Mr, piv = nb_rref(f, M)
        assert np.array_equal(f.matmul(R, M), Mr)
        assert len(piv) == 7 and piv == sorted(piv)
        assert np.array_equal(Mr[:, piv], np.eye(7, dtype=np.int64))
        # entries left of each pivot vanish
        for row, col in enumerate(piv):
            assert not Mr[row, :col].any()
        assert np.array_equal(f.matmul(R, nb_inverse(f, R)), np.eye(7, dtype=np.int64))


def test_rref_rank_deficient():
    f = make_field(3)
    with pytest.raises(RankDeficient):
        nb_rref(f, [[1, 2, 3], [2, 4, 6]])  # second row is alpha times the first
    with pytest.raises(Singular):
        nb_inverse(f, [[1, 2], [2, 4]])


def test_permutation_examples():
    f4 = make_field(2, 0b111)
    P = build_permutation(2, f4)
    assert P.perm.tolist() == [1, 2, 3, 0]
    v = np.array([10, 11, 12, 13])
    assert apply_permutation(v, P).tolist() == [11, 12, 13, 10]
    assert np.array_equal(v @ P.as_matrix(), apply_permutation(v, P))
    assert np.array_equal(apply_permutation(v, Permutation.identity(4)), v)
    assert np.array_equal(apply_inverse_permutation(apply_permutation(v, P), P), v)
    with pytest.raises(LengthMismatch):
        apply_permutation(v[:3], P)


@pytest.mark.parametrize("n", range(1, 11))
def test_build_permutation_bijective(n):
    P = build_permutation(n)
    N = 1 << n
    assert P.perm[N - 1] == 0
    assert P.perm[0] == 1
    assert sorted(P.perm.tolist()) == list(range(N))


def test_not_bijective():
    with pytest.raises(NotBijective):
        Permutation(np.array([0, 0, 1]))


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(8))), st.lists(st.integers(0, 255), min_size=8, max_size=8))
def test_permutation_round_trip(perm, v):
    P = Permutation(np.array(perm))
    v = np.array(v)
    assert np.array_equal(apply_permutation(apply_inverse_permutation(v, P), P), v)
    assert np.array_equal(v @ P.as_matrix().T, apply_inverse_permutation(v, P))
