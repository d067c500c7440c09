import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qfock.basis import (
    Config,
    annihilator_matrix,
    block_dimension,
    block_members,
    creator_matrix,
    enumerate_words,
    multiset_class,
    multiset_classes,
    tensor_left,
    tensor_right,
    vacuum_complement_projection,
    word_index,
)


def test_enumerate_examples():
    assert enumerate_words(2, 0) == [()]
    assert enumerate_words(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    w = enumerate_words(3, 2)
    assert len(w) == 9 and w[:4] == [(1, 1), (1, 2), (1, 3), (2, 1)]


@pytest.mark.parametrize("d,n", [(1, 2), (2, -1)])
def test_enumerate_rejects(d, n):
    with pytest.raises(ValueError):
        enumerate_words(d, n)


def test_word_index_examples():
    assert word_index((1, 1), 2) == 0
    assert word_index((2, 1), 2) == 2
    assert word_index((2, 2), 2) == 3
    with pytest.raises(ValueError):
        word_index((1, 3), 2)


@pytest.mark.parametrize("d,n", [(2, 0), (2, 4), (3, 3), (4, 2)])
def test_word_index_inverts_enumeration(d, n):
    assert [word_index(w, d) for w in enumerate_words(d, n)] == list(range(d**n))


@given(st.integers(2, 4).flatmap(lambda d: st.tuples(st.just(d), st.lists(st.integers(1, d), max_size=6))))
def test_word_index_roundtrip(case):
    d, w = case
    w = tuple(w)
    assert enumerate_words(d, len(w))[word_index(w, d)] == w


def test_multiset_class_examples():
    assert multiset_class((1, 2, 1), 2) == (2, 1)
    assert multiset_class((), 2) == (0, 0)
    assert multiset_class((3, 3, 1), 3) == (1, 0, 2)


def test_block_members_examples():
    assert block_members(2, 2, (1, 1)) == [(1, 2), (2, 1)]
    assert block_members(2, 2, (2, 0)) == [(1, 1)]
    assert block_members(2, 3, (2, 1)) == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]
    with pytest.raises(ValueError):
        block_members(2, 3, (1, 1))


@pytest.mark.parametrize("d,n", [(d, n) for d in (2, 3) for n in range(7)])
def test_partition_property(d, n):
    words = []
    for alpha in multiset_classes(d, n):
        members = block_members(d, n, alpha)
        assert len(members) == block_dimension(alpha)
        assert all(multiset_class(w, d) == alpha for w in members)
        words.extend(members)
    assert sorted(words) == enumerate_words(d, n)


def test_annihilator_examples():
    assert annihilator_matrix(1, 2, 1).tolist() == [[1, 0]]
    assert annihilator_matrix(2, 2, 2).tolist() == [[0, 0, 1, 0], [0, 0, 0, 1]]
    with pytest.raises(ValueError):
        annihilator_matrix(1, 2, 0)
    with pytest.raises(ValueError):
        annihilator_matrix(3, 2, 1)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 3), (3, 2), (3, 3)])
def test_isometry_property(d, n):
    for i, j in itertools.product(range(1, d + 1), repeat=2):
        prod = annihilator_matrix(i, d, n) @ annihilator_matrix(j, d, n).T
        expected = np.eye(d ** (n - 1), dtype=np.int64) * (i == j)
        assert np.array_equal(prod, expected)


def test_creator_is_transpose():
    assert np.array_equal(creator_matrix(2, 3, 1), annihilator_matrix(2, 3, 2).T)


def test_projection_off_vacuum():
    assert np.array_equal(vacuum_complement_projection(2, 2), np.eye(4, dtype=np.int64))
    assert not vacuum_complement_projection(2, 0).any()


def test_tensor_conventions():
    x = np.arange(4.0).reshape(2, 2)
    assert np.array_equal(tensor_right(x, 2), np.kron(x, np.eye(2)))
    assert np.array_equal(tensor_left(x, 2), np.kron(np.eye(2), x))


@pytest.mark.parametrize("kwargs", [
    dict(d=1, q=0.1, n_max=2),
    dict(d=2, q=1.0, n_max=2),
    dict(d=2, q=-1.0, n_max=2),
    dict(d=2, q=0.1, n_max=0),
    dict(d=2, q=0.1, n_max=2, tol=0.0),
])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        Config(**kwargs)
