"""Natural basis of the untwisted Fock space, truncated level by level.

Words are tuples of 1-based letters, first tensor factor first. Level ``n``
has dimension ``d**n`` and its basis is listed in lexicographic order, so the
index of a word is its base-``d`` value with the first letter most significant.
Under this ordering ``X (x) I`` is ``np.kron(X, I_d)`` and ``I (x) X`` is
``np.kron(I_d, X)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod

import numpy as np

Word = tuple[int, ...]
MultisetClass = tuple[int, ...]


@dataclass(frozen=True)
class Config:
    """Dimension ``d``, deformation ``q``, truncation level and tolerance."""

    d: int
    q: float
    n_max: int
    tol: float = 1e-10

    def __post_init__(self):
        check_dimension(self.d)
        check_q(self.q)
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


def check_dimension(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")


def check_level(n: int) -> None:
    if int(n) != n or n < 0:
        raise ValueError(f"level must be a non-negative integer, got {n}")


def check_q(q: float) -> None:
    if not -1.0 < q < 1.0:
        raise ValueError(f"q must lie in (-1, 1), got {q}")


def check_word(w: Word, d: int) -> None:
    for letter in w:
        if int(letter) != letter or not 1 <= letter <= d:
            raise ValueError(f"letter {letter} out of range 1..{d}")


def enumerate_words(d: int, n: int) -> list[Word]:
    """All ``d**n`` words of length ``n`` in lexicographic order."""
    check_dimension(d)
    check_level(n)
    return list(itertools.product(range(1, d + 1), repeat=n))


def word_index(w: Word, d: int) -> int:
    """Position of ``w`` in ``enumerate_words(d, len(w))``."""
    check_word(w, d)
    idx = 0
    for letter in w:
        idx = idx * d + (letter - 1)
    return idx


@lru_cache(maxsize=64)
def _digits(d: int, n: int) -> np.ndarray:
    if n == 0:
        digits = np.zeros((1, 0), dtype=np.int64)
    else:
        digits = np.array(np.unravel_index(np.arange(d**n), (d,) * n)).T.reshape(d**n, n)
    digits.flags.writeable = False
    return digits


def word_digits(d: int, n: int) -> np.ndarray:
    """Array of shape ``(d**n, n)`` holding 0-based letters of every word, row = index."""
    check_dimension(d)
    check_level(n)
    return _digits(d, n)


def digits_to_index(digits: np.ndarray, d: int) -> np.ndarray:
    n = digits.shape[-1]
    weights = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def multiset_class(w: Word, d: int) -> MultisetClass:
    """Letter counts ``(alpha_1, ..., alpha_d)`` of ``w``."""
    check_word(w, d)
    return tuple(w.count(a) for a in range(1, d + 1))


def multiset_classes(d: int, n: int) -> list[MultisetClass]:
    """All count vectors of length ``d`` summing to ``n``, in reverse-lex order of counts."""
    check_dimension(d)
    check_level(n)

    def rec(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    return list(rec(n, d))


def block_dimension(alpha: MultisetClass) -> int:
    return factorial(sum(alpha)) // prod(factorial(a) for a in alpha)


def _check_class(d: int, n: int, alpha: MultisetClass) -> None:
    if len(alpha) != d or any(a < 0 for a in alpha):
        raise ValueError(f"class {alpha} is not a count vector of length {d}")
    if sum(alpha) != n:
        raise ValueError(f"class {alpha} has size {sum(alpha)}, expected level {n}")


def block_members(d: int, n: int, alpha: MultisetClass) -> list[Word]:
    """Words of level ``n`` with letter counts ``alpha``, lexicographically ordered."""
    check_dimension(d)
    check_level(n)
    _check_class(d, n, alpha)
    return list(_class_words(tuple(alpha)))


@lru_cache(maxsize=256)
def _class_words(alpha: MultisetClass) -> tuple[Word, ...]:
    if sum(alpha) == 0:
        return ((),)
    words = []
    for a, count in enumerate(alpha):
        if count:
            rest = alpha[:a] + (count - 1,) + alpha[a + 1 :]
            words.extend((a + 1,) + w for w in _class_words(rest))
    return tuple(words)


def block_indices(d: int, n: int, alpha: MultisetClass) -> np.ndarray:
    """Indices into level ``n`` of the words in class ``alpha`` (increasing)."""
    check_dimension(d)
    check_level(n)
    _check_class(d, n, alpha)
    counts = np.stack([(word_digits(d, n) == a).sum(axis=1) for a in range(d)], axis=1)
    return np.flatnonzero((counts == np.asarray(alpha)).all(axis=1))


def annihilator_matrix(i: int, d: int, n: int) -> np.ndarray:
    """Integer 0/1 matrix of ``V_i : V_n -> V_{n-1}``.

    The column of a word holds the basis vector of the word with its first
    letter removed if that letter is ``i``, and is zero otherwise.
    """
    check_dimension(d)
    check_level(n)
    if not 1 <= i <= d:
        raise ValueError(f"letter {i} out of range 1..{d}")
    if n == 0:
        raise ValueError("the annihilator is not defined on the vacuum level")
    # words starting with i occupy one contiguous run of length d**(n-1)
    m = d ** (n - 1)
    out = np.zeros((m, d**n), dtype=np.int64)
    out[np.arange(m), (i - 1) * m + np.arange(m)] = 1
    return out


def creator_matrix(i: int, d: int, n: int) -> np.ndarray:
    """Matrix of ``V_i* : V_n -> V_{n+1}`` (prepend the letter ``i``)."""
    return annihilator_matrix(i, d, n + 1).T


def vacuum_complement_projection(d: int, n: int) -> np.ndarray:
    """Level-``n`` matrix of ``P = sum_i V_i* V_i``."""
    check_dimension(d)
    check_level(n)
    if n == 0:
        return np.zeros((1, 1), dtype=np.int64)
    return sum(annihilator_matrix(i, d, n).T @ annihilator_matrix(i, d, n) for i in range(1, d + 1))


def tensor_right(x: np.ndarray, d: int) -> np.ndarray:
    """``X (x) I`` : acts on the first ``n`` letters, leaves the last one alone."""
    return np.kron(x, np.eye(d, dtype=x.dtype))


def tensor_left(x: np.ndarray, d: int) -> np.ndarray:
    """``I (x) X`` : keeps the first letter, acts on the remaining ones."""
    return np.kron(np.eye(d, dtype=x.dtype), x)
