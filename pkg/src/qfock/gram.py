"""Gram matrices of the q-inner product on the natural basis.

``gram_by_recursion`` is the production route. ``gram_by_inversions`` and
``q_inner`` are independent slow routes kept for cross-checking.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.linalg

from .basis import (
    MultisetClass,
    Word,
    block_indices,
    block_members,
    check_dimension,
    check_level,
    check_q,
    tensor_left,
)
from .symgroup import all_permutations, cycle_sum_matrix, permutation_indices


def q_inner(u: Word, w: Word, q: float) -> float:
    """q-inner product of two words, by the first-letter recursion."""
    if len(u) != len(w):
        return 0.0
    return _q_inner(tuple(u), tuple(w), float(q))


@lru_cache(maxsize=None)
def _q_inner(u: Word, w: Word, q: float) -> float:
    if not u:
        return 1.0
    total = 0.0
    for k, letter in enumerate(w):
        if letter == u[0]:
            total += q**k * _q_inner(u[1:], w[:k] + w[k + 1 :], q)
    return total


def gram_tower(d: int, n: int, q: float) -> list[np.ndarray]:
    """``[Gamma_0, ..., Gamma_n]`` built by ``Gamma_n = (I (x) Gamma_{n-1}) [M_n]``."""
    check_dimension(d)
    check_level(n)
    check_q(q)
    grams = [np.ones((1, 1))]
    for level in range(1, n + 1):
        g = tensor_left(grams[-1], d) @ cycle_sum_matrix(d, level, q)
        grams.append(g)
    return grams


def gram_by_recursion(d: int, n: int, q: float) -> np.ndarray:
    return gram_tower(d, n, q)[-1]


def gram_by_inversions(d: int, n: int, q: float, max_level: int = 6) -> np.ndarray:
    """``sum_s q^inv(s) pi(s)`` over the whole symmetric group (n! terms)."""
    check_dimension(d)
    check_level(n)
    check_q(q)
    if n > max_level:
        raise ValueError(f"level {n} exceeds the cap {max_level} for the n! sum")
    if n == 0:
        return np.ones((1, 1))
    dim = d**n
    out = np.zeros((dim, dim))
    cols = np.arange(dim)
    for s in all_permutations(n):
        out[permutation_indices(s, d), cols] += q**s.inv
    return out


def gram_block(d: int, n: int, q: float, alpha: MultisetClass) -> np.ndarray:
    """Principal submatrix of ``Gamma_n`` on the words of class ``alpha``."""
    idx = block_indices(d, n, alpha)
    return gram_by_recursion(d, n, q)[np.ix_(idx, idx)]


def block_cycle_sum(alpha: MultisetClass, q: float) -> np.ndarray:
    """Restriction of ``[M_n]`` to the class ``alpha``, built without the full level."""
    words = block_members(len(alpha), sum(alpha), alpha)
    pos = {w: i for i, w in enumerate(words)}
    out = np.zeros((len(words), len(words)))
    for j, w in enumerate(words):
        for k in range(len(w)):
            out[pos[(w[k],) + w[:k] + w[k + 1 :]], j] += q**k
    return out


@lru_cache(maxsize=1024)
def _block_factor_and_gram(alpha: MultisetClass, q: float):
    if sum(alpha) == 0:
        return np.ones((1, 1)), np.ones((1, 1))
    parts = []
    for a, count in enumerate(alpha):
        if count:
            rest = alpha[:a] + (count - 1,) + alpha[a + 1 :]
            parts.append(_block_factor_and_gram(rest, q)[1])
    factor = scipy.linalg.block_diag(*parts)
    gram = factor @ block_cycle_sum(alpha, q)
    factor.flags.writeable = False
    gram.flags.writeable = False
    return factor, gram


def clear_block_caches() -> None:
    _block_factor_and_gram.cache_clear()


def block_gram(alpha: MultisetClass, q: float) -> np.ndarray:
    """``Gamma_alpha`` by the block form of the factorization, recursing on ``|alpha|``.

    Words of class ``alpha`` grouped by first letter ``a`` are exactly ``a``
    followed by the words of ``alpha - e_a``, so ``I (x) Gamma_{n-1}`` restricts
    to ``diag_a(Gamma_{alpha - e_a})``.
    """
    check_q(q)
    return _block_factor_and_gram(tuple(alpha), float(q))[1]


def block_lower_gram(alpha: MultisetClass, q: float) -> np.ndarray:
    """Restriction of ``I (x) Gamma_{n-1}`` to the class ``alpha``."""
    check_q(q)
    return _block_factor_and_gram(tuple(alpha), float(q))[0]


def is_positive_definite(g: np.ndarray, tol: float = 1e-10) -> bool:
    """Symmetric eigensolve; smallest eigenvalue must exceed ``tol * largest``."""
    if not np.allclose(g, g.T, rtol=0, atol=tol * max(1.0, np.abs(g).max())):
        return False
    eig = np.linalg.eigvalsh(g)
    return bool(eig[0] > tol * eig[-1])

