"""Permutations acting on tensor positions.

Composition is ``(s * t)(x) = s(t(x))``. With this convention the position
action ``pi(s)`` on words is a homomorphism, and every ``s`` factors as
``t * cycle(1, k)`` with ``t(1) = 1`` and ``inv(s) = inv(t) + k - 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .basis import check_dimension, digits_to_index, word_digits


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1, ..., n}`` given by its one-line images."""

    images: tuple[int, ...]
    inv: int = field(init=False, compare=False)

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a permutation of 1..{len(images)}")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "inv", inversions(images))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        if other.n != self.n:
            raise ValueError("cannot compose permutations of different degree")
        return Permutation(tuple(self(other(x)) for x in range(1, self.n + 1)))

    def inverse(self) -> Permutation:
        out = [0] * self.n
        for x, y in enumerate(self.images, start=1):
            out[y - 1] = x
        return Permutation(tuple(out))


def all_permutations(n: int) -> Iterator[Permutation]:
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)


def inversions(s) -> int:
    """Number of pairs ``i < j`` with ``s(i) > s(j)``."""
    images = s.images if isinstance(s, Permutation) else tuple(s)
    return sum(1 for a, b in itertools.combinations(images, 2) if a > b)


def cycle(k: int, l: int, n: int) -> Permutation:
    """The cycle ``k -> k+1 -> ... -> l -> k``; the identity when ``k == l``."""
    if not 1 <= k <= l <= n:
        raise ValueError(f"need 1 <= k <= l <= n, got k={k}, l={l}, n={n}")
    images = list(range(1, n + 1))
    for x in range(k, l):
        images[x - 1] = x + 1
    images[l - 1] = k
    return Permutation(tuple(images))


def permutation_indices(s: Permutation, d: int) -> np.ndarray:
    """Target word index of each source word under the position action."""
    check_dimension(d)
    digits = word_digits(d, s.n)
    # output position p carries the letter from position s^{-1}(p)
    sinv = np.array(s.inverse().images) - 1
    return digits_to_index(digits[:, sinv], d)


def permutation_matrix(s: Permutation, d: int) -> np.ndarray:
    """Integer 0/1 matrix of ``pi(s)`` on the natural basis of level ``s.n``."""
    dim = d**s.n
    out = np.zeros((dim, dim), dtype=np.int64)
    out[permutation_indices(s, d), np.arange(dim)] = 1
    return out


def canonical_decomposition(s: Permutation) -> tuple[Permutation, int]:
    """Return ``(t, k)`` with ``s = t * cycle(1, k)`` and ``t(1) = 1``."""
    k = s.inverse()(1)
    t = s * cycle(1, k, s.n).inverse()
    return t, k


def cycle_sum_matrix(d: int, n: int, q: float) -> np.ndarray:
    """Matrix of ``sum_k q^(k-1) pi(1 -> k)``, i.e. of ``M_n`` in the natural basis."""
    if n < 1:
        raise ValueError("the cycle sum needs n >= 1")
    dim = d**n
    out = np.zeros((dim, dim))
    cols = np.arange(dim)
    for k in range(1, n + 1):
        out[permutation_indices(cycle(1, k, n), d), cols] += q ** (k - 1)
    return out


def factorization_residual(d: int, n: int, q: float) -> float:
    """Operator norm of the gap between the cycle sum and its product form.

    The product form is
    ``prod_{j=0}^{n-2} (I - q^(n-j) pi(2 -> n-j)) * prod_{j=1}^{n-1} (I - q^j pi(1 -> j+1))^-1``
    with both products taken left to right in increasing ``j``.
    """
    if n < 2:
        raise ValueError("the factorization needs n >= 2")
    dim = d**n
    eye = np.eye(dim)
    rhs = eye.copy()
    for j in range(0, n - 1):
        rhs = rhs @ (eye - q ** (n - j) * permutation_matrix(cycle(2, n - j, n), d))
    for j in range(1, n):
        factor = eye - q**j * permutation_matrix(cycle(1, j + 1, n), d)
        # right-multiplying by factor^-1: solve X factor = rhs
        rhs = np.linalg.solve(factor.T, rhs.T).T
    return float(np.linalg.norm(cycle_sum_matrix(d, n, q) - rhs, 2))
