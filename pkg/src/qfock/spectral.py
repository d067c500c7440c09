"""Smallest eigenvalues of M_n, their a-priori bounds, and the convergence report.

The bound ``(1/(1-|q|)) prod_k (1-|q|^k)/(1+|q|^k) <= R_n^2 <= 1/(1-|q|)``
holds on every level ``n >= 1``. The product equals the theta series
``sum_{k in Z} (-1)^k |q|^(k^2)``, which is also the right side of the
sufficient condition ``q^2 < 1 - 2|q| + 2|q|^4 - 2|q|^9 + ...``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .basis import check_dimension, check_q, multiset_classes, tensor_left, tensor_right
from .gram import block_cycle_sum, block_lower_gram
from .symgroup import cycle_sum_matrix
from .operators import build_tower, r_family

DEFAULT_TAIL_TOL = 1e-16


class Verdict(str, enum.Enum):
    HOLDS = "holds-empirically"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


def alpha(d: int, n: int, q: float, blocks: bool = False) -> float:
    """Smallest eigenvalue of ``M_n`` (equivalently of ``R_n^2``)."""
    if n < 1:
        raise ValueError("alpha is defined for n >= 1")
    if blocks:
        return alpha_by_blocks(d, n, q)
    return build_tower(d, n, q).alphas[n]


def alphas(d: int, n_max: int, q: float, blocks: bool = False) -> list[float]:
    """``[alpha_1, ..., alpha_{n_max}]``."""
    if blocks:
        return [alpha_by_blocks(d, n, q) for n in range(1, n_max + 1)]
    return list(build_tower(d, n_max, q).alphas[1:])


def block_alpha(cls: tuple[int, ...], q: float) -> float:
    """Smallest eigenvalue of ``M_n`` restricted to one multiset class."""
    lower = block_lower_gram(cls, q)
    w, v = np.linalg.eigh(lower)
    half = (v * np.sqrt(w)) @ v.T
    ihalf = (v / np.sqrt(w)) @ v.T
    s = half @ block_cycle_sum(cls, q) @ ihalf
    return float(np.linalg.eigvalsh((s + s.T) / 2)[0])


def representative_classes(d: int, n: int) -> list[tuple[int, ...]]:
    """One class per orbit under relabelling letters (counts in non-increasing order).

    Relabelling letters permutes words and commutes with the position action,
    so classes with the same sorted counts have the same spectrum.
    """
    return [c for c in multiset_classes(d, n) if list(c) == sorted(c, reverse=True)]


def dense_alphas(d: int, n_max: int, q: float) -> list[float]:
    """``alpha_1..alpha_{n_max}`` from full level matrices, without building U or R."""
    check_dimension(d)
    check_q(q)
    out = []
    gram = np.ones((1, 1))
    for n in range(1, n_max + 1):
        lower = tensor_left(gram, d)
        m = cycle_sum_matrix(d, n, q)
        w, v = np.linalg.eigh(lower)
        s = ((v * np.sqrt(w)) @ v.T) @ m @ ((v / np.sqrt(w)) @ v.T)
        out.append(float(np.linalg.eigvalsh((s + s.T) / 2)[0]))
        gram = lower @ m
        gram = (gram + gram.T) / 2
    return out


def alpha_by_blocks(d: int, n: int, q: float) -> float:
    check_dimension(d)
    check_q(q)
    return min(block_alpha(c, float(q)) for c in representative_classes(d, n))


def gauss_product(q: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``prod_{k>=1} (1-q^k)/(1+q^k)`` for ``0 <= q < 1``.

    Factors are multiplied in until ``|1 - factor| < tail_tol``. Since
    ``1 - factor < 2 q^k``, the discarded tail changes the product by a
    relative amount of at most ``2 q^(K+1) / (1 - q)`` after ``K`` factors.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    total = 1.0
    k = 1
    while True:
        factor = (1 - q**k) / (1 + q**k)
        total *= factor
        if abs(1 - factor) < tail_tol:
            return total
        k += 1


def theta_partial_sums(q: float, terms: int) -> list[float]:
    """Partial sums ``1, 1 - 2q, 1 - 2q + 2q^4, ...`` (``terms`` of them)."""
    sums, acc = [], 0.0
    for k in range(terms):
        acc += 1.0 if k == 0 else 2.0 * (-1) ** k * q ** (k * k)
        sums.append(acc)
    return sums


def gauss_theta(q: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``1 + 2 sum_{k>=1} (-1)^k q^(k^2)``, stopping once ``q^(k^2) < tail_tol``.

    The terms alternate with decreasing size, so the error is below the first
    omitted term.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    terms = [1.0]
    k = 1
    while q ** (k * k) >= tail_tol:
        terms.append(2.0 * (-1) ** k * q ** (k * k))
        k += 1
    return math.fsum(terms)


def lemma41_bounds(q: float, tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, float]:
    """Lower and upper spectral bounds for ``R_n^2``, ``n >= 1``."""
    check_q(q)
    a = abs(q)
    upper = 1.0 / (1.0 - a)
    return upper * gauss_product(a, tail_tol), upper


def condition_17_margin(q: float, terms: int) -> float:
    """Truncated theta series at ``|q|`` minus ``q^2``.

    ``terms`` counts the constant 1, so ``terms=2`` is ``1 - 2|q| - q^2``.
    A positive margin certifies the condition when the last kept term is
    negative (even ``terms``).
    """
    check_q(q)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    return theta_partial_sums(abs(q), terms)[-1] - q * q


def condition_root(terms: int, root_tol: float = 1e-12) -> float:
    """Root in (0, 1) of the truncated margin, by bisection.

    Bracket is ``[0, 0.9]``: the margin is 1 at 0, and at 0.9 every partial
    sum is at most ``1 - 1.8 + 2 * 0.9^4 < 0.81``. For odd ``terms`` the margin
    also vanishes at ``q = 1``, which this bracket excludes.
    """
    if terms < 2:
        raise ValueError("terms must be >= 2")
    f = lambda q: condition_17_margin(q, terms)
    lo, hi = 0.0, 0.9
    if not f(lo) > 0 > f(hi):
        raise ArithmeticError("no sign change of the margin on the bracket")
    return float(bisect(f, lo, hi, xtol=root_tol, maxiter=200))


def threshold(q: float) -> float:
    """``q^2 / (1 - |q|)``."""
    return q * q / (1.0 - abs(q))


def contraction_factor(d: int, n: int, q: float, blocks: bool = False) -> float:
    """``|q| / sqrt((1-|q|) min(alpha_{n+1}, alpha_{n+2}))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if q == 0:
        return 0.0
    a = alphas(d, n + 2, q, blocks)
    return _factor(q, min(a[n], a[n + 1]))


def _factor(q: float, smallest: float) -> float:
    return abs(q) / math.sqrt((1.0 - abs(q)) * smallest)


def iterate_distance(d: int, n: int, q: float) -> float:
    """``||(R_n (x) I) - R_{n+1}||``, largest absolute eigenvalue of the symmetric gap."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rs = r_family(d, n + 1, q)
    return _distance(rs, n)


def _distance(rs, n: int) -> float:
    gap = tensor_right(rs[n], rs.d) - rs[n + 1]
    return float(np.abs(np.linalg.eigvalsh((gap + gap.T) / 2)).max())


@dataclass
class SpectralReport:
    """Finite-level record for one ``(d, q)``; never claims the limit."""

    d: int
    q: float
    n_max: int
    alphas: list[float]
    lower_bound: float
    upper_bound: float
    contraction_factors: list[float]
    iterate_distances: list[float]
    threshold: float
    margin: float
    last_alpha: float
    trend: str
    verdict: Verdict
    tail_note: str = field(default="")

    def summary(self) -> dict:
        return {
            "q": self.q,
            "min_alpha": min(self.alphas),
            "last_alpha": self.last_alpha,
            "threshold": self.threshold,
            "margin": self.margin,
            "lower_bound": self.lower_bound,
            "trend": self.trend,
            "verdict": self.verdict.value,
        }


def _at(values, i):
    return values[i] if i < len(values) else None


def _trend(values: list[float], tol: float = 1e-12) -> str:
    steps = np.diff(values)
    if len(steps) == 0 or np.all(np.abs(steps) <= tol):
        return "constant"
    if np.all(steps <= tol):
        return "non-increasing"
    if np.all(steps >= -tol):
        return "non-decreasing"
    return "mixed"


def _levels(d, n_max, q, blocks):
    check_dimension(d)
    check_q(q)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    a = alphas(d, n_max, q, blocks)
    rs = r_family(d, n_max, q)
    distances = [_distance(rs, n) for n in range(1, n_max)]
    factors = [0.0 if q == 0 else _factor(q, min(a[n], a[n + 1])) for n in range(1, n_max - 1)]
    return a, factors, distances


SPECTRUM_COLUMNS = ("n", "alpha", "lower_bound", "upper_bound", "contraction_factor", "iterate_distance")


def spectrum_table(d: int, n_max: int, q: float, blocks: bool = False) -> list[dict]:
    """One row per level; factor and distance are ``None`` where they need higher levels."""
    a, factors, distances = _levels(d, n_max, q, blocks)
    lower, upper = lemma41_bounds(q)
    return [
        {
            "n": n,
            "alpha": a[n - 1],
            "lower_bound": lower,
            "upper_bound": upper,
            "contraction_factor": _at(factors, n - 1),
            "iterate_distance": _at(distances, n - 1),
        }
        for n in range(1, n_max + 1)
    ]


def prop52_report(d: int, n_max: int, q: float, blocks: bool = False,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> SpectralReport:
    """Per-level alphas, bounds, contraction factors and iterate distances.

    Verdict, in order of precedence:

    * ``fails``: some computed ``alpha_n`` is at or below the threshold;
    * ``holds-empirically``: the a-priori lower bound already exceeds the threshold;
    * ``inconclusive``: fewer than three levels, or the sequence is still
      falling and the margin is no larger than the last observed drop;
    * ``holds-empirically`` otherwise.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    a, factors, distances = _levels(d, n_max, q, blocks)
    lower, upper = lemma41_bounds(q, tail_tol)
    thr = threshold(q)
    margin = min(a) - thr
    trend = _trend(a)
    drop = a[-2] - a[-1]
    if margin <= 0:
        verdict = Verdict.FAILS
    elif lower > thr:
        verdict = Verdict.HOLDS
    elif n_max < 3 or (drop > 0 and margin <= drop):
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.HOLDS
    note = (f"product truncated at |1 - factor| < {tail_tol:g}; "
            f"relative tail error <= 2|q|^(K+1)/(1-|q|)")
    return SpectralReport(d, q, n_max, a, lower, upper, factors, distances, thr,
                          margin, a[-1], trend, verdict, note)
