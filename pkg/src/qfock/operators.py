"""M^(1/2), the canonical unitary U, the operator R and the identity checks.

All matrices are in natural bases. For maps into or out of a twisted level
the Gram matrix carries the geometry, see ``gamma_adjoint``.

``M_n^(1/2)`` is computed by symmetrizing ``[M_n]`` with a positive weight
``W`` such that ``W [M_n]`` is symmetric. The default weight is
``I (x) Gamma_{n-1}``: ``Gamma_n = (I (x) Gamma_{n-1}) [M_n]`` is symmetric,
and this weight is one level better conditioned than ``Gamma_n`` itself.
``metric="gram"`` uses ``Gamma_n`` instead; both give the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import (
    annihilator_matrix,
    check_dimension,
    check_level,
    check_q,
    creator_matrix,
    tensor_left,
    tensor_right,
    word_digits,
    digits_to_index,
)
from .symgroup import cycle_sum_matrix

METRICS = ("lower", "gram")


@dataclass(frozen=True)
class OperatorFamily:
    """Level matrices ``X_0, ..., X_{n_max}`` of one operator."""

    d: int
    q: float
    basis: str
    matrices: tuple[np.ndarray, ...]

    def __getitem__(self, n: int) -> np.ndarray:
        return self.matrices[n]

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def n_max(self) -> int:
        return len(self.matrices) - 1


def opnorm(x: np.ndarray) -> float:
    """Largest singular value; 0 for empty matrices."""
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def symmetric_part(a: np.ndarray, tol: float, what: str = "matrix") -> np.ndarray:
    scale = max(1.0, float(np.abs(a).max()))
    asym = float(np.abs(a - a.T).max())
    if asym > tol * scale:
        raise ArithmeticError(f"{what} is not symmetric: asymmetry {asym:.3e}")
    return (a + a.T) / 2


def level_of(dim: int, d: int) -> int:
    n = 0
    while d**n < dim:
        n += 1
    if d**n != dim:
        raise ValueError(f"dimension {dim} is not a power of {d}")
    return n


def psd_sqrt(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Positive square root of a symmetric PSD matrix.

    Eigenvalues in ``(-tol * scale, 0)`` are roundoff and are clamped to 0;
    anything more negative raises.
    """
    w, v = np.linalg.eigh(a)
    scale = max(1.0, float(np.abs(w).max()))
    if w[0] < -tol * scale:
        raise ArithmeticError(f"matrix is not positive semidefinite: eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def _sqrt_pair(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(a)
    if w[0] <= 0:
        raise ArithmeticError(f"weight is not positive definite: eigenvalue {w[0]:.3e}")
    return (v * np.sqrt(w)) @ v.T, (v / np.sqrt(w)) @ v.T


def gamma_adjoint(x: np.ndarray, gram_dom=None, gram_cod=None) -> np.ndarray:
    """Matrix of the adjoint of the map with matrix ``x``.

    ``gram_dom`` / ``gram_cod`` are the Gram matrices of the domain and
    codomain bases, ``None`` meaning orthonormal. The result is
    ``gram_dom^-1 x^T gram_cod``.
    """
    out = x.T.astype(float)
    if gram_cod is not None:
        if gram_cod.shape[0] != x.shape[0]:
            raise ValueError("codomain Gram matrix does not match the matrix rows")
        out = out @ gram_cod
    if gram_dom is not None:
        if gram_dom.shape[0] != x.shape[1]:
            raise ValueError("domain Gram matrix does not match the matrix columns")
        out = np.linalg.solve(gram_dom, out)
    return out


@dataclass(frozen=True)
class Tower:
    """Everything built level by level for one ``(d, q)`` up to ``n_max``.

    ``alphas[n]`` is the smallest eigenvalue of ``M_n`` (0 at the vacuum level).
    """

    d: int
    q: float
    n_max: int
    metric: str
    cycle_sums: tuple[np.ndarray, ...]
    grams: tuple[np.ndarray, ...]
    m_sqrts: tuple[np.ndarray, ...]
    unitaries: tuple[np.ndarray, ...]
    rs: tuple[np.ndarray, ...]
    alphas: tuple[float, ...]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=32)
def _build_tower(d: int, n_max: int, q: float, metric: str, tol: float) -> Tower:
    zero = _freeze(np.zeros((1, 1)))
    one = _freeze(np.ones((1, 1)))
    cycle_sums, grams, m_sqrts, us, rs, alphas = [zero], [one], [zero], [one], [zero], [0.0]
    prev_half = prev_ihalf = np.ones((1, 1))
    for n in range(1, n_max + 1):
        m = cycle_sum_matrix(d, n, q)
        lower = tensor_left(grams[-1], d)
        gram = symmetric_part(lower @ m, tol, "Gamma_n")
        if metric == "lower":
            w_half, w_ihalf = tensor_left(prev_half, d), tensor_left(prev_ihalf, d)
        else:
            w_half, w_ihalf = _sqrt_pair(gram)
        s = symmetric_part(w_half @ m @ w_ihalf, tol, "symmetrized M_n")
        eig, vec = np.linalg.eigh(s)
        if eig[0] <= 0:
            raise ArithmeticError(f"M_{n} lost positivity: eigenvalue {eig[0]:.3e}")
        m_half = w_ihalf @ ((vec * np.sqrt(eig)) @ vec.T) @ w_half
        u = tensor_left(us[-1], d) @ m_half
        # R_n = U_n M_n^(1/2) U_n^-1, solving against U_n from the right
        r = np.linalg.solve(u.T, (u @ m_half).T).T
        r = symmetric_part(r, tol, f"R_{n}")
        cycle_sums.append(_freeze(m))
        grams.append(_freeze(gram))
        m_sqrts.append(_freeze(m_half))
        us.append(_freeze(u))
        rs.append(_freeze(r))
        alphas.append(float(eig[0]))
        if metric == "lower":
            prev_half, prev_ihalf = _sqrt_pair(gram)
    return Tower(d, q, n_max, metric, tuple(cycle_sums), tuple(grams), tuple(m_sqrts),
                 tuple(us), tuple(rs), tuple(alphas))


def build_tower(d: int, n_max: int, q: float, metric: str = "lower", tol: float = 1e-10) -> Tower:
    check_dimension(d)
    check_level(n_max)
    check_q(q)
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    return _build_tower(int(d), int(n_max), float(q), metric, float(tol))


def m_sqrt(d: int, n: int, q: float, metric: str = "lower") -> np.ndarray:
    """``[M_n^(1/2)]`` in the natural basis of the twisted level ``n``."""
    return build_tower(d, n, q, metric).m_sqrts[n]


def u_family(d: int, n_max: int, q: float) -> OperatorFamily:
    return OperatorFamily(d, q, "twisted->natural", build_tower(d, n_max, q).unitaries)


def r_family(d: int, n_max: int, q: float) -> OperatorFamily:
    return OperatorFamily(d, q, "natural", build_tower(d, n_max, q).rs)


def fixed_point_rhs(r_n: np.ndarray, d: int, q: float) -> np.ndarray:
    """``I + q sum_{i,j} V_j* R_n V_i* V_j R_n V_i`` on level ``n + 1`` (``n >= 1``)."""
    n = level_of(r_n.shape[0], d)
    total = np.zeros((d ** (n + 1),) * 2)
    for i in range(1, d + 1):
        v_i = annihilator_matrix(i, d, n + 1)
        vs_i = creator_matrix(i, d, n - 1)
        for j in range(1, d + 1):
            left = creator_matrix(j, d, n) @ r_n @ vs_i
            right = annihilator_matrix(j, d, n) @ r_n @ v_i
            total += left @ right
    return np.eye(d ** (n + 1)) + q * total


def r_family_by_iteration(d: int, n_max: int, q: float, tol: float = 1e-10) -> OperatorFamily:
    """``R`` from ``R_0 = 0``, ``R_1 = I`` and the positive root of the level recursion."""
    check_dimension(d)
    check_q(q)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rs = [np.zeros((1, 1)), np.eye(d)]
    for n in range(1, n_max):
        rhs = symmetric_part(fixed_point_rhs(rs[n], d, q), tol, "fixed-point right side")
        rs.append(psd_sqrt(rhs, tol))
    return OperatorFamily(d, q, "natural", tuple(rs))


def t_matrix(d: int, n: int) -> np.ndarray:
    """Level-``n`` matrix of ``T = sum_{i,j} V_j* V_i* V_j V_i``: swap the first two letters."""
    check_dimension(d)
    check_level(n)
    dim = d**n
    if n < 2:
        return np.zeros((dim, dim), dtype=np.int64)
    digits = word_digits(d, n)
    swapped = digits[:, [1, 0] + list(range(2, n))]
    out = np.zeros((dim, dim), dtype=np.int64)
    out[digits_to_index(swapped, d), np.arange(dim)] = 1
    return out


def unitarity_defect(d: int, n_max: int, q: float) -> float:
    """``max_n max|[U_n]^T [U_n] - Gamma_n|``."""
    tower = build_tower(d, n_max, q)
    return max(float(np.abs(u.T @ u - g).max()) for u, g in zip(tower.unitaries, tower.grams))


def fixed_point_residuals(family: OperatorFamily) -> list[float]:
    """Per level ``n + 1``: ``||R_{n+1}^2 - I - q sum V_j* R_n V_i* V_j R_n V_i||``."""
    d, q = family.d, family.q
    out = []
    for n in range(1, family.n_max):
        r_next = family[n + 1]
        out.append(opnorm(r_next @ r_next - fixed_point_rhs(family[n], d, q)))
    return out


def qcr_defect(d: int, n_max: int, q: float) -> float:
    """Largest q-commutation defect of ``B_i = V_i R`` on levels ``0..n_max-1``.

    On level ``n``: ``B_i B_j* = V_i R_{n+1}^2 V_j*`` and
    ``B_j* B_i = R_n V_j* V_i R_n``.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    rs = r_family(d, n_max, q)
    worst = 0.0
    for n in range(n_max):
        r_up = rs[n + 1] @ rs[n + 1]
        for i in range(1, d + 1):
            v_i_up = annihilator_matrix(i, d, n + 1)
            for j in range(1, d + 1):
                term = v_i_up @ r_up @ creator_matrix(j, d, n)
                if n >= 1:
                    term = term - q * (rs[n] @ creator_matrix(j, d, n - 1) @ annihilator_matrix(i, d, n) @ rs[n])
                if i == j:
                    term = term - np.eye(d**n)
                worst = max(worst, opnorm(term))
    return worst


def _twisted_annihilator(i: int, d: int, n: int, q: float) -> np.ndarray:
    """Matrix of ``A_i : V_{n,q} -> V_{n-1,q}``, deleting any occurrence of ``i`` with weight ``q^(k-1)``."""
    digits = word_digits(d, n)
    out = np.zeros((d ** (n - 1), d**n))
    cols = np.arange(d**n)
    for k in range(n):
        hit = digits[:, k] == i - 1
        rest = np.delete(digits[hit], k, axis=1)
        out[digits_to_index(rest, d), cols[hit]] += q**k
    return out


def intertwining_defect(d: int, n_max: int, q: float) -> float:
    """``max ||[A_i*] - [M^(1/2)][U^-1][V_i*][U]||`` over letters and levels ``0..n_max-1``.

    ``[A_i*]`` prepends ``i``, which as a matrix is the creator matrix itself.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    tower = build_tower(d, n_max, q)
    worst = 0.0
    for n in range(n_max):
        for i in range(1, d + 1):
            a_star = creator_matrix(i, d, n).astype(float)
            moved = np.linalg.solve(tower.unitaries[n + 1], creator_matrix(i, d, n) @ tower.unitaries[n])
            worst = max(worst, opnorm(a_star - tower.m_sqrts[n + 1] @ moved))
    return worst


def commutant_defect(d: int, n_max: int, q: float) -> float:
    """Largest of ``||R_n V_i - V_i (I (x) R_n)||`` and ``||V_j* R_n - (I (x) R_n) V_j*||``."""
    rs = r_family(d, n_max, q)
    worst = 0.0
    for n in range(1, n_max):
        lifted = tensor_left(rs[n], d)
        for i in range(1, d + 1):
            v = annihilator_matrix(i, d, n + 1)
            worst = max(worst, opnorm(rs[n] @ v - v @ lifted))
            worst = max(worst, opnorm(v.T @ rs[n] - lifted @ v.T))
    return worst


def rewritten_fixed_point_residuals(d: int, n_max: int, q: float) -> list[float]:
    """``||R_{n+1}^2 - I - q (I (x) R_n) T_{n+1} (I (x) R_n)||`` per level."""
    rs = r_family(d, n_max, q)
    out = []
    for n in range(1, n_max):
        lifted = tensor_left(rs[n], d)
        rhs = np.eye(d ** (n + 1)) + q * lifted @ t_matrix(d, n + 1) @ lifted
        out.append(opnorm(rs[n + 1] @ rs[n + 1] - rhs))
    return out


def iterate_distance_matrix(rs: OperatorFamily, n: int) -> np.ndarray:
    """``(R_n (x) I) - R_{n+1}`` on level ``n + 1``."""
    return tensor_right(rs[n], rs.d) - rs[n + 1]
