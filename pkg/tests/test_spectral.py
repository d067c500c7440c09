import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qfock.operators import r_family
from qfock.spectral import (
    SPECTRUM_COLUMNS,
    Verdict,
    alpha,
    alpha_by_blocks,
    alphas,
    condition_17_margin,
    condition_root,
    contraction_factor,
    dense_alphas,
    gauss_product,
    gauss_theta,
    iterate_distance,
    lemma41_bounds,
    prop52_report,
    representative_classes,
    spectrum_table,
    theta_partial_sums,
    threshold,
)

# smallest eigenvalues at d=2, levels 3..5, from a 40-digit brute-force
# computation (word-by-word inner products, generalized symmetric eigenproblem)
ORACLE = {
    0.3: (0.66530188126258051242, 0.65596915173260467765, 0.65325075753596189625),
    0.44: (0.49639626353731705184, 0.4732828232644068718, 0.46382752074029919698),
    0.455: (0.47830035644911320397, 0.45349924044472359574, 0.44307417696020224275),
    -0.5: (0.42430609056700133836, 0.43090011157117196226, 0.42522920354115075945),
    0.9: (0.031151616123624949518, 0.011881982412764796483, 0.0052138675506142931156),
}


@pytest.mark.parametrize("q", sorted(ORACLE))
def test_alpha_against_oracle(q):
    dense = alphas(2, 5, q)[2:]
    blocks = alphas(2, 5, q, blocks=True)[2:]
    assert np.allclose(dense, ORACLE[q], rtol=1e-9, atol=1e-12)
    assert np.allclose(blocks, ORACLE[q], rtol=1e-9, atol=1e-12)


def test_alpha_examples():
    assert alpha(3, 1, 0.7) == pytest.approx(1.0, abs=1e-12)
    assert alpha(2, 2, 0.5) == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(alphas(2, 6, 0.0), 1.0, atol=1e-14)
    with pytest.raises(ValueError):
        alpha(2, 0, 0.5)


def test_alpha_routes():
    for d, q in [(2, 0.6), (3, -0.4)]:
        a = alphas(d, 5, q)
        assert np.allclose(a, dense_alphas(d, 5, q), atol=1e-12)
        assert np.allclose(a, [alpha_by_blocks(d, n, q) for n in range(1, 6)], atol=1e-12)
        rs = r_family(d, 5, q)
        assert np.allclose(a, [np.linalg.eigvalsh(r @ r)[0] for r in rs.matrices[1:]], atol=1e-8)


def test_representative_classes():
    assert representative_classes(3, 3) == [(3, 0, 0), (2, 1, 0), (1, 1, 1)]


def test_bounds_examples():
    assert lemma41_bounds(0.0) == (1.0, 1.0)
    assert lemma41_bounds(0.5)[1] == 2.0
    assert lemma41_bounds(0.7) == lemma41_bounds(-0.7)
    assert lemma41_bounds(0.9)[0] > 0


@pytest.mark.parametrize("d,n_max", [(2, 8), (3, 6)])
@pytest.mark.parametrize("q", [-0.9, -0.5, 0.3, 0.5, 0.9])
def test_bound_containment(d, n_max, q):
    lower, upper = lemma41_bounds(q)
    for a in alphas(d, n_max, q, blocks=True):
        assert lower * (1 - 1e-12) <= a <= upper * (1 + 1e-12)


def test_gauss_examples():
    assert gauss_product(0.0) == 1.0
    assert gauss_theta(0.0) == 1.0
    assert abs(gauss_product(0.44) - gauss_theta(0.44)) < 1e-12
    values = [gauss_product(q) for q in np.linspace(0, 0.9, 10)]
    assert all(b < a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        gauss_product(-0.1)


@given(st.floats(0.0, 0.95))
def test_gauss_identity(q):
    assert abs(gauss_product(q) - gauss_theta(q)) < 1e-12


@pytest.mark.parametrize("q", [0.2, 0.5, 0.8])
def test_theta_partial_sums_bracket(q):
    limit = gauss_theta(q)
    sums = theta_partial_sums(q, 8)
    for k, s in enumerate(sums):
        if q ** (k * k) > 1e-16:
            assert (s - limit) * (-1) ** k >= 0


def test_margin_examples():
    assert condition_17_margin(0.0, 4) == 1.0
    assert condition_17_margin(0.44, 4) > 0
    assert condition_17_margin(0.5, 20) < 0
    assert condition_17_margin(0.3, 2) == pytest.approx(1 - 0.6 - 0.09)
    assert condition_17_margin(-0.3, 3) == condition_17_margin(0.3, 3)


def test_roots():
    assert condition_root(2) == pytest.approx(math.sqrt(2) - 1, abs=1e-10)
    assert abs(condition_root(4) - 0.44005651) < 1e-7
    assert abs(condition_root(8) - condition_root(4)) < 1e-5
    with pytest.raises(ValueError):
        condition_root(1)


def test_threshold():
    assert threshold(0.5) == 0.5
    assert threshold(-0.5) == 0.5


def test_contraction_examples():
    assert contraction_factor(2, 1, 0.0) == 0.0
    a3 = ORACLE[0.3][0]
    assert contraction_factor(2, 1, 0.3) == pytest.approx(0.3 / math.sqrt(0.7 * min(0.7, a3)), rel=1e-10)
    assert all(contraction_factor(2, n, 0.44) < 1 for n in range(1, 6))


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_iterate_distance_level_one(q):
    assert iterate_distance(2, 1, q) == pytest.approx(1 - math.sqrt(1 - q), abs=1e-12)


def test_iterate_distance_q_zero():
    assert all(iterate_distance(2, n, 0.0) == 0.0 for n in range(1, 5))


@pytest.mark.parametrize("q", [0.2, 0.44, -0.44])
def test_contraction_chain(q):
    for n in range(1, 5):
        assert iterate_distance(2, n + 1, q) <= contraction_factor(2, n, q) * iterate_distance(2, n, q) * (1 + 1e-8)


def test_report_verdicts():
    assert prop52_report(2, 8, 0.44).verdict is Verdict.HOLDS
    assert prop52_report(2, 8, 0.455).margin > 0
    zero = prop52_report(2, 6, 0.0)
    assert zero.margin == pytest.approx(1.0) and zero.verdict is Verdict.HOLDS
    assert prop52_report(2, 8, 0.6).verdict is Verdict.FAILS
    with pytest.raises(ValueError):
        prop52_report(2, 1, 0.3)


def test_report_fields():
    r = prop52_report(2, 6, 0.45)
    assert len(r.alphas) == 6 and len(r.iterate_distances) == 5 and len(r.contraction_factors) == 4
    assert r.alphas[0] == pytest.approx(1.0, abs=1e-12)
    assert all(math.isfinite(x) for x in r.iterate_distances)
    assert r.margin == pytest.approx(min(r.alphas) - threshold(0.45))
    assert r.trend == "non-increasing"
    assert set(r.summary()) == {"q", "min_alpha", "last_alpha", "threshold", "margin",
                                "lower_bound", "trend", "verdict"}
    assert "limit" not in " ".join(r.summary())


def test_sufficiency_chain():
    for q in np.round(np.linspace(-0.5, 0.5, 21), 10):
        if condition_17_margin(q, 20) > 0:
            assert prop52_report(2, 6, float(q), blocks=True).verdict is Verdict.HOLDS


def test_spectrum_table():
    rows = spectrum_table(2, 3, 0.5)
    assert [tuple(r) for r in rows] == [SPECTRUM_COLUMNS] * 3
    assert rows[1]["alpha"] == pytest.approx(0.5)
    assert rows[2]["iterate_distance"] is None and rows[1]["contraction_factor"] is None
