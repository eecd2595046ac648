import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import t_test_neglog10
from gflasso.baselines import AssociationScores, ridge, single_marker, t_two_sided_neglog10
from gflasso.data import center_columns, load_coefficients
from gflasso.errors import ConfigurationError


def test_perfect_fit_is_capped():
    x = center_columns(np.arange(10.0)[:, None])
    s = single_marker(x, x.copy())
    assert s.scores[0, 0] == 300.0
    assert single_marker(x, x.copy(), cap=50.0).scores[0, 0] == 50.0


def test_orthogonal_snp_scores_zero():
    x = np.array([[1.0], [-1.0], [1.0], [-1.0]])
    y = np.array([[1.0], [1.0], [-1.0], [-1.0]])
    assert single_marker(x, y).scores[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_matches_frozen_t_test():
    rng = np.random.default_rng(3)
    x = center_columns(rng.binomial(2, 0.3, size=(20, 1)).astype(float))
    y = center_columns(0.8 * x + rng.normal(size=(20, 1)))
    assert t_test_neglog10(x[:, 0], y[:, 0]) == pytest.approx(1.4710038134056287, abs=1e-12)
    assert single_marker(x, y).scores[0, 0] == pytest.approx(1.4710038134056287, abs=1e-6)


def test_far_tail_stays_finite_and_ordered():
    s = t_two_sided_neglog10(np.array([1e3, 1e5, 1e8]), 99, cap=1e6)
    assert np.all(np.isfinite(s))
    assert s[0] < s[1] < s[2]


def test_zero_variance_snp_scores_zero(caplog):
    x = np.column_stack([np.zeros(6), np.arange(6.0) - 2.5])
    y = np.arange(6.0)[:, None] - 2.5
    s = single_marker(x, y)
    assert s.scores[0, 0] == 0.0
    assert "zero variance" in caplog.text


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.floats(0.01, 100.0))
def test_scores_invariant_to_snp_scale(seed, scale):
    rng = np.random.default_rng(seed)
    x = center_columns(rng.normal(size=(25, 3)))
    y = center_columns(x[:, :1] * 0.5 + rng.normal(size=(25, 2)))
    a = single_marker(x, y).scores
    x2 = x.copy()
    x2[:, 1] *= scale
    np.testing.assert_allclose(single_marker(x2, y).scores, a, rtol=1e-8, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_scores_match_oracle(seed):
    rng = np.random.default_rng(seed)
    x = center_columns(rng.normal(size=(15, 2)))
    y = center_columns(0.3 * x[:, :1] + rng.normal(size=(15, 2)))
    s = single_marker(x, y).scores
    for j in range(2):
        for k in range(2):
            assert s[j, k] == pytest.approx(t_test_neglog10(x[:, j], y[:, k]), abs=1e-6)


def test_ridge_large_penalty_shrinks_to_zero():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=(30, 4)), rng.normal(size=(30, 2))
    assert np.abs(ridge(x, y, 1e12).beta).max() < 1e-6


def test_ridge_orthonormal_design():
    q, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(20, 5)))
    y = np.random.default_rng(2).normal(size=(20, 3))
    np.testing.assert_allclose(ridge(q, y, 1e-4).beta, q.T @ y / (1 + 1e-4), atol=1e-9)


def test_ridge_hand_instance():
    x = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    y = np.array([[1.0], [2.0], [3.0]])
    np.testing.assert_allclose(ridge(x, y, 1e-4).beta.ravel(), [0.9999999966671108, 1.9999000066661112],
                               atol=1e-10)


def test_ridge_continuous_in_reg():
    rng = np.random.default_rng(4)
    x, y = rng.normal(size=(30, 6)), rng.normal(size=(30, 2))
    assert np.abs(ridge(x, y, 0.1).beta - ridge(x, y, 0.1 + 1e-8).beta).max() < 1e-7


def test_ridge_rejects_nonpositive_reg():
    with pytest.raises(ConfigurationError):
        ridge(np.eye(3), np.eye(3), 0.0)


def test_scores_save(tmp_path):
    s = AssociationScores(np.array([[1.0, 2.0]]), "neg_log_p", ("snp_a",), ("t1", "t2"))
    s.save(tmp_path / "s.tsv")
    assert load_coefficients(tmp_path / "s.tsv", "single_marker").beta.tolist() == [[1.0, 2.0]]
