import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import pairwise_auc
from gflasso.errors import ConfigurationError, DimensionError
from gflasso.evaluation import UndefinedRocError, aggregate, count_nonzero, prediction_error, roc


def test_perfect_scores():
    truth = np.array([[0.5, 0.0], [0.0, 0.5]])
    assert roc(np.abs(truth), truth).auc == 1.0


def test_constant_scores():
    curve = roc(np.ones((2, 2)), np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
    assert curve.auc == 0.5


def test_four_pair_toy():
    scores = np.array([[0.9, 0.8, 0.3, 0.1]])
    truth = np.array([[1.0, 0.0, 1.0, 0.0]])
    assert roc(scores, truth).auc == pytest.approx(0.75)


def test_needs_both_classes():
    with pytest.raises(UndefinedRocError):
        roc(np.ones((2, 2)), np.ones((2, 2)))


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        roc(np.ones((2, 3)), np.eye(2))


def test_snp_level_positives():
    scores = np.array([[0.1, 0.9], [0.2, 0.3], [0.0, 0.05]])
    truth = np.array([[0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    assert roc(scores, truth, level="snp").auc == 1.0


scores_and_labels = st.integers(2, 100).flatmap(lambda n: st.tuples(
    arrays(float, n, elements=st.sampled_from([0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 3.5])),
    arrays(bool, n)))


@settings(max_examples=100)
@given(scores_and_labels)
def test_auc_equals_mann_whitney(pair):
    s, lab = pair
    if lab.all() or not lab.any():
        return
    assert roc(s[None, :], lab[None, :]).auc == pytest.approx(pairwise_auc(s, lab), abs=1e-12)


@settings(max_examples=50)
@given(scores_and_labels)
def test_auc_invariant_to_increasing_transform(pair):
    s, lab = pair
    if lab.all() or not lab.any():
        return
    a = roc(s[None, :], lab[None, :])
    b = roc(np.exp(3 * s)[None, :] + 7, lab[None, :])
    assert a.auc == b.auc
    assert np.array_equal(a.fpr, b.fpr) and np.array_equal(a.tpr, b.tpr)


def test_prediction_error_examples():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(5, 2))
    b = np.array([[1.0, 0.0], [0.5, -1.0]])
    assert prediction_error(b, x, x @ b) == pytest.approx(0.0, abs=1e-24)
    y = rng.normal(size=(5, 2))
    assert prediction_error(np.zeros((2, 2)), x, y) == pytest.approx((y * y).sum())
    # 2x2 by hand: residuals (1-1, 2-0; 3-2, 4-0) -> 0 + 4 + 1 + 16
    x2 = np.array([[1.0, 0.0], [0.0, 2.0]])
    y2 = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert prediction_error(np.array([[1.0, 0.0], [1.0, 0.0]]), x2, y2) == 21.0


entries = st.one_of(st.just(0.0), st.floats(1e-3, 10), st.floats(-10, -1e-3))


@settings(max_examples=50)
@given(arrays(float, (4, 3), elements=entries), arrays(float, (3, 2), elements=entries),
       arrays(float, (4, 2), elements=entries))
def test_prediction_error_nonnegative(x, b, y):
    e = prediction_error(b, x, y)
    assert e >= 0
    assert (e == 0) == np.all(y - x @ b == 0)


def test_count_nonzero():
    assert count_nonzero(np.zeros((3, 3))) == 0
    b = np.zeros((3, 3))
    b[1, 2] = 0.5
    assert count_nonzero(b) == 1
    b[0, 0] = 1e-9
    assert count_nonzero(b) == 1
    with pytest.raises(ConfigurationError):
        count_nonzero(b, -1.0)


def test_aggregate_mean_sd():
    rows = [{"method": "a", "auc": 0.5, "pred_error": 1.0, "nonzero": 2},
            {"method": "a", "auc": 0.7, "pred_error": 3.0, "nonzero": 4},
            {"method": "b", "auc": 0.9, "pred_error": float("nan"), "nonzero": 1}]
    out = aggregate(rows)
    assert [r["method"] for r in out] == ["a", "b"]
    assert out[0]["auc_mean"] == pytest.approx(0.6)
    assert out[0]["auc_sd"] == pytest.approx(np.std([0.5, 0.7], ddof=1))
    assert np.isnan(out[1]["pred_error_mean"])
