import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gflasso.data import PhenotypeMatrix
from gflasso.errors import ConfigurationError, DegenerateColumnError, InvalidEdgeError
from gflasso.graph import TraitGraph, build_graph, edge_weight, pearson, read_edges, write_edges


@pytest.mark.parametrize("a, b, r", [
    ([1, 2, 3], [2, 4, 6], 1.0),
    ([1, 2, 3], [3, 2, 1], -1.0),
    ([1, 2, 3, 4], [1, 3, 2, 4], 0.8),
])
def test_pearson_examples(a, b, r):
    assert pearson(a, b) == pytest.approx(r, abs=1e-12)


def test_pearson_constant_vector():
    with pytest.raises(DegenerateColumnError):
        pearson([1, 1, 1], [1, 2, 3])


def correlated_traits(seed, n=200, k=5):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, 1))
    return PhenotypeMatrix(z * rng.uniform(0.2, 1.0, size=k) + rng.normal(size=(n, k)))


def test_high_threshold_gives_empty_graph():
    y = PhenotypeMatrix(np.random.default_rng(1).normal(size=(100, 4)))
    assert build_graph(y, 0.999).n_edges == 0


def test_zero_threshold_gives_complete_graph():
    y = correlated_traits(2)
    assert build_graph(y, 0.0).n_edges == 5 * 4 // 2


def test_duplicate_column_edge_has_r_one():
    base = np.random.default_rng(3).normal(size=(50, 2))
    y = PhenotypeMatrix(np.column_stack([base, base[:, 0]]))
    g = build_graph(y, 0.7)
    assert (0, 2) in g.edge_set()
    assert g.correlation(0, 2) == pytest.approx(1.0)


def test_threshold_is_strict():
    y = PhenotypeMatrix(np.array([[1.0, 1.0], [2.0, 3.0], [3.0, 2.0], [4.0, 4.0]]))
    assert build_graph(y, 0.8).n_edges == 0
    assert build_graph(y, 0.79).n_edges == 1


@pytest.mark.parametrize("rho", [-0.1, 1.0, 1.5])
def test_rho_out_of_range(rho):
    with pytest.raises(ConfigurationError):
        build_graph(correlated_traits(0), rho)


def test_single_trait_rejected():
    with pytest.raises(ConfigurationError):
        build_graph(PhenotypeMatrix(np.arange(5.0)[:, None]), 0.3)


@pytest.mark.parametrize("r, f, w", [(-0.9, "constant", 1.0), (-0.9, "abs", 0.9), (0.8, "square", 0.64)])
def test_edge_weight(r, f, w):
    g = TraitGraph(2, [(0, 1, r)])
    assert edge_weight(g, 0, 1, f) == pytest.approx(w)
    assert edge_weight(g, 1, 0, f) == pytest.approx(w)


def test_edge_validation():
    with pytest.raises(InvalidEdgeError):
        TraitGraph(3, [(1, 1, 0.5)])
    with pytest.raises(InvalidEdgeError):
        TraitGraph(3, [(0, 1, 0.5), (1, 0, 0.4)])
    with pytest.raises(InvalidEdgeError):
        TraitGraph(2, [(0, 2, 0.5)])
    with pytest.raises(KeyError):
        TraitGraph(3, [(0, 1, 0.5)]).correlation(0, 2)


def test_edge_list_roundtrip(tmp_path):
    y = correlated_traits(4)
    g = build_graph(y, 0.2)
    write_edges(tmp_path / "e.tsv", g)
    back = read_edges(tmp_path / "e.tsv", y.trait_ids)
    assert back.edge_set() == g.edge_set()
    for m, l, r in g.edges:
        assert back.correlation(m, l) == pytest.approx(r, abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 0.9), st.floats(0.0, 0.9))
def test_threshold_monotone(seed, r1, r2):
    lo, hi = sorted((r1, r2))
    y = correlated_traits(seed, n=60)
    assert build_graph(y, hi).edge_set() <= build_graph(y, lo).edge_set()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 4), st.floats(0.1, 10.0), st.floats(-5, 5))
def test_affine_invariance_and_sign_flip(seed, col, scale, shift):
    y = correlated_traits(seed, n=60)
    g = build_graph(y, 0.15)
    pos = y.values.copy()
    pos[:, col] = scale * pos[:, col] + shift
    g_pos = build_graph(PhenotypeMatrix(pos), 0.15)
    assert g_pos.edge_set() == g.edge_set()
    neg = y.values.copy()
    neg[:, col] = -scale * neg[:, col] + shift
    g_neg = build_graph(PhenotypeMatrix(neg), 0.15)
    assert g_neg.edge_set() == g.edge_set()
    for m, l, r in g.edges:
        flipped = -r if col in (m, l) else r
        assert g_neg.correlation(m, l) == pytest.approx(flipped, abs=1e-9)
