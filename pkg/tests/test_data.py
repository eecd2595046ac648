import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gflasso.data import (CoefficientMatrix, GenotypeMatrix, PhenotypeMatrix, center_columns,
                          load_coefficients, load_matrix, save_matrix, standardize_columns)
from gflasso.errors import DegenerateColumnError, ParseError, ValidationError

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def write(path, text):
    path.write_text(text)
    return path


def test_load_genotypes(tmp_path):
    p = write(tmp_path / "g.tsv", "id\tsnp_a\tsnp_b\ns1\t0\t1\ns2\t2\t1\ns3\t1\t0\n")
    g = load_matrix(p, "genotype")
    assert (g.n_individuals, g.n_snps) == (3, 2)
    assert g.values.tolist() == [[0, 1], [2, 1], [1, 0]]
    assert g.snp_ids == ("snp_a", "snp_b")
    assert g.sample_ids == ("s1", "s2", "s3")


def test_genotype_out_of_domain_names_cell(tmp_path):
    p = write(tmp_path / "g.tsv", "id\tsnp_a\tsnp_b\ns1\t0\t1\ns2\t3\t1\n")
    with pytest.raises(ValidationError, match="snp_a") as err:
        load_matrix(p, "genotype")
    assert err.value.row == 2
    assert err.value.column == "snp_a"


def test_load_phenotypes(tmp_path):
    rows = "\n".join(f"s{i}\t{i * 0.5}\t{-i}\t{i * i}" for i in range(4))
    p = write(tmp_path / "y.tsv", "id\tt1\tt2\tt3\n" + rows + "\n")
    y = load_matrix(p, "phenotype")
    assert (y.n_individuals, y.n_traits) == (4, 3)
    assert y.values[3].tolist() == [1.5, -3.0, 9.0]


@pytest.mark.parametrize("text", ["id\ta\ns1\tx\n", "id\ta\tb\ns1\t1\n", "id\ta\ns1\t\n", ""])
def test_malformed_files(tmp_path, text):
    with pytest.raises(ParseError):
        load_matrix(write(tmp_path / "bad.tsv", text), "phenotype")


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        load_matrix(tmp_path / "absent.tsv", "genotype")


@pytest.mark.parametrize("col, expected", [
    ([1, 2, 3], [-1, 0, 1]),
    ([5, 5], [0, 0]),
    ([0, 1, 2, 2], [-1.25, -0.25, 0.75, 0.75]),
])
def test_center_columns(col, expected):
    out = center_columns(np.array(col, float)[:, None])
    np.testing.assert_allclose(out[:, 0], expected, atol=1e-15)


def test_standardize_uses_sample_sd():
    # sample sd of (1, 2, 3) is 1, so the standardized column is (-1, 0, 1)
    out = standardize_columns(np.array([[1.0], [2.0], [3.0]]))
    np.testing.assert_allclose(out[:, 0], [-1.0, 0.0, 1.0], atol=1e-15)
    x = np.array([2.0, 7.0, 1.0, 4.0])
    np.testing.assert_allclose(standardize_columns(x[:, None])[:, 0], (x - x.mean()) / x.std(ddof=1))


def test_standardize_constant_column_names_it():
    with pytest.raises(DegenerateColumnError, match="height"):
        standardize_columns(np.array([[1.0, 4.0], [2.0, 4.0], [3.0, 4.0]]), names=["weight", "height"])


def test_standardize_idempotent_on_standardized():
    z = standardize_columns(np.random.default_rng(0).normal(size=(30, 4)))
    np.testing.assert_allclose(standardize_columns(z), z, atol=1e-6)


@given(arrays(float, st.tuples(st.integers(2, 12), st.integers(1, 5)), elements=finite))
def test_center_idempotent(m):
    c = center_columns(m)
    np.testing.assert_allclose(center_columns(c), c, atol=1e-12 * max(1.0, np.abs(m).max()))


@given(arrays(float, st.tuples(st.integers(3, 12), st.integers(1, 4)), elements=finite))
def test_standardize_after_center(m):
    sd = m.std(axis=0, ddof=1)
    if np.any(sd < 1e-6 * (1 + np.abs(m).max())):
        return
    np.testing.assert_allclose(standardize_columns(center_columns(m)), standardize_columns(m), atol=1e-8)


@settings(max_examples=30)
@given(arrays(np.int8, st.tuples(st.integers(1, 8), st.integers(1, 6)), elements=st.integers(0, 2)))
def test_genotype_roundtrip_exact(tmp_path_factory, vals):
    p = tmp_path_factory.mktemp("g") / "g.tsv"
    g = GenotypeMatrix(vals)
    save_matrix(p, g)
    back = load_matrix(p, "genotype")
    assert np.array_equal(back.values, g.values)
    assert back.snp_ids == g.snp_ids and back.sample_ids == g.sample_ids


@settings(max_examples=30)
@given(arrays(float, st.tuples(st.integers(1, 8), st.integers(1, 5)),
              elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)))
def test_phenotype_roundtrip(tmp_path_factory, vals):
    p = tmp_path_factory.mktemp("y") / "y.tsv"
    y = PhenotypeMatrix(vals)
    save_matrix(p, y)
    np.testing.assert_allclose(load_matrix(p, "phenotype").values, vals, rtol=1e-12, atol=1e-12)


def test_coefficient_roundtrip_keeps_tag(tmp_path):
    b = CoefficientMatrix(np.array([[0.5, 0.0], [-1.25, 2.0]]), "gw2", ("a", "b"), ("t1", "t2"))
    save_matrix(tmp_path / "b.tsv", b)
    back = load_coefficients(tmp_path / "b.tsv")
    assert back.estimator_tag == "gw2"
    assert np.array_equal(back.beta, b.beta)
    assert back.snp_ids == ("a", "b")


def test_genotype_centering_with_training_means():
    train = GenotypeMatrix(np.array([[0, 2], [2, 2]], dtype=np.int8))
    test = GenotypeMatrix(np.array([[1, 0]], dtype=np.int8))
    np.testing.assert_allclose(test.centered_with(train.means), [[0.0, -2.0]])
