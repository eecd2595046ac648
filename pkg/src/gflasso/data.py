"""Genotype/phenotype containers, TSV ingestion and column preprocessing.

All TSV files share one layout: a header row whose first cell names the row
id column, followed by one row per individual (or per SNP for coefficient
and score matrices). Numbers use a period decimal separator. Missing cells
are not supported.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from gflasso.errors import (
    ConfigurationError,
    DegenerateColumnError,
    DimensionError,
    ParseError,
    ValidationError,
)

ESTIMATOR_TAGS = ("single_marker", "ridge", "lasso", "gc", "gw1", "gw2")


def fmt(v: float) -> str:
    """Shortest round-trip float text; keeps TSV output byte-stable."""
    return repr(float(v))


def center_columns(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"cannot center matrix of shape {m.shape}")
    return m - m.mean(axis=0)


def standardize_columns(m, names: Sequence[str] | None = None) -> np.ndarray:
    """Center each column and scale it to unit sample (N-1) standard deviation."""
    c = center_columns(m)
    if c.shape[0] < 2:
        raise DimensionError("standardization needs at least two rows")
    sd = c.std(axis=0, ddof=1)
    scale = np.maximum(np.abs(np.asarray(m, dtype=float)).max(axis=0), 1.0)
    bad = np.flatnonzero(sd <= 1e-12 * scale)
    if bad.size:
        j = int(bad[0])
        label = names[j] if names is not None else str(j)
        raise DegenerateColumnError(f"column {label!r} has zero variance", column=label)
    return c / sd


@dataclass(frozen=True)
class NoiseSpec:
    variance: float = 1.0
    mean: float = 0.0
    distribution: str = "gaussian"

    def __post_init__(self):
        if not self.variance > 0:
            raise ConfigurationError(f"noise variance must be > 0, got {self.variance}")
        if self.distribution != "gaussian":
            raise ConfigurationError(f"unsupported noise distribution {self.distribution!r}")
        if self.mean != 0.0:
            raise ConfigurationError("noise mean must be 0")


def _default_ids(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


@dataclass(frozen=True)
class GenotypeMatrix:
    """N x J minor-allele counts. ``centered`` subtracts the column means."""

    values: np.ndarray
    snp_ids: tuple[str, ...] = ()
    sample_ids: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise DimensionError(f"genotype matrix must be 2-D, got shape {v.shape}")
        if not np.isin(v, (0, 1, 2)).all():
            i, j = np.argwhere(~np.isin(v, (0, 1, 2)))[0]
            raise ValidationError(f"genotype entry {v[i, j]!r} at row {i}, column {j} not in {{0,1,2}}",
                                  row=int(i), column=int(j))
        v = v.astype(np.int8)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if not self.snp_ids:
            object.__setattr__(self, "snp_ids", _default_ids("snp_", v.shape[1]))
        if not self.sample_ids:
            object.__setattr__(self, "sample_ids", _default_ids("ind_", v.shape[0]))
        if len(self.snp_ids) != v.shape[1] or len(self.sample_ids) != v.shape[0]:
            raise DimensionError("id lists do not match genotype shape")

    @property
    def n_individuals(self) -> int:
        return self.values.shape[0]

    @property
    def n_snps(self) -> int:
        return self.values.shape[1]

    @property
    def means(self) -> np.ndarray:
        return self.values.mean(axis=0)

    @property
    def centered(self) -> np.ndarray:
        return center_columns(self.values)

    def centered_with(self, means) -> np.ndarray:
        """Center with externally supplied (training) column means."""
        return self.values - np.asarray(means, dtype=float)

    def take(self, rows) -> "GenotypeMatrix":
        rows = np.asarray(rows)
        return GenotypeMatrix(self.values[rows], self.snp_ids,
                              tuple(self.sample_ids[i] for i in rows))


@dataclass(frozen=True)
class PhenotypeMatrix:
    """N x K trait measurements."""

    values: np.ndarray
    trait_ids: tuple[str, ...] = ()
    sample_ids: tuple[str, ...] = ()
    standardized: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise DimensionError(f"phenotype matrix must be 2-D, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValidationError("phenotype matrix has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if not self.trait_ids:
            object.__setattr__(self, "trait_ids", _default_ids("trait_", v.shape[1]))
        if not self.sample_ids:
            object.__setattr__(self, "sample_ids", _default_ids("ind_", v.shape[0]))
        if len(self.trait_ids) != v.shape[1] or len(self.sample_ids) != v.shape[0]:
            raise DimensionError("id lists do not match phenotype shape")

    @property
    def n_individuals(self) -> int:
        return self.values.shape[0]

    @property
    def n_traits(self) -> int:
        return self.values.shape[1]

    def centered(self) -> "PhenotypeMatrix":
        return PhenotypeMatrix(center_columns(self.values), self.trait_ids, self.sample_ids,
                               self.standardized)

    def standardize(self) -> "PhenotypeMatrix":
        return PhenotypeMatrix(standardize_columns(self.values, self.trait_ids), self.trait_ids,
                               self.sample_ids, True)

    def take(self, rows) -> "PhenotypeMatrix":
        rows = np.asarray(rows)
        return PhenotypeMatrix(self.values[rows], self.trait_ids,
                               tuple(self.sample_ids[i] for i in rows), self.standardized)


@dataclass(frozen=True)
class CoefficientMatrix:
    beta: np.ndarray
    estimator_tag: str
    snp_ids: tuple[str, ...] = ()
    trait_ids: tuple[str, ...] = ()
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        b = np.array(self.beta, dtype=float)
        if b.ndim != 2:
            raise DimensionError(f"coefficient matrix must be 2-D, got shape {b.shape}")
        if not np.isfinite(b).all():
            raise ValidationError("coefficient matrix has non-finite entries")
        if self.estimator_tag not in ESTIMATOR_TAGS:
            raise ConfigurationError(f"unknown estimator tag {self.estimator_tag!r}")
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)
        if not self.snp_ids:
            object.__setattr__(self, "snp_ids", _default_ids("snp_", b.shape[0]))
        if not self.trait_ids:
            object.__setattr__(self, "trait_ids", _default_ids("trait_", b.shape[1]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.beta.shape


# --- TSV I/O ---------------------------------------------------------------

def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter="\t") if r and not r[0].startswith("#")]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise ParseError(f"{path}: row {i + 1} has {len(r)} fields, header has {len(header)}", row=i + 1)
    return header, body


def _parse_cells(path, header, body, conv, what):
    out = np.empty((len(body), len(header) - 1), dtype=float)
    for i, r in enumerate(body):
        for j, cell in enumerate(r[1:]):
            cell = cell.strip()
            if cell == "":
                raise ParseError(f"{path}: missing value at row {i + 1}, column {header[j + 1]!r}",
                                 row=i + 1, column=header[j + 1])
            try:
                out[i, j] = conv(cell)
            except ValueError:
                raise ParseError(f"{path}: non-numeric {what} {cell!r} at row {i + 1}, "
                                 f"column {header[j + 1]!r}", row=i + 1, column=header[j + 1]) from None
    return out


def load_matrix(path, kind: str):
    """Read a genotype or phenotype TSV. No preprocessing is applied."""
    header, body = _read_rows(path)
    ids = tuple(r[0] for r in body)
    cols = tuple(header[1:])
    if kind == "genotype":
        vals = _parse_cells(path, header, body, int, "genotype")
        bad = np.argwhere(~np.isin(vals, (0, 1, 2)))
        if bad.size:
            i, j = bad[0]
            raise ValidationError(f"{path}: genotype {int(vals[i, j])} at row {i + 1}, column {cols[j]!r} "
                                  "not in {0,1,2}", row=int(i) + 1, column=cols[j])
        return GenotypeMatrix(vals.astype(np.int8), cols, ids)
    if kind == "phenotype":
        vals = _parse_cells(path, header, body, float, "phenotype")
        return PhenotypeMatrix(vals, cols, ids)
    raise ConfigurationError(f"unknown matrix kind {kind!r}")


def load_coefficients(path, estimator_tag: str | None = None) -> CoefficientMatrix:
    header, body = _read_rows(path)
    tag = estimator_tag
    with Path(path).open() as fh:
        first = fh.readline()
    if tag is None and first.startswith("# estimator="):
        tag = first.strip().split("=", 1)[1]
    vals = _parse_cells(path, header, body, float, "coefficient")
    return CoefficientMatrix(vals, tag or "lasso", tuple(r[0] for r in body), tuple(header[1:]))


def write_tsv(path, row_ids, col_ids, values, corner: str = "id", comment: str | None = None,
              int_values: bool = False) -> None:
    values = np.asarray(values)
    with Path(path).open("w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("\t".join([corner, *col_ids]) + "\n")
        for rid, row in zip(row_ids, values):
            cells = [str(int(v)) for v in row] if int_values else [fmt(v) for v in row]
            fh.write("\t".join([rid, *cells]) + "\n")


def save_matrix(path, m) -> None:
    """Write a genotype, phenotype or coefficient matrix in its TSV layout."""
    if isinstance(m, GenotypeMatrix):
        write_tsv(path, m.sample_ids, m.snp_ids, m.values, int_values=True)
    elif isinstance(m, PhenotypeMatrix):
        write_tsv(path, m.sample_ids, m.trait_ids, m.values)
    elif isinstance(m, CoefficientMatrix):
        write_tsv(path, m.snp_ids, m.trait_ids, m.beta, corner="snp",
                  comment=f"estimator={m.estimator_tag}")
    else:
        raise TypeError(f"cannot save {type(m).__name__}")
