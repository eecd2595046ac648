"""Thresholded trait-correlation graphs (relevance networks)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from gflasso.data import PhenotypeMatrix, fmt
from gflasso.errors import ConfigurationError, DegenerateColumnError, InvalidEdgeError, ParseError

WEIGHTINGS = ("constant", "abs", "square")


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ConfigurationError("pearson needs two vectors of equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    na = np.sqrt(da @ da)
    nb = np.sqrt(db @ db)
    if na == 0 or nb == 0:
        raise DegenerateColumnError("correlation undefined for a constant vector")
    return float(np.clip((da @ db) / (na * nb), -1.0, 1.0))


@dataclass(frozen=True)
class TraitGraph:
    """Undirected graph over K traits; each edge ``(m, l, r)`` has ``m < l`` and signed correlation ``r``."""

    n_traits: int
    edges: tuple[tuple[int, int, float], ...]
    threshold_rho: float = 0.0
    trait_ids: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        clean = []
        for m, l, r in self.edges:
            m, l, r = int(m), int(l), float(r)
            if m == l:
                raise InvalidEdgeError(f"self-loop on trait {m}")
            if m > l:
                m, l = l, m
            if not (0 <= m and l < self.n_traits):
                raise InvalidEdgeError(f"edge ({m}, {l}) outside 0..{self.n_traits - 1}")
            if (m, l) in seen:
                raise InvalidEdgeError(f"duplicate edge ({m}, {l})")
            if not -1.0 <= r <= 1.0:
                raise InvalidEdgeError(f"edge ({m}, {l}) has correlation {r} outside [-1, 1]")
            seen.add((m, l))
            clean.append((m, l, r))
        object.__setattr__(self, "edges", tuple(sorted(clean)))
        if not self.trait_ids:
            object.__setattr__(self, "trait_ids", tuple(f"trait_{i + 1}" for i in range(self.n_traits)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(m, l) for m, l, _ in self.edges}

    def correlation(self, m: int, l: int) -> float:
        if m > l:
            m, l = l, m
        for a, b, r in self.edges:
            if a == m and b == l:
                return r
        raise KeyError(f"no edge between traits {m} and {l}")

    def with_edges(self, edges) -> "TraitGraph":
        return TraitGraph(self.n_traits, tuple(edges), self.threshold_rho, self.trait_ids)


def correlation_matrix(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    c = y - y.mean(axis=0)
    norms = np.sqrt((c * c).sum(axis=0))
    return np.clip((c.T @ c) / np.outer(norms, norms), -1.0, 1.0), norms


def build_graph(y: PhenotypeMatrix, rho: float) -> TraitGraph:
    """Connect traits m < l whenever |r_ml| > rho (strict)."""
    if not 0 <= rho < 1:
        raise ConfigurationError(f"threshold rho must lie in [0, 1), got {rho}")
    if y.n_traits < 2:
        raise ConfigurationError("graph construction needs at least two traits")
    corr, norms = correlation_matrix(y.values)
    flat = np.flatnonzero(norms == 0)
    if flat.size:
        name = y.trait_ids[flat[0]]
        raise DegenerateColumnError(f"trait {name!r} is constant; correlation undefined", column=name)
    k = y.n_traits
    edges = [(m, l, float(corr[m, l])) for m in range(k) for l in range(m + 1, k)
             if abs(corr[m, l]) > rho]
    return TraitGraph(k, tuple(edges), rho, y.trait_ids)


def weight_fn(f: str):
    if f == "constant":
        return lambda r: 1.0
    if f == "abs":
        return abs
    if f == "square":
        return lambda r: r * r
    raise ConfigurationError(f"unknown weighting {f!r}; expected one of {WEIGHTINGS}")


def edge_weight(graph: TraitGraph, m: int, l: int, f: str) -> float:
    """Fusion weight f(r_ml) of an existing edge."""
    return float(weight_fn(f)(graph.correlation(m, l)))


def write_edges(path, graph: TraitGraph) -> None:
    with Path(path).open("w") as fh:
        fh.write("trait_m\ttrait_l\tr\n")
        for m, l, r in graph.edges:
            fh.write(f"{graph.trait_ids[m]}\t{graph.trait_ids[l]}\t{fmt(r)}\n")


def read_edges(path, trait_ids: Sequence[str]) -> TraitGraph:
    """Read an edge-list TSV, resolving trait names against ``trait_ids``."""
    index = {t: i for i, t in enumerate(trait_ids)}
    edges = []
    with Path(path).open() as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    if lines and lines[0].split("\t")[:2] == ["trait_m", "trait_l"]:
        lines = lines[1:]
    for i, ln in enumerate(lines, start=1):
        parts = ln.split("\t")
        if len(parts) != 3:
            raise ParseError(f"{path}: edge row {i} needs 3 fields", row=i)
        a, b, r = parts
        if a not in index or b not in index:
            raise InvalidEdgeError(f"{path}: edge row {i} names unknown trait")
        try:
            edges.append((index[a], index[b], float(r)))
        except ValueError:
            raise ParseError(f"{path}: edge row {i} has non-numeric r {r!r}", row=i) from None
    return TraitGraph(len(trait_ids), tuple(edges), 0.0, tuple(trait_ids))
