"""Replicated simulation protocol: simulate, select, refit, evaluate, aggregate."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from gflasso.baselines import ridge, single_marker
from gflasso.errors import ConfigurationError, GFlassoError
from gflasso.estimator import FAMILIES, FitConfig
from gflasso.evaluation import aggregate, count_nonzero, prediction_error, roc, write_records
from gflasso.graph import TraitGraph, build_graph
from gflasso.selection import SearchConfig, select_and_fit
from gflasso.simulation import SimulationSpec, simulate

METHODS = ("single_marker", "ridge", *FAMILIES)
GRAPH_METHODS = ("gc", "gw1", "gw2")
SUMMARY_COLUMNS = ["replicate", "seed", "method", "rho", "auc", "pred_error", "nonzero", "s1", "s2",
                   "max_kkt"]


@dataclass(frozen=True)
class Protocol:
    replicates: int = 50
    seed: int = 1
    simulation: SimulationSpec = field(default_factory=lambda: SimulationSpec(n_samples=100))
    methods: tuple[str, ...] = METHODS
    rhos: tuple[float, ...] = (0.3,)
    search: SearchConfig = field(default_factory=SearchConfig)
    ridge_reg: float = 1e-4
    level: str = "pair"

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigurationError("replicate count must be >= 1")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ConfigurationError(f"unknown methods {sorted(bad)}")
        if isinstance(self.simulation, dict):
            object.__setattr__(self, "simulation", SimulationSpec.from_dict(self.simulation))
        if isinstance(self.search, dict):
            d = dict(self.search)
            if "fit" in d and isinstance(d["fit"], dict):
                d["fit"] = FitConfig(**d["fit"])
            if d.get("grid") is not None:
                d["grid"] = tuple(tuple(map(float, g)) for g in d["grid"])
            object.__setattr__(self, "search", SearchConfig(**d))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "rhos", tuple(float(r) for r in self.rhos))

    @classmethod
    def from_dict(cls, d: dict) -> "Protocol":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown protocol fields: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["simulation"] = self.simulation.to_dict()
        d["methods"] = list(self.methods)
        d["rhos"] = list(self.rhos)
        s = asdict(self.search)
        s["grid"] = [list(g) for g in self.search.grid] if self.search.grid else None
        s["fit"]["qp"] = None
        d["search"] = s
        return d

    def replicate_seed(self, i: int) -> int:
        return int(np.random.SeedSequence([self.seed, i]).generate_state(1)[0])


def run_replicate(protocol: Protocol, i: int) -> list[dict]:
    seed = protocol.replicate_seed(i)
    try:
        return _run_replicate(protocol, i, seed)
    except GFlassoError as exc:
        raise GFlassoError(f"replicate {i} (seed {seed}) failed: {exc}") from exc


def _run_replicate(protocol: Protocol, i: int, seed: int) -> list[dict]:
    data = simulate(protocol.simulation, seed)
    x, y, truth = data.genotypes, data.phenotypes, data.truth
    xc = x.centered
    yv = y.values
    x_test = data.test_genotypes.centered_with(x.means)
    y_test = data.test_phenotypes.values
    search = SearchConfig(**{**asdict(protocol.search), "seed": seed,
                             "fit": protocol.search.fit, "grid": protocol.search.grid})
    rows = []

    def record(method, rho, scores, b=None, s1=math.nan, s2=math.nan, kkt=math.nan):
        rows.append({
            "replicate": i, "seed": seed, "method": method, "rho": "" if rho is None else rho,
            "auc": roc(scores, truth, protocol.level).auc,
            "pred_error": prediction_error(b, x_test, y_test) if b is not None and x_test.shape[0] else math.nan,
            "nonzero": count_nonzero(b, protocol.search.fit.snap) if b is not None else math.nan,
            "s1": s1, "s2": s2, "max_kkt": kkt,
        })

    if "single_marker" in protocol.methods:
        record("single_marker", None, single_marker(xc, yv))
    if "ridge" in protocol.methods:
        b = ridge(xc, yv, protocol.ridge_reg)
        record("ridge", None, b, b)
    lasso_cache: dict = {}
    empty = TraitGraph(y.n_traits, ())
    if "lasso" in protocol.methods:
        b, trace = select_and_fit(xc, yv, empty, "lasso", search, lasso_cache=lasso_cache)
        record("lasso", None, b, b, *trace.chosen, b.info.get("kkt_residual", math.nan))
    for rho in protocol.rhos:
        graph = build_graph(y, rho)
        for fam in GRAPH_METHODS:
            if fam in protocol.methods:
                b, trace = select_and_fit(xc, yv, graph, fam, search, lasso_cache=lasso_cache)
                record(fam, rho, b, b, *trace.chosen, b.info.get("kkt_residual", math.nan))
    return rows


def run_protocol(protocol: Protocol, jobs: int = 1) -> list[dict]:
    idx = range(protocol.replicates)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(run_replicate, [protocol] * protocol.replicates, idx))
    else:
        parts = [run_replicate(protocol, i) for i in idx]
    return [r for part in parts for r in part]


def method_label(row: dict) -> str:
    return row["method"] if row["rho"] == "" else f"{row['method']}@{row['rho']}"


def paired_values(rows: list[dict], label: str, metric: str) -> np.ndarray:
    return np.array([r[metric] for r in sorted(rows, key=lambda r: r["replicate"])
                     if method_label(r) == label], dtype=float)


def sign_test(a, b) -> float:
    """One-sided paired sign test p-value for a > b; ties are dropped."""
    d = np.asarray(a) - np.asarray(b)
    wins = int(np.sum(d > 0))
    n = int(np.sum(d != 0))
    if n == 0:
        return 1.0
    return float(stats.binomtest(wins, n, 0.5, alternative="greater").pvalue)


def write_outputs(out_dir, protocol: Protocol, rows: list[dict]) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_records(out / "replicates.tsv", rows, SUMMARY_COLUMNS)
    labelled = [{**r, "method": method_label(r)} for r in rows]
    write_records(out / "aggregate.tsv", aggregate(labelled))
    manifest = {"command": "experiment", "protocol": protocol.to_dict(),
                "replicate_seeds": [protocol.replicate_seed(i) for i in range(protocol.replicates)]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
