"""Choosing the budgets (s1, s2) by validation error.

The default search starts from a two-stage line search (lasso sweep over s1,
then a sweep over s2 from 0 at the chosen s1) and then takes finite-difference
gradient steps on the validation error surface. Steps that do not lower the
error are rejected and the step size is halved.

Data are centered once on the full sample; folds reuse that centering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from gflasso.data import CoefficientMatrix, fmt
from gflasso.errors import ConfigurationError
from gflasso.estimator import FitConfig, FitSpec, _xy, fit, fusion_penalty
from gflasso.graph import TraitGraph


@dataclass(frozen=True)
class SearchConfig:
    """Search settings.

    Exactly one of ``folds`` (k-fold) or ``holdout`` (single validation set
    of that many samples) is used; ``folds`` wins when both are set. ``eta``
    and ``h`` default to 0.1 and 0.01 times ``(s1_init + 1)``.
    """

    mode: str = "gradient"
    eta: float | None = None
    h: float | None = None
    max_steps: int = 50
    max_halvings: int = 8
    rel_tol: float = 1e-6
    folds: int | None = None
    holdout: int | None = 30
    n_sweep: int = 10
    sweep_min_frac: float = 0.01
    grid: tuple[tuple[float, float], ...] | None = None
    seed: int = 0
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        if self.mode not in ("gradient", "grid"):
            raise ConfigurationError(f"unknown search mode {self.mode!r}")
        if self.eta is not None and not self.eta > 0:
            raise ConfigurationError("eta must be > 0")
        if self.h is not None and not self.h > 0:
            raise ConfigurationError("h must be > 0")
        if self.folds is None and self.holdout is None:
            raise ConfigurationError("set folds or holdout")
        if self.folds is not None and self.folds < 2:
            raise ConfigurationError("folds must be >= 2")
        if self.n_sweep < 2:
            raise ConfigurationError("n_sweep must be >= 2")
        if self.mode == "grid" and not self.grid:
            raise ConfigurationError("grid mode needs an explicit (s1, s2) lattice")


@dataclass
class SearchTrace:
    evaluations: list[tuple[float, float, float]] = field(default_factory=list)
    init: tuple[float, float] | None = None
    steps: list[tuple[int, float, float, float]] = field(default_factory=list)

    @property
    def chosen(self) -> tuple[float, float]:
        best = min(range(len(self.evaluations)), key=lambda i: (self.evaluations[i][2], i))
        s1, s2, _ = self.evaluations[best]
        return s1, s2

    @property
    def chosen_error(self) -> float:
        return min(e[2] for e in self.evaluations)

    def save(self, path) -> None:
        """One row per error evaluation, in evaluation order."""
        with Path(path).open("w") as fh:
            fh.write("step\ts1\ts2\tcv_error\n")
            for i, (s1, s2, c) in enumerate(self.evaluations):
                fh.write(f"{i}\t{fmt(s1)}\t{fmt(s2)}\t{fmt(c)}\n")


def fold_indices(n: int, folds: int | None, holdout: int | None, seed: int) -> list[np.ndarray]:
    """Validation index sets; a pure function of (n, folds/holdout, seed)."""
    perm = np.random.default_rng([int(seed), n]).permutation(n)
    if folds is not None:
        if folds < 2:
            raise ConfigurationError("folds must be >= 2")
        parts = np.array_split(perm, folds)
        if min(p.size for p in parts) < 2:
            raise ConfigurationError(f"{folds} folds over {n} samples leaves a fold with < 2 samples")
        return [np.sort(p) for p in parts]
    if not 2 <= holdout <= n - 2:
        raise ConfigurationError(f"holdout of {holdout} samples invalid for N={n}")
    return [np.sort(perm[n - holdout:])]


def cv_error(x, y, graph: TraitGraph, spec: FitSpec, folds: Sequence[np.ndarray],
             config: FitConfig | None = None) -> float:
    """Held-out SSE summed over validation sets, each fit on its complement."""
    xv, yv = _xy(x, y)
    n = xv.shape[0]
    errs = []
    for val in folds:
        val = np.asarray(val)
        if val.size < 2 or n - val.size < 2:
            raise ConfigurationError("each fold needs at least 2 validation and 2 training samples")
        train = np.setdiff1d(np.arange(n), val)
        if spec.s1 == 0:
            beta = np.zeros((xv.shape[1], yv.shape[1]))
        else:
            beta = fit(xv[train], yv[train], graph, spec, config).beta
        r = yv[val] - xv[val] @ beta
        errs.append(float((r * r).sum()))
    return float(np.sum(errs))


class _Evaluator:
    """Memoized C(s1, s2) recording every distinct evaluation in order."""

    def __init__(self, fn: Callable[[float, float], float], trace: SearchTrace):
        self.fn = fn
        self.trace = trace
        self.cache: dict[tuple[float, float], float] = {}

    def __call__(self, s1: float, s2: float) -> float:
        key = (float(s1), float(s2))
        if key not in self.cache:
            c = float(self.fn(*key))
            self.cache[key] = c
            self.trace.evaluations.append((key[0], key[1], c))
        return self.cache[key]


def make_error_fn(x, y, graph, family, config: SearchConfig, lasso_cache: dict | None = None):
    """C(s1, s2) on the configured folds; an infinite s2 means a plain lasso fit.

    ``lasso_cache`` may be shared between families on the same data, since
    the lasso errors do not depend on the graph.
    """
    xv, yv = _xy(x, y)
    folds = fold_indices(xv.shape[0], config.folds, config.holdout if config.folds is None else None,
                         config.seed)

    def fn(s1, s2):
        if math.isinf(s2):
            if lasso_cache is not None and s1 in lasso_cache:
                return lasso_cache[s1]
            c = cv_error(xv, yv, graph, FitSpec("lasso", s1), folds, config.fit)
            if lasso_cache is not None:
                lasso_cache[s1] = c
            return c
        return cv_error(xv, yv, graph, FitSpec(family, s1, s2), folds, config.fit)

    return fn


def s1_upper(x, y) -> float:
    """L1 norm of the least-squares (minimum-norm) solution; larger budgets are inactive."""
    xv, yv = _xy(x, y)
    return float(np.abs(np.linalg.lstsq(xv, yv, rcond=None)[0]).sum())


def sweep_values(upper: float, n: int, min_frac: float) -> list[float]:
    """0 followed by a geometric ladder up to ``upper``."""
    if upper <= 0:
        return [0.0]
    return [0.0, *np.geomspace(min_frac * upper, upper, n - 1).tolist()]


def initialize(x, y, graph: TraitGraph, family: str, config: SearchConfig,
               evaluate: Callable[[float, float], float] | None = None) -> tuple[float, float]:
    """Two-stage start: lasso sweep over s1, then an s2 sweep from 0 at that s1."""
    if evaluate is None:
        evaluate = make_error_fn(x, y, graph, family, config)
    s1_grid = sweep_values(s1_upper(x, y), config.n_sweep, config.sweep_min_frac)
    errs = [evaluate(s1, math.inf) for s1 in s1_grid]
    s1_0 = s1_grid[int(np.argmin(errs))]
    if family == "lasso" or graph.n_edges == 0:
        return s1_0, math.inf
    xv, yv = _xy(x, y)
    if s1_0 == 0:
        return s1_0, 0.0
    lasso_b = fit(xv, yv, graph, FitSpec("lasso", s1_0), config.fit).beta
    s2_max = fusion_penalty(lasso_b, graph, FitSpec(family).weighting)
    s2_grid = np.linspace(0.0, s2_max, config.n_sweep).tolist() if s2_max > 0 else [0.0]
    errs = [evaluate(s1_0, s2) for s2 in s2_grid]
    return s1_0, s2_grid[int(np.argmin(errs))]


def descend(evaluate: Callable[[float, float], float], init: tuple[float, float], config: SearchConfig,
            trace: SearchTrace | None = None) -> SearchTrace:
    """Finite-difference gradient descent on C(s1, s2) with backtracking.

    ``evaluate`` may be any callable; an infinite s2 freezes that coordinate.
    """
    trace = trace if trace is not None else SearchTrace()
    ev = evaluate if isinstance(evaluate, _Evaluator) else _Evaluator(evaluate, trace)
    s1, s2 = float(init[0]), float(init[1])
    trace.init = (s1, s2)
    scale = s1 + 1.0
    eta = config.eta if config.eta is not None else 0.1 * scale
    h = config.h if config.h is not None else 0.01 * scale
    fixed_s2 = math.isinf(s2)
    c = ev(s1, s2)
    trace.steps.append((0, s1, s2, c))
    halvings = 0
    for step in range(1, config.max_steps + 1):
        g1 = (ev(s1 + h, s2) - c) / h
        g2 = 0.0 if fixed_s2 else (ev(s1, s2 + h) - c) / h
        while True:
            n1 = max(0.0, s1 - eta * g1)
            n2 = s2 if fixed_s2 else max(0.0, s2 - eta * g2)
            if (n1, n2) == (s1, s2):
                return trace
            c_new = ev(n1, n2)
            if c_new < c:
                break
            eta /= 2.0
            halvings += 1
            if halvings > config.max_halvings:
                return trace
        improvement = c - c_new
        s1, s2, c = n1, n2, c_new
        trace.steps.append((step, s1, s2, c))
        if improvement < config.rel_tol * c:
            break
    return trace


def gradient_search(x, y, graph: TraitGraph, family: str, config: SearchConfig,
                    evaluate: Callable[[float, float], float] | None = None) -> SearchTrace:
    trace = SearchTrace()
    ev = _Evaluator(evaluate or make_error_fn(x, y, graph, family, config), trace)
    init = initialize(x, y, graph, family, config, ev)
    return descend(ev, init, config, trace)


def grid_search(x, y, graph: TraitGraph, family: str, config: SearchConfig,
                evaluate: Callable[[float, float], float] | None = None) -> SearchTrace:
    trace = SearchTrace()
    ev = _Evaluator(evaluate or make_error_fn(x, y, graph, family, config), trace)
    for s1, s2 in config.grid:
        ev(s1, s2)
    trace.init = tuple(config.grid[0])
    return trace


def select_and_fit(x, y, graph: TraitGraph, family: str, config: SearchConfig,
                   snp_ids=(), trait_ids=(), lasso_cache: dict | None = None
                   ) -> tuple[CoefficientMatrix, SearchTrace]:
    """Search (s1, s2) on validation error, then refit on all samples at the choice."""
    search = gradient_search if config.mode == "gradient" else grid_search
    trace = search(x, y, graph, family, config, make_error_fn(x, y, graph, family, config, lasso_cache))
    s1, s2 = trace.chosen
    fam = "lasso" if math.isinf(s2) else family
    xv, yv = _xy(x, y)
    if s1 == 0:
        beta = np.zeros((xv.shape[1], yv.shape[1]))
        b = CoefficientMatrix(beta, family, tuple(snp_ids), tuple(trait_ids),
                              {"status": "optimal", "kkt_residual": 0.0, "s1": 0.0, "s2": s2,
                               "l1": 0.0, "fusion": 0.0, "s1_slack": 0.0, "s2_slack": s2})
    else:
        b = fit(xv, yv, graph, FitSpec(fam, s1, s2), config.fit, snp_ids, trait_ids)
        if fam != family:
            b = replace(b, estimator_tag=family)
    return b, trace
