"""Graph-guided fused lasso estimation through a split-variable QP.

With ``beta_c`` the column-stacked coefficients (trait-major, ``k * J + j``),
the budget problem

    min  sum_k ||y_k - X beta_k||^2
    s.t. sum |beta_jk| <= s1
         sum_(m,l) f(r_ml) sum_j |beta_jm - sign(r_ml) beta_jl| <= s2

becomes a QP over ``[beta_c, beta+, beta-, theta+, theta-]`` with

    beta_c - beta+ + beta-       = 0
    M beta_c - theta+ + theta-   = 0
    1'beta+ + 1'beta-           <= s1
    R'theta+ + R'theta-         <= s2
    beta+, beta-, theta+, theta- >= 0

An infinite budget drops its inequality row together with the split
variables that only it constrains; leaving them in would give the barrier an
unbounded direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from gflasso.data import CoefficientMatrix, GenotypeMatrix, PhenotypeMatrix
from gflasso.errors import ConfigurationError, DimensionError, InvalidEdgeError, SolverError
from gflasso.graph import TraitGraph, weight_fn
from gflasso.qp import QpConfig, QuadraticProgram, solve_qp

FAMILIES = ("lasso", "gc", "gw1", "gw2")
FAMILY_WEIGHTING = {"lasso": "constant", "gc": "constant", "gw1": "abs", "gw2": "square"}


@dataclass(frozen=True)
class FitSpec:
    family: str
    s1: float = math.inf
    s2: float = math.inf

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not (self.s1 >= 0 and self.s2 >= 0):
            raise ConfigurationError(f"budgets must be >= 0, got s1={self.s1}, s2={self.s2}")
        if self.family == "lasso":
            object.__setattr__(self, "s2", math.inf)

    @property
    def weighting(self) -> str:
        return FAMILY_WEIGHTING[self.family]


@dataclass(frozen=True)
class FusionOperator:
    m_matrix: sp.csr_matrix
    r_vector: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.m_matrix.shape[0]


@dataclass(frozen=True)
class SplitVariables:
    beta_c: np.ndarray
    beta_plus: np.ndarray
    beta_minus: np.ndarray
    theta_plus: np.ndarray
    theta_minus: np.ndarray


@dataclass(frozen=True)
class FitConfig:
    """Solver settings for a fit.

    The solver aims for ``target_tol`` so that zero coefficients come out
    below ``snap``; a fit is accepted once the KKT residual is within
    ``tol``. ``snap`` only affects nonzero counting.
    """

    tol: float = 1e-6
    target_tol: float = 1e-10
    max_iter: int = 50_000
    snap: float = 1e-8
    qp: QpConfig = field(default=None)

    def qp_config(self) -> QpConfig:
        return self.qp or QpConfig(tol=self.tol, max_iter=self.max_iter, target=self.target_tol)


def assemble_fusion_operator(graph: TraitGraph, n_snps: int, f: str) -> FusionOperator:
    """Rows ``e * J + j`` compute ``beta_jm - sign(r_ml) beta_jl`` for edge ``e = (m, l)``."""
    if n_snps < 1:
        raise ConfigurationError("need at least one SNP")
    wf = weight_fn(f)
    J, K = n_snps, graph.n_traits
    rows, cols, vals, weights = [], [], [], []
    for e, (m, l, r) in enumerate(graph.edges):
        if r == 0:
            raise InvalidEdgeError(f"edge ({m}, {l}) has r = 0; sign undefined")
        w = float(wf(r))
        if not w > 0:
            raise InvalidEdgeError(f"edge ({m}, {l}) has non-positive fusion weight {w}")
        base = e * J
        for j in range(J):
            rows += [base + j, base + j]
            cols += [m * J + j, l * J + j]
            vals += [1.0, -float(np.sign(r))]
        weights.append(np.full(J, w))
    n_rows = graph.n_edges * J
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n_rows, J * K))
    r_vec = np.concatenate(weights) if weights else np.zeros(0)
    return FusionOperator(mat, r_vec)


def stack(beta: np.ndarray) -> np.ndarray:
    return np.asarray(beta, dtype=float).T.ravel()


def unstack(vec: np.ndarray, n_snps: int, n_traits: int) -> np.ndarray:
    return np.asarray(vec).reshape(n_traits, n_snps).T


def _check_dims(x: np.ndarray, y: np.ndarray, graph: TraitGraph | None):
    if x.shape[0] != y.shape[0]:
        raise DimensionError(f"X has {x.shape[0]} rows, Y has {y.shape[0]}")
    if graph is not None and graph.n_traits != y.shape[1]:
        raise DimensionError(f"graph has {graph.n_traits} traits, Y has {y.shape[1]}")


def _xy(x, y):
    xv = x.centered if isinstance(x, GenotypeMatrix) else np.asarray(x, dtype=float)
    yv = y.values if isinstance(y, PhenotypeMatrix) else np.asarray(y, dtype=float)
    return xv, yv


def fusion_penalty(beta, graph: TraitGraph, f: str) -> float:
    beta = np.asarray(beta, dtype=float)
    wf = weight_fn(f)
    total = 0.0
    for m, l, r in graph.edges:
        total += wf(r) * float(np.abs(beta[:, m] - np.sign(r) * beta[:, l]).sum())
    return total


def evaluate_objective(x, y, b, graph: TraitGraph, f: str, lam: float, gamma: float):
    """Lagrangian objective terms ``(rss, l1, fusion, total)``.

    ``x`` and ``y`` are used as given when they are plain arrays; matrix
    containers contribute their centered values.
    """
    xv, yv = _xy(x, y)
    beta = b.beta if isinstance(b, CoefficientMatrix) else np.asarray(b, dtype=float)
    _check_dims(xv, yv, graph)
    if beta.shape != (xv.shape[1], yv.shape[1]):
        raise DimensionError(f"B has shape {beta.shape}, expected {(xv.shape[1], yv.shape[1])}")
    resid = yv - xv @ beta
    rss = float((resid * resid).sum())
    l1 = float(np.abs(beta).sum())
    fusion = fusion_penalty(beta, graph, f)
    return rss, l1, fusion, rss + lam * l1 + gamma * fusion


@dataclass(frozen=True)
class GflassoQP:
    """Assembled QP plus the column offsets of each variable block."""

    problem: QuadraticProgram
    n_coef: int
    n_fusion: int
    has_l1: bool
    has_fusion: bool

    def split(self, x: np.ndarray) -> SplitVariables:
        n, m = self.n_coef, self.n_fusion
        beta_c = x[:n]
        off = n
        if self.has_l1:
            bp, bm = x[off:off + n], x[off + n:off + 2 * n]
            off += 2 * n
        else:
            bp, bm = np.maximum(beta_c, 0.0), np.maximum(-beta_c, 0.0)
        if self.has_fusion:
            tp, tm = x[off:off + m], x[off + m:off + 2 * m]
        else:
            tp = tm = np.zeros(m)
        return SplitVariables(beta_c, bp, bm, tp, tm)


def build_qp(x, y, graph: TraitGraph, spec: FitSpec) -> GflassoQP:
    xv, yv = _xy(x, y)
    _check_dims(xv, yv, graph)
    J, K = xv.shape[1], yv.shape[1]
    n = J * K
    xtx = xv.T @ xv
    q_beta = sp.block_diag([2.0 * xtx] * K, format="csr")
    c_beta = -2.0 * stack(xv.T @ yv)

    has_l1 = math.isfinite(spec.s1)
    fop = None
    if spec.family != "lasso" and math.isfinite(spec.s2) and graph.n_edges:
        fop = assemble_fusion_operator(graph, J, spec.weighting)
    has_fusion = fop is not None
    m = fop.n_rows if has_fusion else 0

    n_var = n + (2 * n if has_l1 else 0) + (2 * m if has_fusion else 0)
    q = sp.block_diag([q_beta, sp.csr_matrix((n_var - n, n_var - n))], format="csr")
    c = np.concatenate([c_beta, np.zeros(n_var - n)])
    lb = np.concatenate([np.full(n, -np.inf), np.zeros(n_var - n)])

    eq_blocks, in_rows, b_in = [], [], []
    eye = sp.identity(n, format="csr")
    off = n
    if has_l1:
        row = [eye, -eye, eye]
        pad = n_var - 3 * n
        eq_blocks.append(sp.hstack(row + ([sp.csr_matrix((n, pad))] if pad else []), format="csr"))
        l1_row = np.zeros(n_var)
        l1_row[n:3 * n] = 1.0
        in_rows.append(l1_row)
        b_in.append(spec.s1)
        off = 3 * n
    if has_fusion:
        ide = sp.identity(m, format="csr")
        row = [fop.m_matrix, sp.csr_matrix((m, off - n)) if off > n else None, -ide, ide]
        eq_blocks.append(sp.hstack([b for b in row if b is not None], format="csr"))
        fu_row = np.zeros(n_var)
        fu_row[off:off + m] = fop.r_vector
        fu_row[off + m:off + 2 * m] = fop.r_vector
        in_rows.append(fu_row)
        b_in.append(spec.s2)

    a_eq = sp.vstack(eq_blocks, format="csr") if eq_blocks else None
    a_in = sp.csr_matrix(np.vstack(in_rows)) if in_rows else None
    prob = QuadraticProgram(q, c, a_eq, np.zeros(a_eq.shape[0]) if a_eq is not None else None,
                            a_in, np.array(b_in) if b_in else None, lb)
    return GflassoQP(prob, n, m, has_l1, has_fusion)


def _solve(xv, yv, graph: TraitGraph, spec: FitSpec, config: FitConfig):
    assembled = build_qp(xv, yv, graph, spec)
    sol = solve_qp(assembled.problem, config=config.qp_config())
    if sol.status == "infeasible":
        raise SolverError("GFlasso QP reported infeasible; budgets are non-negative so this is a bug",
                          solution=sol)
    if not sol.optimal and not sol.kkt_residual <= config.tol:
        raise SolverError(f"QP stopped at {sol.status} with KKT residual {sol.kkt_residual:.3g}",
                          solution=sol)
    parts = assembled.split(sol.x)
    return unstack(parts.beta_c, xv.shape[1], yv.shape[1]), sol


def fit(x, y, graph: TraitGraph, spec: FitSpec, config: FitConfig | None = None,
        snp_ids=(), trait_ids=()) -> CoefficientMatrix:
    """Estimate B under the budget constraints of ``spec``.

    ``x`` and ``y`` must already be centered (containers are centered here).
    The returned matrix carries the solver certificate in ``info``.
    """
    config = config or FitConfig()
    if isinstance(x, GenotypeMatrix):
        snp_ids = snp_ids or x.snp_ids
    if isinstance(y, PhenotypeMatrix):
        trait_ids = trait_ids or y.trait_ids
    xv, yv = _xy(x, y)
    beta, sol = _solve(xv, yv, graph, spec, config)
    fus = fusion_penalty(beta, graph, spec.weighting) if spec.family != "lasso" else 0.0
    fusion_inactive = False
    if spec.family != "lasso" and math.isfinite(spec.s2) and fus < spec.s2 - config.tol * (1.0 + spec.s2):
        # A slack fusion budget leaves the split fusion variables degenerate,
        # so zeros come back only approximately. The lasso at the same s1 is
        # the exact answer whenever it fits inside the fusion budget.
        b_lasso, sol_lasso = _solve(xv, yv, graph, FitSpec("lasso", spec.s1, math.inf), config)
        fus_lasso = fusion_penalty(b_lasso, graph, spec.weighting)
        if fus_lasso <= spec.s2:
            beta, sol, fus, fusion_inactive = b_lasso, sol_lasso, fus_lasso, True
    l1 = float(np.abs(beta).sum())
    info = {
        "status": "optimal" if sol.kkt_residual <= config.tol else sol.status,
        "kkt_residual": sol.kkt_residual,
        "primal_residual": sol.primal_residual,
        "iterations": sol.iterations,
        "l1": l1,
        "fusion": fus,
        "s1_slack": spec.s1 - l1,
        "s2_slack": spec.s2 - fus,
        "s1": spec.s1,
        "s2": spec.s2,
        "snap": config.snap,
        "fusion_inactive": fusion_inactive,
    }
    return CoefficientMatrix(beta, spec.family, tuple(snp_ids), tuple(trait_ids), info)


def ols(x, y) -> np.ndarray:
    xv, yv = _xy(x, y)
    return np.linalg.lstsq(xv, yv, rcond=None)[0]
