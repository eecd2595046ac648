"""Primal-dual interior-point solver for convex quadratic programs.

Solves

    minimize    1/2 x'Qx + c'x
    subject to  A_eq x  = b_eq
                A_in x <= b_in
                x      >= lb          (entries of lb may be -inf)

with Q symmetric positive semidefinite. The method is Mehrotra's
predictor-corrector applied to the quasi-definite augmented Newton system.
When the variables split into bounded Q-free columns plus a small free
block, the system is reduced by block elimination to a dense Cholesky over
the free block; otherwise it is factored with a sparse LU. Small primal/dual
regularization keeps the system nonsingular when Q is only semidefinite or
the equality rows are rank deficient; two steps of iterative refinement
against the unregularized matrix remove the bias it introduces.

Interior-point iterates never reach the boundary, so coefficients that are
zero at the optimum come back as small positive numbers. Once converged, the
solver guesses the active set (constraints whose slack is below their dual),
solves the resulting equality-constrained problem directly and repairs the
guess for a few rounds. The point is kept if the final face is consistent
(right-signed duals, no violated bound or row) and its certificate meets tol.

The returned ``kkt_residual`` is the maximum of

* primal infeasibility, absolute:  max(|A_eq x - b_eq|, (A_in x - b_in)+, (lb - x)+)
* stationarity, relative:          |Qx + c + A_eq'y + A_in'z - zl|_inf / (1 + |c|_inf + |Qx|_inf)
* complementarity, relative:       max_i(slack_i * dual_i) / (1 + |objective|)
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.linalg
import scipy.sparse.linalg as spla

from gflasso.errors import DimensionError

__all__ = ["QuadraticProgram", "QpSolution", "QpConfig", "solve_qp", "dump_qp"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"


def _as_csr(a, n_cols: int, name: str) -> sp.csr_matrix:
    if a is None:
        return sp.csr_matrix((0, n_cols))
    m = sp.csr_matrix(a, dtype=float)
    if m.shape[1] != n_cols:
        raise DimensionError(f"{name} has {m.shape[1]} columns, expected {n_cols}")
    return m


def _as_vec(b, n: int, name: str, fill: float = 0.0) -> np.ndarray:
    if b is None:
        return np.full(n, fill)
    v = np.asarray(b, dtype=float).ravel()
    if v.shape[0] != n:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {n}")
    return v


@dataclass(frozen=True)
class QuadraticProgram:
    """Convex QP ``min 1/2 x'Qx + c'x`` with equality, inequality and lower-bound constraints.

    Matrices may be dense arrays or scipy sparse matrices; they are stored as CSR.
    """

    q: sp.csr_matrix
    c: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    a_in: sp.csr_matrix
    b_in: np.ndarray
    lower_bounds: np.ndarray

    def __init__(self, q, c, a_eq=None, b_eq=None, a_in=None, b_in=None, lower_bounds=None):
        c = np.asarray(c, dtype=float).ravel()
        n = c.shape[0]
        q = sp.csr_matrix(q, dtype=float)
        if q.shape != (n, n):
            raise DimensionError(f"Q has shape {q.shape}, expected {(n, n)}")
        asym = abs(q - q.T)
        if asym.nnz and asym.max() > 1e-10 * max(1.0, abs(q).max()):
            raise DimensionError("Q is not symmetric")
        a_eq = _as_csr(a_eq, n, "A_eq")
        a_in = _as_csr(a_in, n, "A_in")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", _as_vec(b_eq, a_eq.shape[0], "b_eq"))
        object.__setattr__(self, "a_in", a_in)
        object.__setattr__(self, "b_in", _as_vec(b_in, a_in.shape[0], "b_in"))
        object.__setattr__(self, "lower_bounds", _as_vec(lower_bounds, n, "lower_bounds", -np.inf))

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ (self.q @ x) + self.c @ x)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest absolute constraint violation at ``x`` (0 when feasible)."""
        viol = 0.0
        if self.a_eq.shape[0]:
            viol = max(viol, float(np.max(np.abs(self.a_eq @ x - self.b_eq))))
        if self.a_in.shape[0]:
            viol = max(viol, float(np.max(self.a_in @ x - self.b_in)))
        fin = np.isfinite(self.lower_bounds)
        if fin.any():
            viol = max(viol, float(np.max(self.lower_bounds[fin] - x[fin])))
        return max(viol, 0.0)


@dataclass(frozen=True)
class QpSolution:
    x: np.ndarray
    objective: float
    status: str
    kkt_residual: float
    iterations: int
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    complementarity: float = np.nan
    eq_duals: np.ndarray = field(default=None, repr=False)
    ineq_duals: np.ndarray = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass(frozen=True)
class QpConfig:
    tol: float = 1e-6
    max_iter: int = 50_000
    reg: float = 1e-10
    refine_steps: int = 2
    step_fraction: float = 0.995
    stall_iter: int = 50
    max_dense: int = 4000
    # keep iterating towards target once tol is met; None means tol / 100
    target: float | None = None
    polish_iter: int = 5
    active_set_polish: bool = True
    polish_reg: float = 1e-9
    polish_steps: int = 10
    polish_rounds: int = 8


def _kkt_terms(p: QuadraticProgram, x, y, z, zl, w, bounded, a_eq_t=None, a_in_t=None):
    qx = p.q @ x
    rd = qx + p.c
    if p.a_eq.shape[0]:
        rd = rd + (p.a_eq.T if a_eq_t is None else a_eq_t) @ y
    if p.a_in.shape[0]:
        rd = rd + (p.a_in.T if a_in_t is None else a_in_t) @ z
    rd[bounded] -= zl
    rp_eq = p.a_eq @ x - p.b_eq
    rp_in = p.a_in @ x + w - p.b_in
    return qx, rd, rp_eq, rp_in


def _certificate(p: QuadraticProgram, x, y, z, zl, w, bounded, a_eq_t=None, a_in_t=None):
    """Scaled primal/dual/complementarity residuals at an iterate."""
    qx, rd, _, _ = _kkt_terms(p, x, y, z, zl, w, bounded, a_eq_t, a_in_t)
    primal = p.max_violation(x)
    dual = float(np.max(np.abs(rd), initial=0.0)) / (
        1.0 + float(np.max(np.abs(p.c), initial=0.0)) + float(np.max(np.abs(qx), initial=0.0))
    )
    obj = p.objective(x)
    slack_in = np.maximum(p.b_in - p.a_in @ x, 0.0)
    slack_lb = x[bounded] - p.lower_bounds[bounded]
    comp = max(
        float(np.max(slack_in * z, initial=0.0)),
        float(np.max(np.abs(slack_lb * zl), initial=0.0)),
    ) / (1.0 + abs(obj))
    return primal, dual, comp, obj


class _AugmentedLU:
    """Sparse LU of the full quasi-definite augmented matrix."""

    def __init__(self, q, a_eq, a_in, dx_diag, d_in, reg_p, reg_d):
        m_eq, m_in = a_eq.shape[0], a_in.shape[0]
        kkt = sp.bmat(
            [[q + sp.diags(dx_diag + reg_p), a_eq.T, a_in.T],
             [a_eq, -reg_d * sp.eye(m_eq), None],
             [a_in, None, -sp.diags(d_in + reg_d)]],
            format="csc",
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.lu = spla.splu(kkt, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                                options=dict(SymmetricMode=True))
        self.n, self.m_eq = q.shape[0], m_eq

    def solve(self, r1, r2, r3):
        sol = self.lu.solve(np.concatenate([r1, r2, r3]))
        n, m = self.n, self.m_eq
        return sol[:n], sol[n:n + m], sol[n + m:]


class _SplitSchur:
    """Block elimination for problems whose bound-only variables decouple.

    Variables with an empty row in Q and a finite lower bound ("split"
    variables) have a diagonal Hessian block and are eliminated first. If the
    equality rows then stay mutually uncoupled their multipliers are
    eliminated too, leaving a dense SPD system over the remaining variables
    bordered by the (few) inequality rows.
    """

    def __init__(self, parts: "_SplitParts", dx_diag, d_in, reg_p, reg_d):
        self.parts = parts
        self.c_idx, self.f_idx = parts.c_idx, parts.f_idx
        hinv = 1.0 / (dx_diag[parts.f_idx] + reg_p)
        self.hinv = hinv
        g = reg_d + parts.a_sf_sq @ hinv
        ginv = 1.0 / g
        g_st = parts.a_sf @ (hinv[:, None] * parts.a_tf_t)
        g_tt = np.diag(d_in + reg_d) + (parts.a_tf * hinv) @ parts.a_tf_t
        p = parts.q_cc + np.diag(dx_diag[parts.c_idx] + reg_p)
        p += (parts.a_sc_t @ (parts.a_sc.multiply(ginv[:, None]).tocsr())).toarray()
        bm = parts.a_tc - (parts.a_sc_t @ (ginv[:, None] * g_st)).T
        w = g_tt - g_st.T @ (ginv[:, None] * g_st)
        self.w_fac = scipy.linalg.cho_factor(w, check_finite=False) if w.size else None
        winv_bm = scipy.linalg.cho_solve(self.w_fac, bm, check_finite=False) if w.size else bm
        self.fac = scipy.linalg.cho_factor(p + bm.T @ winv_bm, check_finite=False)
        self.ginv, self.g_st, self.bm = ginv, g_st, bm

    def solve(self, r1, r2, r3):
        pt = self.parts
        c, f = self.c_idx, self.f_idx
        r1_f = self.hinv * r1[f]
        rho_s = r2 - pt.a_sf @ r1_f
        rho_t = r3 - pt.a_tf @ r1_f
        gr = self.ginv * rho_s
        u = r1[c] + pt.a_sc_t @ gr
        v = rho_t - self.g_st.T @ gr
        if self.w_fac is not None:
            winv_v = scipy.linalg.cho_solve(self.w_fac, v, check_finite=False)
            dx_c = scipy.linalg.cho_solve(self.fac, u + self.bm.T @ winv_v, check_finite=False)
            dz = scipy.linalg.cho_solve(self.w_fac, self.bm @ dx_c - v, check_finite=False)
        else:
            dx_c = scipy.linalg.cho_solve(self.fac, u, check_finite=False)
            dz = np.zeros(0)
        dy = self.ginv * (pt.a_sc @ dx_c - self.g_st @ dz - rho_s)
        dx = np.empty(r1.shape[0])
        dx[c] = dx_c
        dx[f] = self.hinv * (r1[f] - pt.a_sf_t @ dy - pt.a_tf_t @ dz)
        return dx, dy, dz


@dataclass(frozen=True)
class _SplitParts:
    """Iteration-independent blocks for ``_SplitSchur`` (transposes precomputed)."""

    c_idx: np.ndarray
    f_idx: np.ndarray
    q_cc: np.ndarray
    a_sc: sp.csr_matrix
    a_sc_t: sp.csr_matrix
    a_sf: sp.csr_matrix
    a_sf_t: sp.csr_matrix
    a_sf_sq: sp.csr_matrix
    a_tc: np.ndarray
    a_tf: np.ndarray
    a_tf_t: np.ndarray


def _split_parts(p: QuadraticProgram, bounded: np.ndarray, max_dense: int):
    """Index sets and blocks for ``_SplitSchur``; None when the structure does not apply."""
    n = p.n
    q = p.q.tocsr()
    q_free = np.diff(q.indptr) == 0
    is_b = np.zeros(n, dtype=bool)
    is_b[bounded] = True
    f_mask = q_free & is_b
    if not f_mask.any():
        return None
    c_idx = np.flatnonzero(~f_mask)
    f_idx = np.flatnonzero(f_mask)
    if c_idx.size > max_dense or p.a_in.shape[0] > max_dense:
        return None
    a_eq = p.a_eq.tocsc()
    a_in = p.a_in.tocsc()
    a_sf = a_eq[:, f_idx].tocsr()
    # equality rows must not share split variables, and each needs one
    g_pattern = (abs(a_sf) @ abs(a_sf).T).tocoo()
    if np.any(g_pattern.row != g_pattern.col) or np.any(np.diff(a_sf.indptr) == 0):
        return None
    a_sc = a_eq[:, c_idx].tocsr()
    a_tf = a_in[:, f_idx].toarray()
    return _SplitParts(c_idx, f_idx, q[c_idx][:, c_idx].toarray(), a_sc, a_sc.T.tocsr(),
                       a_sf, a_sf.T.tocsr(), a_sf.multiply(a_sf).tocsr(),
                       a_in[:, c_idx].toarray(), a_tf, np.ascontiguousarray(a_tf.T))


def solve_qp(p: QuadraticProgram, tol: float = 1e-6, max_iter: int = 50_000, x0=None,
             config: QpConfig | None = None) -> QpSolution:
    """Solve ``p`` to KKT tolerance ``tol``.

    After ``tol`` is met the iterations continue towards ``config.target``
    for at most ``config.polish_iter`` more steps; the best iterate is
    returned. Infeasibility is reported through ``status`` rather than raised. On
    non-convergence the best iterate seen (smallest KKT residual) is returned
    with status ``iteration_limit``. ``x0`` is an optional starting point; it
    is pushed strictly inside the bounds before use.
    """
    if config is None:
        config = QpConfig(tol=tol, max_iter=max_iter)
    tol, max_iter = config.tol, config.max_iter
    if tol <= 0:
        raise ValueError("tol must be positive")
    target = min(tol, config.target if config.target is not None else 0.01 * tol)

    n = p.n
    m_eq = p.a_eq.shape[0]
    m_in = p.a_in.shape[0]
    lb = p.lower_bounds
    bounded = np.flatnonzero(np.isfinite(lb))
    nb = bounded.size
    n_comp = m_in + nb

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    lbb = lb[bounded]
    x[bounded] = np.maximum(x[bounded], lbb + 1.0)
    y = np.zeros(m_eq)
    w = np.maximum(p.b_in - p.a_in @ x, 1.0)
    z = np.ones(m_in)
    zl = np.ones(nb)

    scale = 1.0 + max(float(np.max(np.abs(p.c), initial=0.0)),
                      float(abs(p.q).max()) if p.q.nnz else 0.0)
    reg_p = config.reg * scale
    reg_d = config.reg

    q_csc = p.q.tocsc()
    a_eq = p.a_eq.tocsc()
    a_in = p.a_in.tocsc()
    a_eq_t = p.a_eq.T.tocsr()
    a_in_t = p.a_in.T.tocsr()
    parts = _split_parts(p, bounded, config.max_dense)

    best = None
    status = ITERATION_LIMIT
    it = 0
    rp_hist = []
    stall = 0
    polish = 0
    for it in range(1, max_iter + 1):
        s = x[bounded] - lbb
        qx, rd, rp_eq, rp_in = _kkt_terms(p, x, y, z, zl, w, bounded, a_eq_t, a_in_t)

        primal, dual, comp, obj = _certificate(p, x, y, z, zl, w, bounded, a_eq_t, a_in_t)
        resid = max(primal, dual, comp)
        if best is None or resid < best[0]:
            if best is not None and resid > 0.9 * best[0]:
                stall += 1
            else:
                stall = 0
            best = (resid, x.copy(), y.copy(), z.copy(), zl.copy(), w.copy(), primal, dual, comp)
        else:
            stall += 1
        if resid <= target:
            status = OPTIMAL
            break
        if best[0] <= tol:
            polish += 1
            if polish > config.polish_iter:
                status = OPTIMAL
                break
        if stall > config.stall_iter:
            # no progress while still clearly infeasible: no feasible point to approach
            if best[6] > max(1e3 * tol, 1e-4):
                status = INFEASIBLE
            break

        # infeasibility: primal residual stalls while duals blow up
        rp_norm = max(float(np.max(np.abs(rp_eq), initial=0.0)), float(np.max(np.abs(rp_in), initial=0.0)))
        rp_hist.append(rp_norm)
        dual_norm = max(float(np.max(np.abs(y), initial=0.0)), float(np.max(z, initial=0.0)),
                        float(np.max(zl, initial=0.0)))
        if (it > 30 and rp_norm > tol and dual_norm > 1e10 * scale
                and rp_norm > 0.5 * rp_hist[-10]):
            status = INFEASIBLE
            break

        mu = (w @ z + s @ zl) / n_comp if n_comp else 0.0

        dx_diag = np.zeros(n)
        dx_diag[bounded] = zl / s
        d_in = w / z

        def residual(dx, dy, dz, r1, r2, r3):
            e1 = r1 - (q_csc @ dx + dx_diag * dx + a_eq_t @ dy + a_in_t @ dz)
            e2 = r2 - a_eq @ dx
            e3 = r3 - (a_in @ dx - d_in * dz)
            return e1, e2, e3

        def solve_refined(fac, r1, r2, r3):
            dx, dy, dz = fac.solve(r1, r2, r3)
            for _ in range(config.refine_steps):
                e1, e2, e3 = residual(dx, dy, dz, r1, r2, r3)
                cx, cy, cz = fac.solve(e1, e2, e3)
                dx, dy, dz = dx + cx, dy + cy, dz + cz
            return dx, dy, dz

        fac = None
        if parts is not None:
            try:
                fac = _SplitSchur(parts, dx_diag, d_in, reg_p, reg_d)
            except (np.linalg.LinAlgError, ValueError):
                fac = None
        if fac is None:
            try:
                fac = _AugmentedLU(q_csc, a_eq, a_in, dx_diag, d_in, reg_p, reg_d)
            except RuntimeError:
                reg_p *= 100.0
                reg_d *= 100.0
                continue

        def newton(rc_w, rc_l):
            r1 = -rd.copy()
            r1[bounded] += rc_l / s
            dx, dy, dz = solve_refined(fac, r1, -rp_eq, -rp_in - rc_w / z)
            dw = -rp_in - a_in @ dx
            dzl = (rc_l - zl * dx[bounded]) / s
            return dx, dy, dz, dw, dzl

        def max_step(v, dv):
            neg = dv < 0
            if not neg.any():
                return 1.0
            return min(1.0, float(np.min(-v[neg] / dv[neg])))

        # predictor
        dx, dy, dz, dw, dzl = newton(-w * z, -s * zl)
        ds = dx[bounded]
        a_aff = min(max_step(w, dw), max_step(s, ds), max_step(z, dz), max_step(zl, dzl))
        if n_comp:
            mu_aff = ((w + a_aff * dw) @ (z + a_aff * dz) + (s + a_aff * ds) @ (zl + a_aff * dzl)) / n_comp
            sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
        else:
            sigma = 0.0

        # corrector
        rc_w = -w * z - dw * dz + sigma * mu
        rc_l = -s * zl - ds * dzl + sigma * mu
        dx, dy, dz, dw, dzl = newton(rc_w, rc_l)
        ds = dx[bounded]
        a_p = min(max_step(w, dw), max_step(s, ds))
        a_d = min(max_step(z, dz), max_step(zl, dzl))
        alpha = config.step_fraction * min(a_p, a_d)
        if not np.isfinite(alpha) or not np.all(np.isfinite(dx)):
            break

        x = x + alpha * dx
        y = y + alpha * dy
        z = np.maximum(z + alpha * dz, 1e-300)
        w = np.maximum(w + alpha * dw, 1e-300)
        zl = np.maximum(zl + alpha * dzl, 1e-300)
        x[bounded] = np.maximum(x[bounded], lbb + 1e-300)

    resid, x, y, z, zl, w, primal, dual, comp = best
    if status == OPTIMAL and config.active_set_polish:
        polished = _active_set_polish(p, x, y, z, zl, w, bounded, config, scale)
        # exact zeros are worth a little dual accuracy, but not feasibility
        if (polished is not None
                and polished[0] <= min(tol, max(100.0 * target, 10.0 * resid))
                and polished[6] <= max(primal, target)):
            resid, x, y, z, zl, w, primal, dual, comp = polished
    return QpSolution(x=x, objective=p.objective(x), status=status, kkt_residual=resid,
                      iterations=it, primal_residual=primal, dual_residual=dual,
                      complementarity=comp, eq_duals=y, ineq_duals=z)


def _solve_active(p: QuadraticProgram, x, y, z, at_bound, act_in, bounded, config: QpConfig, scale: float):
    """Minimize over the face where ``at_bound`` sit at their bounds and ``act_in`` rows are tight."""
    n = p.n
    free = np.ones(n, dtype=bool)
    free[at_bound] = False
    f_idx = np.flatnonzero(free)
    x_fix = np.zeros(n)
    x_fix[at_bound] = p.lower_bounds[at_bound]
    e_full = sp.vstack([p.a_eq, p.a_in[act_in]]).tocsr()
    e_rhs = np.concatenate([p.b_eq, p.b_in[act_in]]) - e_full @ x_fix
    e = e_full[:, f_idx].tocsc()
    q_ff = p.q[f_idx][:, f_idx].tocsc()
    c_f = p.c[f_idx] + (p.q @ x_fix)[f_idx]
    m = e.shape[0]
    delta = config.polish_reg * scale
    kkt = sp.bmat([[q_ff + delta * sp.eye(f_idx.size), e.T], [e, -config.polish_reg * sp.eye(m)]],
                  format="csc")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lu = spla.splu(kkt, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                           options=dict(SymmetricMode=True))
    except RuntimeError:
        return None
    # proximal method of multipliers centred on the IPM point: null directions
    # of Q, and multipliers of redundant active rows, stay where the IPM left them
    xf = x[f_idx].copy()
    lam = np.concatenate([y, z[act_in]])
    for _ in range(config.polish_steps):
        sol = lu.solve(np.concatenate([-c_f + delta * xf, e_rhs - config.polish_reg * lam]))
        if not np.all(np.isfinite(sol)):
            return None
        xf, lam = sol[:f_idx.size], sol[f_idx.size:]
    xp = x_fix.copy()
    xp[f_idx] = xf
    y = lam[:p.a_eq.shape[0]]
    zp = np.zeros(p.a_in.shape[0])
    zp[act_in] = lam[p.a_eq.shape[0]:]
    grad = p.q @ xp + p.c + p.a_eq.T @ y + p.a_in.T @ zp
    zlp = np.zeros(bounded.size)
    zlp[np.searchsorted(bounded, at_bound)] = grad[at_bound]
    return xp, y, zp, zlp


def _active_set_polish(p: QuadraticProgram, x, y, z, zl, w, bounded, config: QpConfig, scale: float):
    """Solve the equality-constrained problem on the guessed active set.

    A few primal-dual active-set rounds repair a wrong guess: bounds with
    negative duals are released and free variables that cross their bound
    are fixed, likewise for inequality rows. Returns a tuple shaped like the
    solver's best-iterate record, or None if no consistent face was found
    or the face point is infeasible.
    """
    lbb = p.lower_bounds[bounded]
    on = (x[bounded] - lbb) < zl
    act = w < z
    for _ in range(config.polish_rounds):
        out = _solve_active(p, x, y, z, bounded[on], np.flatnonzero(act), bounded, config, scale)
        if out is None:
            return None
        xp, yp, zp, zlp = out
        slack_b = xp[bounded] - lbb
        slack_in = p.b_in - p.a_in @ xp
        new_on = np.where(on, zlp >= 0, slack_b < 0)
        new_act = np.where(act, zp >= 0, slack_in < 0)
        if not np.array_equal(new_act, act):
            # a wrong row guess corrupts every bound dual, so settle rows first
            act = new_act
        elif not np.array_equal(new_on, on):
            on = new_on
        else:
            break
    else:
        return None
    zp = np.maximum(zp, 0.0)
    zlp = np.maximum(zlp, 0.0)
    wp = np.maximum(p.b_in - p.a_in @ xp, 0.0)
    primal, dual, comp, _ = _certificate(p, xp, yp, zp, zlp, wp, bounded)
    if primal > config.tol:
        return None
    return (max(primal, dual, comp), xp, yp, zp, zlp, wp, primal, dual, comp)


def _write_block(fh, label: str, a) -> None:
    a = a.toarray() if sp.issparse(a) else np.atleast_2d(np.asarray(a, dtype=float))
    fh.write(f"# {label} {a.shape[0]} {a.shape[1]}\n")
    for row in a:
        fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def dump_qp(p: QuadraticProgram, path) -> None:
    """Write Q, c, A_eq, b_eq, A_in, b_in and lower bounds as labeled dense text blocks."""
    with open(path, "w") as fh:
        _write_block(fh, "Q", p.q)
        _write_block(fh, "c", p.c[None, :])
        _write_block(fh, "A_eq", p.a_eq)
        _write_block(fh, "b_eq", p.b_eq[None, :])
        _write_block(fh, "A_in", p.a_in)
        _write_block(fh, "b_in", p.b_in[None, :])
        _write_block(fh, "lower_bounds", p.lower_bounds[None, :])
