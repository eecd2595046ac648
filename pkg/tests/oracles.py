"""Reference implementations used only by the tests.

None of these share code with the package: brute-force grids, a textbook
coordinate-descent lasso, pairwise AUC, and a plain t-test.
"""

import itertools

import numpy as np
from scipy import stats


def cd_lasso_penalized(x, y, lam, tol=1e-13, max_sweeps=100_000):
    """Coordinate descent for sum_k ||y_k - X b_k||^2 + lam * sum |b|."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    J, K = x.shape[1], y.shape[1]
    b = np.zeros((J, K))
    col_sq = (x * x).sum(axis=0)
    for k in range(K):
        r = y[:, k].copy()
        for _ in range(max_sweeps):
            delta = 0.0
            for j in range(J):
                old = b[j, k]
                rho = x[:, j] @ r + col_sq[j] * old
                new = np.sign(rho) * max(abs(rho) - lam / 2.0, 0.0) / col_sq[j]
                if new != old:
                    r -= x[:, j] * (new - old)
                    b[j, k] = new
                    delta = max(delta, abs(new - old))
            if delta < tol:
                break
    return b


def cd_lasso_budget(x, y, s1):
    """Budget-form lasso: bisect the penalty until the L1 norm equals ``s1``."""
    ols = np.linalg.lstsq(x, y, rcond=None)[0]
    if np.abs(ols).sum() <= s1:
        return ols
    lo, hi = 0.0, 2.0 * np.abs(np.asarray(x).T @ np.asarray(y)).max() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.abs(cd_lasso_penalized(x, y, mid)).sum() > s1:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * (1 + hi):
            break
    return cd_lasso_penalized(x, y, hi)


def _rss_batch(x, y, pts):
    """RSS for many stacked (trait-major) coefficient vectors at once."""
    J, K = x.shape[1], y.shape[1]
    g = x.T @ x
    xty = x.T @ y
    total = np.full(pts.shape[0], float((y * y).sum()))
    for k in range(K):
        bk = pts[:, k * J:(k + 1) * J]
        total += -2.0 * bk @ xty[:, k] + np.einsum("ij,jk,ik->i", bk, g, bk)
    return total


def grid_oracle(x, y, edges, weight, s1, s2, step=0.005, final_step=1e-6, window=10):
    """Brute-force budget-form fit for tiny J*K by a refining feasible grid.

    The first pass covers the whole box |b| <= s1 at ``step``, doubled until
    the pass has at most 3e6 points. Each later pass is five times finer and
    centred on the best feasible point so far, until the spacing reaches
    ``final_step``. Returns (B, rss).
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    J, K = x.shape[1], y.shape[1]
    n = J * K

    def feasible(pts):
        ok = np.abs(pts).sum(axis=1) <= s1 + 1e-12
        fus = np.zeros(pts.shape[0])
        for m, l, r in edges:
            bm = pts[:, m * J:(m + 1) * J]
            bl = pts[:, l * J:(l + 1) * J]
            fus += weight(r) * np.abs(bm - np.sign(r) * bl).sum(axis=1)
        return ok & (fus <= s2 + 1e-12)

    def search(center, h, half):
        axis = np.arange(-half, half + 1) * h
        best_val, best_pt = np.inf, None
        # chunk over the first coordinate to bound memory
        rest = np.array(list(itertools.product(axis, repeat=n - 1)))
        for a in axis:
            pts = np.column_stack([np.full(rest.shape[0], a), rest]) + center
            pts = pts[feasible(pts)]
            if pts.size == 0:
                continue
            vals = _rss_batch(x, y, pts)
            i = int(np.argmin(vals))
            if vals[i] < best_val:
                best_val, best_pt = float(vals[i]), pts[i]
        return best_pt, best_val

    # the full box at the stated step is too large for n=4, so start coarser
    h = step
    while (2 * np.ceil(s1 / h) + 1) ** n > 3e6:
        h *= 2
    center, val = search(np.zeros(n), h, int(np.ceil(s1 / h)))
    while h > final_step:
        h /= 5.0
        center, val = search(center, h, window)
    return center.reshape(K, J).T, val


def pairwise_auc(scores, labels):
    """Fraction of (positive, negative) pairs ordered correctly, ties counting one half."""
    s = np.asarray(scores, float).ravel()
    lab = np.asarray(labels, bool).ravel()
    pos, neg = s[lab], s[~lab]
    wins = 0.0
    for p in pos:
        for q in neg:
            wins += 1.0 if p > q else 0.5 if p == q else 0.0
    return wins / (pos.size * neg.size)


def t_test_neglog10(xj, yk):
    """No-intercept simple regression t-test, df = N - 1."""
    xj = np.asarray(xj, float)
    yk = np.asarray(yk, float)
    n = xj.size
    beta = (xj @ yk) / (xj @ xj)
    resid = yk - beta * xj
    se = np.sqrt((resid @ resid) / (n - 1) / (xj @ xj))
    t = beta / se
    return -np.log10(2.0 * stats.t.sf(abs(t), n - 1))
