"""Single-marker association tests and ridge regression."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from gflasso.data import CoefficientMatrix, GenotypeMatrix, PhenotypeMatrix, write_tsv
from gflasso.errors import ConfigurationError, DimensionError
from gflasso.estimator import _xy

log = logging.getLogger(__name__)

SCORE_KINDS = ("neg_log_p", "abs_beta")
DEFAULT_SCORE_CAP = 300.0


@dataclass(frozen=True)
class AssociationScores:
    scores: np.ndarray
    kind: str
    snp_ids: tuple[str, ...] = ()
    trait_ids: tuple[str, ...] = ()

    def __post_init__(self):
        s = np.array(self.scores, dtype=float)
        if self.kind not in SCORE_KINDS:
            raise ConfigurationError(f"unknown score kind {self.kind!r}")
        if np.any(s < 0) or not np.isfinite(s).all():
            raise ConfigurationError("association scores must be finite and >= 0")
        s.setflags(write=False)
        object.__setattr__(self, "scores", s)

    @classmethod
    def from_coefficients(cls, b: CoefficientMatrix) -> "AssociationScores":
        return cls(np.abs(b.beta), "abs_beta", b.snp_ids, b.trait_ids)

    def save(self, path) -> None:
        snps = self.snp_ids or tuple(f"snp_{j + 1}" for j in range(self.scores.shape[0]))
        traits = self.trait_ids or tuple(f"trait_{k + 1}" for k in range(self.scores.shape[1]))
        write_tsv(path, snps, traits, self.scores, corner="snp", comment=f"kind={self.kind}")


def t_two_sided_neglog10(t, df, cap: float = DEFAULT_SCORE_CAP) -> np.ndarray:
    """-log10 of the two-sided Student-t p-value, capped at ``cap``.

    p = I_{df/(df+t^2)}(df/2, 1/2) (regularized incomplete beta); far in the
    tail the log is taken from the leading term of its power series so the
    score does not saturate on floating-point underflow.
    """
    t = np.abs(np.asarray(t, dtype=float))
    xb = df / (df + t * t)
    with np.errstate(divide="ignore"):
        p = special.betainc(df / 2.0, 0.5, xb)
        out = -np.log10(p)
    tiny = p < 1e-280
    if np.any(tiny):
        a = df / 2.0
        # I_x(a, 1/2) ~ x^a / (a B(a, 1/2)) as x -> 0; x = 0 (perfect fit) hits the cap
        with np.errstate(divide="ignore"):
            logp = a * np.log(xb[tiny]) - np.log(a) - special.betaln(a, 0.5)
        out[tiny] = -logp / math.log(10.0)
    out = np.where(np.isnan(out), 0.0, out)
    return np.minimum(out, cap)


def single_marker(x, y, cap: float = DEFAULT_SCORE_CAP) -> AssociationScores:
    """Per (SNP, trait) no-intercept regression on centered data; score is -log10 p with N-1 df."""
    snps = x.snp_ids if isinstance(x, GenotypeMatrix) else ()
    traits = y.trait_ids if isinstance(y, PhenotypeMatrix) else ()
    xv, yv = _xy(x, y)
    if xv.shape[0] != yv.shape[0]:
        raise DimensionError("X and Y row counts differ")
    n = xv.shape[0]
    if n < 3:
        raise ConfigurationError("single-marker tests need N >= 3")
    df = n - 1
    sxx = (xv * xv).sum(axis=0)
    sxy = xv.T @ yv
    syy = (yv * yv).sum(axis=0)
    flat = sxx <= 1e-12 * max(1.0, sxx.max(initial=0.0))
    if flat.any():
        log.warning("%d SNP column(s) have zero variance; their scores are set to 0", int(flat.sum()))
    safe = np.where(flat, 1.0, sxx)
    beta = sxy / safe[:, None]
    rss = np.maximum(syy[None, :] - beta * sxy, 0.0)
    se2 = rss / df / safe[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se2 > 0, beta / np.sqrt(se2), np.where(beta != 0, np.inf, 0.0))
    scores = t_two_sided_neglog10(t, df, cap)
    scores[flat, :] = 0.0
    return AssociationScores(scores, "neg_log_p", snps, traits)


def ridge(x, y, reg: float = 1e-4) -> CoefficientMatrix:
    """Ridge coefficients (X'X + reg I)^-1 X'Y, all traits at once."""
    if not reg > 0:
        raise ConfigurationError("ridge regularization must be > 0")
    snps = x.snp_ids if isinstance(x, GenotypeMatrix) else ()
    traits = y.trait_ids if isinstance(y, PhenotypeMatrix) else ()
    xv, yv = _xy(x, y)
    if xv.shape[0] != yv.shape[0]:
        raise DimensionError("X and Y row counts differ")
    a = xv.T @ xv + reg * np.eye(xv.shape[1])
    beta = np.linalg.solve(a, xv.T @ yv)
    return CoefficientMatrix(beta, "ridge", snps, traits, {"reg": reg})
