"""Detection (ROC/AUC) and held-out prediction metrics."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gflasso.baselines import AssociationScores
from gflasso.data import CoefficientMatrix, fmt
from gflasso.errors import ConfigurationError, DimensionError
from gflasso.simulation import GroundTruth


class UndefinedRocError(ConfigurationError):
    pass


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def save(self, path) -> None:
        with Path(path).open("w") as fh:
            fh.write("fpr\ttpr\n")
            for f, t in zip(self.fpr, self.tpr):
                fh.write(f"{fmt(f)}\t{fmt(t)}\n")


def _score_array(scores) -> np.ndarray:
    if isinstance(scores, AssociationScores):
        return scores.scores
    if isinstance(scores, CoefficientMatrix):
        return np.abs(scores.beta)
    return np.asarray(scores, dtype=float)


def truth_labels(truth, level: str = "pair") -> np.ndarray:
    """Boolean positives; ``level='snp'`` marks a SNP positive if it is causal for any trait."""
    mask = truth.mask if isinstance(truth, GroundTruth) else np.asarray(truth) != 0
    if level == "pair":
        return mask
    if level == "snp":
        return mask.any(axis=1)
    raise ConfigurationError(f"unknown positive level {level!r}")


def roc(scores, truth, level: str = "pair") -> RocCurve:
    """ROC over all distinct score thresholds, tied scores entering together; trapezoid AUC."""
    s = _score_array(scores)
    labels = truth_labels(truth, level)
    if level == "snp":
        s = s.max(axis=1)
    if s.shape != labels.shape:
        raise DimensionError(f"scores have shape {s.shape}, truth has {labels.shape}")
    s = s.ravel()
    labels = labels.ravel()
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRocError("ROC undefined without both positives and negatives")
    order = np.argsort(-s, kind="mergesort")
    s_sorted = s[order]
    l_sorted = labels[order]
    tp = np.cumsum(l_sorted)
    fp = np.cumsum(~l_sorted)
    # last index of each run of tied scores
    ends = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tpr = np.r_[0.0, tp[ends] / n_pos]
    fpr = np.r_[0.0, fp[ends] / n_neg]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, auc)


def prediction_error(b, x_new, y_new) -> float:
    """Sum over traits of squared held-out residuals; inputs centered with training means."""
    beta = b.beta if isinstance(b, CoefficientMatrix) else np.asarray(b, dtype=float)
    x_new = np.asarray(x_new, dtype=float)
    y_new = np.asarray(y_new, dtype=float)
    if x_new.shape[0] != y_new.shape[0] or x_new.shape[1] != beta.shape[0] or y_new.shape[1] != beta.shape[1]:
        raise DimensionError(f"shapes X{x_new.shape}, Y{y_new.shape}, B{beta.shape} do not agree")
    r = y_new - x_new @ beta
    return float((r * r).sum())


def count_nonzero(b, snap: float = 1e-8) -> int:
    if snap < 0:
        raise ConfigurationError("snap must be >= 0")
    beta = b.beta if isinstance(b, CoefficientMatrix) else np.asarray(b, dtype=float)
    return int(np.sum(np.abs(beta) > snap))


def aggregate(rows: list[dict], keys=("method",), metrics=("auc", "pred_error", "nonzero")) -> list[dict]:
    """Mean and sample sd of each metric per group, groups in first-seen order."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    out = []
    for key, rs in groups.items():
        rec = dict(zip(keys, key))
        rec["n"] = len(rs)
        for m in metrics:
            v = np.array([r[m] for r in rs], dtype=float)
            v = v[np.isfinite(v)]
            rec[f"{m}_mean"] = float(v.mean()) if v.size else float("nan")
            rec[f"{m}_sd"] = float(v.std(ddof=1)) if v.size > 1 else float("nan")
        out.append(rec)
    return out


def write_records(path, rows: list[dict], columns=None) -> None:
    columns = columns or list(rows[0].keys())
    with Path(path).open("w") as fh:
        fh.write("\t".join(columns) + "\n")
        for r in rows:
            cells = []
            for c in columns:
                v = r.get(c, "")
                cells.append(fmt(v) if isinstance(v, (float, np.floating)) else str(v))
            fh.write("\t".join(cells) + "\n")
