"""Structure-recovery metrics and aggregation across runs."""

import math
from dataclasses import dataclass

import numpy as np

from .graph import Dag


@dataclass(frozen=True)
class MetricsReport:
    """Per-run structure metrics plus the run's wall time in seconds."""

    shd: int
    tpr: float
    fdr: float
    wall_time: float = 0.0


def shd(truth: Dag, est: Dag) -> int:
    """Structural Hamming distance with reversals counting 1.

    Minimum number of edge additions, deletions, and single-edge reversals
    turning ``est`` into ``truth``.  Symmetric in its arguments.
    """
    if truth.d != est.d:
        raise ValueError(f"vertex counts differ: {truth.d} != {est.d}")
    t, e = truth.edges, est.edges
    extra = e - t
    missing = t - e
    reversals = sum(1 for (i, j) in extra if (j, i) in missing)
    return len(extra) + len(missing) - reversals


def tpr_fdr(truth: Dag, est: Dag, reversal_as_positive: bool = False) -> tuple[float, float]:
    """True-positive rate and false-discovery rate of the estimated edge set.

    By default an estimated edge that exists reversed in the truth is both a
    miss (for TPR) and a false discovery (for FDR).  With
    ``reversal_as_positive`` such edges count as true positives instead,
    which scores skeleton recovery rather than orientation.  Conventions:
    TPR of an empty truth is 0.0; FDR of an empty estimate is 0.0.
    """
    if truth.d != est.d:
        raise ValueError(f"vertex counts differ: {truth.d} != {est.d}")
    t, e = truth.edges, est.edges
    tp = len(e & t)
    if reversal_as_positive:
        tp += sum(1 for (i, j) in e - t if (j, i) in t)
    tpr = tp / len(t) if t else 0.0
    fdr = (len(e) - tp) / len(e) if e else 0.0
    return tpr, fdr


def iqr_filter(values) -> list[float]:
    """Drop outliers outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR]; order is preserved.

    Quantiles use linear interpolation at position q*(n-1).  Fewer than three
    values pass through unchanged.
    """
    vals = [float(v) for v in values]
    if len(vals) < 3:
        return vals
    q1, q3 = np.quantile(vals, [0.25, 0.75], method="linear")
    lo, hi = q1 - 1.5 * (q3 - q1), q3 + 1.5 * (q3 - q1)
    return [v for v in vals if lo <= v <= hi]


def _summary(vals: list[float]) -> dict[str, float]:
    mean = float(np.mean(vals))
    std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
    kept = iqr_filter(vals)
    return {
        "mean": mean,
        "std": std,
        "median": float(np.median(vals)),
        "iqr_mean": float(np.mean(kept)) if kept else math.nan,
    }


def aggregate(reports: list[MetricsReport]) -> dict[str, dict[str, float]]:
    """Per-field mean, sample std (0.0 for a single run), median, and the
    mean after IQR outlier filtering."""
    if not reports:
        raise ValueError("nothing to aggregate")
    fields = ("shd", "tpr", "fdr", "wall_time")
    return {f: _summary([getattr(r, f) for r in reports]) for f in fields}
