"""Scoring predicted kernels-per-row against ground truth.

The headline metric is the ratio of the mean predicted count to the mean
true count, expressed as a percentage. R-squared is reported against the
identity relationship (1 - SS_res / SS_tot with residuals taken from
y = x), which rewards actual agreement rather than mere correlation; the
regression-style Pearson variant is available separately since both
readings of "R^2" circulate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import GroundTruthAnnotation
from .errors import (
    DegenerateVarianceError,
    EmptyInputError,
    IdMismatchError,
    NonPositiveTruthError,
)
from .multipath import KprResult


@dataclass(frozen=True)
class EvalPair:
    ear_id: str
    predicted: float
    truth: float


def accuracy_ratio(pairs) -> float:
    """100 * mean(predicted) / mean(truth)."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyInputError("accuracy_ratio needs at least one pair")
    truths = np.array([p.truth for p in pairs], dtype=np.float64)
    if np.any(truths <= 0):
        raise NonPositiveTruthError("all truth values must be > 0")
    preds = np.array([p.predicted for p in pairs], dtype=np.float64)
    return 100.0 * preds.mean() / truths.mean()


def r_squared(pairs) -> float:
    """Coefficient of determination of predicted against truth (identity)."""
    pairs = list(pairs)
    if len(pairs) < 2:
        raise DegenerateVarianceError("r_squared needs at least two pairs")
    preds = np.array([p.predicted for p in pairs], dtype=np.float64)
    truths = np.array([p.truth for p in pairs], dtype=np.float64)
    ss_tot = float(((truths - truths.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise DegenerateVarianceError("truth values have zero variance")
    ss_res = float(((preds - truths) ** 2).sum())
    return 1.0 - ss_res / ss_tot


def r_squared_fit(pairs) -> float:
    """Squared Pearson correlation, the regression-line reading of R^2."""
    pairs = list(pairs)
    if len(pairs) < 2:
        raise DegenerateVarianceError("r_squared_fit needs at least two pairs")
    preds = np.array([p.predicted for p in pairs], dtype=np.float64)
    truths = np.array([p.truth for p in pairs], dtype=np.float64)
    if float(((truths - truths.mean()) ** 2).sum()) == 0.0 or float(
        ((preds - preds.mean()) ** 2).sum()
    ) == 0.0:
        raise DegenerateVarianceError("zero variance on one axis")
    return float(np.corrcoef(preds, truths)[0, 1] ** 2)


def histogram(values, bin_width) -> list[tuple[float, int]]:
    """Left-closed right-open bins aligned to multiples of bin_width.

    Only occupied bins are listed, ascending; counts sum to the input
    length.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        return []
    idx = np.floor(vals / bin_width).astype(np.int64)
    counts = Counter(idx.tolist())
    return [(float(i * bin_width), int(counts[i])) for i in sorted(counts)]


@dataclass(frozen=True)
class PathComparison:
    """The two error readings for one annotated ear.

    ``model_path``: machine count vs the expert recount along the machine's
    own path (dots labelled valid). ``expert_path``: the averaged machine
    estimate vs the expert's count along their own chosen row.
    """

    model_path: EvalPair
    expert_path: EvalPair


def compare_paths(ear_id: str, result: KprResult, annotation: GroundTruthAnnotation) -> PathComparison:
    if ear_id != annotation.ear_id:
        raise IdMismatchError(f"result is for {ear_id!r}, annotation for {annotation.ear_id!r}")
    return PathComparison(
        model_path=EvalPair(
            ear_id=ear_id,
            predicted=float(result.center.mature_count),
            truth=float(annotation.count_dots("valid")),
        ),
        expert_path=EvalPair(
            ear_id=ear_id,
            predicted=float(result.kpr_mean),
            truth=float(annotation.count_dots("expert_count")),
        ),
    )
