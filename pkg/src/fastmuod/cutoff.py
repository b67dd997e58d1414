"""Turning index vectors into classified outlier flags."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidData
from .indices import IndexSet

__all__ = [
    "CutoffKind",
    "FlagScheme",
    "OutlierReport",
    "boxplot_threshold",
    "boxplot_flags",
    "tangent_threshold",
    "classify",
]

INDEX_TYPES = ("magnitude", "amplitude", "shape")


class CutoffKind(str, enum.Enum):
    BOXPLOT = "boxplot"
    TANGENT = "tangent"


class FlagScheme(str, enum.Enum):
    UNION = "union"
    MAGNITUDE = "magnitude"
    AMPLITUDE = "amplitude"
    SHAPE = "shape"


@dataclass(frozen=True)
class OutlierReport:
    magnitude_outliers: frozenset
    amplitude_outliers: frozenset
    shape_outliers: frozenset
    thresholds: dict
    method: CutoffKind
    degenerate: frozenset = frozenset()
    notes: tuple = field(default=())

    @property
    def union(self) -> frozenset:
        return self.magnitude_outliers | self.amplitude_outliers | self.shape_outliers

    def flagged(self, scheme=FlagScheme.UNION) -> frozenset:
        scheme = FlagScheme(scheme)
        if scheme is FlagScheme.UNION:
            return self.union
        return getattr(self, f"{scheme.value}_outliers")

    def by_type(self) -> dict:
        return {t: self.flagged(t) for t in INDEX_TYPES}


def _finite_vector(values, minimum: int) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    if v.size < minimum:
        raise InvalidData(f"need at least {minimum} index values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise InvalidData("index values must be finite")
    return v


def boxplot_threshold(values) -> float:
    """Upper whisker ``Q3 + 1.5 IQR`` of the classical boxplot.

    Quartiles interpolate linearly between order statistics (positions
    ``1 + q (n - 1)`` on the sorted values).
    """
    v = _finite_vector(values, 4)
    q1, q3 = np.quantile(v, [0.25, 0.75])
    return float(q3 + 1.5 * (q3 - q1))


def boxplot_flags(values) -> np.ndarray:
    """Boolean mask of values at or above the boxplot threshold.

    With a zero IQR the comparison turns strict, so a constant vector flags
    nothing and a tie mass at Q3 is not flagged wholesale.
    """
    v = _finite_vector(values, 4)
    q1, q3 = np.quantile(v, [0.25, 0.75])
    threshold = q3 + 1.5 * (q3 - q1)
    if q3 == q1:
        return v > threshold
    return v >= threshold


def _tangent_intercept(sorted_values: np.ndarray) -> float:
    """x-axis intercept of the tangent at the top of the sorted-index curve.

    The sorted values are read as points ``(k, v_k)``, ``k = 1..n``. The
    tangent at the maximum is the last edge of their lower convex hull, i.e.
    the steepest line from ``(n, v_n)`` back to any earlier point. Returns
    ``n`` (nothing flagged) when that slope is not positive.
    """
    s = sorted_values
    n = s.size
    ranks = np.arange(1, n)
    slope = float(np.max((s[-1] - s[:-1]) / (n - ranks)))
    if slope <= 0:
        return float(n)
    return min(max(n - s[-1] / slope, 0.0), float(n))


def tangent_threshold(values) -> np.ndarray:
    """Positions flagged by the tangent rule, in input order.

    Every curve whose rank in the ascending order lies beyond the tangent's
    x-axis intercept is flagged.
    """
    v = _finite_vector(values, 3)
    order = np.argsort(v, kind="stable")
    x0 = _tangent_intercept(v[order])
    ranks = np.arange(1, v.size + 1)
    return np.sort(order[ranks > x0])


def classify(indices: IndexSet, cutoff=CutoffKind.BOXPLOT) -> OutlierReport:
    """Apply a cutoff rule to each index vector separately.

    Degenerate curves are left out of the threshold computation and reported
    on their own.
    """
    cutoff = CutoffKind(cutoff)
    valid = indices.valid
    positions = np.flatnonzero(valid)
    flagged = {}
    thresholds = {}
    for name, vec in indices.as_dict().items():
        v = np.asarray(vec, dtype=float)[valid]
        if cutoff is CutoffKind.BOXPLOT:
            thresholds[name] = boxplot_threshold(v)
            hits = positions[boxplot_flags(v)]
        else:
            hits = positions[tangent_threshold(v)]
            # report the index value at the intercept rank as the threshold
            s = np.sort(v)
            x0 = _tangent_intercept(s)
            k = int(np.floor(x0))
            thresholds[name] = float(s[k]) if k < s.size else float("inf")
        flagged[name] = frozenset(int(i) for i in hits)
    notes = ()
    if indices.degenerate:
        notes = (f"{len(indices.degenerate)} constant curve(s) excluded; review manually",)
    return OutlierReport(
        magnitude_outliers=flagged["magnitude"],
        amplitude_outliers=flagged["amplitude"],
        shape_outliers=flagged["shape"],
        thresholds=thresholds,
        method=cutoff,
        degenerate=frozenset(indices.degenerate),
        notes=notes,
    )
