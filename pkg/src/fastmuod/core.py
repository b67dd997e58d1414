"""Functional sample container, per-curve statistics and reference medians.

All variances and covariances use divisor ``d`` (the number of evaluation
points). The outlyingness indices only use ratios of these quantities, so the
choice does not change any index value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConvergenceFailure, InvalidData

__all__ = [
    "FunctionalSample",
    "CurveStats",
    "MedianKind",
    "ReferenceCurve",
    "curve_stats",
    "column_stats",
    "pointwise_median",
    "l1_median",
    "l1_objective",
]


class MedianKind(str, enum.Enum):
    POINTWISE = "pointwise"
    L1 = "l1"


@dataclass(frozen=True)
class FunctionalSample:
    """``n`` curves observed on the same ``d`` evaluation points.

    Parameters
    ----------
    values : array_like, shape (n, d)
        One curve per row.
    grid : array_like, shape (d,), optional
        Evaluation points, strictly increasing. Stored for reporting only;
        the index formulas act on the raw value vectors.
    ids : sequence, optional
        One label per curve.
    """

    values: np.ndarray
    grid: Optional[np.ndarray] = None
    ids: Optional[tuple] = None
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim == 1:
            values = values[np.newaxis, :]
        if values.ndim != 2:
            raise InvalidData(f"values must be a 2-D matrix, got ndim={values.ndim}")
        n, d = values.shape
        if n < 1:
            raise InvalidData("sample must contain at least one curve")
        if d < 2:
            raise InvalidData(f"curves need at least 2 evaluation points, got d={d}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InvalidData(
                f"non-finite value at curve {bad[0]}, point {bad[1]}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        notes = list(self.warnings)
        if self.grid is not None:
            grid = np.array(self.grid, dtype=float, copy=True).ravel()
            if grid.shape != (d,):
                raise InvalidData(f"grid has length {grid.size}, expected {d}")
            if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
                raise InvalidData("grid must be finite and strictly increasing")
            steps = np.diff(grid)
            if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
                notes.append(
                    "grid is not equidistant; indices treat curves as raw vectors"
                )
            grid.setflags(write=False)
            object.__setattr__(self, "grid", grid)
        if self.ids is not None:
            ids = tuple(self.ids)
            if len(ids) != n:
                raise InvalidData(f"got {len(ids)} ids for {n} curves")
            object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "warnings", tuple(notes))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def labels(self) -> list:
        """Curve labels, falling back to 0-based row positions."""
        if self.ids is None:
            return list(range(self.n))
        return list(self.ids)


@dataclass(frozen=True)
class CurveStats:
    mean: float
    sd: float
    var: float


@dataclass(frozen=True)
class ReferenceCurve:
    values: np.ndarray
    kind: MedianKind
    iterations: int = 0


def _as_curve(curve) -> np.ndarray:
    x = np.asarray(curve, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidData("a curve must be a 1-D vector with at least 2 points")
    if not np.all(np.isfinite(x)):
        raise InvalidData("curve contains non-finite values")
    return x


def curve_stats(curve) -> CurveStats:
    """Mean, standard deviation and variance of one curve (divisor d)."""
    x = _as_curve(curve)
    mean = float(np.mean(x))
    if x.max() == x.min():
        # exact zero for constant curves, regardless of rounding in the mean
        return CurveStats(mean=float(x[0]), sd=0.0, var=0.0)
    var = float(np.mean((x - mean) ** 2))
    return CurveStats(mean=mean, sd=float(np.sqrt(var)), var=var)


def column_stats(values: np.ndarray):
    """Row-wise mean, variance and sd of an (n, d) matrix, plus a constancy mask.

    Rows whose max equals their min get variance exactly 0.
    """
    values = np.asarray(values, dtype=float)
    means = values.mean(axis=1)
    centered = values - means[:, None]
    var = np.einsum("ij,ij->i", centered, centered) / values.shape[1]
    constant = values.max(axis=1) == values.min(axis=1)
    var[constant] = 0.0
    return means, var, np.sqrt(var), constant


def _coerce(sample) -> FunctionalSample:
    if isinstance(sample, FunctionalSample):
        return sample
    return FunctionalSample(np.asarray(sample, dtype=float))


def pointwise_median(sample) -> ReferenceCurve:
    """Scalar median of every evaluation point across curves.

    Even sample sizes take the midpoint of the two central order statistics.
    """
    sample = _coerce(sample)
    if sample.n < 1:
        raise InvalidData("empty sample")
    # selecting along contiguous rows is markedly faster once n*d outgrows cache
    med = np.median(np.ascontiguousarray(sample.values.T), axis=1)
    return ReferenceCurve(values=med, kind=MedianKind.POINTWISE)


def l1_objective(values: np.ndarray, m: np.ndarray) -> float:
    """Sum of Euclidean distances from ``m`` to every row of ``values``."""
    return float(np.sqrt(((np.asarray(values) - m) ** 2).sum(axis=1)).sum())


def l1_median(sample, tol: float = 1e-8, max_iter: int = 1000) -> ReferenceCurve:
    """Multivariate L1 (spatial) median by Weiszfeld iteration.

    Starts at the point-wise median. When the iterate lands exactly on one or
    more data curves, the Vardi-Zhang modified step is used: stop if the
    residual direction is no longer than the coincident multiplicity,
    otherwise step away from the data point.

    Raises
    ------
    ConvergenceFailure
        If the relative step is still above ``tol`` after ``max_iter``
        iterations; the last iterate is attached to the exception.
    """
    sample = _coerce(sample)
    if not tol > 0:
        raise InvalidData("tol must be positive")
    Y = sample.values
    m = np.median(Y, axis=0)
    if sample.n == 1:
        return ReferenceCurve(values=Y[0].copy(), kind=MedianKind.L1)

    for it in range(1, max_iter + 1):
        diff = Y - m
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        # distances below this are treated as coincidence with a data curve
        scale = max(1.0, float(np.linalg.norm(m)))
        coincident = dist <= 1e-14 * scale
        eta = int(coincident.sum())
        w = np.zeros_like(dist)
        w[~coincident] = 1.0 / dist[~coincident]
        wsum = w.sum()
        if wsum == 0.0:
            # every curve coincides with m
            return ReferenceCurve(values=m, kind=MedianKind.L1, iterations=it)
        T = w @ Y / wsum
        if eta == 0:
            m_next = T
        else:
            r = float(np.linalg.norm(w @ diff))
            if r <= eta:
                return ReferenceCurve(values=m, kind=MedianKind.L1, iterations=it)
            gamma = eta / r
            m_next = (1.0 - gamma) * T + gamma * m
        rel_step = float(np.linalg.norm(m_next - m)) / (1.0 + float(np.linalg.norm(m)))
        m = m_next
        if rel_step < tol:
            return ReferenceCurve(values=m, kind=MedianKind.L1, iterations=it)

    raise ConvergenceFailure(
        f"Weiszfeld iteration did not converge in {max_iter} iterations",
        last_iterate=m,
        iterations=max_iter,
    )


def as_sample(data, grid: Optional[Sequence[float]] = None, ids=None) -> FunctionalSample:
    """Wrap a matrix (or pass through a FunctionalSample)."""
    if isinstance(data, FunctionalSample):
        return data
    return FunctionalSample(np.asarray(data, dtype=float), grid=grid, ids=ids)
