"""Correlation coefficients used by the shape index.

Every supported coefficient is a cosine similarity between transformed
curves:

* Pearson: centred values
* Spearman: centred average ranks
* Kendall tau-b: the vector of pairwise signs ``sign(x[b] - x[a])``, a < b
* Cosine: raw values

so ``features()`` plus a normalized dot product covers all four, both for a
single pair and for blocks of curves.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy.stats import rankdata

from .exceptions import DegenerateCurve, InvalidData

__all__ = ["CorrelationKind", "correlation", "features", "normalized_features"]


class CorrelationKind(str, enum.Enum):
    PEARSON = "pearson"
    SPEARMAN = "spearman"
    KENDALL = "kendall"
    COSINE = "cosine"

    @classmethod
    def parse(cls, value) -> "CorrelationKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidData(f"unknown correlation kind {value!r}") from None


def features(values: np.ndarray, kind: CorrelationKind) -> np.ndarray:
    """Transform rows of ``values`` so that correlation becomes cosine similarity."""
    X = np.atleast_2d(np.asarray(values, dtype=float))
    if kind is CorrelationKind.PEARSON:
        return X - X.mean(axis=1, keepdims=True)
    if kind is CorrelationKind.SPEARMAN:
        R = rankdata(X, axis=1, method="average")
        return R - R.mean(axis=1, keepdims=True)
    if kind is CorrelationKind.KENDALL:
        lo, hi = np.triu_indices(X.shape[1], k=1)
        return np.sign(X[:, hi] - X[:, lo])
    if kind is CorrelationKind.COSINE:
        return X.copy()
    raise InvalidData(f"unknown correlation kind {kind!r}")


def normalized_features(values: np.ndarray, kind: CorrelationKind):
    """Unit-norm feature rows and a mask of rows whose norm is zero.

    Zero rows are left as zeros so they contribute nothing to dot products.
    """
    F = features(values, kind)
    norms = np.sqrt(np.einsum("ij,ij->i", F, F))
    zero = norms == 0.0
    if kind is not CorrelationKind.COSINE:
        # constant curves have zero spread even if rounding leaves a residue
        X = np.atleast_2d(values)
        zero |= X.max(axis=1) == X.min(axis=1)
    F[zero] = 0.0
    safe = np.where(zero, 1.0, norms)
    return F / safe[:, None], zero


def correlation(x, y, kind=CorrelationKind.PEARSON) -> float:
    """Correlation between two curves, clipped to [-1, 1].

    Raises
    ------
    DegenerateCurve
        If either curve is constant (Pearson, Spearman, Kendall) or
        identically zero (Cosine).
    """
    kind = CorrelationKind.parse(kind)
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape or x.size < 2:
        raise InvalidData("correlation needs two vectors of equal length >= 2")
    F, zero = normalized_features(np.vstack([x, y]), kind)
    if zero.any():
        raise DegenerateCurve(f"{kind.value} correlation undefined for a degenerate curve")
    return float(np.clip(F[0] @ F[1], -1.0, 1.0))
