"""Magnitude, amplitude and shape outlyingness indices.

Three reference schemes are provided:

``muod_indices``
    every curve is compared with every other curve, Theta(n^2 d);
``semifast_indices``
    every curve is compared with one random subsample of size
    ``max(1, round(p n))``, Theta(p n^2 d);
``fast_indices``
    every curve is compared with a single median curve, Theta(n d).

For a query curve ``y`` and reference curve ``x`` the regression of ``y`` on
``x`` gives ``beta = cov(y, x) / var(x)`` and ``alpha = mean(y) - beta mean(x)``;
the indices are ``I_M = |avg alpha|``, ``I_A = |avg beta - 1|`` and
``I_S = |avg rho - 1|``, averaging over the reference set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    FunctionalSample,
    MedianKind,
    as_sample,
    column_stats,
    l1_median,
    pointwise_median,
)
from .correlation import CorrelationKind, normalized_features
from .exceptions import DegenerateReference, InvalidData

__all__ = [
    "IndexSet",
    "SemifastConfig",
    "muod_indices",
    "semifast_indices",
    "fast_indices",
    "subsample_indices",
]

# cap on the number of entries of one covariance block held in memory
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class IndexSet:
    magnitude: np.ndarray
    amplitude: np.ndarray
    shape: np.ndarray
    method: str
    correlation: CorrelationKind
    degenerate: frozenset = frozenset()
    params: dict = field(default_factory=dict)
    reference: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.magnitude.size

    @property
    def valid(self) -> np.ndarray:
        """Boolean mask of curves whose indices are defined."""
        mask = np.ones(self.n, dtype=bool)
        if self.degenerate:
            mask[sorted(self.degenerate)] = False
        return mask

    def as_dict(self) -> dict:
        return {
            "magnitude": self.magnitude,
            "amplitude": self.amplitude,
            "shape": self.shape,
        }


@dataclass(frozen=True)
class SemifastConfig:
    p: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise InvalidData(f"sample proportion p must lie in (0, 1], got {self.p}")

    def sample_size(self, n: int) -> int:
        return max(1, int(round(self.p * n)))


def subsample_indices(n: int, cfg: SemifastConfig) -> np.ndarray:
    """Sorted row positions of the Semifast reference subsample."""
    rng = np.random.default_rng(cfg.seed)
    idx = rng.choice(n, size=cfg.sample_size(n), replace=False)
    return np.sort(idx)


def _finish(means, constant, sum_alpha_ref, sum_beta, sum_rho, n_ref):
    """Turn accumulated sums over the reference set into the three indices."""
    mean_beta = sum_beta / n_ref
    magnitude = np.abs(means - sum_alpha_ref / n_ref)
    amplitude = np.abs(mean_beta - 1.0)
    shape = np.abs(sum_rho / n_ref - 1.0)
    for arr in (magnitude, amplitude, shape):
        arr[constant] = 0.0
    return magnitude, amplitude, shape


def _reference_set_indices(sample: FunctionalSample, ref_rows: np.ndarray,
                           kind: CorrelationKind):
    """Indices of every curve against the curves at ``ref_rows``.

    The n_ref x n covariance matrix is produced one block of reference rows
    at a time and reduced immediately.
    """
    Y = sample.values
    n, d = Y.shape
    means, var, sd, constant = column_stats(Y)
    ref = ref_rows[~constant[ref_rows]]
    if ref.size == 0:
        raise InvalidData("every reference curve is constant")

    centered = Y - means[:, None]
    sum_beta = np.zeros(n)
    sum_alpha_ref = np.zeros(n)
    sum_rho = np.zeros(n)
    pearson = kind is CorrelationKind.PEARSON
    if not pearson:
        F, _ = normalized_features(Y, kind)

    block = max(1, _BLOCK_ELEMENTS // max(n, 1))
    for start in range(0, ref.size, block):
        rows = ref[start:start + block]
        cov = centered[rows] @ centered.T
        cov /= d
        inv_var = 1.0 / var[rows]
        sum_beta += inv_var @ cov
        sum_alpha_ref += (means[rows] * inv_var) @ cov
        if pearson:
            sum_rho += (1.0 / sd[rows]) @ cov
        else:
            sum_rho += (F[rows] @ F.T).sum(axis=0)

    if pearson:
        with np.errstate(divide="ignore", invalid="ignore"):
            sum_rho = np.where(constant, 0.0, sum_rho / np.where(constant, 1.0, sd))
    idx = _finish(means, constant, sum_alpha_ref, sum_beta, sum_rho, ref.size)
    degenerate = frozenset(int(i) for i in np.flatnonzero(constant))
    return idx, degenerate, ref


def muod_indices(sample, kind=CorrelationKind.PEARSON) -> IndexSet:
    """Indices of every curve against the full sample (self-pair included)."""
    sample = as_sample(sample)
    kind = CorrelationKind.parse(kind)
    if sample.n < 2:
        raise InvalidData("MUOD needs at least 2 curves")
    if (column_stats(sample.values)[1] > 0).sum() < 2:
        raise InvalidData("MUOD needs at least 2 non-constant curves")
    (mag, amp, shp), degenerate, ref = _reference_set_indices(
        sample, np.arange(sample.n), kind
    )
    return IndexSet(mag, amp, shp, method="muod", correlation=kind,
                    degenerate=degenerate, params={"n_ref": int(ref.size)})


def semifast_indices(sample, cfg: SemifastConfig = SemifastConfig(),
                     kind=CorrelationKind.PEARSON) -> IndexSet:
    """Indices of every curve against one seeded random subsample.

    With ``p = 1`` the subsample is the whole sample and the result equals
    :func:`muod_indices`.
    """
    sample = as_sample(sample)
    kind = CorrelationKind.parse(kind)
    if sample.n < 2:
        raise InvalidData("Semifast-MUOD needs at least 2 curves")
    rows = subsample_indices(sample.n, cfg)
    (mag, amp, shp), degenerate, ref = _reference_set_indices(sample, rows, kind)
    return IndexSet(mag, amp, shp, method="semifast", correlation=kind,
                    degenerate=degenerate,
                    params={"p": cfg.p, "seed": cfg.seed, "n_ref": int(ref.size)},
                    reference=rows)


def fast_indices(sample, median_kind=MedianKind.POINTWISE,
                 kind=CorrelationKind.PEARSON, *, chunk: int = 1 << 14,
                 l1_tol: float = 1e-8, l1_max_iter: int = 1000) -> IndexSet:
    """Indices of every curve against a single median curve.

    Raises
    ------
    DegenerateReference
        If the median curve is constant.
    """
    sample = as_sample(sample)
    kind = CorrelationKind.parse(kind)
    median_kind = MedianKind(median_kind)
    if median_kind is MedianKind.POINTWISE:
        ref_curve = pointwise_median(sample).values
    else:
        ref_curve = l1_median(sample, tol=l1_tol, max_iter=l1_max_iter).values

    Y = sample.values
    d = sample.d
    ref_mean = ref_curve.mean()
    ref_centered = ref_curve - ref_mean
    ref_var = float(ref_centered @ ref_centered) / d
    if ref_curve.max() == ref_curve.min() or ref_var == 0.0:
        raise DegenerateReference("the median curve is constant")
    ref_sd = np.sqrt(ref_var)

    means, var, sd, constant = column_stats(Y)
    cov = (Y @ ref_centered) / d
    beta = cov / ref_var
    amplitude = np.abs(beta - 1.0)
    magnitude = np.abs(means - beta * ref_mean)

    if kind is CorrelationKind.PEARSON:
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = cov / (np.where(constant, 1.0, sd) * ref_sd)
    else:
        ref_feat, _ = normalized_features(ref_curve, kind)
        rho = np.empty(sample.n)
        for start in range(0, sample.n, chunk):
            F, _ = normalized_features(Y[start:start + chunk], kind)
            rho[start:start + chunk] = F @ ref_feat[0]
    shape = np.abs(rho - 1.0)
    for arr in (magnitude, amplitude, shape):
        arr[constant] = 0.0
    degenerate = frozenset(int(i) for i in np.flatnonzero(constant))
    return IndexSet(magnitude, amplitude, shape, method="fast", correlation=kind,
                    degenerate=degenerate, params={"median": median_kind.value},
                    reference=ref_curve)
