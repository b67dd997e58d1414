"""One-call detection: indices followed by a cutoff."""

from __future__ import annotations

from typing import Optional

from .core import MedianKind, as_sample
from .correlation import CorrelationKind
from .cutoff import CutoffKind, OutlierReport, classify
from .exceptions import InvalidData
from .indices import IndexSet, SemifastConfig, fast_indices, muod_indices, semifast_indices

__all__ = ["METHODS", "compute_indices", "detect"]

METHODS = ("fast", "semifast", "muod")


def compute_indices(sample, method: str = "fast", *, median=MedianKind.POINTWISE,
                    correlation=CorrelationKind.PEARSON, p: float = 0.5,
                    seed: int = 0) -> IndexSet:
    method = str(method).lower()
    if method == "fast":
        return fast_indices(sample, median, correlation)
    if method == "semifast":
        return semifast_indices(sample, SemifastConfig(p=p, seed=seed), correlation)
    if method == "muod":
        return muod_indices(sample, correlation)
    raise InvalidData(f"unknown method {method!r}; expected one of {METHODS}")


def detect(sample, method: str = "fast", *, median=MedianKind.POINTWISE,
           correlation=CorrelationKind.PEARSON, cutoff: Optional[str] = None,
           p: float = 0.5, seed: int = 0) -> tuple[IndexSet, OutlierReport]:
    """Compute indices and classify outliers.

    ``cutoff=None`` picks the boxplot rule, which is what the fast and
    semifast methods were designed around; pass ``"tangent"`` explicitly for
    legacy MUOD behaviour.
    """
    sample = as_sample(sample)
    indices = compute_indices(sample, method, median=median, correlation=correlation,
                              p=p, seed=seed)
    report = classify(indices, CutoffKind(cutoff or CutoffKind.BOXPLOT))
    if sample.warnings:
        report = OutlierReport(
            magnitude_outliers=report.magnitude_outliers,
            amplitude_outliers=report.amplitude_outliers,
            shape_outliers=report.shape_outliers,
            thresholds=report.thresholds,
            method=report.method,
            degenerate=report.degenerate,
            notes=report.notes + tuple(sample.warnings),
        )
    return indices, report
