"""Outlier detection for functional data with the MUOD index family.

Three index methods are available: ``muod_indices`` (all pairs),
``semifast_indices`` (a random reference subsample) and ``fast_indices``
(a single median reference). ``classify`` turns indices into magnitude,
amplitude and shape outlier sets; ``detect`` does both in one call.
"""

__version__ = "0.1.0"

from .core import (CurveStats, FunctionalSample, MedianKind, ReferenceCurve, as_sample,
                   column_stats, curve_stats, l1_median, l1_objective, pointwise_median)
from .correlation import CorrelationKind, correlation
from .cutoff import (CutoffKind, FlagScheme, OutlierReport, boxplot_flags,
                     boxplot_threshold, classify, tangent_threshold)
from .evaluation import (METHOD_PRESETS, EvalResult, MethodSpec, StudySpec, TimingRecord,
                         benchmark, derive_seed, run_study, scaling_exponent, tpr_fpr)
from .exceptions import (ConvergenceFailure, DegenerateCurve, DegenerateReference,
                         FastMuodError, InvalidData, InvalidSpec, NumericalFailure)
from .indices import (IndexSet, SemifastConfig, fast_indices, muod_indices,
                      semifast_indices, subsample_indices)
from .io import CSVFormatError, read_curves, write_curves, write_labels
from .pipeline import compute_indices, detect
from .simulation import LabeledSample, SimulationSpec, generate, gp_sample, kernel_matrix

__all__ = [
    "__version__",
    "FunctionalSample", "CurveStats", "MedianKind", "ReferenceCurve", "as_sample",
    "column_stats", "curve_stats", "l1_median", "l1_objective", "pointwise_median",
    "CorrelationKind", "correlation",
    "CutoffKind", "FlagScheme", "OutlierReport", "boxplot_flags", "boxplot_threshold",
    "classify", "tangent_threshold",
    "METHOD_PRESETS", "EvalResult", "MethodSpec", "StudySpec", "TimingRecord",
    "benchmark", "derive_seed", "run_study", "scaling_exponent", "tpr_fpr",
    "ConvergenceFailure", "DegenerateCurve", "DegenerateReference", "FastMuodError",
    "InvalidData", "InvalidSpec", "NumericalFailure",
    "IndexSet", "SemifastConfig", "fast_indices", "muod_indices", "semifast_indices",
    "subsample_indices",
    "CSVFormatError", "read_curves", "write_curves", "write_labels",
    "compute_indices", "detect",
    "LabeledSample", "SimulationSpec", "generate", "gp_sample", "kernel_matrix",
]
