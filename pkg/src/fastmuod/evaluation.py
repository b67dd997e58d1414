"""Monte-Carlo accuracy studies and runtime benchmarks."""

from __future__ import annotations

import csv
import json
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import MedianKind
from .correlation import CorrelationKind
from .cutoff import CutoffKind, FlagScheme, classify
from .exceptions import FastMuodError, InvalidSpec
from .pipeline import compute_indices
from .simulation import MODELS, SimulationSpec, generate

__all__ = [
    "MethodSpec",
    "METHOD_PRESETS",
    "resolve_method",
    "StudySpec",
    "CellResult",
    "EvalResult",
    "TimingRecord",
    "derive_seed",
    "tpr_fpr",
    "run_study",
    "benchmark",
    "scaling_exponent",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MethodSpec:
    """An index method, a cutoff rule and the flag set that gets scored."""

    name: str
    index: str = "fast"
    cutoff: CutoffKind = CutoffKind.BOXPLOT
    scheme: FlagScheme = FlagScheme.UNION
    median: MedianKind = MedianKind.POINTWISE
    correlation: CorrelationKind = CorrelationKind.PEARSON
    p: float = 0.5

    def index_key(self) -> tuple:
        """Methods sharing this key can reuse one index computation."""
        return (self.index, self.median, self.correlation, self.p, self.cutoff)


def _fast_family(prefix, median, suffixes):
    out = {}
    for suffix, scheme in zip(suffixes, (FlagScheme.UNION, FlagScheme.MAGNITUDE,
                                         FlagScheme.SHAPE, FlagScheme.AMPLITUDE)):
        name = prefix + suffix
        out[name] = MethodSpec(name, "fast", scheme=scheme, median=median)
    return out


METHOD_PRESETS = {
    **_fast_family("FST", MedianKind.POINTWISE, ("", "MG", "SH", "AM")),
    **_fast_family("FSTP", MedianKind.POINTWISE, ("", "MAG", "SHA", "AMP")),
    **_fast_family("FSTL1", MedianKind.L1, ("", "MAG", "SHA", "AMP")),
    "SF": MethodSpec("SF", "semifast", p=0.5),
    "SF25": MethodSpec("SF25", "semifast", p=0.25),
    "MUOD": MethodSpec("MUOD", "muod", cutoff=CutoffKind.TANGENT),
    **{
        f"FSTSH_{kind.name}": MethodSpec(f"FSTSH_{kind.name}", "fast",
                                         scheme=FlagScheme.SHAPE, correlation=kind)
        for kind in CorrelationKind
    },
}


def resolve_method(method) -> MethodSpec:
    if isinstance(method, MethodSpec):
        return method
    key = str(method).upper()
    if key not in METHOD_PRESETS:
        raise InvalidSpec(
            f"unknown method {method!r}; known: {', '.join(sorted(METHOD_PRESETS))}"
        )
    return METHOD_PRESETS[key]


def derive_seed(*parts: int) -> int:
    """Stable 32-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def tpr_fpr(flagged: Iterable[int], truth) -> tuple[Optional[float], Optional[float]]:
    """True and false positive rates in percent.

    The TPR is ``None`` when there are no true outliers, the FPR is ``None``
    when every curve is an outlier.
    """
    truth = np.asarray(truth, dtype=bool)
    flags = np.zeros(truth.size, dtype=bool)
    idx = np.fromiter(flagged, dtype=int)
    flags[idx] = True
    n_out = int(truth.sum())
    n_in = truth.size - n_out
    tpr = 100.0 * int((flags & truth).sum()) / n_out if n_out else None
    fpr = 100.0 * int((flags & ~truth).sum()) / n_in if n_in else None
    return tpr, fpr


@dataclass(frozen=True)
class StudySpec:
    models: Sequence[int]
    methods: Sequence
    n: int = 300
    d: int = 50
    alpha: float = 0.1
    nu: Optional[float] = None
    replications: int = 100
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidSpec("replications must be >= 1")
        for m in self.models:
            if m not in MODELS:
                raise InvalidSpec(f"unknown model id {m!r}")
        object.__setattr__(self, "methods", tuple(resolve_method(m) for m in self.methods))
        object.__setattr__(self, "models", tuple(int(m) for m in self.models))


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = statistics.fmean(vals)
    sd = statistics.stdev(vals) if len(vals) > 1 else 0.0
    return mean, sd


@dataclass
class CellResult:
    model: int
    method: str
    tpr_raw: list = field(default_factory=list)
    fpr_raw: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def tpr_mean(self):
        return _stats(self.tpr_raw)[0]

    @property
    def tpr_sd(self):
        return _stats(self.tpr_raw)[1]

    @property
    def fpr_mean(self):
        return _stats(self.fpr_raw)[0]

    @property
    def fpr_sd(self):
        return _stats(self.fpr_raw)[1]

    def row(self) -> dict:
        return {
            "model": self.model,
            "method": self.method,
            "tpr_mean": self.tpr_mean,
            "tpr_sd": self.tpr_sd,
            "fpr_mean": self.fpr_mean,
            "fpr_sd": self.fpr_sd,
            "replications": len(self.fpr_raw),
            "error": self.error,
        }


@dataclass
class EvalResult:
    spec: StudySpec
    cells: dict

    def __getitem__(self, key) -> CellResult:
        model, method = key
        return self.cells[(int(model), resolve_method(method).name)]

    def rows(self) -> list:
        return [cell.row() for cell in self.cells.values()]

    def to_csv(self, fh) -> None:
        writer = csv.DictWriter(fh, fieldnames=list(_ROW_FIELDS), lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})

    def to_json(self) -> str:
        payload = {
            "study": {
                "n": self.spec.n, "d": self.spec.d, "alpha": self.spec.alpha,
                "nu": self.spec.nu, "replications": self.spec.replications,
                "base_seed": self.spec.base_seed,
            },
            "cells": [
                {**cell.row(), "tpr_raw": cell.tpr_raw, "fpr_raw": cell.fpr_raw}
                for cell in self.cells.values()
            ],
        }
        return json.dumps(payload, indent=2)


_ROW_FIELDS = ("model", "method", "tpr_mean", "tpr_sd", "fpr_mean", "fpr_sd",
               "replications", "error")


def _replicate(args):
    """Run every method on one generated sample; returns per-method outcomes."""
    spec, model, rep = args
    sim = SimulationSpec(model=model, n=spec.n, d=spec.d, alpha=spec.alpha,
                         nu=spec.nu, seed=derive_seed(spec.base_seed, model, rep))
    labeled = generate(sim)
    reports = {}
    outcome = {}
    for method in spec.methods:
        key = method.index_key()
        try:
            if key not in reports:
                indices = compute_indices(
                    labeled.sample, method.index, median=method.median,
                    correlation=method.correlation, p=method.p,
                    seed=derive_seed(spec.base_seed, model, rep, 1),
                )
                reports[key] = classify(indices, method.cutoff)
            flagged = reports[key].flagged(method.scheme)
            outcome[method.name] = tpr_fpr(flagged, labeled.is_outlier)
        except FastMuodError as exc:
            outcome[method.name] = f"replication {rep} (seed {sim.seed}): {exc}"
    return model, rep, outcome


def run_study(spec: StudySpec) -> EvalResult:
    """Replicate every (model, method) cell and aggregate TPR/FPR.

    Data for replication ``r`` of model ``m`` is seeded by
    ``derive_seed(base_seed, m, r)``, so every method sees the same samples
    and adding methods never changes the data stream.
    """
    cells = {
        (model, method.name): CellResult(model, method.name)
        for model in spec.models for method in spec.methods
    }
    jobs = [(spec, model, rep) for model in spec.models
            for rep in range(spec.replications)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_replicate, jobs, chunksize=8))
    else:
        results = [_replicate(job) for job in jobs]

    # results come back in job order, so raw rates are ordered by replication
    for model, rep, outcome in results:
        for name, value in outcome.items():
            cell = cells[(model, name)]
            if cell.error is not None:
                continue
            if isinstance(value, str):
                cell.error = value
                cell.tpr_raw.clear()
                cell.fpr_raw.clear()
                logger.warning("model %d, %s aborted: %s", model, name, value)
                continue
            cell.tpr_raw.append(value[0])
            cell.fpr_raw.append(value[1])
    return EvalResult(spec=spec, cells=cells)


@dataclass(frozen=True)
class TimingRecord:
    method: str
    n: int
    d: int
    median_seconds: float
    runs: int
    skipped: bool = False
    note: str = ""


def benchmark(method, sizes, runs: int = 3, *, alpha: float = 0.05,
              seed: int = 0, warmup: bool = True) -> list:
    """Median wall-clock time of indices + cutoff on Model 2 data.

    Data generation is excluded from the timing. With ``warmup`` one extra
    untimed run precedes the timed ones, so first-touch page faults are not
    measured. Sizes that run out of memory are returned as skipped records
    instead of raising.
    """
    method = resolve_method(method)
    sizes = list(sizes)
    if not sizes:
        raise InvalidSpec("benchmark needs at least one (n, d) size")
    if runs < 1:
        raise InvalidSpec("runs must be >= 1")
    records = []
    for n, d in sizes:
        try:
            labeled = generate(SimulationSpec(model=2, n=int(n), d=int(d), alpha=alpha,
                                              seed=derive_seed(seed, n, d)))
            times = []
            for r in range(-1 if warmup else 0, runs):
                start = time.perf_counter()
                indices = compute_indices(labeled.sample, method.index,
                                          median=method.median,
                                          correlation=method.correlation,
                                          p=method.p, seed=derive_seed(seed, n, r + 1))
                classify(indices, method.cutoff)
                if r >= 0:
                    times.append(time.perf_counter() - start)
            records.append(TimingRecord(method.name, int(n), int(d),
                                        statistics.median(times), runs))
        except MemoryError:
            records.append(TimingRecord(method.name, int(n), int(d), math.nan, 0,
                                        skipped=True, note="out of memory"))
        logger.info("%s n=%d d=%d: %s", method.name, n, d, records[-1].median_seconds)
    return records


def scaling_exponent(records) -> float:
    """Slope of log(median time) against log(n) over non-skipped records."""
    pts = [(r.n, r.median_seconds) for r in records if not r.skipped]
    if len(pts) < 2:
        raise InvalidSpec("need at least two timed sizes to fit a slope")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def write_timing_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["method", "n", "d", "median_seconds", "runs", "skipped"])
    for r in records:
        writer.writerow([r.method, r.n, r.d, repr(r.median_seconds), r.runs, int(r.skipped)])


def with_methods(spec: StudySpec, methods) -> StudySpec:
    return replace(spec, methods=tuple(methods))
