"""Command-line interface: ``fastmuod detect|simulate|evaluate|bench``.

Every option can also be set through an environment variable named
``FASTMUOD_<COMMAND>_<OPTION>``, e.g. ``FASTMUOD_DETECT_METHOD=muod``.

Exit codes: 0 success, 2 input or validation error, 3 numerical or
degeneracy failure.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import click
from click.core import ParameterSource
from threadpoolctl import threadpool_limits

from . import __version__
from .core import MedianKind
from .correlation import CorrelationKind
from .cutoff import INDEX_TYPES, CutoffKind, FlagScheme
from .evaluation import (METHOD_PRESETS, StudySpec, benchmark, run_study,
                         scaling_exponent, write_timing_csv)
from .exceptions import (DegenerateCurve, DegenerateReference, FastMuodError,
                         InvalidSpec, NumericalFailure)
from .io import read_curves, write_curves, write_labels
from .pipeline import METHODS, detect
from .simulation import MODELS, SimulationSpec, generate

EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_ALL_TYPES = "all-types"


def _exit_code(exc: FastMuodError) -> int:
    if isinstance(exc, (DegenerateReference, DegenerateCurve, NumericalFailure)):
        return EXIT_NUMERICAL
    return EXIT_INPUT


def _fail(exc: FastMuodError):
    click.echo(f"error: {exc}", err=True)
    sys.exit(_exit_code(exc))


def _emit(text: str, output) -> None:
    if output is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(output).write_text(text, encoding="utf-8")


def _explicit(ctx: click.Context, name: str) -> bool:
    return ctx.get_parameter_source(name) not in (ParameterSource.DEFAULT, None)


def _finite_or_none(x: float):
    return float(x) if math.isfinite(x) else None


def _int_list(text: str, what: str) -> list:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers for {what}: {text!r}")


@click.group(context_settings={"auto_envvar_prefix": "FASTMUOD",
                               "help_option_names": ["-h", "--help"]})
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help="Cap on BLAS/OpenMP threads (default: machine parallelism).")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
@click.version_option(__version__, prog_name="fastmuod")
@click.pass_context
def main(ctx: click.Context, threads, verbose):
    """Magnitude, amplitude and shape outliers in functional data."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if threads is not None:
        ctx.with_resource(threadpool_limits(limits=threads))


# ---------------------------------------------------------------- detect

def _report_payload(sample, indices, report, scheme, cutoff, correlation, params):
    labels = sample.labels()

    def ids(rows):
        return [labels[i] for i in sorted(rows)]

    outliers = {t: ids(report.flagged(t)) for t in INDEX_TYPES}
    if scheme == _ALL_TYPES:
        flagged = outliers
    else:
        flagged = ids(report.flagged(scheme))
    return {
        "method": indices.method,
        "params": params,
        "cutoff": cutoff,
        "correlation": correlation,
        "thresholds": {k: _finite_or_none(v) for k, v in report.thresholds.items()},
        "outliers": outliers,
        "union": ids(report.union),
        "flag_scheme": scheme,
        "flagged": flagged,
        "degenerate": ids(report.degenerate),
        "warnings": list(report.notes),
        "indices": {
            "id": labels,
            **{t: [float(x) for x in getattr(indices, t)] for t in INDEX_TYPES},
        },
    }


def _report_csv(payload) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *INDEX_TYPES,
                     *(f"{t}_outlier" for t in INDEX_TYPES), "degenerate"])
    sets = {t: set(payload["outliers"][t]) for t in INDEX_TYPES}
    degenerate = set(payload["degenerate"])
    ind = payload["indices"]
    for i, label in enumerate(ind["id"]):
        writer.writerow([label, *("%.17g" % ind[t][i] for t in INDEX_TYPES),
                         *(int(label in sets[t]) for t in INDEX_TYPES),
                         int(label in degenerate)])
    return buf.getvalue()


def _report_text(payload) -> str:
    lines = [f"method: {payload['method']}  cutoff: {payload['cutoff']}  "
             f"correlation: {payload['correlation']}"]
    if payload["params"]:
        lines.append("params: " + ", ".join(f"{k}={v}" for k, v in payload["params"].items()))
    for t in INDEX_TYPES:
        thr = payload["thresholds"][t]
        found = payload["outliers"][t]
        shown = ", ".join(str(x) for x in found) if found else "none"
        lines.append(f"{t:<9} threshold={thr if thr is not None else 'inf'}  "
                     f"outliers ({len(found)}): {shown}")
    if payload["degenerate"]:
        lines.append("degenerate: " + ", ".join(str(x) for x in payload["degenerate"]))
    for note in payload["warnings"]:
        lines.append(f"warning: {note}")
    return "\n".join(lines) + "\n"


@main.command("detect")
@click.argument("input_path", metavar="INPUT", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), default="fast", show_default=True)
@click.option("--median", type=click.Choice([m.value for m in MedianKind]), default=None,
              help="Reference median for --method fast [default: pointwise].")
@click.option("--correlation", type=click.Choice([c.value for c in CorrelationKind]),
              default="pearson", show_default=True)
@click.option("--cutoff", type=click.Choice([c.value for c in CutoffKind]),
              default="boxplot", show_default=True)
@click.option("--p", "p", type=float, default=None,
              help="Subsample proportion for --method semifast [default: 0.5].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--flag-scheme",
              type=click.Choice([s.value for s in FlagScheme] + [_ALL_TYPES]),
              default=_ALL_TYPES, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
              default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write the report here instead of stdout.")
@click.pass_context
def detect_cmd(ctx, input_path, method, median, correlation, cutoff, p, seed,
               flag_scheme, fmt, output):
    """Detect and classify outliers in a curve CSV."""
    if _explicit(ctx, "median") and method != "fast":
        raise click.UsageError("--median only applies to --method fast")
    if _explicit(ctx, "p") and method != "semifast":
        raise click.UsageError("--p only applies to --method semifast")
    median = median or MedianKind.POINTWISE.value
    p = 0.5 if p is None else p

    params = {}
    if method == "fast":
        params["median"] = median
    elif method == "semifast":
        params.update(p=p, seed=seed)
    try:
        sample = read_curves(input_path)
        indices, report = detect(sample, method, median=median, correlation=correlation,
                                 cutoff=cutoff, p=p, seed=seed)
    except FastMuodError as exc:
        _fail(exc)
    payload = _report_payload(sample, indices, report, flag_scheme, cutoff,
                              correlation, params)
    for note in payload["warnings"]:
        click.echo(f"warning: {note}", err=True)
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    elif fmt == "csv":
        text = _report_csv(payload)
    else:
        text = _report_text(payload)
    _emit(text, output)


# -------------------------------------------------------------- simulate

@main.command("simulate")
@click.option("--model", type=click.IntRange(1, 8), required=True)
@click.option("--n", type=click.IntRange(min=1), default=300, show_default=True)
@click.option("--d", type=click.IntRange(min=2), default=50, show_default=True)
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--nu", type=float, default=None,
              help="Noise scale of the sensitivity variants (default: native kernels).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", "out_dir", type=click.Path(file_okay=False),
              default=".", show_default=True,
              help="Directory receiving curves.csv and labels.csv.")
def simulate_cmd(model, n, d, alpha, nu, seed, out_dir):
    """Generate a labeled sample from one of the contamination models."""
    try:
        labeled = generate(SimulationSpec(model=model, n=n, d=d, alpha=alpha, nu=nu,
                                          seed=seed))
    except FastMuodError as exc:
        _fail(exc)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_curves(labeled.sample, out / "curves.csv")
    write_labels(labeled, out / "labels.csv")
    click.echo(f"wrote {n} curves ({int(labeled.is_outlier.sum())} outliers) to {out}",
               err=True)


# -------------------------------------------------------------- evaluate

@main.command("evaluate")
@click.option("--models", default="1,2,3,4,5,6,7,8", show_default=True,
              help="Comma-separated model ids.")
@click.option("--methods", default="FST,FSTMG,FSTAM,FSTSH", show_default=True,
              help="Comma-separated presets: " + ", ".join(sorted(METHOD_PRESETS)))
@click.option("--n", type=click.IntRange(min=1), default=300, show_default=True)
@click.option("--d", type=click.IntRange(min=2), default=50, show_default=True)
@click.option("--alpha", type=float, default=0.1, show_default=True)
@click.option("--nu", type=float, default=None)
@click.option("--replications", "--reps", type=int, default=100, show_default=True)
@click.option("--seed", "base_seed", type=int, default=0, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def evaluate_cmd(models, methods, n, d, alpha, nu, replications, base_seed, workers,
                 fmt, output):
    """Monte-Carlo TPR/FPR study over models and methods."""
    model_ids = _int_list(models, "--models")
    bad = [m for m in model_ids if m not in MODELS]
    if bad:
        _fail(InvalidSpec(f"unknown model id(s): {bad}; expected values in {list(MODELS)}"))
    try:
        spec = StudySpec(models=model_ids,
                         methods=[m for m in methods.split(",") if m.strip()],
                         n=n, d=d, alpha=alpha, nu=nu, replications=replications,
                         base_seed=base_seed, workers=workers)
        result = run_study(spec)
    except FastMuodError as exc:
        _fail(exc)
    if fmt == "json":
        text = result.to_json() + "\n"
    else:
        buf = io.StringIO()
        result.to_csv(buf)
        text = buf.getvalue()
    _emit(text, output)
    failed = [c for c in result.cells.values() if c.error]
    for cell in failed:
        click.echo(f"error: model {cell.model} {cell.method}: {cell.error}", err=True)
    if failed:
        sys.exit(EXIT_NUMERICAL)


# ----------------------------------------------------------------- bench

@main.command("bench")
@click.option("--method", default="FST", show_default=True,
              help="Method preset, e.g. FST, FSTL1, SF, MUOD.")
@click.option("--n", "ns", default="10000,20000,40000,80000", show_default=True,
              help="Comma-separated sample sizes.")
@click.option("--d", type=click.IntRange(min=2), default=100, show_default=True)
@click.option("--runs", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def bench_cmd(method, ns, d, runs, seed, output):
    """Median runtime of indices + cutoff on Model 2 data."""
    sizes = [(n, d) for n in _int_list(ns, "--n")]
    try:
        records = benchmark(method, sizes, runs, seed=seed)
    except FastMuodError as exc:
        _fail(exc)
    buf = io.StringIO()
    write_timing_csv(records, buf)
    _emit(buf.getvalue(), output)
    timed = [r for r in records if not r.skipped]
    if len(timed) >= 2:
        click.echo(f"log-log slope: {scaling_exponent(records):.3f}", err=True)


if __name__ == "__main__":  # pragma: no cover
    main()
