"""
Repeated-split experiments, parameter sweeps and column-selection runs.

Every repetition draws its own 80-10-10 split (and, for synthetic sources,
its own data set). The UoI fit sees only the training block, baselines tune
their penalty on the selection block, and all metrics are computed on the
test block. Per-repetition randomness is keyed on the repetition index, so a
record depends only on the configuration, never on worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .baselines import fit_l1_logistic_validated, fit_lasso_validated, fit_ols_full
from .core import CLASSIFICATION, REGRESSION, UoIConfig, run_uoi
from .cur import compare_methods, reconstruction_error
from .exceptions import DataError, InvalidArgumentError
from .io import atomic_writer, load_csv_matrix, load_csv_vector, write_csv
from .metrics import classification_report, estimation_variance, regression_report
from .resampling import SeedSpec, split_80_10_10
from .solvers import DataSet
from .synthetic import GeneratorSpec, generate_beta, generate_classification, generate_dataset

TASKS = ("lasso", "logistic", "cur", "synth", "sweep")
SWEEP_PARAMETERS = ("b1", "b2", "noise_multiplier", "sparsity", "distribution", "k")

_SPLIT_STREAM = 3
_FIT_STREAM = 4
_DATA_STREAM = 5

# per-repetition failures that are recorded instead of aborting the run
_RECOVERABLE = (InvalidArgumentError, np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError)


class NumericalFailure(RuntimeError):
    """Every repetition of an experiment failed."""


@dataclass
class ExperimentConfig:
    """
    What to run and where to write it.

    ``task`` selects the pipeline. ``lasso`` and ``logistic`` read ``x_path``
    and ``y_path``, or draw a fresh synthetic set per repetition from
    ``generator`` when no paths are given. ``sweep`` repeats the ``lasso``
    protocol on synthetic data for each value in ``sweep_values`` of
    ``sweep_parameter``. ``cur`` reads the matrix at ``x_path``.
    """

    task: str = "lasso"
    x_path: Optional[str] = None
    y_path: Optional[str] = None
    uoi: UoIConfig = field(default_factory=UoIConfig)
    generator: Optional[GeneratorSpec] = None
    repetitions: int = 100
    workers: int = 1
    baselines: bool = True
    sweep_parameter: Optional[str] = None
    sweep_values: Sequence[Any] = ()
    ranks: Sequence[int] = (1, 2, 3, 4, 5)
    cols_per_rank: int = 15
    out: Optional[str] = None
    csv_out: Optional[str] = None

    def validate(self):
        if self.task not in TASKS:
            raise InvalidArgumentError(f"task must be one of {TASKS}")
        if int(self.repetitions) < 1:
            raise InvalidArgumentError("repetitions must be at least 1")
        if int(self.workers) < 1:
            raise InvalidArgumentError("worker count must be at least 1")
        if self.task in ("lasso", "logistic"):
            has_paths = self.x_path is not None and self.y_path is not None
            if not has_paths and self.generator is None:
                raise InvalidArgumentError(f"{self.task} needs --x and --y or a synthetic generator")
            if (self.x_path is None) != (self.y_path is None):
                raise InvalidArgumentError("--x and --y must be given together")
        if self.task == "cur" and self.x_path is None:
            raise InvalidArgumentError("cur needs a matrix (--x)")
        if self.task in ("sweep", "synth") and self.generator is None:
            raise InvalidArgumentError(f"{self.task} needs a generator spec")
        if self.task == "sweep":
            if self.sweep_parameter not in SWEEP_PARAMETERS:
                raise InvalidArgumentError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
            if len(self.sweep_values) == 0:
                raise InvalidArgumentError("sweep needs at least one value")
        for path in (self.x_path, self.y_path):
            if path is not None and not Path(path).is_file():
                raise DataError("file not found", path)
        return self

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "x_path": self.x_path,
            "y_path": self.y_path,
            "uoi": self.uoi.to_dict(),
            "generator": None if self.generator is None else self.generator.to_dict(),
            "repetitions": int(self.repetitions),
            "baselines": bool(self.baselines),
            "sweep_parameter": self.sweep_parameter,
            "sweep_values": [_plain(v) for v in self.sweep_values],
            "ranks": [int(r) for r in self.ranks],
            "cols_per_rank": int(self.cols_per_rank),
        }


@dataclass
class ResultRecord:
    """
    Output of :func:`run_experiment`.

    ``rows`` holds one entry per sweep value (a single entry otherwise),
    each with its per-repetition records and the mean and standard
    deviation of every metric over the successful repetitions.
    """

    config: dict
    seed: dict
    rows: list[dict]
    n_failed: int
    timings: dict = field(default_factory=dict)
    files: list[str] = field(default_factory=list)

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {"config": self.config, "seed": self.seed, "rows": self.rows, "n_failed": self.n_failed}
        if self.files:
            out["files"] = list(self.files)
        if include_timings:
            out["timings"] = self.timings
        return out

    def to_json(self, include_timings: bool = True) -> str:
        return json.dumps(_clean(self.to_dict(include_timings)), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def metric_table(self) -> list[dict]:
        """One flat row per (sweep value, repetition, method)."""
        table = []
        for row in self.rows:
            for rep in row["repetitions"]:
                for method, report in (rep.get("methods") or {}).items():
                    entry = {"value": row.get("value"), "repetition": rep["repetition"], "method": method}
                    entry.update({k: v for k, v in report.items() if not isinstance(v, (list, dict))})
                    table.append(entry)
        return table


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _clean(obj):
    """Recursively convert to JSON-safe values; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def aggregate(values: Sequence[Optional[float]]) -> dict:
    """Mean and sample standard deviation (ddof 1; 0 for one value) of the non-missing entries."""
    xs = [float(v) for v in values if v is not None and math.isfinite(v)]
    if not xs:
        return {"mean": None, "sd": None, "count": 0}
    arr = np.asarray(xs)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return {"mean": float(arr.mean()), "sd": sd, "count": int(arr.size)}


def _aggregate_methods(reps: list[dict]) -> dict:
    ok = [r for r in reps if not r["failed"]]
    methods: dict[str, dict] = {}
    for r in ok:
        for name, report in r["methods"].items():
            bucket = methods.setdefault(name, {})
            for key, value in report.items():
                if isinstance(value, (list, dict, str, bool)):
                    continue
                bucket.setdefault(key, []).append(value)
    return {name: {k: aggregate(v) for k, v in sorted(metrics.items())} for name, metrics in sorted(methods.items())}


# ---------------------------------------------------------------- data sources


def _load_dataset(config: ExperimentConfig) -> DataSet:
    X = load_csv_matrix(config.x_path)
    y = load_csv_vector(config.y_path)
    if X.shape[0] != y.size:
        raise DataError(f"{X.shape[0]} rows in X but {y.size} responses", config.y_path)
    try:
        return DataSet(X, y)
    except InvalidArgumentError as exc:
        raise DataError(str(exc), config.x_path) from None


def _synthetic(spec: GeneratorSpec, task: str, seed: SeedSpec):
    spec = spec.with_seed(seed)
    if task == CLASSIFICATION:
        return generate_classification(spec.n, spec.p, spec.k, spec.seed, spec.beta_min, spec.beta_max)
    beta = generate_beta(spec)
    return generate_dataset(spec, beta), beta.values


def _sweep_spec(spec: GeneratorSpec, parameter: str, value) -> GeneratorSpec:
    if parameter == "noise_multiplier":
        return replace(spec, noise_multiplier=float(value))
    if parameter == "distribution":
        return replace(spec, distribution=str(value))
    if parameter == "k":
        return replace(spec, k=int(value))
    if parameter == "sparsity":
        s = float(value)
        if not 0.0 <= s < 1.0:
            raise InvalidArgumentError("sparsity must lie in [0, 1)")
        # k fixed, p grows, n keeps the base n/p ratio
        p = int(round(spec.k / (1.0 - s)))
        n = int(round(spec.n / spec.p * p))
        return replace(spec, p=p, n=n)
    return spec


# ---------------------------------------------------------------- one repetition


def _fit_methods(train, selection, test, task, uoi_config, true_beta, baselines, workers):
    report_fn = regression_report if task == REGRESSION else classification_report
    est = run_uoi(train, uoi_config, task=task, workers=workers)
    methods = {"uoi": _report_dict(report_fn(est.coefficients, test.features, test.response, true_beta), est.coefficients)}
    methods["uoi"]["warnings"] = list(est.warnings)
    fits = {"uoi": est.coefficients}
    if baselines:
        q, ratio = uoi_config.n_lambdas, uoi_config.lambda_ratio
        if task == REGRESSION:
            lasso, _ = fit_lasso_validated(train, selection, q, ratio, uoi_config.tol, uoi_config.max_iter)
            fits["lasso"] = lasso
            if train.n_samples > train.n_features + 1:
                fits["ols"] = fit_ols_full(train)
        else:
            fits["l1logistic"], _ = fit_l1_logistic_validated(
                train, selection, q, ratio, uoi_config.tol, uoi_config.max_iter
            )
        for name, fit in fits.items():
            if name != "uoi":
                methods[name] = _report_dict(report_fn(fit, test.features, test.response, true_beta), fit)
    return methods, fits


def _report_dict(report, coef) -> dict:
    d = report.to_dict()
    d.pop("estimation_variance")
    d["support_size"] = int(np.count_nonzero(coef.values))
    d["support"] = [int(i) for i in np.flatnonzero(coef.values)]
    return d


def _repetition(r, config: ExperimentConfig, task, uoi_config, spec, fixed_data, seed: SeedSpec):
    start = time.perf_counter()
    record = {"repetition": r, "failed": False, "error": None, "methods": {}}
    coef = None
    try:
        if fixed_data is not None:
            data, true_beta = fixed_data, None
        else:
            data, true_beta = _synthetic(spec, task, seed.spawn(_DATA_STREAM).spawn(r))
        plan = split_80_10_10(data.n_samples, seed.spawn(_SPLIT_STREAM).spawn(r))
        train, selection, test = (data.subset(b) for b in plan.blocks)
        fit_config = replace(uoi_config, seed=seed.spawn(_FIT_STREAM).spawn(r))
        record["methods"], fits = _fit_methods(
            train, selection, test, task, fit_config, true_beta, config.baselines, config.workers
        )
        coef = {name: fit.values for name, fit in fits.items()}
    except _RECOVERABLE as exc:
        record.update(failed=True, error=f"{type(exc).__name__}: {exc}", methods={})
    return record, coef, time.perf_counter() - start


def _run_rows(config: ExperimentConfig, values, task, seed):
    rows, failed, durations = [], 0, []
    fixed = _load_dataset(config) if config.x_path is not None and config.task != "sweep" else None
    for value in values:
        uoi_config, spec = config.uoi, config.generator
        if config.task == "sweep":
            if config.sweep_parameter in ("b1", "b2"):
                uoi_config = replace(uoi_config, **{config.sweep_parameter: int(value)})
            else:
                spec = _sweep_spec(spec, config.sweep_parameter, value)
        reps, coefs = [], []
        for r in range(int(config.repetitions)):
            rec, coef, dt = _repetition(r, config, task, uoi_config, spec, fixed, seed)
            reps.append(rec)
            durations.append(dt)
            failed += rec["failed"]
            if coef is not None:
                coefs.append(coef)
        row = {"value": _plain(value), "repetitions": reps, "aggregates": _aggregate_methods(reps)}
        # spread of the fitted coefficients across repetitions; only meaningful for a fixed p
        if len(coefs) >= 2 and len({len(c["uoi"]) for c in coefs}) == 1:
            row["estimation_variance"] = {
                name: estimation_variance([c[name] for c in coefs]) for name in coefs[0]
            }
        if config.generator is not None and fixed is None:
            row["generator"] = spec.to_dict()
        rows.append(row)
    return rows, failed, durations


def _run_cur(config: ExperimentConfig, seed: SeedSpec):
    A = load_csv_matrix(config.x_path)
    reps, failed, durations = [], 0, []
    for r in range(int(config.repetitions)):
        start = time.perf_counter()
        rec = {"repetition": r, "failed": False, "error": None, "methods": {}}
        try:
            chosen = compare_methods(
                A, config.ranks, config.cols_per_rank, config.uoi.b1, seed.spawn(_FIT_STREAM).spawn(r), config.workers
            )
            if chosen["uoi"].degenerate:
                raise InvalidArgumentError("every rank's intersection is empty; lower b1 or raise cols-per-rank")
            for name, subset in chosen.items():
                err = reconstruction_error(A, subset)
                entry = subset.to_dict()
                entry.update(frobenius=err.frobenius, nnz_ratio=err.nnz_ratio, support_size=len(subset))
                rec["methods"][name] = entry
        except _RECOVERABLE as exc:
            rec.update(failed=True, error=f"{type(exc).__name__}: {exc}", methods={})
        failed += rec["failed"]
        reps.append(rec)
        durations.append(time.perf_counter() - start)
    row = {"value": None, "repetitions": reps, "aggregates": _aggregate_methods(reps)}
    return [row], failed, durations


def write_synthetic(spec: GeneratorSpec, directory) -> list[str]:
    """Write ``X.csv``, ``y.csv``, ``beta_true.csv`` and ``spec.json`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    beta = generate_beta(spec)
    data = generate_dataset(spec, beta)
    write_csv(directory / "X.csv", data.features)
    write_csv(directory / "y.csv", data.response)
    write_csv(directory / "beta_true.csv", beta.values)
    with atomic_writer(directory / "spec.json") as fh:
        fh.write(json.dumps(spec.to_dict(), sort_keys=True, indent=2) + "\n")
    return [str(directory / name) for name in ("X.csv", "y.csv", "beta_true.csv", "spec.json")]


def run_experiment(config: ExperimentConfig) -> ResultRecord:
    """
    Run ``config`` and, if ``config.out`` is set, write the JSON record atomically.

    Raises :class:`NumericalFailure` when every repetition failed.
    """
    config.validate()
    start = time.perf_counter()
    seed = config.uoi.seed
    files: list[str] = []
    if config.task == "synth":
        files = write_synthetic(config.generator, config.out or ".")
        rows, failed, durations = [], 0, []
    elif config.task == "cur":
        rows, failed, durations = _run_cur(config, seed)
    else:
        task = CLASSIFICATION if config.task == "logistic" else REGRESSION
        values = list(config.sweep_values) if config.task == "sweep" else [None]
        rows, failed, durations = _run_rows(config, values, task, seed)
    total = sum(len(r["repetitions"]) for r in rows)
    record = ResultRecord(
        config=config.to_dict(),
        seed=seed.to_dict(),
        rows=rows,
        n_failed=failed,
        timings={"total_seconds": time.perf_counter() - start, "repetition_seconds": durations},
        files=files,
    )
    if config.task != "synth":
        if config.out:
            with atomic_writer(config.out) as fh:
                fh.write(record.to_json())
        if config.csv_out:
            write_metric_csv(record, config.csv_out)
    if total and failed == total:
        raise NumericalFailure(f"all {total} repetitions failed")
    return record


def write_metric_csv(record: ResultRecord, path):
    table = record.metric_table()
    columns = ["value", "repetition", "method"]
    for entry in table:
        for key in entry:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for entry in table:
        writer.writerow({k: ("" if entry.get(k) is None else entry.get(k)) for k in columns})
    with atomic_writer(path) as fh:
        fh.write(buf.getvalue())
