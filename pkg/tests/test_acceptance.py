"""
Exit criteria. Each test prints one ``CRITERION n: PASS|FAIL`` line with the
measured quantities and runtime, then asserts.

Tolerances and sizes are pinned here and match the criteria text.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

from conftest import kkt_violation
from uoi.core import UoIConfig
from uoi.cur import compare_methods, leverage_scores, reconstruction_error
from uoi.experiment import ExperimentConfig, run_experiment
from uoi.io import write_csv
from uoi.solvers import DataSet, fit_lasso, fit_ols, lambda_max
from uoi.synthetic import DISTRIBUTIONS, GeneratorSpec, generate_encoded_lowrank

pytestmark = pytest.mark.acceptance

SEEDS = 20
KKT_TOL = 1e-6
OLS_TOL = 1e-8
RECOVERY_RMS = 1e-6
R2_MARGIN = 0.02
SPARSITY_SPREAD = 0.15
CUR_SUM_TOL = 1e-10
CUR_MONOTONE_TOL = 1e-10
CUR_ORDER_MIN = 8

# regression design scaled down from n=1200, p=300, k=100
SCALED = GeneratorSpec(n=400, p=100, k=33, noise_multiplier=0.2)
RECOVERY = GeneratorSpec(n=200, p=20, k=5, noise_multiplier=0.0)
CUR_RANKS, CUR_COLS, CUR_B1 = (1, 2, 3, 4, 5), 15, 5


def report(capsys, number, ok, detail, seconds):
    with capsys.disabled():
        print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} | {detail} | {seconds:.1f}s")


def per_rep(row, method, metric):
    return [r["methods"][method][metric] for r in row["repetitions"] if not r["failed"]]


def mean_of(row, method, metric):
    return row["aggregates"][method][metric]["mean"]


def encoded_pm1(seed):
    # sign pattern of a random rank-5 product, entries exactly +-1
    return generate_encoded_lowrank(60, 40, 5, seed=seed, zero_fraction=0.0)


def test_criterion_1_solvers(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_kkt = worst_ols = 0.0
    for _ in range(100):
        p = int(rng.integers(1, 11))
        n = int(rng.integers(p + 2, 51))
        X = rng.standard_normal((n, p))
        y = X @ rng.standard_normal(p) + rng.standard_normal(n)
        data = DataSet(X, y)
        lam = float(rng.uniform(0.01, 1.0)) * lambda_max(data)
        fit = fit_lasso(data, lam)
        worst_kkt = max(worst_kkt, kkt_violation(X, y, fit.values, fit.intercept, lam))
        support = np.flatnonzero(rng.uniform(size=p) < 0.7)
        ols = fit_ols(data, support)
        Xc = X[:, support] - X[:, support].mean(axis=0)
        oracle = np.zeros(p)
        oracle[support] = np.linalg.pinv(Xc) @ (y - y.mean())
        intercept = y.mean() - X.mean(axis=0) @ oracle
        worst_ols = max(worst_ols, float(np.max(np.abs(ols.values - oracle), initial=0.0)),
                        abs(ols.intercept - intercept))
    seconds = time.perf_counter() - start
    ok = worst_kkt <= KKT_TOL and worst_ols <= OLS_TOL and seconds < 10
    report(capsys, 1, ok, f"max KKT violation {worst_kkt:.2e}, max OLS deviation {worst_ols:.2e}", seconds)
    assert worst_kkt <= KKT_TOL
    assert worst_ols <= OLS_TOL
    assert seconds < 10


def test_criterion_2_exact_recovery(capsys):
    start = time.perf_counter()
    rec = run_experiment(ExperimentConfig(task="lasso", generator=RECOVERY, uoi=UoIConfig(seed=0),
                                          repetitions=SEEDS, baselines=False))
    row = rec.rows[0]
    hits = sum(a == 1.0 and e <= RECOVERY_RMS for a, e in zip(per_rep(row, "uoi", "selection_accuracy"),
                                                                per_rep(row, "uoi", "estimation_rms")))
    seconds = time.perf_counter() - start
    ok = hits >= 19 and seconds < 30
    report(capsys, 2, ok, f"exact recovery on {hits}/{SEEDS} seeds", seconds)
    assert hits >= 19
    assert seconds < 30


def _sweep(parameter, values, uoi, baselines=False):
    cfg = ExperimentConfig(task="sweep", generator=SCALED, uoi=uoi, repetitions=SEEDS, baselines=baselines,
                           sweep_parameter=parameter, sweep_values=values)
    return run_experiment(cfg).rows


def _trend(rows, metric):
    means = [mean_of(r, "uoi", metric) for r in rows]
    xs, ys = [], []
    for r in rows:
        vals = per_rep(r, "uoi", metric)
        xs += [r["value"]] * len(vals)
        ys += vals
    rho = spearmanr(xs, ys).statistic if np.ptp(ys) > 0 else 0.0
    return means, float(rho)


def test_criterion_3_b1_b2_tradeoff(capsys):
    start = time.perf_counter()
    grid = [1, 5, 10, 20]
    fp_means, fp_rho = _trend(_sweep("b1", grid, UoIConfig(b2=10, seed=0)), "false_positives")
    fn_means, fn_rho = _trend(_sweep("b2", grid, UoIConfig(b1=10, seed=0)), "false_negatives")
    seconds = time.perf_counter() - start
    fp_ok = all(b <= a for a, b in zip(fp_means, fp_means[1:])) and fp_rho <= 0
    fn_ok = all(b <= a for a, b in zip(fn_means, fn_means[1:])) and fn_rho <= 0
    ok = fp_ok and fn_ok and seconds < 600
    detail = (f"FP over B1 {np.round(fp_means, 2).tolist()} rho {fp_rho:.3f}; "
              f"FN over B2 {np.round(fn_means, 2).tolist()} rho {fn_rho:.3f}")
    report(capsys, 3, ok, detail, seconds)
    assert fp_ok, detail
    assert fn_ok, detail
    assert seconds < 600


def test_criterion_4_baseline_dominance(capsys):
    start = time.perf_counter()
    rows = _sweep("distribution", list(DISTRIBUTIONS), UoIConfig(seed=0), baselines=True)
    lines, ok = [], True
    for row in rows:
        acc = (mean_of(row, "uoi", "selection_accuracy"), mean_of(row, "lasso", "selection_accuracy"))
        bic = (mean_of(row, "uoi", "bic"), mean_of(row, "lasso", "bic"))
        r2 = (mean_of(row, "uoi", "r_squared"), mean_of(row, "lasso", "r_squared"))
        good = acc[0] >= acc[1] and bic[0] <= bic[1] and abs(r2[0] - r2[1]) <= R2_MARGIN
        ok &= good
        lines.append(f"{row['value']}: acc {acc[0]:.3f}/{acc[1]:.3f} bic {bic[0]:.1f}/{bic[1]:.1f} "
                     f"R2 {r2[0]:.3f}/{r2[1]:.3f}")
    seconds = time.perf_counter() - start
    ok &= seconds < 900
    report(capsys, 4, ok, "; ".join(lines) + " (uoi/lasso)", seconds)
    assert ok, lines


def test_criterion_5_sparsity_robustness(capsys):
    start = time.perf_counter()
    # k = 20 fixed; p = k / (1 - s) and n = 3p
    base = GeneratorSpec(n=60, p=20, k=20, distribution="uniform", noise_multiplier=0.2)
    cfg = ExperimentConfig(task="sweep", generator=base, uoi=UoIConfig(seed=0), repetitions=SEEDS,
                           baselines=False, sweep_parameter="sparsity", sweep_values=[0.0, 0.5, 0.9])
    rows = run_experiment(cfg).rows
    accs = [mean_of(r, "uoi", "selection_accuracy") for r in rows]
    spread = max(accs) - min(accs)
    seconds = time.perf_counter() - start
    ok = spread < SPARSITY_SPREAD
    report(capsys, 5, ok, f"mean selection accuracy {np.round(accs, 3).tolist()}, spread {spread:.3f}", seconds)
    assert ok


def test_criterion_6_logistic(capsys):
    start = time.perf_counter()
    gen = GeneratorSpec(n=500, p=10, k=2, beta_min=1.0, beta_max=2.0)
    row = run_experiment(ExperimentConfig(task="logistic", generator=gen, uoi=UoIConfig(seed=0),
                                          repetitions=SEEDS)).rows[0]
    acc = (mean_of(row, "uoi", "prediction_accuracy"), mean_of(row, "l1logistic", "prediction_accuracy"))
    size = (mean_of(row, "uoi", "support_size"), mean_of(row, "l1logistic", "support_size"))
    seconds = time.perf_counter() - start
    acc_ok, size_ok = acc[0] >= acc[1], size[0] <= size[1] / 2
    report(capsys, 6, acc_ok and size_ok,
           f"accuracy {acc[0]:.3f} vs {acc[1]:.3f}; features {size[0]:.2f} vs {size[1]:.2f} (uoi vs l1)", seconds)
    assert acc_ok
    assert size_ok


def test_criterion_7_cur(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_sum = worst_growth = 0.0
    for _ in range(100):
        m, n = (int(v) for v in rng.integers(2, 30, size=2))
        A = rng.standard_normal((m, n))
        k = int(rng.integers(1, min(m, n) + 1))
        worst_sum = max(worst_sum, abs(leverage_scores(A, k).scores.sum() - 1.0))
        small = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        big = sorted(set(small) | set(rng.choice(n, size=int(rng.integers(0, n + 1)), replace=True)))
        grow = reconstruction_error(A, big, encoded=False).frobenius - reconstruction_error(A, small, encoded=False).frobenius
        worst_growth = max(worst_growth, grow)
    ordered, errors = 0, []
    for s in range(10):
        A = encoded_pm1(s)
        chosen = compare_methods(A, CUR_RANKS, CUR_COLS, CUR_B1, seed=s)
        if chosen["uoi"].degenerate:
            continue
        e = {name: reconstruction_error(A, sub).frobenius for name, sub in chosen.items()}
        errors.append([e["greedy"], e["uoi"], e["basic"]])
        ordered += e["greedy"] <= e["uoi"] <= e["basic"]
    seconds = time.perf_counter() - start
    sum_ok, mono_ok = worst_sum <= CUR_SUM_TOL, worst_growth <= CUR_MONOTONE_TOL
    order_ok = ordered >= CUR_ORDER_MIN
    ok = sum_ok and mono_ok and order_ok and seconds < 120
    means = np.round(np.mean(errors, axis=0), 2).tolist() if errors else None
    report(capsys, 7, ok, f"max |sum-1| {worst_sum:.1e}; max growth {worst_growth:.1e}; "
           f"greedy<=uoi<=basic on {ordered}/10; mean errors greedy/uoi/basic {means}", seconds)
    assert sum_ok
    assert mono_ok
    assert order_ok
    assert seconds < 120


def test_criterion_8_determinism(capsys, tmp_path):
    start = time.perf_counter()
    write_csv(tmp_path / "A.csv", encoded_pm1(0))
    configs = {
        "recovery": dict(task="lasso", generator=RECOVERY, uoi=UoIConfig(seed=0), repetitions=SEEDS, baselines=False),
        "cur": dict(task="cur", x_path=str(tmp_path / "A.csv"), uoi=UoIConfig(b1=CUR_B1, seed=0),
                    ranks=CUR_RANKS, cols_per_rank=CUR_COLS, repetitions=3),
    }
    identical = {}
    for name, kw in configs.items():
        outputs = set()
        for workers in (1, 4, 8):
            rec = run_experiment(ExperimentConfig(workers=workers, **kw))
            outputs.add(rec.to_json(include_timings=False).encode())
        identical[name] = len(outputs) == 1
    seconds = time.perf_counter() - start
    ok = all(identical.values())
    report(capsys, 8, ok, f"byte-identical across 1/4/8 workers: {identical}", seconds)
    assert ok


def test_criterion_9_metric_units(capsys):
    start = time.perf_counter()
    target = Path(__file__).with_name("test_metrics.py")
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(target)],
                          capture_output=True, text=True)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    seconds = time.perf_counter() - start
    report(capsys, 9, proc.returncode == 0, summary, seconds)
    assert proc.returncode == 0, proc.stdout
