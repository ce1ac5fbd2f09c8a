"""Exit criteria for the package, one test per criterion.

Each test records a pass/fail line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""
import filecmp
import itertools
import json
import math
import os
from pathlib import Path
import shutil
import time

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from fsclust.cluster import cid, complexity_estimate, distance_matrix, partition_medoids, select_k
from fsclust.config import build_config, validate_config
from fsclust.decompose import stl
from fsclust.density import DensityModel, EvalGrid, kde_pdf, kde_pdf_deriv, make_grid, sj_bandwidth
from fsclust.infoplane import fs_point
from fsclust.pipeline import run_pipeline
from fsclust.synthetic import write_fixture

# tolerances, fixed up front
SEP_REL = 0.05
# pilot over 30 seeds at n=10,000: FIM*sigma^2 in [0.975, 1.048]; +/-15% tightened to +/-10%
FIM_REL = 0.10
PRODUCT_SLACK = 1e-6
CASE_SECONDS = 10.0
NORMALIZATION_ABS = 1e-6
DERIV_REL = 1e-6
EQUIVARIANCE_REL = 1e-12
SJ_MEAN_REL = 0.15
CID_REL = 1e-12
STL_RMS_REL = 0.20
STL_EXACT = 1e-9
CLUSTER_SECONDS = 30.0


# ---------------------------------------------------------------- criterion 1
def test_c01_gaussian_calibration(criterion):
    rows, ok = [], True
    for sigma in (0.5, 1.0, 3.0):
        x = np.random.default_rng(1001).normal(0.0, sigma, 10_000)
        t0 = time.perf_counter()
        p = fs_point(f"N(0,{sigma}^2)", x)
        dt = time.perf_counter() - t0
        sep_err = p.sep / sigma**2 - 1
        fim_err = p.fim * sigma**2 - 1
        good = abs(sep_err) <= SEP_REL and abs(fim_err) <= FIM_REL and p.product >= 1 - PRODUCT_SLACK and dt < CASE_SECONDS
        ok &= good
        rows.append(f"sigma={sigma}: sep {sep_err:+.3%} fim {fim_err:+.3%} NI={p.product:.4f} {dt:.1f}s")
    criterion(1, ok, "; ".join(rows))
    assert ok, rows


# ---------------------------------------------------------------- criterion 2
def _suite_sample(kind, rng, n=5000):
    if kind == "gaussian":
        return rng.normal(0, rng.uniform(0.5, 3), n)
    if kind == "uniform":
        return rng.uniform(-1, 1, n) * rng.uniform(0.5, 3)
    if kind == "exponential":
        return rng.exponential(rng.uniform(0.5, 3), n)
    if kind == "student_t3":
        return rng.standard_t(3, n) * rng.uniform(0.5, 3)
    d, w = rng.uniform(1.5, 3), rng.uniform(0.3, 0.7)
    return np.where(rng.random(n) < w, rng.normal(-d, 1, n), rng.normal(d, 1, n))


def test_c02_isoperimetric_suite(criterion):
    kinds = ["gaussian", "uniform", "exponential", "student_t3", "bimodal"]
    results = []
    for k, kind in enumerate(kinds):
        for r in range(10):
            rng = np.random.default_rng(2000 + 100 * k + r)
            results.append((kind, fs_point(f"{kind}-{r}", _suite_sample(kind, rng)).product))
    products = np.array([p for _, p in results])
    lowest_kind = results[int(np.argmin(products))][0]
    gauss_max = max(p for kind, p in results if kind == "gaussian")
    other_min = min(p for kind, p in results if kind != "gaussian")
    ok = len(results) == 50 and products.min() >= 1 - PRODUCT_SLACK and gauss_max < other_min
    criterion(2, ok, f"50 samples, min NI={products.min():.4f} ({lowest_kind}); gaussian max {gauss_max:.4f} < others min {other_min:.4f}")
    assert ok


# ---------------------------------------------------------------- criterion 3
def test_c03_kde_correctness(criterion):
    rng = np.random.default_rng(3003)
    worst_norm = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 200))
        x = rng.standard_t(rng.uniform(1.5, 10), n) * rng.uniform(0.1, 10) + rng.uniform(-50, 50)
        model = DensityModel(x, rng.uniform(0.05, 2.0) * max(np.std(x), 0.1))
        grid = make_grid(model, 4096)
        if grid.spacing > model.bandwidth / 8:
            grid = EvalGrid(grid.lo, grid.hi, int((grid.hi - grid.lo) / (model.bandwidth / 8)) + 2)
        f = kde_pdf(model, grid.points)
        integral = grid.spacing * (math.fsum(f) - 0.5 * (f[0] + f[-1]))
        worst_norm = max(worst_norm, abs(integral - 1))
    worst_deriv = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 50))
        model = DensityModel(rng.normal(0, rng.uniform(0.5, 5), n), rng.uniform(0.05, 3))
        x = float(rng.choice(model.sample)) + rng.normal(0, 2) * model.bandwidth
        d = 1e-5 * model.bandwidth
        fd = (kde_pdf(model, x + d) - kde_pdf(model, x - d)) / (2 * d)
        an = kde_pdf_deriv(model, x)
        # relative to the derivative, floored at the natural slope scale f/h
        scale = max(abs(an), kde_pdf(model, x) / model.bandwidth)
        worst_deriv = max(worst_deriv, abs(an - fd) / scale)
    ok = worst_norm <= NORMALIZATION_ABS and worst_deriv <= DERIV_REL
    criterion(3, ok, f"max |integral-1|={worst_norm:.2e} over 100 models; max deriv rel err={worst_deriv:.2e} over 1000 pairs")
    assert ok


# ---------------------------------------------------------------- criterion 4
def test_c04_sj_bandwidth(criterion):
    rng = np.random.default_rng(4004)
    worst = 0.0
    for _ in range(10):
        x = rng.gamma(rng.uniform(0.5, 5), size=int(rng.integers(50, 2000)))
        c = 10 ** rng.uniform(-3, 3)
        h = sj_bandwidth(x)
        worst = max(worst, abs(sj_bandwidth(c * x) / (c * h) - 1))
    n = 10_000
    hs = [sj_bandwidth(np.random.default_rng(4100 + r).normal(size=n)) for r in range(20)]
    ref = 1.059 * n**-0.2
    mean_err = np.mean(hs) / ref - 1
    ok = worst <= EQUIVARIANCE_REL and abs(mean_err) <= SJ_MEAN_REL
    criterion(4, ok, f"scale equivariance max rel err={worst:.1e}; mean h={np.mean(hs):.4f} vs {ref:.4f} ({mean_err:+.2%})")
    assert ok


# ---------------------------------------------------------------- criterion 5
def _cid_scalar(x, y):
    cx = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(x[:-1], x[1:])))
    cy = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(y[:-1], y[1:])))
    ed = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(x, y)))
    return max(cx, cy) / min(cx, cy) * ed


def test_c05_cid_oracle(criterion):
    rng = np.random.default_rng(5005)
    worst = 0.0
    pairs = 0
    while pairs < 200:
        m = int(rng.integers(2, 8))
        n = int(rng.integers(2, 300))
        series = [(rng.normal(size=n) * rng.uniform(0.1, 10)).tolist() for _ in range(m)]
        dm = distance_matrix(series)
        for i, j in itertools.combinations(range(m), 2):
            want = _cid_scalar(series[i], series[j])
            worst = max(worst, abs(dm.d[i, j] - want) / want, abs(dm.d[j, i] - want) / want)
            pairs += 1
    hand = [
        (complexity_estimate([0, 1, 2]), math.sqrt(2)),
        (cid([0, 1, 2], [0, 1, 3]), math.sqrt(5 / 2)),
        (cid([0, 1, 0, 1], [1, 0, 1, 0]), 2.0),
    ]
    hand_err = max(abs(a - b) / b for a, b in hand)
    ok = worst <= CID_REL and hand_err <= CID_REL
    criterion(5, ok, f"{pairs} pairs max rel err={worst:.1e}; hand values max rel err={hand_err:.1e}")
    assert ok


# ---------------------------------------------------------------- criterion 6
def _exhaustive_min(d, k):
    m = d.shape[0]
    best = math.inf
    for assign in itertools.product(range(k), repeat=m):
        if len(set(assign)) < k:
            continue
        cost = 0.0
        for c in range(k):
            members = [i for i in range(m) if assign[i] == c]
            cost += min(sum(d[i, j] for i in members) for j in members)
        best = min(best, cost)
    return best


def test_c06_clustering_brute_force(criterion):
    failures, checked = [], 0
    for s in range(20):
        rng = np.random.default_rng(6000 + s)
        m = int(rng.integers(4, 7))
        a = rng.uniform(0.1, 10, (m, m))
        d = np.triu(a, 1) + np.triu(a, 1).T
        from fsclust.cluster import DistanceMatrix

        dm = DistanceMatrix([str(i) for i in range(m)], d)
        for k in (2, 3):
            if k > m - 1:
                continue
            got = partition_medoids(dm, k, seed=s, restarts=50).cost
            want = _exhaustive_min(d, k)
            checked += 1
            if not got <= want * (1 + 1e-12):
                failures.append((s, k, got, want))
    ok = not failures
    criterion(6, ok, f"{checked} (matrix, k) cases, {len(failures)} above the exhaustive optimum")
    assert ok, failures


# ---------------------------------------------------------------- criterion 7
def _ar1(n, phi, sigma, rng):
    e = rng.normal(0, sigma, n)
    x = np.empty(n)
    x[0] = e[0] / math.sqrt(1 - phi * phi)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return x


def test_c07_silhouette_selects_two(criterion):
    t0 = time.perf_counter()
    outcomes = []
    for seed in range(10):
        rng = np.random.default_rng(7000 + seed)
        smooth = [_ar1(2000, 0.95, 0.1, rng) for _ in range(8)]
        rough = [rng.normal(size=2000) for _ in range(8)]
        best, _ = select_k(distance_matrix(smooth + rough), seed=seed)
        outcomes.append((best.k, adjusted_rand_score([0] * 8 + [1] * 8, best.labels)))
    dt = time.perf_counter() - t0
    ok = all(k == 2 and ari == 1.0 for k, ari in outcomes) and dt < CLUSTER_SECONDS
    criterion(7, ok, f"10 seeds: k={[k for k, _ in outcomes]}, min ARI={min(a for _, a in outcomes):.3f}, {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------- criterion 8
def test_c08_stl_fidelity(criterion):
    n, sd = 4320, 0.5
    rng = np.random.default_rng(8008)
    i = np.arange(n)
    y = 10 * np.sin(2 * np.pi * i / 24) + (5 + 0.002 * i) + rng.normal(0, sd, n)
    d = stl(y)
    rms = float(np.sqrt(np.mean(d.remainder**2)))
    periodic = float(np.abs(d.seasonal[24:] - d.seasonal[:-24]).max())
    identity = float(np.abs(d.trend + d.seasonal + d.remainder - y).max())
    ok = abs(rms / sd - 1) <= STL_RMS_REL and periodic <= STL_EXACT and identity <= STL_EXACT
    criterion(8, ok, f"remainder RMS={rms:.4f} vs sd {sd} ({rms / sd - 1:+.1%}); periodicity {periodic:.1e}; identity {identity:.1e}")
    assert ok


# ---------------------------------------------------------------- criterion 9
NABEL_ENV = "FSCLUST_NABEL_DIR"


def test_c09_nabel_conditional(criterion, tmp_path):
    root = os.environ.get(NABEL_ENV)
    if not root:
        criterion(9, None, f"conditional: set {NABEL_ENV} to a directory of NABEL-format CSVs")
        pytest.skip(f"{NABEL_ENV} not set")
    files = sorted(Path(root).glob("*.csv"))
    assert files, f"no CSV files in {root}"
    cfg = build_config({f.stem: f for f in files}, {"output_dir": str(tmp_path), "on_series_error": "drop"})
    status, manifest = run_pipeline(cfg)
    curves = {name: rec.get("per_k_silhouette_curve") for name, rec in manifest["pollutants"].items()}
    ks = {name: rec.get("k") for name, rec in manifest["pollutants"].items()}
    ok = status == 0 and all(curves.values())
    criterion(9, ok, f"k per pollutant {ks} (published analysis found 2); curves {json.dumps(curves)}")
    assert ok


# ---------------------------------------------------------------- criterion 10
def test_c10_determinism(criterion, tmp_path):
    src = tmp_path / "fixture"
    config = write_fixture(src, seed=0)
    out = tmp_path / "results"
    dirs = []
    for run, workers in enumerate((1, 8, 1, 8)):
        # same config and output directory each time; only the worker count changes
        cfg = validate_config(config)
        cfg = type(cfg)(**{**cfg.__dict__, "output_dir": out, "workers": workers})
        status, _ = run_pipeline(cfg)
        assert status == 0
        snapshot = tmp_path / f"run{run}"
        shutil.move(out, snapshot)
        dirs.append(snapshot)
    files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.suffix in (".json", ".csv"))
    mismatched = []
    for other in dirs[1:]:
        _, mismatch, errors = filecmp.cmpfiles(dirs[0], other, [str(f) for f in files], shallow=False)
        mismatched += mismatch + errors
    ok = len(files) >= 7 and not mismatched
    criterion(10, ok, f"{len(files)} JSON/CSV artifacts compared across 4 runs (workers 1, 8, 1, 8): {len(mismatched)} differ")
    assert ok, mismatched
