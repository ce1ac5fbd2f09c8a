"""End-to-end analysis: ingest -> STL -> Fisher-Shannon plane -> CID clustering."""
from concurrent.futures import ThreadPoolExecutor
import csv
import json
import logging
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .cluster import distance_matrix, select_k
from .decompose import stl_decompose
from .density import DensityModel, kde_pdf_and_deriv, make_grid
from .errors import DegenerateSample, FsClustError, GapTooLarge, SeriesTooShort
from .infoplane import CUTOFF, fs_point
from .ingest import align, fill_gaps, format_timestamp, parse_csv, trim
from .svg import fs_plane_svg, silhouette_svg

log = logging.getLogger(__name__)

# per-series failures that "drop" mode tolerates
SERIES_ERRORS = (GapTooLarge, DegenerateSample, SeriesTooShort)


class PollutantFailed(Exception):
    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super().__init__(f"{stage}: {error}")


def _map(executor, fn, items):
    if executor is None:
        return [fn(x) for x in items]
    return list(executor.map(fn, items))


def prepare_series(path, max_gap, on_series_error="abort"):
    """Parse, trim, gap-fill and align every series in ``path``.

    Returns ``(aligned_series, dropped)`` where ``dropped`` lists
    ``{"id", "reason"}`` records.
    """
    raw = parse_csv(path)
    kept, dropped = [], []
    for ts in raw:
        t = trim(ts)
        try:
            if t is None:
                raise DegenerateSample(f"series {ts.id!r} has fewer than 2 observed values")
            kept.append(fill_gaps(t, max_gap))
        except SERIES_ERRORS as exc:
            if on_series_error != "drop":
                raise
            dropped.append({"id": ts.id, "reason": f"{type(exc).__name__}: {exc}"})
    if not kept:
        raise DegenerateSample("no usable series")
    return align(kept), dropped


def _decompose_all(series, params, on_series_error, executor, dropped):
    def run(ts):
        try:
            return stl_decompose(ts, params)
        except SERIES_ERRORS as exc:
            if on_series_error != "drop":
                raise
            return exc

    out = []
    for ts, res in zip(series, _map(executor, run, series)):
        if isinstance(res, Exception):
            dropped.append({"id": ts.id, "reason": f"{type(res).__name__}: {res}"})
        else:
            out.append((ts, res))
    return out


def _fs_all(items, grid_size, standardize, on_series_error, executor, dropped):
    def run(item):
        sid, remainder = item
        try:
            return fs_point(sid, remainder, m=grid_size, standardize=standardize)
        except SERIES_ERRORS as exc:
            if on_series_error != "drop":
                raise
            return exc

    out = []
    for (sid, _), res in zip(items, _map(executor, run, items)):
        if isinstance(res, Exception):
            dropped.append({"id": sid, "reason": f"{type(res).__name__}: {res}"})
        else:
            out.append(res)
    return out


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def write_distance_csv(path, dm):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + list(dm.ids))
        for i, sid in enumerate(dm.ids):
            w.writerow([sid] + [repr(float(v)) for v in dm.d[i]])


def write_components_csv(path, ts, dec):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "trend", "seasonal", "remainder"])
        for i in range(ts.n):
            w.writerow([
                format_timestamp(ts.timestamp(i)),
                repr(float(dec.trend[i])),
                repr(float(dec.seasonal[i])),
                repr(float(dec.remainder[i])),
            ])


def write_density_csv(path, remainder, point, grid_size, standardize):
    x = np.asarray(remainder, dtype=np.float64)
    if standardize:
        x = (x - x.mean()) / x.std(ddof=1)
    model = DensityModel(x, point.bandwidth)
    grid = make_grid(model, grid_size)
    f, fp = kde_pdf_and_deriv(model, grid.points)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "density", "derivative"])
        for xi, fi, di in zip(grid.points, f, fp):
            w.writerow([repr(float(xi)), repr(float(fi)), repr(float(di))])


def clustering_record(dm, clustering, curve):
    ids = dm.ids
    return {
        "k": int(clustering.k),
        "labels": {sid: int(l) for sid, l in zip(ids, clustering.labels)},
        "medoids": [ids[i] for i in clustering.medoids],
        "silhouettes": {sid: float(s) for sid, s in zip(ids, clustering.silhouettes)},
        "avg_silhouette": float(clustering.avg_silhouette),
        "within_cluster_distance": float(clustering.cost),
        "per_k_silhouette_curve": {str(k): float(v) for k, v in curve.items()},
    }


def analyze_pollutant(name, path, config, executor=None):
    """Run the full chain for one input file and write its artifacts.

    Returns the manifest record for this pollutant. Raises PollutantFailed
    with the failing stage on any error.
    """
    out = Path(config.output_dir) / name
    stage = "ingest"
    try:
        series, dropped = prepare_series(path, config.max_gap, config.on_series_error)
        stage = "decompose"
        decomposed = _decompose_all(series, config.stl, config.on_series_error, executor, dropped)
        stage = "infoplane"
        items = [(ts.id, dec.remainder) for ts, dec in decomposed]
        points = _fs_all(items, config.grid_size, config.standardize, config.on_series_error, executor, dropped)
        kept_ids = {p.id for p in points}
        decomposed = [(ts, dec) for ts, dec in decomposed if ts.id in kept_ids]
        stage = "cluster"
        dm = distance_matrix(
            [dec.remainder for _, dec in decomposed],
            [ts.id for ts, _ in decomposed],
            strict=config.strict_cid,
        )
        m = dm.m
        clustering = curve = None
        k_max = min(config.k_max, m - 1)
        if m >= 3 and config.k_min <= k_max:
            clustering, curve = select_k(dm, config.k_min, k_max, config.seed, config.restarts)
    except (FsClustError, OSError, ValueError) as exc:
        raise PollutantFailed(stage, exc) from exc

    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "fs_points.json", [p.to_dict() for p in points])
    write_distance_csv(out / "distance_matrix.csv", dm)
    record = {
        "status": "ok",
        "input": str(path),
        "n_samples": int(series[0].n),
        "origin": format_timestamp(series[0].origin),
        "step_seconds": float(series[0].step),
        "series": [p.id for p in points],
        "dropped": dropped,
        "fallback_bandwidth": [p.id for p in points if p.fallback_bandwidth_used],
        "lenient_cid_pairs": [list(pair) for pair in dm.flagged_pairs],
    }
    if clustering is not None:
        crec = clustering_record(dm, clustering, curve)
        _write_json(out / "clustering.json", crec)
        record["k"] = crec["k"]
        record["per_k_silhouette_curve"] = crec["per_k_silhouette_curve"]
    else:
        record["k"] = None
        record["clustering_skipped"] = f"need at least 3 series and k_min <= m-1 (m={m})"
    if config.emit_svg:
        labels = None if clustering is None else clustering.labels
        (out / "fsplane.svg").write_text(fs_plane_svg(points, labels, f"Fisher-Shannon plane: {name}"))
        if curve:
            (out / "silhouette.svg").write_text(silhouette_svg({name: curve}, f"Average silhouette: {name}"))
    if config.emit_components:
        (out / "components").mkdir(exist_ok=True)
        for ts, dec in decomposed:
            write_components_csv(out / "components" / f"{ts.id}.csv", ts, dec)
    if config.emit_density:
        (out / "density").mkdir(exist_ok=True)
        rem = {ts.id: dec.remainder for ts, dec in decomposed}
        for p in points:
            write_density_csv(out / "density" / f"{p.id}.csv", rem[p.id], p, config.grid_size, config.standardize)
    return record


def run_pipeline(config):
    """Analyze every configured input; returns ``(exit_code, manifest)``.

    A failing input is recorded in the manifest and does not stop the others.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "fsclust_version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "config": config.to_dict(),
        "conventions": {
            "entropy": "H = -integral f log f (standard sign)",
            "kde_exponent": "exp(-u^2/2)",
            "bandwidth": "Sheather-Jones two-stage direct plug-in; Silverman 0.9*scale*n^-1/5 fallback",
            "quadrature": f"trapezoidal, uniform grid, +/-8 bandwidths, integrand cutoff {CUTOFF:g}*max(f)",
            "partitioning": "k-medoids alternation, lowest-index tie-breaking, best of seeded restarts",
            "silhouette_singleton": 0.0,
            "gap_policy": "trim leading/trailing gaps, linear interpolation up to max_gap",
        },
        "pollutants": {},
    }
    status = 0
    workers = max(1, int(config.workers))
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for name, path in config.inputs.items():
            try:
                rec = analyze_pollutant(name, path, config, executor)
            except PollutantFailed as exc:
                log.error("%s failed during %s: %s", name, exc.stage, exc.error)
                status = 1
                rec = {
                    "status": "error",
                    "input": str(path),
                    "error": {
                        "stage": exc.stage,
                        "type": type(exc.error).__name__,
                        "message": str(exc.error),
                    },
                }
            manifest["pollutants"][name] = rec
    finally:
        if executor is not None:
            executor.shutdown()

    curves = {
        name: {int(k): v for k, v in rec["per_k_silhouette_curve"].items()}
        for name, rec in manifest["pollutants"].items()
        if rec.get("per_k_silhouette_curve")
    }
    if config.emit_svg and curves:
        (out / "silhouette.svg").write_text(silhouette_svg(curves))
    _write_json(out / "manifest.json", manifest)
    return status, manifest
