"""Command-line entry point: ``fsclust {analyze,fsplane,cluster,decompose,synth}``."""
import argparse
from dataclasses import replace
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .cluster import distance_matrix, select_k
from .config import validate_config
from .decompose import PERIODIC, StlParams, stl_decompose
from .density import DEFAULT_GRID_SIZE
from .errors import ConfigError, FsClustError
from .infoplane import fs_point
from .ingest import DEFAULT_MAX_GAP
from .pipeline import clustering_record, prepare_series, run_pipeline, write_components_csv, write_distance_csv

log = logging.getLogger("fsclust")


def _seasonal_window(text):
    if text.lower() == PERIODIC:
        return PERIODIC
    return int(text)


def _add_prep_args(p):
    p.add_argument("--input", required=True, type=Path, help="CSV with a timestamp column and one column per series")
    p.add_argument("--max-gap", type=int, default=DEFAULT_MAX_GAP, help="longest masked run to interpolate")
    p.add_argument("--drop-bad-series", action="store_true", help="drop series with long gaps instead of failing")
    p.add_argument("--period", type=int, default=24)
    p.add_argument("--seasonal-window", type=_seasonal_window, default=PERIODIC)
    p.add_argument("--trend-window", type=int, default=None)
    p.add_argument("--inner-iterations", type=int, default=2)
    p.add_argument("--outer-iterations", type=int, default=0)
    p.add_argument("--raw", action="store_true", help="skip STL and analyze the series as given")


def _prepared(args):
    params = StlParams(
        period=args.period,
        seasonal_window=args.seasonal_window,
        trend_window=args.trend_window,
        inner_iterations=args.inner_iterations,
        outer_iterations=args.outer_iterations,
    )
    series, dropped = prepare_series(args.input, args.max_gap, "drop" if args.drop_bad_series else "abort")
    for d in dropped:
        log.warning("dropped %s: %s", d["id"], d["reason"])
    if args.raw:
        return [(ts, None, ts.values) for ts in series], params
    return [(ts, dec, dec.remainder) for ts in series for dec in [stl_decompose(ts, params)]], params


def _emit(obj, output):
    text = json.dumps(obj, indent=2) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_analyze(args):
    try:
        config = validate_config(args.config)
    except ConfigError as exc:
        log.error("invalid config: %s", exc)
        return 2
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    status, manifest = run_pipeline(config)
    for name, rec in manifest["pollutants"].items():
        if rec["status"] == "ok":
            log.info("%s: %d series, k=%s", name, len(rec["series"]), rec["k"])
        else:
            log.info("%s: FAILED (%s)", name, rec["error"]["message"])
    return status


def cmd_fsplane(args):
    prepared, _ = _prepared(args)
    points = [fs_point(ts.id, x, m=args.grid_size, standardize=args.standardize).to_dict() for ts, _, x in prepared]
    _emit(points, args.output)
    return 0


def cmd_cluster(args):
    prepared, _ = _prepared(args)
    dm = distance_matrix([x for _, _, x in prepared], [ts.id for ts, _, _ in prepared], strict=not args.lenient)
    k_max = args.k_max if args.k_max is not None else min(10, dm.m - 1)
    best, curve = select_k(dm, args.k_min, k_max, args.seed, args.restarts)
    rec = clustering_record(dm, best, curve)
    if args.output_dir is not None:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        write_distance_csv(args.output_dir / "distance_matrix.csv", dm)
        _emit(rec, args.output_dir / "clustering.json")
    else:
        _emit(rec, None)
    return 0


def cmd_decompose(args):
    prepared, params = _prepared(args)
    args.output_dir.mkdir(parents=True, exist_ok=True)
    for ts, dec, _ in prepared:
        write_components_csv(args.output_dir / f"{ts.id}.csv", ts, dec)
    _emit({"stl": params.to_dict(), "series": [ts.id for ts, _, _ in prepared]}, args.output_dir / "stl.json")
    return 0


def cmd_synth(args):
    from .synthetic import write_fixture

    cfg = write_fixture(args.output_dir, seed=args.seed)
    log.info("wrote %s", cfg)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="fsclust", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline driven by an INI config")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--workers", type=int, default=None, help="thread count (overrides config and FSCLUST_WORKERS)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fsplane", help="Fisher-Shannon coordinates of each series")
    _add_prep_args(p)
    p.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--output", type=Path, default=None, help="JSON file (default: stdout)")
    p.set_defaults(func=cmd_fsplane)

    p = sub.add_parser("cluster", help="CID distance matrix and silhouette-selected k-medoids")
    _add_prep_args(p)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--lenient", action="store_true", help="epsilon-guard zero-complexity pairs instead of failing")
    p.add_argument("--output-dir", type=Path, default=None)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("decompose", help="dump STL components per series")
    _add_prep_args(p)
    p.add_argument("--output-dir", required=True, type=Path)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synth", help="write a synthetic two-regime fixture and config")
    p.add_argument("--output-dir", required=True, type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (FsClustError, ValueError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
