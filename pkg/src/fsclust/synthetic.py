"""Seeded synthetic hourly data with two known generative regimes.

"smooth" stations: AR(1) remainder (phi=0.95, small innovations).
"rough" stations: white-noise remainder with a larger variance.
Both carry a daily cycle, a slow trend and a few short gaps.
"""
import json
from pathlib import Path

import numpy as np

from .ingest import TimeSeries, write_csv
from datetime import datetime, timezone

ORIGIN = datetime(2017, 9, 1, tzinfo=timezone.utc)


def ar1(n, phi, sigma, rng):
    e = rng.normal(0.0, sigma, n)
    x = np.empty(n)
    x[0] = e[0] / np.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return x


def station_series(regime, n, rng, period=24):
    t = np.arange(n)
    phase = rng.uniform(0, 2 * np.pi)
    cycle = rng.uniform(4.0, 8.0) * np.sin(2 * np.pi * t / period + phase)
    trend = rng.uniform(20.0, 40.0) + rng.uniform(-2.0, 2.0) * t / n
    if regime == "smooth":
        noise = ar1(n, 0.95, 0.3, rng)
    else:
        noise = rng.normal(0.0, 3.0, n)
    return trend + cycle + noise


def make_pollutant(name, n_per_regime=4, n=1440, seed=0, gaps=True):
    """Return ``(series, labels)``; labels map station id to 0 (smooth) or 1 (rough)."""
    rng = np.random.default_rng(seed)
    series, labels = [], {}
    for regime_idx, regime in enumerate(("smooth", "rough")):
        for j in range(n_per_regime):
            sid = f"{regime}{j + 1}"
            values = station_series(regime, n, rng)
            mask = np.zeros(n, dtype=bool)
            if gaps:
                for _ in range(2):
                    start = int(rng.integers(24, n - 24))
                    mask[start : start + int(rng.integers(1, 4))] = True
            values[mask] = 0.0
            series.append(TimeSeries(sid, ORIGIN, 3600.0, values, mask))
            labels[sid] = regime_idx
    return series, labels


def write_fixture(out_dir, seed=0, n=1440, n_per_regime=4, pollutants=("A", "B")):
    """Write one CSV per pollutant, ground-truth labels and a ready-to-run config."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = {}
    lines = ["[inputs]"]
    for k, name in enumerate(pollutants):
        series, labels = make_pollutant(name, n_per_regime, n, seed + 1000 * k)
        write_csv(out_dir / f"{name}.csv", series)
        truth[name] = labels
        lines.append(f"{name} = {name}.csv")
    lines += ["", "[options]", "output_dir = results", f"seed = {seed}", ""]
    (out_dir / "truth.json").write_text(json.dumps(truth, indent=2) + "\n")
    config = out_dir / "config.ini"
    config.write_text("\n".join(lines))
    return config
