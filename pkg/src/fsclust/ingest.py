"""CSV ingestion, gap filling and alignment of uniformly sampled series.

Input format: UTF-8 CSV with a header row. The first column is ``timestamp``
(ISO 8601; naive timestamps are taken as UTC, offsets are converted to UTC);
every other column is one series. Empty cells and ``NaN`` mark missing values.
"""
from collections import Counter
import csv
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
import math

import numpy as np

from .errors import GapTooLarge, IrregularSampling, MalformedInput, NoOverlap

DEFAULT_MAX_GAP = 6
_MISSING = {"", "nan", "NaN", "NAN"}


@dataclass(frozen=True)
class TimeSeries:
    id: str
    origin: datetime
    step: float
    values: np.ndarray
    missing_mask: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        mask = np.array(self.missing_mask, dtype=bool).ravel()
        if values.shape != mask.shape:
            raise ValueError("values and missing_mask differ in length")
        if values.shape[0] < 2:
            raise ValueError(f"series {self.id!r} needs at least 2 samples")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.origin.tzinfo is None:
            raise ValueError("origin must be timezone-aware")
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing_mask", mask)
        object.__setattr__(self, "origin", self.origin.astimezone(timezone.utc))
        object.__setattr__(self, "step", float(self.step))

    @property
    def n(self):
        return self.values.shape[0]

    def timestamp(self, i):
        return self.origin + timedelta(seconds=i * self.step)

    @property
    def end(self):
        return self.timestamp(self.n - 1)

    def slice(self, start, stop):
        return TimeSeries(
            self.id,
            self.timestamp(start),
            self.step,
            self.values[start:stop],
            self.missing_mask[start:stop],
        )


def parse_timestamp(text):
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(s)
    except ValueError as exc:
        raise MalformedInput(f"cannot parse timestamp {text!r}") from exc
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt):
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_value(cell, path, lineno):
    c = cell.strip()
    if c in _MISSING:
        return math.nan
    try:
        return float(c)
    except ValueError as exc:
        raise MalformedInput(f"{path}:{lineno}: cannot parse value {cell!r}") from exc


def parse_csv(path, config=None):
    """Read every data column of ``path`` as a TimeSeries on a common grid.

    Rows absent from the grid between the first and last timestamp become
    masked entries, as do empty or NaN cells. ``config`` is accepted for
    interface symmetry and currently unused.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInput(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if not header or header[0].lower() != "timestamp":
            raise MalformedInput(f"{path}: first column must be named 'timestamp'")
        names = header[1:]
        if not names:
            raise MalformedInput(f"{path}: no data columns")
        if len(set(names)) != len(names):
            raise MalformedInput(f"{path}: duplicate column names")
        times = []
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MalformedInput(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            times.append(parse_timestamp(row[0]))
            rows.append([_parse_value(c, path, lineno) for c in row[1:]])

    if len(times) < 2:
        raise MalformedInput(f"{path}: need at least 2 data rows")
    secs = np.array([(t - times[0]).total_seconds() for t in times])
    diffs = np.diff(secs)
    if np.any(diffs <= 0):
        bad = int(np.argmax(diffs <= 0)) + 1
        raise MalformedInput(f"{path}: timestamps not strictly increasing at data row {bad + 1}")

    counts = Counter(diffs.tolist())
    # modal spacing; ties resolved toward the smaller step
    step = min(counts, key=lambda d: (-counts[d], d))
    ratios = diffs / step
    steps = np.rint(ratios)
    if np.any(np.abs(ratios - steps) > 1e-9):
        raise IrregularSampling(f"{path}: spacing is not a multiple of the modal step {step}s")
    index = np.concatenate(([0], np.cumsum(steps).astype(np.int64)))
    n = int(index[-1]) + 1

    data = np.array(rows, dtype=np.float64)
    out = []
    for j, name in enumerate(names):
        values = np.full(n, np.nan)
        values[index] = data[:, j]
        mask = ~np.isfinite(values)
        values[mask] = 0.0
        out.append(TimeSeries(name, times[0], step, values, mask))
    return out


def write_csv(path, series):
    """Write series sharing origin, step and length; masked entries are left empty."""
    series = list(series)
    if not series:
        raise ValueError("nothing to write")
    first = series[0]
    for s in series[1:]:
        if s.origin != first.origin or s.step != first.step or s.n != first.n:
            raise ValueError("series must share origin, step and length; align them first")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp"] + [s.id for s in series])
        for i in range(first.n):
            row = [format_timestamp(first.timestamp(i))]
            for s in series:
                row.append("" if s.missing_mask[i] else repr(float(s.values[i])))
            w.writerow(row)


def masked_runs(mask):
    """List of ``(start, length)`` for each run of True in ``mask``."""
    m = np.asarray(mask, dtype=bool)
    if not m.any():
        return []
    d = np.diff(np.concatenate(([0], m.view(np.int8), [0])))
    starts = np.flatnonzero(d == 1)
    stops = np.flatnonzero(d == -1)
    return [(int(a), int(b - a)) for a, b in zip(starts, stops)]


def fill_gaps(ts, max_gap=DEFAULT_MAX_GAP):
    """Linearly interpolate masked runs no longer than ``max_gap``."""
    n = ts.n
    values = ts.values.copy()
    for start, length in masked_runs(ts.missing_mask):
        if start == 0 or start + length == n or length > max_gap:
            raise GapTooLarge(ts.id, start, length, max_gap)
        left = values[start - 1]
        right = values[start + length]
        frac = np.arange(1, length + 1) / (length + 1)
        values[start : start + length] = left + (right - left) * frac
    return TimeSeries(ts.id, ts.origin, ts.step, values, np.zeros(n, dtype=bool))


def trim(ts):
    """Drop leading and trailing masked entries. Returns None if nothing is left."""
    valid = np.flatnonzero(~ts.missing_mask)
    if valid.shape[0] < 2:
        return None
    return ts.slice(int(valid[0]), int(valid[-1]) + 1)


def align(series):
    """Truncate all series to their common time interval."""
    series = list(series)
    if not series:
        return []
    step = series[0].step
    if any(s.step != step for s in series):
        raise IrregularSampling("series have different sampling steps")
    ref = series[0].origin
    offsets = []
    for s in series:
        k = (s.origin - ref).total_seconds() / step
        if abs(k - round(k)) > 1e-9:
            raise IrregularSampling(f"series {s.id!r} is not on the common sampling grid")
        offsets.append(int(round(k)))
    start = max(offsets)
    stop = min(o + s.n for o, s in zip(offsets, series))
    if stop - start < 2:
        raise NoOverlap("series do not share a common interval of at least 2 samples")
    return [s.slice(start - o, stop - o) for o, s in zip(offsets, series)]
