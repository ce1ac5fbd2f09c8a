"""Run configuration: an INI file with an ``[inputs]`` and an optional ``[options]`` section.

Example::

    [inputs]
    NO2 = data/no2.csv
    O3 = data/o3.csv

    [options]
    output_dir = results
    max_gap = 6
    seasonal_window = periodic
    seed = 0

Relative paths resolve against the directory holding the config file.
Unknown sections or keys are rejected.
"""
import configparser
from dataclasses import dataclass, field, fields
import os
from pathlib import Path

from .cluster import DEFAULT_K_MAX, DEFAULT_RESTARTS
from .decompose import PERIODIC, StlParams
from .density import DEFAULT_GRID_SIZE
from .errors import ConfigError
from .ingest import DEFAULT_MAX_GAP

WORKERS_ENV = "FSCLUST_WORKERS"


@dataclass(frozen=True)
class RunConfig:
    inputs: dict
    output_dir: Path = Path("results")
    max_gap: int = DEFAULT_MAX_GAP
    stl: StlParams = field(default_factory=StlParams)
    grid_size: int = DEFAULT_GRID_SIZE
    standardize: bool = False
    k_min: int = 2
    k_max: int = DEFAULT_K_MAX
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    strict_cid: bool = True
    on_series_error: str = "abort"
    workers: int = 1
    emit_components: bool = False
    emit_density: bool = False
    emit_svg: bool = True

    def to_dict(self):
        """Every setting except ``workers`` (which must not affect outputs)."""
        out = {}
        for f in fields(self):
            if f.name == "workers":
                continue
            v = getattr(self, f.name)
            if f.name == "inputs":
                v = {k: str(p) for k, p in v.items()}
            elif f.name == "stl":
                v = v.to_dict()
            elif isinstance(v, Path):
                v = str(v)
            out[f.name] = v
        return out


_INT_KEYS = {
    "max_gap": 0,
    "period": 2,
    "trend_window": 3,
    "inner_iterations": 1,
    "outer_iterations": 0,
    "grid_size": 2,
    "k_min": 2,
    "k_max": 2,
    "seed": 0,
    "restarts": 1,
    "workers": 1,
}
_BOOL_KEYS = {"standardize", "strict_cid", "emit_components", "emit_density", "emit_svg"}
_OTHER_KEYS = {"output_dir", "seasonal_window", "on_series_error"}
_OPTION_KEYS = set(_INT_KEYS) | _BOOL_KEYS | _OTHER_KEYS
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_int(key, raw, minimum):
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if v < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {v}")
    return v


def _parse_bool(key, raw):
    r = raw.strip().lower()
    if r in _TRUE:
        return True
    if r in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _odd(key, v):
    if v % 2 == 0:
        raise ConfigError(f"{key}: must be odd, got {v}")
    return v


def build_config(inputs, options=None, base_dir=Path("."), check_paths=True):
    """Validate raw string options and return a fully defaulted RunConfig."""
    options = dict(options or {})
    base_dir = Path(base_dir)
    unknown = sorted(set(options) - _OPTION_KEYS)
    if unknown:
        raise ConfigError(f"unknown option(s): {', '.join(unknown)}")
    if not inputs:
        raise ConfigError("inputs: at least one input file is required")

    resolved = {}
    for name, raw in inputs.items():
        p = Path(str(raw).strip())
        if not p.is_absolute():
            p = base_dir / p
        if check_paths and not p.is_file():
            raise ConfigError(f"inputs.{name}: file not found: {p}")
        resolved[name] = p

    kw = {}
    for key, minimum in _INT_KEYS.items():
        if key in options:
            kw[key] = _parse_int(key, str(options[key]), minimum)
    for key in _BOOL_KEYS:
        if key in options:
            kw[key] = _parse_bool(key, str(options[key]))

    stl_kw = {}
    for key in ("period", "trend_window", "inner_iterations", "outer_iterations"):
        if key in kw:
            stl_kw[key] = kw.pop(key)
    if "trend_window" in stl_kw:
        _odd("trend_window", stl_kw["trend_window"])
    if "seasonal_window" in options:
        raw = str(options["seasonal_window"]).strip()
        if raw.lower() == PERIODIC:
            stl_kw["seasonal_window"] = PERIODIC
        else:
            stl_kw["seasonal_window"] = _odd("seasonal_window", _parse_int("seasonal_window", raw, 3))
    try:
        stl = StlParams(**stl_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if kw.get("k_min", 2) > kw.get("k_max", DEFAULT_K_MAX):
        raise ConfigError("k_min: must not exceed k_max")
    if "on_series_error" in options:
        mode = str(options["on_series_error"]).strip().lower()
        if mode not in ("abort", "drop"):
            raise ConfigError(f"on_series_error: expected 'abort' or 'drop', got {mode!r}")
        kw["on_series_error"] = mode
    out = Path(str(options.get("output_dir", "results")).strip())
    if not out.is_absolute():
        out = base_dir / out
    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        kw["workers"] = _parse_int(WORKERS_ENV, env_workers, 1)
    return RunConfig(inputs=resolved, output_dir=out, stl=stl, **kw)


def validate_config(path):
    """Read and validate an INI run configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__", inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    extra = sorted(set(parser.sections()) - {"inputs", "options"})
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(extra)}")
    if not parser.has_section("inputs"):
        raise ConfigError("missing [inputs] section")
    inputs = dict(parser.items("inputs"))
    options = dict(parser.items("options")) if parser.has_section("options") else {}
    return build_config(inputs, options, base_dir=path.parent)
