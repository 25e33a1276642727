"""JSON configuration for sweeps and validation runs.

A document with ``"kind": "sweep"`` (or any document with a ``"scheme"``
key) becomes a :class:`SweepSpec`; ``"kind": "validate"`` becomes a
:class:`ValidationConfig`. Unknown keys are rejected everywhere.

Grid values are a number, a nonempty list of numbers, or a log-range
string ``"START..STOP xF"`` (``×`` also accepted) holding
``START * F**k`` for every ``k`` with the value not above ``STOP``.
"""

import json
import math
import os
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Optional, Tuple

from .errors import ConfigError
from .mc_oracle import MIN_SAMPLES, MIN_SYMBOLS

DEFAULT_MAX_ROWS = 1_000_000
DEFAULT_VALIDATION_SEED = 20261017
FORMATS = ("csv", "json")

#: Grid keys per scheme and mode, in the order that fixes row order.
GRID_KEYS = {
    ("gsteep", "siso"): ("a", "b", "alpha", "beta"),
    ("gsteep", "mimo"): ("n_A", "n_B", "n_E", "p_A", "p_B", "realization"),
    ("psteep", "siso"): ("M", "a", "b", "alpha", "beta"),
    ("msteep", "symmetric"): ("M", "sigma2", "sigma2_A", "sigma2_E", "sigma2_EA"),
    ("msteep", "random"): ("M", "n_A", "n_E", "p_A", "p_u", "realization"),
    ("classic", "mimo"): ("n_A", "n_B", "n_E", "p_A", "realization"),
}
INT_KEYS = {"n_A", "n_B", "n_E", "M", "realization"}
OPTIONAL_KEYS = {"realization": (0,)}
SCHEMES = ("gsteep", "psteep", "msteep", "classic")

SUITES = ("oracle", "identities", "propositions", "appendixC", "appendixD")
DEFAULT_TOLERANCES = {
    "z": 3.0,
    "identity": 1e-9,
    "P_anchor": 0.05,
    "threshold_rel": 1e-3,
    "dof": 0.05,
    "prop2_gap": 0.05,
    "siso_anchor": 0.02,
    "bisection": 1e-8,
    "scaling": 0.1,
}

_RANGE = re.compile(r"^\s*([^.\s][^\s]*?)\s*\.\.\s*([^\s]+)\s*[x×]\s*([^\s]+)\s*$")


@dataclass(frozen=True)
class SweepSpec:
    scheme: str
    mode: str
    grid: Dict[str, Tuple[float, ...]]
    seed: int = 0
    format: str = "csv"
    out: Optional[str] = None
    max_rows: int = DEFAULT_MAX_ROWS

    @property
    def keys(self):
        return GRID_KEYS[(self.scheme, self.mode)]

    @property
    def n_rows(self):
        return math.prod(len(self.grid[k]) for k in self.keys)

    def points(self):
        """Grid points as dicts, in lexicographic order of :attr:`keys`."""
        keys = self.keys
        for combo in product(*(self.grid[k] for k in keys)):
            yield dict(zip(keys, combo))


@dataclass(frozen=True)
class ValidationConfig:
    suites: Tuple[str, ...] = SUITES
    seed: int = DEFAULT_VALIDATION_SEED
    gaussian_samples: int = 1_000_000
    psk_symbols: int = 100_000
    configs_per_scheme: int = 20
    instances: int = 50
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: Optional[str] = None


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}" if path else msg)


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    for k in obj:
        if k not in allowed:
            _fail(path, f"unknown key {k!r} (allowed: {', '.join(sorted(allowed))})")


def _number(v, path, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {v!r}")
    if not math.isfinite(v):
        _fail(path, f"non-finite value {v!r}")
    if integer:
        if float(v) != int(v):
            _fail(path, f"expected an integer, got {v!r}")
        return int(v)
    return float(v)


def expand_log_range(text, path="range"):
    """Expand ``"START..STOP xF"`` into ``START * F**k <= STOP``."""
    m = _RANGE.match(text)
    if not m:
        _fail(path, f"cannot parse range {text!r}; expected 'START..STOP xF'")
    try:
        start, stop, factor = (float(g) for g in m.groups())
    except ValueError:
        _fail(path, f"cannot parse range {text!r}; expected 'START..STOP xF'")
    if not (start > 0 and stop >= start and factor > 1) or not all(map(math.isfinite, (start, stop, factor))):
        _fail(path, f"range {text!r} needs 0 < START <= STOP and F > 1")
    n = int(math.floor(math.log(stop / start) / math.log(factor) + 1e-9))
    return tuple(start * factor**k for k in range(n + 1))


def _grid_values(v, path, integer):
    if isinstance(v, str):
        vals = expand_log_range(v, path)
        if integer and any(x != int(x) for x in vals):
            _fail(path, f"range {v!r} produces non-integer values")
        return tuple(int(x) for x in vals) if integer else vals
    if isinstance(v, list):
        if not v:
            _fail(path, "empty grid")
        return tuple(_number(x, f"{path}[{i}]", integer) for i, x in enumerate(v))
    return (_number(v, path, integer),)


def _parse_grid(scheme, grid, path):
    if not isinstance(grid, dict) or not grid:
        _fail(path, "grid must be a nonempty object")
    modes = [m for (s, m) in GRID_KEYS if s == scheme]
    allowed = set().union(*(GRID_KEYS[(scheme, m)] for m in modes))
    _check_keys(grid, allowed, path)
    given = set(grid)
    for mode in modes:
        keys = GRID_KEYS[(scheme, mode)]
        required = {k for k in keys if k not in OPTIONAL_KEYS}
        if given <= set(keys) and required <= given:
            break
    else:
        options = "; ".join(", ".join(GRID_KEYS[(scheme, m)]) for m in modes)
        _fail(path, f"grid keys {sorted(given)} do not match any {scheme} parameter set ({options})")
    values = {}
    for k in keys:
        if k in grid:
            values[k] = _grid_values(grid[k], f"{path}.{k}", k in INT_KEYS)
        else:
            values[k] = OPTIONAL_KEYS[k]
    return mode, values


def _seed(v, path):
    s = _number(v, path, integer=True)
    if s < 0:
        _fail(path, "seed must be >= 0")
    return s


def _load(source):
    if isinstance(source, dict):
        return source
    text = None
    if isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        try:
            with open(os.fspath(source), encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source!r}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def parse_sweep(doc) -> SweepSpec:
    _check_keys(doc, {"kind", "scheme", "grid", "seed", "format", "out", "max_rows"}, "")
    scheme = doc.get("scheme")
    if scheme not in SCHEMES:
        _fail("scheme", f"unknown scheme {scheme!r} (expected one of {', '.join(SCHEMES)})")
    if "grid" not in doc:
        _fail("grid", "missing")
    mode, grid = _parse_grid(scheme, doc["grid"], "grid")
    fmt = doc.get("format", "csv")
    if fmt not in FORMATS:
        _fail("format", f"expected one of {FORMATS}, got {fmt!r}")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        _fail("out", "expected a path string or null")
    max_rows = _number(doc.get("max_rows", DEFAULT_MAX_ROWS), "max_rows", integer=True)
    if not 1 <= max_rows <= DEFAULT_MAX_ROWS:
        _fail("max_rows", f"must lie in [1, {DEFAULT_MAX_ROWS}]")
    spec = SweepSpec(scheme, mode, grid, _seed(doc.get("seed", 0), "seed"), fmt, out, max_rows)
    if spec.n_rows > max_rows:
        _fail("grid", f"{spec.n_rows} grid points exceed the row cap of {max_rows}")
    return spec


def parse_validation(doc) -> ValidationConfig:
    _check_keys(doc, {"kind", "suites", "seed", "samples", "configs_per_scheme", "instances", "tolerances", "out"}, "")
    suites = doc.get("suites", list(SUITES))
    if not isinstance(suites, list) or not suites:
        _fail("suites", "expected a nonempty list")
    for i, s in enumerate(suites):
        if s not in SUITES:
            _fail(f"suites[{i}]", f"unknown suite {s!r} (expected one of {', '.join(SUITES)})")
    samples = doc.get("samples", {})
    _check_keys(samples, {"gaussian", "psk"}, "samples")
    gauss = _number(samples.get("gaussian", 1_000_000), "samples.gaussian", integer=True)
    psk = _number(samples.get("psk", 100_000), "samples.psk", integer=True)
    if gauss < MIN_SAMPLES:
        _fail("samples.gaussian", f"must be >= {MIN_SAMPLES}")
    if psk < MIN_SYMBOLS:
        _fail("samples.psk", f"must be >= {MIN_SYMBOLS}")
    n_cfg = _number(doc.get("configs_per_scheme", 20), "configs_per_scheme", integer=True)
    n_inst = _number(doc.get("instances", 50), "instances", integer=True)
    if n_cfg < 1 or n_inst < 1:
        _fail("", "configs_per_scheme and instances must be >= 1")
    tol = dict(DEFAULT_TOLERANCES)
    overrides = doc.get("tolerances", {})
    _check_keys(overrides, set(DEFAULT_TOLERANCES), "tolerances")
    for k, v in overrides.items():
        tol[k] = _number(v, f"tolerances.{k}")
        if tol[k] < 0:
            _fail(f"tolerances.{k}", "must be >= 0")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        _fail("out", "expected a path string or null")
    return ValidationConfig(
        suites=tuple(dict.fromkeys(suites)),
        seed=_seed(doc.get("seed", DEFAULT_VALIDATION_SEED), "seed"),
        gaussian_samples=gauss,
        psk_symbols=psk,
        configs_per_scheme=n_cfg,
        instances=n_inst,
        tolerances=tol,
        out=out,
    )


def parse_config(source):
    """Parse a config file path, inline JSON text or already-decoded dict.

    Raises
    ------
    ConfigError
        On unreadable files, malformed JSON (with line and column), unknown
        keys, unknown schemes or suites, empty grids and oversized grids.
    """
    doc = _load(source)
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")
    kind = doc.get("kind", "sweep" if "scheme" in doc else None)
    if kind == "sweep":
        return parse_sweep(doc)
    if kind == "validate":
        return parse_validation(doc)
    raise ConfigError(f"kind: expected 'sweep' or 'validate', got {kind!r}")


__all__ = [
    "DEFAULT_MAX_ROWS",
    "DEFAULT_TOLERANCES",
    "DEFAULT_VALIDATION_SEED",
    "GRID_KEYS",
    "SCHEMES",
    "SUITES",
    "SweepSpec",
    "ValidationConfig",
    "expand_log_range",
    "parse_config",
    "parse_sweep",
    "parse_validation",
]
