"""Parameter sweeps and the CorrelationGrid container behind the CLI.

Configs carry dimensionful values; every run divides frequencies by the atomic
``gamma`` (and multiplies times by it) so the numerics always see gamma = 1.
Output axes are therefore in units of gamma, or 1/gamma for delays.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .atom import AtomParams
from .delay import delta_g2, g2_curve
from .errors import ConfigError, GridTooSmall
from .secular import dressed_params, pair_detunings, parse_pair, secular_g2
from .spectral import g11_zero, g22_zero, physical_spectrum

MODES = ("spectrum", "g2tau", "g2map", "dg2map", "validate")
FORMATS = ("csv", "json")

DEFAULT_GRIDS = {
    "spectrum": "-15:15:601",
    "g2tau": "0:0.3:301",
    "g2map": "-160:160:81",
    "dg2map": "-160:160:81",
    "validate": "0:1:2",
}


@dataclass(frozen=True)
class AxisSpec:
    start: float
    stop: float
    count: int

    @classmethod
    def parse(cls, text):
        """'start:stop:count' -> AxisSpec."""
        parts = str(text).split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must look like start:stop:count, got {text!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise ConfigError(f"bad grid {text!r}: {e}") from None
        return cls(start, stop, count)

    def __str__(self):
        return f"{self.start!r}:{self.stop!r}:{self.count}"

    def values(self, scale=1.0):
        if self.count < 2:
            raise GridTooSmall(f"scan axis needs at least 2 points, got {self.count}")
        return np.linspace(self.start, self.stop, self.count) * scale


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    v: float = 10.0
    delta: float = 0.0
    gamma: float = 1.0
    gamma_f: tuple = (1.0,)
    grid: AxisSpec = None
    tau_max: float = None
    pairs: tuple = ("RR",)
    secular: bool = True
    tol: float = 1e-6
    cap: int = 8
    workers: int = 1
    out: str = None
    format: str = "csv"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.grid is None:
            object.__setattr__(self, "grid", AxisSpec.parse(DEFAULT_GRIDS[self.mode]))
        elif isinstance(self.grid, str):
            object.__setattr__(self, "grid", AxisSpec.parse(self.grid))
        elif isinstance(self.grid, dict):
            object.__setattr__(self, "grid", AxisSpec(**self.grid))
        gf = self.gamma_f
        gf = tuple(float(g) for g in (gf if isinstance(gf, (tuple, list)) else [gf]))
        object.__setattr__(self, "gamma_f", gf)
        pairs = self.pairs if isinstance(self.pairs, (tuple, list)) else [self.pairs]
        object.__setattr__(self, "pairs", tuple(str(p).upper() for p in pairs))
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if not self.v >= 0:
            raise ConfigError("v must be non-negative")
        if not gf or any(not g > 0 for g in gf):
            raise ConfigError("gamma_f values must be positive")
        if self.tau_max is not None and not self.tau_max > 0:
            raise ConfigError("tau_max must be positive")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        for p in self.pairs:
            try:
                parse_pair(p)
            except ValueError as e:
                raise ConfigError(f"bad line pair {p!r}: {e}") from None
        if self.mode != "spectrum" and len(gf) != 1:
            raise ConfigError(f"mode {self.mode} takes a single gamma_f")

    @property
    def atom(self):
        """Atom parameters in units of gamma."""
        return AtomParams(self.v / self.gamma, self.delta / self.gamma, 1.0)

    def axis(self):
        grid = self.grid
        if self.mode == "g2tau" and self.tau_max is not None:
            grid = replace(grid, stop=self.tau_max)
        # delays are times, everything else a frequency
        scale = self.gamma if self.mode == "g2tau" else 1.0 / self.gamma
        return grid.values(scale)

    def to_dict(self):
        d = asdict(self)
        d["grid"] = str(self.grid)
        d["gamma_f"] = list(self.gamma_f)
        d["pairs"] = list(self.pairs)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


# -- grid container ---------------------------------------------------------


@dataclass
class Axis:
    name: str
    unit: str
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


@dataclass
class CorrelationGrid:
    axes: list
    columns: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = self.shape
        cols = {}
        for name, vals in self.columns.items():
            vals = np.asarray(vals, dtype=float)
            if vals.size != int(np.prod(shape)):
                raise ValueError(f"column {name!r} has {vals.size} values, axes need {int(np.prod(shape))}")
            cols[name] = vals.reshape(shape)
        self.columns = cols

    @property
    def shape(self):
        return tuple(len(a.values) for a in self.axes)

    def __getitem__(self, name):
        return self.columns[name]

    def _rows(self):
        mesh = np.meshgrid(*[a.values for a in self.axes], indexing="ij")
        cols = [m.ravel() for m in mesh] + [c.ravel() for c in self.columns.values()]
        return np.column_stack(cols)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([a.name for a in self.axes] + list(self.columns))
        for row in self._rows():
            w.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, n_axes):
        rows = list(csv.reader(io.StringIO(text)))
        header, data = rows[0], np.array(rows[1:], dtype=float)
        axes = []
        for k in range(n_axes):
            # first appearance order recovers the row-major axis values
            _, idx = np.unique(data[:, k], return_index=True)
            axes.append(Axis(header[k], "", data[np.sort(idx), k]))
        cols = {name: data[:, n_axes + j] for j, name in enumerate(header[n_axes:])}
        return cls(axes, cols)

    def to_json(self):
        doc = {
            "axes": [{"name": a.name, "unit": a.unit, "values": a.values.tolist()} for a in self.axes],
            "values": {k: v.ravel().tolist() for k, v in self.columns.items()},
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        axes = [Axis(a["name"], a["unit"], a["values"]) for a in doc["axes"]]
        return cls(axes, doc["values"], doc.get("metadata", {}))

    def dump(self, path, fmt="csv"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


# -- workers ------------------------------------------------------------------
# one task per row; the same rows are evaluated whatever the worker count,
# so results do not depend on concurrency


def _pmap(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _spectrum_row(task):
    gamma_f, deltas, params = task
    return physical_spectrum(gamma_f, deltas, params)


def _map_row(task):
    kind, gamma_f, d1, d2, params = task
    if kind == "dg2":
        return delta_g2(gamma_f, d1, d2, params)
    g0 = g22_zero(gamma_f, d1, d2, params)
    return g0 / (g11_zero(gamma_f, d1, params) * g11_zero(gamma_f, d2, params))


def _g2tau_row(task):
    pair, gamma_f, taus, params = task
    d1, d2 = pair_detunings(pair, params)
    return g2_curve(gamma_f, d1, d2, taus, params)


def _metadata(cfg, t0, **extra):
    from . import __version__

    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "units": "frequencies in gamma, delays in 1/gamma",
        "wall_time_s": time.perf_counter() - t0,
    }
    meta.update(extra)
    return meta


def _require(cfg, mode):
    if cfg.mode != mode:
        raise ConfigError(f"expected mode {mode}, got {cfg.mode}")


def run_spectrum(cfg: SweepConfig) -> CorrelationGrid:
    """Filtered spectrum S(Gamma, delta) for each listed Gamma over the delta grid."""
    _require(cfg, "spectrum")
    t0 = time.perf_counter()
    deltas = cfg.axis()
    gfs = np.array(cfg.gamma_f) / cfg.gamma
    rows = _pmap(_spectrum_row, [(g, deltas, cfg.atom) for g in gfs], cfg.workers)
    axes = [Axis("gamma_f", "gamma", gfs), Axis("delta", "gamma", deltas)]
    return CorrelationGrid(axes, {"S": np.array(rows)}, _metadata(cfg, t0))


def run_g2tau(cfg: SweepConfig) -> CorrelationGrid:
    """Normalized g2(pair; tau) for each named line pair, optionally with the secular curve."""
    _require(cfg, "g2tau")
    t0 = time.perf_counter()
    taus = cfg.axis()
    params = cfg.atom
    gf = cfg.gamma_f[0] / cfg.gamma
    rows = _pmap(_g2tau_row, [(p, gf, taus, params) for p in cfg.pairs], cfg.workers)
    cols = {}
    for pair, row in zip(cfg.pairs, rows):
        cols[f"g2_{pair}"] = row
        if cfg.secular and params.v > 0:
            cols[f"secular_{pair}"] = secular_g2(pair, taus, dressed_params(params), gf)
    return CorrelationGrid([Axis("tau", "1/gamma", taus)], cols, _metadata(cfg, t0))


def symmetry_residuals(M, axis_values, params):
    """Relative residuals of the diagonal and (at zero detuning) antidiagonal symmetries."""
    scale = max(np.abs(M).max(), 1e-300)
    out = {"diagonal": float(np.abs(M - M.T).max() / scale)}
    mirrored = np.allclose(axis_values, -axis_values[::-1], rtol=0, atol=1e-12 * np.abs(axis_values).max())
    if params.delta_L == 0 and mirrored:
        out["antidiagonal"] = float(np.abs(M - M[::-1, ::-1]).max() / scale)
    else:
        out["antidiagonal"] = None
    return out


def _run_map(cfg, kind, name):
    t0 = time.perf_counter()
    d = cfg.axis()
    params = cfg.atom
    gf = cfg.gamma_f[0] / cfg.gamma
    rows = _pmap(_map_row, [(kind, gf, x, d, params) for x in d], cfg.workers)
    M = np.array(rows)
    axes = [Axis("delta1", "gamma", d), Axis("delta2", "gamma", d)]
    meta = _metadata(cfg, t0, symmetry_residuals=symmetry_residuals(M, d, params))
    return CorrelationGrid(axes, {name: M}, meta)


def run_g2map(cfg: SweepConfig) -> CorrelationGrid:
    """Zero-delay normalized g2(delta1, delta2) map."""
    _require(cfg, "g2map")
    return _run_map(cfg, "g2", "g2")


def run_dg2map(cfg: SweepConfig) -> CorrelationGrid:
    """Unnormalized spectral correlation map G22_0 - G11 G11."""
    _require(cfg, "dg2map")
    return _run_map(cfg, "dg2", "dG2")


RUNNERS = {"spectrum": run_spectrum, "g2tau": run_g2tau, "g2map": run_g2map, "dg2map": run_dg2map}
