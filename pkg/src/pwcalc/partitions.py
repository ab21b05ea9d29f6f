"""Grid stopping-time sequences for piecewise-linear paths.

The level sequence of a path X on the grid d*Z + r stops at tau_0 = 0 and then
at each first time the path hits a grid level different from the level of the
previous stop. On a continuous path consecutive stop values are adjacent grid
levels, so stop values are snapped to exact k*d + r floats; the one exception
is the initial value, which is the raw X_0 whether or not it lies on the grid.

All hits are extracted in one vectorized pass: each linear segment owns the
grid levels it sweeps strictly after its start sample (so a sample lying
exactly on a level belongs to the segment that ends there), and re-touches of
the current level are dropped. A hit exactly on a level counts as reaching it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .paths import SampledPath, evaluate_many

MAX_GRID_HITS = 10**8


class ResourceLimitError(RuntimeError):
    """Raised when a construction would materialize too many stopping times."""


@dataclass(frozen=True)
class GridSpec:
    """Grid d*Z + r with mesh d > 0 and offset 0 <= r < d."""

    mesh: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.mesh > 0.0:
            raise ValueError("mesh must be positive")
        if not (0.0 <= self.offset < self.mesh):
            raise ValueError("offset must lie in [0, mesh)")


@dataclass(frozen=True)
class StoppingSequence:
    """Finite non-decreasing stop times starting at 0 with realized values.

    The list is finite; conceptually every later stop is +inf, so horizon
    truncation of any downstream sum picks up the final partial increment.
    """

    times: np.ndarray
    values: np.ndarray
    horizon: float
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.shape != v.shape or t.size < 1:
            raise ValueError("times and values must be matching 1-d arrays")
        if t[0] != 0.0:
            raise ValueError("stopping sequences start at time 0")
        if t.size > 1 and np.any(np.diff(t) < 0):
            raise ValueError("stop times must be non-decreasing")
        if t[-1] > self.horizon:
            raise ValueError("stop times must not exceed the horizon")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("stops must be finite")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.times.size)


def _grid_hits(path: SampledPath, d: float, r: float, max_hits: int = MAX_GRID_HITS):
    """All successive different-level grid hits of the path, in time order.

    Returns (hit_times, hit_levels, start_level, start_on_grid); levels are
    int64 grid indices, hit value = level * d + r. hit_times excludes time 0.
    """
    t, v = path.times, path.values
    u = (v - r) / d
    a, b = u[:-1], u[1:]
    up = b > a
    # inclusive integer ranges swept strictly after each segment start
    fa, fb = np.floor(a), np.floor(b)
    ca, cb = np.ceil(a), np.ceil(b)
    cnt = np.where(up, fb - fa, ca - cb)
    cnt = np.maximum(cnt, 0.0)
    total = float(cnt.sum())
    if total > max_hits:
        raise ResourceLimitError(
            f"grid hit extraction would produce ~{total:.3g} stops (limit {max_hits:g})"
        )
    cnt = cnt.astype(np.int64)
    total = int(cnt.sum())
    j0f = np.round(u[0])
    start_on_grid = bool(j0f * d + r == v[0])
    j0 = int(j0f)
    if total == 0:
        return (np.empty(0), np.empty(0, dtype=np.int64), j0, start_on_grid)
    seg = np.repeat(np.arange(cnt.size), cnt)
    offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    start = np.where(up, fa + 1.0, ca - 1.0)
    sign = np.where(up, 1.0, -1.0)
    lev = (start[seg] + sign[seg] * offs).astype(np.int64)
    lv = lev * d + r
    t0, t1 = t[seg], t[seg + 1]
    v0, v1 = v[seg], v[seg + 1]
    ts = t0 + (t1 - t0) * ((lv - v0) / (v1 - v0))
    ts = np.clip(ts, t0, t1)
    # drop re-touches of the current level; duplicates are always consecutive
    prev = np.empty(total, dtype=np.int64)
    prev[0] = j0 if start_on_grid else lev[0] - 1
    prev[1:] = lev[:-1]
    keep = lev != prev
    return ts[keep], lev[keep], j0, start_on_grid


def lebesgue_sequence(
    path: SampledPath, grid: GridSpec, max_hits: int = MAX_GRID_HITS
) -> StoppingSequence:
    """Level sequence of the path on the grid, stop values snapped to it."""
    d, r = grid.mesh, grid.offset
    ts, lev, _, _ = _grid_hits(path, d, r, max_hits)
    times = np.concatenate(([0.0], ts))
    values = np.concatenate(([path.values[0]], lev * d + r))
    return StoppingSequence(times, values, path.horizon, label=f"leb:d={d:.17g},r={r:.17g}")


@dataclass(frozen=True)
class CoverReport:
    holds: bool
    worst_oscillation: float
    witness_interval: tuple[float, float]


def verify_fine_cover(path: SampledPath, seq: StoppingSequence, delta: float) -> CoverReport:
    """Check sup-inf of the path over every stop interval is <= delta.

    Intervals are [tau_n, tau_{n+1}] plus the final [tau_K, horizon]. The
    worst oscillation and its interval are reported whether or not the bound
    holds.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    bounds = np.append(seq.times, path.horizon)
    stamps = np.union1d(path.times, bounds)
    vals = evaluate_many(path, stamps)
    idx = np.searchsorted(stamps, bounds, side="left")
    worst = -1.0
    witness = (0.0, 0.0)
    for n in range(len(bounds) - 1):
        lo, hi = idx[n], idx[n + 1]
        seg = vals[lo : hi + 1]
        osc = float(seg.max() - seg.min()) if seg.size else 0.0
        if osc > worst:
            worst = osc
            witness = (float(bounds[n]), float(bounds[n + 1]))
    worst = max(worst, 0.0)
    return CoverReport(holds=bool(worst <= delta), worst_oscillation=worst, witness_interval=witness)


def merge(a: StoppingSequence, b: StoppingSequence, path: SampledPath) -> StoppingSequence:
    """Sorted union of stop times (exact-equality dedup), values re-evaluated."""
    if a.horizon != b.horizon:
        raise ValueError("cannot merge sequences with different horizons")
    if a.horizon != path.horizon:
        raise ValueError("merge path horizon must match the sequences")
    times = np.union1d(a.times, b.times)
    values = evaluate_many(path, times)
    return StoppingSequence(times, values, path.horizon, label=f"merge({a.label},{b.label})")


def shifted_lebesgue_family(
    path: SampledPath, m: int, max_hits: int = MAX_GRID_HITS
) -> list[StoppingSequence]:
    """Level sequences on mesh m^-2 at the m offsets k*m^-3, k = 0..m-1."""
    if m < 2:
        raise ValueError("family needs m >= 2")
    d = float(m) ** -2
    return [
        lebesgue_sequence(path, GridSpec(d, k * float(m) ** -3), max_hits) for k in range(m)
    ]


def truncate_sequence(seq: StoppingSequence, t: float, path: SampledPath) -> StoppingSequence:
    """Stops capped at t: keeps stops with tau < t and appends t itself.

    The appended final stop carries the path value at t, so sums along the
    truncated sequence agree with horizon-truncated sums along the original.
    """
    if t < 0.0 or t > seq.horizon:
        raise ValueError("truncation time out of range")
    keep = seq.times < t
    times = np.append(seq.times[keep], t)
    values = np.append(seq.values[keep], evaluate_many(path, np.asarray([t]))[0])
    return StoppingSequence(times, values, seq.horizon, label=seq.label)


def write_sequence_csv(seq: StoppingSequence, filename: str) -> None:
    """CSV with header n,tau,value; 17 significant digits."""
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "tau", "value"])
        for n, (t, x) in enumerate(zip(seq.times, seq.values)):
            w.writerow([n, f"{t:.17g}", f"{x:.17g}"])


def read_sequence_csv(filename: str, horizon: float | None = None) -> StoppingSequence:
    with open(filename, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["n", "tau", "value"]:
        raise ValueError("expected header n,tau,value")
    data = np.asarray([[float(r[1]), float(r[2])] for r in rows[1:]])
    h = float(data[-1, 0]) if horizon is None else horizon
    return StoppingSequence(data[:, 0], data[:, 1], h)
