"""Truncated total variation, level-crossing counts, and the qv sandwich.

The c-truncated total variation of a path over [a, b] is

    ttv(c, [a, b]) = sup over partitions of sum_i max(|dx_i| - c, 0),

the supremum over finite increasing time partitions of the window. For a
piecewise-linear path the supremum is attained on a subset of the sample
times plus the interpolated window endpoints, which makes both the O(n^2)
reference and the O(n) single pass exact.

Crossing counts use closed thresholds: touching a band edge counts as
reaching that side. With that convention the number of completed mesh
transitions of a level sequence equals the sum of crossing counts of the
grid cells, and integrating the crossing count over band centers recovers
the truncated variation (Banach indicatrix form).

The sandwich check brackets ttv at threshold m^-2 between completed
transition sums of the two neighboring shifted families:

  (m-1) * sum_{k=0}^{m-2} qv_c(mesh (m-1)^-2, offset k (m-1)^-3)
      <= ttv(m^-2, [0, sigma_M ^ t])
      <= (m+1) * sum_{k=0}^{m} qv_c(mesh (m+1)^-2, offset k (m+1)^-3)

where qv_c = mesh^2 * (number of completed transitions, the initial one
counting only when X_0 lies exactly on the grid). The completed-transition
form is what makes both bounds exact pathwise; adding the partial first and
last increments of the plain simple quadratic variation can push the lower
side above ttv by order mesh^2. m >= 3 is required for the lower side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .partitions import (
    GridSpec,
    StoppingSequence,
    _grid_hits,
    shifted_lebesgue_family,
    truncate_sequence,
)
from .paths import INFINITE_TIME, SampledPath, evaluate_many, hitting_time_abs
from .quadvar import QvCurve, simple_qv


def _window_values(path: SampledPath, a: float, b: float) -> np.ndarray:
    """Sample values on [a, b] with interpolated endpoint values."""
    if not (0.0 <= a <= b <= path.horizon):
        raise ValueError("window must satisfy 0 <= a <= b <= horizon")
    inner = path.times[(path.times > a) & (path.times < b)]
    ts = np.concatenate(([a], inner, [b]))
    return evaluate_many(path, ts)


def ttv_dp_oracle(path: SampledPath, c: float, a: float = 0.0, b: float | None = None) -> float:
    """Quadratic-time reference maximization, straight from the definition."""
    if c < 0.0:
        raise ValueError("threshold c must be nonnegative")
    x = _window_values(path, a, path.horizon if b is None else b)
    n = x.size
    v = np.zeros(n)
    for i in range(1, n):
        v[i] = float(np.max(v[:i] + np.maximum(np.abs(x[i] - x[:i]) - c, 0.0)))
    return float(v.max())


def _sweep_from_values(x: np.ndarray, c: float) -> float:
    best = 0.0
    m_minus = -x[0]
    m_plus = x[0]
    for xi in x[1:]:
        vi = max(best, m_minus + xi - c, m_plus - xi - c)
        if vi > best:
            best = vi
        if vi - xi > m_minus:
            m_minus = vi - xi
        if vi + xi > m_plus:
            m_plus = vi + xi
    return best


def ttv_sweep(path: SampledPath, c: float, a: float = 0.0, b: float | None = None) -> float:
    """Single-pass truncated variation; equals ttv_dp_oracle.

    Keeps running maxima of v_j, v_j - x_j, v_j + x_j over processed points,
    which is enough because each new partition leg contributes
    max(x_i - x_j - c, x_j - x_i - c, 0).
    """
    if c < 0.0:
        raise ValueError("threshold c must be nonnegative")
    x = _window_values(path, a, path.horizon if b is None else b)
    return _sweep_from_values(x, c)


def ttv_running(path: SampledPath, c: float) -> np.ndarray:
    """ttv(c, [0, t]) at every sample time, one pass."""
    if c < 0.0:
        raise ValueError("threshold c must be nonnegative")
    x = path.values
    out = np.zeros(x.size)
    best = 0.0
    m_minus = -x[0]
    m_plus = x[0]
    for i in range(1, x.size):
        xi = x[i]
        vi = max(best, m_minus + xi - c, m_plus - xi - c)
        if vi > best:
            best = vi
        if vi - xi > m_minus:
            m_minus = vi - xi
        if vi + xi > m_plus:
            m_plus = vi + xi
        out[i] = best
    return out


def _ttv_batch(values: np.ndarray, c: float) -> np.ndarray:
    """Final ttv(c) for each row of a matrix of window values."""
    x = np.asarray(values, dtype=np.float64)
    best = np.zeros(x.shape[0])
    m_minus = -x[:, 0].copy()
    m_plus = x[:, 0].copy()
    for i in range(1, x.shape[1]):
        xi = x[:, i]
        vi = np.maximum(best, np.maximum(m_minus + xi, m_plus - xi) - c)
        np.maximum(best, vi, out=best)
        np.maximum(m_minus, vi - xi, out=m_minus)
        np.maximum(m_plus, vi + xi, out=m_plus)
    return best


def crossing_count(
    path: SampledPath, z: float, c: float, a: float = 0.0, b: float | None = None
) -> int:
    """Crossings of the band [z - c/2, z + c/2] over the window, closed edges."""
    if c <= 0.0:
        raise ValueError("band width c must be positive")
    x = _window_values(path, a, path.horizon if b is None else b)
    lo, hi = z - 0.5 * c, z + 0.5 * c
    state = 1 if x[0] >= hi else (-1 if x[0] <= lo else 0)
    count = 0
    for v in x[1:]:
        if v >= hi:
            if state == -1:
                count += 1
            state = 1
        elif v <= lo:
            if state == 1:
                count += 1
            state = -1
    return count


def _crossing_counts_multi(x: np.ndarray, centers: np.ndarray, c: float) -> np.ndarray:
    """Crossing counts of many bands at once; one pass over the samples."""
    lo = centers - 0.5 * c
    hi = centers + 0.5 * c
    state = np.where(x[0] >= hi, 1, np.where(x[0] <= lo, -1, 0))
    count = np.zeros(centers.size, dtype=np.int64)
    for v in x[1:]:
        up = v >= hi
        dn = v <= lo
        count += up & (state == -1)
        count += dn & (state == 1)
        state = np.where(up, 1, np.where(dn, -1, state))
    return count


@dataclass(frozen=True)
class CrossingProfile:
    """Piecewise-constant crossing counts over a partition of band centers."""

    z_lo: np.ndarray
    z_hi: np.ndarray
    counts: np.ndarray

    def integral(self) -> float:
        return float(np.sum((self.z_hi - self.z_lo) * self.counts))


def crossing_profile(
    path: SampledPath, c: float, a: float = 0.0, b: float | None = None
) -> CrossingProfile:
    """Counts as a function of the band center z, exact between breakpoints.

    The count can only change where a band edge passes a sample value, so the
    breakpoints are {x_i - c/2, x_i + c/2}; each gap is scored at its
    midpoint.
    """
    if c <= 0.0:
        raise ValueError("band width c must be positive")
    x = _window_values(path, a, path.horizon if b is None else b)
    edges = np.unique(np.concatenate((x - 0.5 * c, x + 0.5 * c)))
    if edges.size < 2:
        return CrossingProfile(edges[:1], edges[:1], np.zeros(1, dtype=np.int64))
    mids = 0.5 * (edges[:-1] + edges[1:])
    counts = _crossing_counts_multi(x, mids, c)
    return CrossingProfile(edges[:-1], edges[1:], counts)


def banach_indicatrix_integral(
    path: SampledPath, c: float, a: float = 0.0, b: float | None = None
) -> float:
    """Integral over band centers of the crossing count; equals ttv(c)."""
    return crossing_profile(path, c, a, b).integral()


def transition_count(path: SampledPath, grid: GridSpec, t: float | None = None) -> int:
    """Completed mesh transitions of the level sequence by time t.

    The first move counts only when X_0 lies exactly on the grid; the partial
    move in progress at t never counts. This is the count whose mesh^2
    multiple matches cell crossing sums exactly.
    """
    ts, _, _, on_grid = _grid_hits(path, grid.mesh, grid.offset)
    upto = path.horizon if t is None else t
    h = int(np.searchsorted(ts, upto, side="right"))
    if h == 0:
        return 0
    return h - 1 + (1 if on_grid else 0)


@dataclass(frozen=True)
class SandwichReport:
    m: int
    threshold: float
    t_eff: float
    lower: float
    middle: float
    upper: float
    holds_lower: bool
    holds_upper: bool

    @property
    def holds(self) -> bool:
        return self.holds_lower and self.holds_upper


def _shifted_transition_sum(path: SampledPath, n: int, t: float) -> float:
    """sum_k mesh^2 * transitions for the n-offset family at mesh n^-2."""
    d = float(n) ** -2
    total = 0.0
    for k in range(n):
        total += d * d * transition_count(path, GridSpec(d, k * float(n) ** -3), t)
    return total


def sandwich_check(
    path: SampledPath, m: int, threshold: float | None = None, t: float | None = None
) -> SandwichReport:
    """Bracket ttv(m^-2) between the two neighboring shifted-family sums."""
    if m < 3:
        raise ValueError("sandwich needs m >= 3")
    big = threshold if threshold is not None else 1.0 + float(np.max(np.abs(path.values)))
    sigma = hitting_time_abs(path, big)
    t_eff = min(path.horizon if t is None else t, sigma, path.horizon)
    c = float(m) ** -2
    middle = ttv_sweep(path, c, 0.0, t_eff)
    lower = (m - 1) * _shifted_transition_sum(path, m - 1, t_eff)
    upper = (m + 1) * _shifted_transition_sum(path, m + 1, t_eff)
    tol = 1e-9 * (1.0 + abs(middle))
    return SandwichReport(
        m=m,
        threshold=big,
        t_eff=t_eff,
        lower=lower,
        middle=middle,
        upper=upper,
        holds_lower=bool(lower <= middle + tol),
        holds_upper=bool(middle <= upper + tol),
    )


def averaged_shifted_qv(
    path: SampledPath, m: int, threshold: float | None = None
) -> QvCurve:
    """Average of the m shifted level-sequence qv curves, stopped at sigma.

    sigma is the first time |X| reaches the threshold (default: above the
    path range, so no stopping). Averaging over offsets removes the grid
    alignment artifacts any single offset produces.
    """
    if m < 2:
        raise ValueError("averaging needs m >= 2")
    big = threshold if threshold is not None else 1.0 + float(np.max(np.abs(path.values)))
    sigma = hitting_time_abs(path, big)
    family = shifted_lebesgue_family(path, m)
    if sigma < path.horizon:
        family = [truncate_sequence(s, sigma, path) for s in family]
    curves = [simple_qv(path, s) for s in family]
    stamps = curves[0].times
    for cur in curves[1:]:
        stamps = np.union1d(stamps, cur.times)
    vals = np.mean([evaluate_many(cur, stamps) for cur in curves], axis=0)
    return QvCurve(stamps, vals, seq_id=f"avg-shifted:m={m}")


def qv_from_ttv(path: SampledPath, c_schedule) -> list[QvCurve]:
    """Curves t -> c * ttv(c, [0, t]) for each threshold c in the schedule."""
    out = []
    for c in c_schedule:
        if c <= 0.0:
            raise ValueError("thresholds must be positive")
        vals = float(c) * ttv_running(path, float(c))
        out.append(QvCurve(path.times, vals, seq_id=f"ttv:c={float(c):.17g}"))
    return out


def write_profile_csv(profile: CrossingProfile, filename: str) -> None:
    """CSV with header z_lo,z_hi,count."""
    import csv

    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["z_lo", "z_hi", "count"])
        for zl, zh, n in zip(profile.z_lo, profile.z_hi, profile.counts):
            w.writerow([f"{zl:.17g}", f"{zh:.17g}", int(n)])
