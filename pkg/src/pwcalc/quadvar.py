"""Simple quadratic variation and covariation along stopping sequences.

For a stopping sequence tau and path X, the simple quadratic variation at t is

    qv(t) = sum_n (X(tau_n ^ t) - X(tau_{n-1} ^ t))^2,

where the finite stop list is conceptually followed by +inf stops, so the sum
always ends with the partial increment (X(t) - X(tau_last))^2. Covariation is
the analogous product sum; the polarization identity gives it back from plain
quadratic variations of the sum and difference paths.

Curves are emitted as sampled paths on the union of path sample times and
stop times; between stamps a curve is interpreted linearly (the exact curve
is quadratic there, the stamps themselves are exact).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partitions import (
    GridSpec,
    StoppingSequence,
    lebesgue_sequence,
)
from .paths import SampledPath, evaluate_many


@dataclass(frozen=True)
class QvCurve(SampledPath):
    """Quadratic (co)variation curve tagged with the generating sequence."""

    seq_id: str = ""


@dataclass(frozen=True)
class CheckReport:
    lhs: float
    rhs: float
    holds: bool


def _ineq_holds(lhs: float, rhs: float, rel: float = 1e-9) -> bool:
    return lhs <= rhs + rel * (1.0 + abs(rhs))


def qv_at(path: SampledPath, seq: StoppingSequence, ts: np.ndarray) -> np.ndarray:
    """Exact simple quadratic variation of the path along seq at times ts."""
    ts = np.asarray(ts, dtype=np.float64)
    w = seq.values
    cum = np.concatenate(([0.0], np.cumsum(np.diff(w) ** 2)))
    idx = np.searchsorted(seq.times, ts, side="right") - 1
    part = evaluate_many(path, ts) - w[idx]
    return cum[idx] + part * part


def qcov_at(
    x: SampledPath, y: SampledPath, seq: StoppingSequence, ts: np.ndarray
) -> np.ndarray:
    """Exact simple quadratic covariation of x and y along seq at times ts."""
    ts = np.asarray(ts, dtype=np.float64)
    wx = evaluate_many(x, seq.times)
    wy = evaluate_many(y, seq.times)
    cum = np.concatenate(([0.0], np.cumsum(np.diff(wx) * np.diff(wy))))
    idx = np.searchsorted(seq.times, ts, side="right") - 1
    return cum[idx] + (evaluate_many(x, ts) - wx[idx]) * (evaluate_many(y, ts) - wy[idx])


def _curve_stamps(path: SampledPath, seq: StoppingSequence) -> np.ndarray:
    return np.union1d(path.times, seq.times)


def simple_qv(path: SampledPath, seq: StoppingSequence) -> QvCurve:
    """Simple quadratic variation curve of the path along seq."""
    if seq.horizon != path.horizon:
        raise ValueError("sequence horizon must match the path")
    stamps = _curve_stamps(path, seq)
    return QvCurve(stamps, qv_at(path, seq, stamps), seq_id=seq.label)


def simple_qcov(x: SampledPath, y: SampledPath, seq: StoppingSequence) -> QvCurve:
    """Simple quadratic covariation curve of x and y along seq."""
    if x.horizon != y.horizon:
        raise ValueError("paths must share a horizon")
    if seq.horizon != x.horizon:
        raise ValueError("sequence horizon must match the paths")
    stamps = np.union1d(_curve_stamps(x, seq), y.times)
    return QvCurve(stamps, qcov_at(x, y, seq, stamps), seq_id=seq.label)


def polarization_qcov(x: SampledPath, y: SampledPath, seq: StoppingSequence) -> QvCurve:
    """Covariation via (qv(x+y) - qv(x-y)) / 4; equals simple_qcov exactly."""
    if x.horizon != y.horizon:
        raise ValueError("paths must share a horizon")
    stamps = np.union1d(x.times, y.times)
    xv = evaluate_many(x, stamps)
    yv = evaluate_many(y, stamps)
    s = SampledPath(stamps, xv + yv)
    d = SampledPath(stamps, xv - yv)
    out = np.union1d(stamps, seq.times)
    vals = 0.25 * (qv_at(s, _reseat(seq, s), out) - qv_at(d, _reseat(seq, d), out))
    return QvCurve(out, vals, seq_id=seq.label)


def _reseat(seq: StoppingSequence, path: SampledPath) -> StoppingSequence:
    """Same stop times with values realized on another path."""
    return StoppingSequence(
        seq.times, evaluate_many(path, seq.times), path.horizon, label=seq.label
    )


def sup_along(seq: StoppingSequence, path: SampledPath, t: float) -> float:
    """max_n |X(tau_n ^ t)| including the trailing value |X(t)|."""
    if t < 0.0 or t > path.horizon:
        raise ValueError("time out of path domain")
    w = np.abs(seq.values[seq.times <= t])
    xt = abs(evaluate_many(path, np.asarray([t]))[0])
    return float(max(w.max() if w.size else 0.0, xt))


def merge_error_bound_check(
    x: SampledPath,
    sigma: StoppingSequence,
    tau: StoppingSequence,
    delta: float,
) -> CheckReport:
    """Check qv-along-merge of the curve (qv^sigma - qv^merge) <= 4 delta^2 qv^merge.

    Requires sigma to cover the path finely at accuracy delta (oscillation of
    the path over every sigma interval, final interval to the horizon
    included, at most delta); raises otherwise.
    """
    from .partitions import merge as merge_seqs, verify_fine_cover

    cover = verify_fine_cover(x, sigma, delta)
    if not cover.holds:
        raise ValueError(
            f"sigma does not cover the path at accuracy {delta:.17g} "
            f"(worst oscillation {cover.worst_oscillation:.17g})"
        )
    ups = merge_seqs(sigma, tau, x)
    h = x.horizon
    pts = np.append(ups.times, h)
    d_vals = qv_at(x, sigma, pts) - qv_at(x, ups, pts)
    lhs = float(np.sum(np.diff(d_vals) ** 2))
    rhs = float(4.0 * delta * delta * qv_at(x, ups, np.asarray([h]))[0])
    return CheckReport(lhs=lhs, rhs=rhs, holds=_ineq_holds(lhs, rhs))


def qv_estimate_dyadic(path: SampledPath, m_max: int) -> list[QvCurve]:
    """Simple qv curves along level sequences at meshes 2^0, ..., 2^-m_max."""
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    out = []
    for m in range(m_max + 1):
        seq = lebesgue_sequence(path, GridSpec(2.0**-m, 0.0))
        out.append(simple_qv(path, seq))
    return out


def sup_distance(a: SampledPath, b: SampledPath) -> float:
    """Exact sup |a - b| for piecewise-linear curves on a common horizon."""
    if a.horizon != b.horizon:
        raise ValueError("curves must share a horizon")
    stamps = np.union1d(a.times, b.times)
    return float(np.max(np.abs(evaluate_many(a, stamps) - evaluate_many(b, stamps))))


def write_curve_csv(curve: SampledPath, filename: str) -> None:
    """CSV with header t,qv; 17 significant digits."""
    import csv

    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "qv"])
        for t, q in zip(curve.times, curve.values):
            w.writerow([f"{t:.17g}", f"{q:.17g}"])
