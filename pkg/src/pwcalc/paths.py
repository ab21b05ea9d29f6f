"""Finite sampled paths with linear interpolation and exact first-hit solvers.

A path is a finite sequence of samples (t_i, x_i), t_0 = 0 < t_1 < ... < t_n,
interpreted as the continuous piecewise-linear trajectory through them. The
horizon is t_n; the path is undefined beyond it. First hitting times are
solved exactly on each linear segment, never by bisection, so downstream
stopping-time constructions are reproducible to the last float.

Stopping times that never occur are reported as INFINITE_TIME (IEEE +inf),
which compares above every finite time.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

INFINITE_TIME = math.inf

GENERATOR_KINDS = ("wiener", "geometric", "zigzag", "constant", "sine", "custom-seeded")


@dataclass(frozen=True)
class SampledPath:
    """Piecewise-linear trajectory through strictly time-increasing samples."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or v.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if t.size < 1:
            raise ValueError("path needs at least one sample")
        if t[0] != 0.0:
            raise ValueError("path must start at time 0")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("sample times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("samples must be finite")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return int(self.times.size)


def _check_domain(path: SampledPath, t) -> None:
    t = np.asarray(t)
    if np.any(t < 0.0) or np.any(t > path.horizon):
        raise ValueError(f"time out of path domain [0, {path.horizon}]")


def evaluate(path: SampledPath, t: float) -> float:
    """Value of the path at time t, exact at sample times."""
    _check_domain(path, t)
    return float(np.interp(t, path.times, path.values))


def evaluate_many(path: SampledPath, ts: np.ndarray) -> np.ndarray:
    """Vectorized evaluate; ts need not be sorted."""
    _check_domain(path, ts)
    return np.interp(ts, path.times, path.values)


def hitting_time_abs(path: SampledPath, threshold: float, start: float = 0.0) -> float:
    """First time t >= start with |X_t| >= threshold, or INFINITE_TIME.

    The crossing instant is solved exactly on the segment where the level
    threshold (or -threshold) is first reached.
    """
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    _check_domain(path, start)
    v0 = evaluate(path, start)
    if abs(v0) >= threshold:
        return float(start)
    t, v = path.times, path.values
    i0 = int(np.searchsorted(t, start, side="right"))  # first sample strictly after start
    # segment endpoints after the (possibly partial) start segment
    a = np.concatenate(([v0], v[i0:-1])) if i0 < t.size else np.asarray([v0])
    b = v[i0:] if i0 < t.size else np.asarray([], dtype=np.float64)
    if b.size == 0:
        return INFINITE_TIME
    ta = np.concatenate(([start], t[i0:-1]))
    tb = t[i0:]
    hit = np.maximum(np.abs(a), np.abs(b)) >= threshold
    if not np.any(hit):
        return INFINITE_TIME
    i = int(np.argmax(hit))
    aa, bb, t0, t1 = a[i], b[i], ta[i], tb[i]
    cands = []
    for lvl in (threshold, -threshold):
        if (bb - aa) != 0.0:
            th = (lvl - aa) / (bb - aa)
            if 0.0 <= th <= 1.0:
                cands.append(t0 + (t1 - t0) * th)
    if not cands:  # flat segment sitting exactly at the level
        return float(t0)
    return float(min(cands))


def divergence_time(a: SampledPath, b: SampledPath, eps: float) -> float:
    """First time |a(t) - b(t)| >= eps on the common horizon, or INFINITE_TIME."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    h = min(a.horizon, b.horizon)
    ts = np.union1d(a.times, b.times)
    ts = ts[ts <= h]
    if ts[-1] != h:
        ts = np.append(ts, h)
    diff = evaluate_many(a, ts) - evaluate_many(b, ts)
    if ts.size == 1:
        return 0.0 if abs(diff[0]) >= eps else INFINITE_TIME
    return hitting_time_abs(SampledPath(ts, diff), eps)


@dataclass(frozen=True)
class PathGeneratorConfig:
    """Config for the built-in path generators.

    kind: one of GENERATOR_KINDS. Interpretation of volatility/drift by kind:
      wiener        increments N(drift*dt, volatility^2*dt), start 0
      geometric     exp((drift - volatility^2/2)t + volatility*W_t), start 1
      zigzag        alternates 0, volatility, 0, ... one move per step
      constant      constant at drift
      sine          volatility * sin(2*pi*f*t), f = drift (or 1 when drift is 0)
      custom-seeded seeded mixture of increment laws (heavy and light tails,
                    flat stretches), variance volatility^2*dt per step
    """

    kind: str
    horizon: float = 1.0
    step: float = 2.0**-8
    seed: int = 0
    volatility: float = 1.0
    drift: float = 0.0

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if not (self.horizon > 0.0 and self.step > 0.0):
            raise ValueError("horizon and step must be positive")
        if self.step > self.horizon:
            raise ValueError("step must not exceed horizon")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "horizon": self.horizon,
            "step": self.step,
            "seed": self.seed,
            "volatility": self.volatility,
            "drift": self.drift,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "PathGeneratorConfig":
        return PathGeneratorConfig(**d)


def generate(config: PathGeneratorConfig) -> SampledPath:
    """Deterministic path from config; same config and seed, same floats."""
    n = max(1, int(round(config.horizon / config.step)))
    times = np.linspace(0.0, config.horizon, n + 1)
    dt = config.horizon / n
    kind = config.kind
    if kind == "constant":
        return SampledPath(times, np.full(n + 1, config.drift))
    if kind == "zigzag":
        vals = np.zeros(n + 1)
        vals[1::2] = config.volatility
        return SampledPath(times, vals)
    if kind == "sine":
        freq = config.drift if config.drift != 0.0 else 1.0
        return SampledPath(times, config.volatility * np.sin(2.0 * np.pi * freq * times))
    rng = np.random.default_rng(config.seed)
    if kind == "wiener":
        inc = rng.standard_normal(n) * (config.volatility * math.sqrt(dt)) + config.drift * dt
        vals = np.concatenate(([0.0], np.cumsum(inc)))
        return SampledPath(times, vals)
    if kind == "geometric":
        w = np.concatenate(([0.0], np.cumsum(rng.standard_normal(n) * math.sqrt(dt))))
        vals = np.exp(
            (config.drift - 0.5 * config.volatility**2) * times + config.volatility * w
        )
        return SampledPath(times, vals)
    # custom-seeded: per-step law chosen among unit-variance shapes, plus flat runs
    law = rng.integers(0, 3, size=n)
    z = rng.standard_normal(n)
    lap = rng.laplace(0.0, 1.0 / math.sqrt(2.0), size=n)
    uni = rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=n)
    inc = np.where(law == 0, z, np.where(law == 1, lap, uni))
    inc[rng.random(n) < 0.05] = 0.0
    vals = np.concatenate(([0.0], np.cumsum(inc * config.volatility * math.sqrt(dt))))
    return SampledPath(times, vals)


def write_path_csv(path: SampledPath, filename: str) -> None:
    """CSV with header t,x; 17 significant digits so floats round-trip."""
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x"])
        for t, x in zip(path.times, path.values):
            w.writerow([f"{t:.17g}", f"{x:.17g}"])


def read_path_csv(filename: str) -> SampledPath:
    with open(filename, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "x"]:
        raise ValueError("expected header t,x")
    data = np.asarray([[float(r[0]), float(r[1])] for r in rows[1:]])
    return SampledPath(data[:, 0], data[:, 1])


def write_generator_json(config: PathGeneratorConfig, filename: str) -> None:
    with open(filename, "w") as fh:
        json.dump(config.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_generator_json(filename: str) -> PathGeneratorConfig:
    with open(filename) as fh:
        return PathGeneratorConfig.from_json_dict(json.load(fh))
