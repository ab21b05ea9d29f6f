"""Simple strategies, model-free integrals, and empirical pseudo-distances.

A simple strategy holds position g_{n-1} on [tau_{n-1}, tau_n); its capital
against a path X is

    (G.X)(t) = c + sum_n g_{n-1} (X(tau_n ^ t) - X(tau_{n-1} ^ t)),

exact and piecewise linear between the union of stop and sample times. Step
approximation of a sampled integrand F stops each time F moves 2^-m from its
value at the previous stop; on a continuous path every exit is by exactly
2^-m, so the stops are the level sequence of F on the grid anchored at F_0
and sup |F - F^m| <= 2^-m holds pathwise. Capital curves of successive
approximations form the model-free integral; localization by sigma(F, N)
leaves the curves identical on [0, sigma(F, N)], which is checked, not
assumed.

The empirical pseudo-distances replace the upper expectation with an
ensemble mean (the only surrogate available at desk scale):

    dqv(G, H)  = sum_N 2^-N mean_i sqrt( int_0^{T_N} (G-H)^2 dQ_i )
    dinf(Y, Z) = sum_N 2^-N mean_i  sup_{[0, T_N]} |Y - Z|

with T_N = sigma(X_i, N) ^ horizon and Q_i a dyadic qv estimate of X_i.
Standard errors come from the per-path aggregate contributions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bdg import BdgCertificate, certify_path
from .partitions import StoppingSequence, _grid_hits
from .paths import (
    INFINITE_TIME,
    SampledPath,
    divergence_time,
    evaluate_many,
    hitting_time_abs,
)
from .quadvar import QvCurve, qv_at, qv_estimate_dyadic

_REL_TOL = 1e-9
_MAX_VARIATION = 1e12


class ConsistencyError(RuntimeError):
    """Raised when two constructions that must agree pathwise do not."""


@dataclass(frozen=True)
class StepProcess:
    """Right-continuous step function holding values[n] on [tau_n, tau_{n+1})."""

    seq: StoppingSequence
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.seq.times.shape:
            raise ValueError("one value per stop time required")
        if not np.all(np.isfinite(v)):
            raise ValueError("step values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SimpleStrategy:
    """Initial capital plus positions set at each stop and held to the next."""

    initial_capital: float
    seq: StoppingSequence
    positions: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.positions, dtype=np.float64)
        if g.shape != self.seq.times.shape:
            raise ValueError("one position per stop time required")
        if not (np.all(np.isfinite(g)) and math.isfinite(self.initial_capital)):
            raise ValueError("strategy data must be finite")
        g.setflags(write=False)
        object.__setattr__(self, "positions", g)

    def as_step_process(self) -> StepProcess:
        return StepProcess(self.seq, self.positions)


def step_values_at(sp: StepProcess, ts: np.ndarray) -> np.ndarray:
    """Vectorized step lookup; before the first stop the value is values[0]."""
    idx = np.searchsorted(sp.seq.times, np.asarray(ts, dtype=np.float64), side="right") - 1
    idx = np.maximum(idx, 0)
    return sp.values[idx]


def capital_process(strategy: SimpleStrategy, x: SampledPath) -> SampledPath:
    """Capital curve of the strategy against x, exact at and between stamps."""
    tau = strategy.seq.times
    if strategy.seq.horizon != x.horizon:
        raise ValueError("strategy and path horizons differ")
    g = strategy.positions
    wx = evaluate_many(x, tau)
    cum = strategy.initial_capital + np.concatenate(
        ([0.0], np.cumsum(g[:-1] * np.diff(wx)))
    )
    stamps = np.union1d(x.times, tau)
    idx = np.searchsorted(tau, stamps, side="right") - 1
    vals = cum[idx] + g[idx] * (evaluate_many(x, stamps) - wx[idx])
    return SampledPath(stamps, vals)


def witness_strategy_qv(x: SampledPath, seq: StoppingSequence, threshold: float) -> SimpleStrategy:
    """Strategy whose capital is (X_t - X_0)^2 - qv(t) up to sigma(X, threshold).

    Positions are 2 (X(tau_n) - X_0), zeroed from the first stop at or past
    sigma; the identity telescopes exactly at every stamp t <= sigma.
    """
    sigma = hitting_time_abs(x, threshold)
    w = seq.values
    g = 2.0 * (w - w[0])
    g[seq.times >= sigma] = 0.0
    return SimpleStrategy(0.0, seq, g)


def witness_identity_gap(x: SampledPath, seq: StoppingSequence, threshold: float) -> float:
    """Max |capital - ((X_t - X_0)^2 - qv(t))| over stamps t <= sigma."""
    sigma = hitting_time_abs(x, threshold)
    strat = witness_strategy_qv(x, seq, threshold)
    cap = capital_process(strat, x)
    t_hi = min(sigma, x.horizon)
    stamps = cap.times[cap.times <= t_hi]
    if stamps[-1] != t_hi:
        stamps = np.append(stamps, t_hi)
    lhs = evaluate_many(cap, stamps)
    dx = evaluate_many(x, stamps) - x.values[0]
    rhs = dx * dx - qv_at(x, seq, stamps)
    return float(np.max(np.abs(lhs - rhs)))


def bdg_witness_strategy(
    x: SampledPath,
    seq: StoppingSequence,
    p: float,
    threshold: float,
    eps: float = INFINITE_TIME,
    qv_proxy: SampledPath | None = None,
) -> SimpleStrategy:
    """Positions from the certificate weights, cut off at sigma and rho.

    The weights are h for p = 1 and g for p > 1, taken from certify_path on
    the shifted sampled sequence. When eps is finite a qv_proxy curve must be
    given; rho is the first time the simple qv along seq and the proxy
    diverge by eps, and positions are zeroed from min(sigma, rho) on.
    """
    from .quadvar import simple_qv

    cert = certify_path(x, seq, p, shift_to_zero=True)
    weights = cert.h if p == 1.0 else cert.g
    cutoff = hitting_time_abs(x, threshold)
    if math.isfinite(eps):
        if qv_proxy is None:
            raise ValueError("finite eps needs a qv_proxy curve")
        rho = divergence_time(simple_qv(x, seq), qv_proxy, eps)
        cutoff = min(cutoff, rho)
    g = weights.copy()
    g[seq.times >= cutoff] = 0.0
    return SimpleStrategy(0.0, seq, g)


def step_approximation(f: SampledPath, m: int) -> StepProcess:
    """Stops each time f moves 2^-m from its last stop value; holds f there.

    Equals the level sequence of f on the 2^-m grid anchored at f_0, so stop
    values after the first are exact lattice floats and
    sup_t |f(t) - approx(t)| <= 2^-m pathwise.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    q = 2.0**-m
    f0 = float(f.values[0])
    r = f0 - q * math.floor(f0 / q)
    if not 0.0 <= r < q:
        r = 0.0
    ts, lev, _, _ = _grid_hits(f, q, r)
    times = np.concatenate(([0.0], ts))
    values = np.concatenate(([f0], lev * q + r))
    seq = StoppingSequence(times, values, f.horizon, label=f"step:m={m}")
    return StepProcess(seq, values)


@dataclass(frozen=True)
class ModelFreeResult:
    """Capital curves of successive step approximations, with Cauchy gaps."""

    curves: list
    sup_distances: list

    @property
    def final(self) -> SampledPath:
        return self.curves[-1]


def model_free_integral(f: SampledPath, x: SampledPath, m_max: int) -> ModelFreeResult:
    """Curves (F^m . X) for m = 0..m_max plus consecutive sup-distances."""
    from .quadvar import sup_distance

    if f.horizon != x.horizon:
        raise ValueError("integrand and integrator horizons differ")
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    curves = []
    for m in range(m_max + 1):
        sp = step_approximation(f, m)
        curves.append(capital_process(SimpleStrategy(0.0, sp.seq, sp.values), x))
    gaps = [sup_distance(curves[i], curves[i + 1]) for i in range(len(curves) - 1)]
    return ModelFreeResult(curves=curves, sup_distances=gaps)


def _integrand_values_at(g, ts: np.ndarray) -> np.ndarray:
    if isinstance(g, StepProcess):
        return step_values_at(g, ts)
    if isinstance(g, SimpleStrategy):
        return step_values_at(g.as_step_process(), ts)
    if isinstance(g, SampledPath):
        return evaluate_many(g, ts)
    raise TypeError("integrand must be a StepProcess, SimpleStrategy, or SampledPath")


def _integrand_times(g) -> np.ndarray:
    if isinstance(g, (StepProcess, SimpleStrategy)):
        return g.seq.times
    return g.times


def stieltjes_integral(g, v: SampledPath, t: float | None = None) -> float:
    """Left-point Stieltjes integral of g against the sampled curve v on [0, t].

    Exact when g is a step process whose stops are in the mesh; for sampled
    integrands it is the left-point rule on the union mesh. The integrator
    must have finite variation; a blowup guard rejects oscillation sums past
    1e12.
    """
    upto = v.horizon if t is None else t
    if not 0.0 <= upto <= v.horizon:
        raise ValueError("integration limit out of range")
    if float(np.sum(np.abs(np.diff(v.values)))) > _MAX_VARIATION:
        raise ValueError("integrator variation exceeds the finite-variation guard")
    mesh = np.union1d(v.times, _integrand_times(g))
    mesh = mesh[mesh <= upto]
    if mesh.size == 0 or mesh[-1] != upto:
        mesh = np.append(mesh, upto)
    gv = _integrand_values_at(g, mesh[:-1])
    dv = np.diff(evaluate_many(v, mesh))
    return float(np.sum(gv * dv))


def product_integral_curve(g, h, v: SampledPath) -> SampledPath:
    """Curve t -> int_0^t g h dv by the same left-point rule, all stamps."""
    mesh = np.union1d(np.union1d(v.times, _integrand_times(g)), _integrand_times(h))
    gv = _integrand_values_at(g, mesh[:-1]) * _integrand_values_at(h, mesh[:-1])
    dv = np.diff(evaluate_many(v, mesh))
    return SampledPath(mesh, np.concatenate(([0.0], np.cumsum(gv * dv))))


def _stopped_path(f: SampledPath, sigma: float) -> SampledPath:
    if sigma >= f.horizon:
        return f
    times = np.union1d(f.times, [sigma])
    vals = evaluate_many(f, np.minimum(times, sigma))
    return SampledPath(times, vals)


@dataclass(frozen=True)
class LocalizedResult:
    curve: SampledPath
    levels: list
    sigmas: list
    gaps: list


def localized_integral(
    f: SampledPath, x: SampledPath, n_schedule, m_max: int
) -> LocalizedResult:
    """Model-free integral of f localized at sigma(f, N) over the schedule.

    Successive localizations must coincide on [0, sigma(f, N)] for the
    smaller N; any disagreement past tolerance raises ConsistencyError since
    it can only come from an implementation fault.
    """
    levels = sorted(float(n) for n in n_schedule)
    if not levels or levels[0] <= 0.0:
        raise ValueError("localization levels must be positive")
    curves = []
    sigmas = []
    for n in levels:
        sigma = min(hitting_time_abs(f, n), f.horizon)
        sigmas.append(sigma)
        curves.append(model_free_integral(_stopped_path(f, sigma), x, m_max).final)
    gaps = []
    for i in range(len(curves) - 1):
        gap = _sup_gap_upto(curves[i], curves[i + 1], sigmas[i])
        gaps.append(gap)
        scale = 1.0 + float(np.max(np.abs(curves[i].values)))
        if gap > _REL_TOL * scale:
            raise ConsistencyError(
                f"localized integrals at N={levels[i]} and N={levels[i + 1]} "
                f"differ by {gap:.3g} on the common window"
            )
    return LocalizedResult(curve=curves[-1], levels=levels, sigmas=sigmas, gaps=gaps)


def _sup_gap_upto(a: SampledPath, b: SampledPath, t_hi: float) -> float:
    stamps = np.union1d(a.times, b.times)
    stamps = stamps[stamps <= t_hi]
    if stamps.size == 0 or stamps[-1] != t_hi:
        stamps = np.append(stamps, t_hi)
    return float(np.max(np.abs(evaluate_many(a, stamps) - evaluate_many(b, stamps))))


@dataclass(frozen=True)
class EmpiricalDistanceReport:
    """Ensemble mean of a localized pseudo-distance with its standard error."""

    value: float
    std_error: float
    per_level: list
    per_path: np.ndarray
    n_levels: int

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "per_level": list(self.per_level),
            "n_paths": int(self.per_path.size),
            "n_levels": self.n_levels,
        }


def _realize(obj, path: SampledPath):
    return obj(path) if callable(obj) else obj


def _mean_report(per_path: np.ndarray, per_level: np.ndarray, n_levels: int) -> EmpiricalDistanceReport:
    n = per_path.size
    se = float(np.std(per_path, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EmpiricalDistanceReport(
        value=float(np.mean(per_path)),
        std_error=se,
        per_level=[float(v) for v in per_level / n],
        per_path=per_path,
        n_levels=n_levels,
    )


def empirical_dqv(
    g, h, paths, n_levels: int = 8, qv_level: int = 6
) -> EmpiricalDistanceReport:
    """Ensemble surrogate of the localized qv pseudo-distance between g and h.

    g and h may be fixed processes or callables path -> process (step
    approximations are path-dependent). The integrator is the finest dyadic
    qv estimate at qv_level.
    """
    paths = list(paths)
    if not paths:
        raise ValueError("need at least one path")
    per_path = np.zeros(len(paths))
    per_level = np.zeros(n_levels)
    for i, x in enumerate(paths):
        gi = _realize(g, x)
        hi = _realize(h, x)
        q = qv_estimate_dyadic(x, qv_level)[-1]
        mesh = np.union1d(
            np.union1d(q.times, _integrand_times(gi)), _integrand_times(hi)
        )
        gap = _integrand_values_at(gi, mesh[:-1]) - _integrand_values_at(hi, mesh[:-1])
        qvals = evaluate_many(q, mesh)
        cum = np.concatenate(([0.0], np.cumsum(gap * gap * np.diff(qvals))))
        contrib = 0.0
        for n in range(1, n_levels + 1):
            t_n = min(hitting_time_abs(x, float(n)), x.horizon)
            j = int(np.searchsorted(mesh, t_n, side="right")) - 1
            part = gap[j] ** 2 * (
                float(np.interp(t_n, q.times, q.values)) - qvals[j]
            ) if j < gap.size else 0.0
            integral = max(cum[j] + part, 0.0)
            term = math.sqrt(integral)
            per_level[n - 1] += term
            contrib += 2.0**-n * term
        per_path[i] = contrib
    return _mean_report(per_path, per_level, n_levels)


def empirical_dinf(y, z, x_paths, n_levels: int = 8) -> EmpiricalDistanceReport:
    """Ensemble surrogate of the localized sup pseudo-distance between curves.

    y and z may be fixed curves or callables path -> curve; localization
    times come from the driving paths in x_paths.
    """
    x_paths = list(x_paths)
    if not x_paths:
        raise ValueError("need at least one path")
    per_path = np.zeros(len(x_paths))
    per_level = np.zeros(n_levels)
    for i, x in enumerate(x_paths):
        yi = _realize(y, x)
        zi = _realize(z, x)
        stamps = np.union1d(yi.times, zi.times)
        gap = np.abs(evaluate_many(yi, stamps) - evaluate_many(zi, stamps))
        running = np.maximum.accumulate(gap)
        contrib = 0.0
        for n in range(1, n_levels + 1):
            t_n = min(hitting_time_abs(x, float(n)), x.horizon)
            j = int(np.searchsorted(stamps, t_n, side="right")) - 1
            at_t = abs(
                float(np.interp(t_n, yi.times, yi.values))
                - float(np.interp(t_n, zi.times, zi.values))
            )
            sup = max(float(running[j]), at_t)
            per_level[n - 1] += sup
            contrib += 2.0**-n * sup
        per_path[i] = contrib
    return _mean_report(per_path, per_level, n_levels)


def write_strategy_json(strategy: SimpleStrategy, filename: str) -> None:
    """JSON object with fields c, taus, gs."""
    doc = {
        "c": strategy.initial_capital,
        "taus": [float(t) for t in strategy.seq.times],
        "gs": [float(v) for v in strategy.positions],
    }
    with open(filename, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_strategy_json(filename: str, path: SampledPath) -> SimpleStrategy:
    """Rebuild a strategy against a path; stop values re-evaluated on it."""
    with open(filename) as fh:
        doc = json.load(fh)
    times = np.asarray(doc["taus"], dtype=np.float64)
    seq = StoppingSequence(times, evaluate_many(path, times), path.horizon)
    return SimpleStrategy(float(doc["c"]), seq, np.asarray(doc["gs"], dtype=np.float64))
