"""Pathwise maximal-inequality certificates for discrete sequences.

For a finite real sequence x_0, ..., x_K write x*_k = max_{l<=k} |x_l| and
[x]_k = x_0^2 + sum_{l<=k} (x_l - x_{l-1})^2. The certificates produce
explicit integrand weights, bounded by 1 in absolute value, whose discrete
integrals against x enforce both maximal inequalities at every index k:

  p = 1:    x*_k <= 6 [x]_k^(1/2) + 2 (h.x)_k,   [x]_k^(1/2) <= 3 x*_k - (h.x)_k
  p > 1:    (x*_k)^p <= C_p [x]_k^(p/2) + 2 (g.x)_k,
            [x]_k^(p/2) <= C_p (x*_k)^p - (f.x)_k,     C_p = 6^p (p-1)^(p-1)

with (w.x)_k = sum_{l=1}^{k} w_{l-1} (x_l - x_{l-1}). Ratios 0/0 are 0 by
convention; x_{-1}, x*_{-1}, [x]_{-1} are all 0. No randomness, no slack:
every inequality is checked exactly (up to float tolerance) at every index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partitions import StoppingSequence
from .paths import SampledPath

_REL_TOL = 1e-9

# above this length the p>1 construction switches from one dense matrix to a
# per-index pass, trading vectorization for O(K) memory
_DENSE_LIMIT = 1200


@dataclass(frozen=True)
class DiscreteSequence:
    """Finite real sequence with cached running |max| and squared bracket."""

    x: np.ndarray
    abs_max: np.ndarray = None
    bracket: np.ndarray = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 1 or x.size < 1:
            raise ValueError("need a nonempty 1-d sequence")
        if not np.all(np.isfinite(x)):
            raise ValueError("sequence must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "abs_max", np.maximum.accumulate(np.abs(x)))
        br = np.concatenate(([x[0] ** 2], x[0] ** 2 + np.cumsum(np.diff(x) ** 2)))
        object.__setattr__(self, "bracket", br)

    def __len__(self) -> int:
        return int(self.x.size)


@dataclass(frozen=True)
class BdgCertificate:
    """Weights and per-index sides of both inequalities for one sequence.

    For p = 1 the single weight sequence is h; for p > 1 the pair (f, g)
    plays the analogous role (g drives the maximal bound, f the bracket
    bound). Discrete integrals use the lagged weight, so entry k of hx/fx/gx
    is sum_{l<=k} w_{l-1} dx_l.
    """

    p: float
    cp: float
    h: np.ndarray | None
    f: np.ndarray | None
    g: np.ndarray | None
    hx: np.ndarray | None
    fx: np.ndarray | None
    gx: np.ndarray | None
    lhs1: np.ndarray
    rhs1: np.ndarray
    lhs2: np.ndarray
    rhs2: np.ndarray

    @property
    def holds1(self) -> bool:
        return bool(np.all(self.lhs1 <= self.rhs1 + _REL_TOL * (1.0 + np.abs(self.rhs1))))

    @property
    def holds2(self) -> bool:
        return bool(np.all(self.lhs2 <= self.rhs2 + _REL_TOL * (1.0 + np.abs(self.rhs2))))

    @property
    def holds(self) -> bool:
        return self.holds1 and self.holds2


def _as_seq(x) -> DiscreteSequence:
    return x if isinstance(x, DiscreteSequence) else DiscreteSequence(np.asarray(x))


def _lagged_integral(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    if x.size > 1:
        out[1:] = np.cumsum(w[:-1] * np.diff(x))
    return out


def certificate_p1(x) -> BdgCertificate:
    """Weights h_l = x_l / sqrt([x]_l + (x*_l)^2) and both p = 1 inequalities."""
    s = _as_seq(x)
    denom = np.sqrt(s.bracket + s.abs_max**2)
    h = np.divide(s.x, denom, out=np.zeros_like(s.x), where=denom > 0.0)
    hx = _lagged_integral(h, s.x)
    root = np.sqrt(s.bracket)
    return BdgCertificate(
        p=1.0,
        cp=6.0,
        h=h,
        f=None,
        g=None,
        hx=hx,
        fx=None,
        gx=None,
        lhs1=s.abs_max.copy(),
        rhs1=6.0 * root + 2.0 * hx,
        lhs2=root,
        rhs2=3.0 * s.abs_max - hx,
    )


def _shift_weights(p: float, s: DiscreteSequence) -> tuple[np.ndarray, np.ndarray]:
    """Per-shift increments a_l, b_l of [x]^((p-1)/2) and (x*)^(p-1)."""
    q = 0.5 * (p - 1.0)
    br_pow = s.bracket**q
    xs_pow = s.abs_max ** (p - 1.0)
    a = np.diff(br_pow, prepend=0.0)
    b = np.diff(xs_pow, prepend=0.0)
    return a, b


def _fg_dense(p: float, s: DiscreteSequence) -> tuple[np.ndarray, np.ndarray]:
    x, br = s.x, s.bracket
    n = x.size
    xm1 = np.concatenate(([0.0], x[:-1]))  # x_{l-1}
    brm1 = np.concatenate(([0.0], br[:-1]))  # [x]_{l-1}
    # windowed max_{l<=m<=k} (x_m - x_{l-1})^2 via a masked running max over k
    sq = (x[:, None] - xm1[None, :]) ** 2
    mask = np.arange(n)[:, None] >= np.arange(n)[None, :]
    sq = np.where(mask, sq, -np.inf)
    wmax = np.maximum.accumulate(sq, axis=0)
    numer = x[:, None] - xm1[None, :]
    den = np.sqrt(br[:, None] - brm1[None, :] + wmax, where=mask, out=np.zeros_like(sq))
    e = np.divide(numer, den, out=np.zeros_like(sq), where=(den > 0.0) & mask)
    a, b = _shift_weights(p, s)
    f = (p * p) * (e @ a)
    g = (p * p) * (e @ b)
    return f, g


def _fg_linear(p: float, s: DiscreteSequence) -> tuple[np.ndarray, np.ndarray]:
    x, br = s.x, s.bracket
    n = x.size
    xm1 = np.concatenate(([0.0], x[:-1]))
    brm1 = np.concatenate(([0.0], br[:-1]))
    a, b = _shift_weights(p, s)
    f = np.empty(n)
    g = np.empty(n)
    for k in range(n):
        xs = x[: k + 1]
        smax = np.maximum.accumulate(xs[::-1])[::-1]  # max x_m over m in [l, k]
        smin = np.minimum.accumulate(xs[::-1])[::-1]
        c = xm1[: k + 1]
        wmax = np.maximum(np.abs(smax - c), np.abs(c - smin)) ** 2
        den = np.sqrt(br[k] - brm1[: k + 1] + wmax)
        numer = x[k] - c
        e = np.divide(numer, den, out=np.zeros_like(den), where=den > 0.0)
        f[k] = (p * p) * float(e @ a[: k + 1])
        g[k] = (p * p) * float(e @ b[: k + 1])
    return f, g


def certificate_p(x, p: float) -> BdgCertificate:
    """Shifted-window weights f, g and both inequalities for p > 1."""
    if not p > 1.0:
        raise ValueError("certificate_p needs p > 1; use certificate_p1 for p = 1")
    s = _as_seq(x)
    f, g = (_fg_dense if len(s) <= _DENSE_LIMIT else _fg_linear)(p, s)
    fx = _lagged_integral(f, s.x)
    gx = _lagged_integral(g, s.x)
    cp = 6.0**p * (p - 1.0) ** (p - 1.0)
    return BdgCertificate(
        p=p,
        cp=cp,
        h=None,
        f=f,
        g=g,
        hx=None,
        fx=fx,
        gx=gx,
        lhs1=s.abs_max**p,
        rhs1=cp * s.bracket ** (0.5 * p) + 2.0 * gx,
        lhs2=s.bracket ** (0.5 * p),
        rhs2=cp * s.abs_max**p - fx,
    )


def certify_path(
    path: SampledPath,
    seq: StoppingSequence,
    p: float = 1.0,
    shift_to_zero: bool = True,
) -> BdgCertificate:
    """Certificate for the path sampled at its stop times.

    With shift_to_zero the sampled sequence is X(tau_n) - X_0, which makes
    the bracket the simple quadratic variation along the sequence.
    """
    w = seq.values - (seq.values[0] if shift_to_zero else 0.0)
    s = DiscreteSequence(w)
    return certificate_p1(s) if p == 1.0 else certificate_p(s, p)
