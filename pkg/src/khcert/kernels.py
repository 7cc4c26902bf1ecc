"""Kernel coefficient sequences, Bessel functions and diophantine checks.

A kernel g on the torus is described by its Fourier coefficients g_hat(n);
pairing an integrand against a measure through g needs g_hat(n) != 0 on the
integrand's support, and the size of 1/g_hat(n) sets the spectral weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _accel
from .errors import (
    InvalidParameterError,
    ScanFailedError,
    UnsupportedOrderError,
    ZeroCoefficientError,
)
from .regions import ball_volume

_SNAP = 1e-12


def _freqs(n, d=None):
    a = np.asarray(n, dtype=np.int64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1) if d is None or a.shape[0] == d else a.reshape(-1, 1)
    return a


def _scalar_or_array(values, n):
    return values[0] if np.ndim(n) <= 1 else values


# ------------------------------------------------------------- interval


def interval_kernel_coeff(n):
    """prod_k 1 / (2 delta(n_k) + 2 pi i n_k)."""
    f = _freqs(n).astype(float)
    vals = np.prod(1.0 / (np.where(f == 0, 2.0, 0.0) + 2j * np.pi * f), axis=1)
    return _scalar_or_array(vals, n)


def interval_kernel_spatial(x):
    """prod_k (1 - x_k) on one period cell."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x >= 1.0):
        raise InvalidParameterError("x must lie in [0, 1)^d")
    return np.prod(1.0 - x, axis=-1)


# ------------------------------------------------------------------ cube


def _check_side(a):
    if not (0.0 < float(a) < 1.0):
        raise InvalidParameterError(f"cube side must lie in (0, 1), got {a}")


def cube_kernel_coeff(n, a):
    """prod_k s(n_k) with s(0) = a and s(m) = sin(pi a m) / (pi m).

    Factors whose argument a*m is an integer (up to 1e-12) are exactly zero.
    """
    _check_side(a)
    f = _freqs(n)
    if isinstance(a, Fraction):
        frac_part = np.array([[float((a * int(m)) % 1) for m in row] for row in f]).reshape(f.shape)
    else:
        am = float(a) * f.astype(float)
        frac_part = am - np.round(am)
    a = float(a)
    m = f.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(m == 0, a, np.sin(np.pi * a * m) / (np.pi * m))
    s = np.where((m != 0) & (np.abs(frac_part) < _SNAP), 0.0, s)
    return _scalar_or_array(np.prod(s, axis=1), n)


# ------------------------------------------------------------------ ball


def bessel_j(alpha, t):
    """Bessel function of the first kind J_alpha(t) for alpha >= -1/2, t >= 0."""
    alpha = float(alpha)
    if alpha < -0.5:
        raise UnsupportedOrderError(f"order must be >= -1/2, got {alpha}")
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise InvalidParameterError("argument must be finite and >= 0")
    if arr.ndim == 0:
        return float(_accel.bessel_j_scalar(alpha, float(arr)))
    return _accel.bessel_j(alpha, np.ascontiguousarray(arr.ravel())).reshape(arr.shape)


def ball_kernel_coeff(n, r, d=None):
    """r^(d/2) |n|^(-d/2) J_{d/2}(2 pi r |n|), and the ball volume at n = 0."""
    if not r > 0:
        raise InvalidParameterError("radius must be positive")
    f = _freqs(n, d).astype(float)
    d = f.shape[1] if d is None else d
    norm = np.sqrt(np.sum(f * f, axis=1))
    out = np.empty(f.shape[0])
    zero = norm == 0
    out[zero] = ball_volume(d, r)
    nz = ~zero
    if nz.any():
        j = _accel.bessel_j(d / 2.0, 2.0 * np.pi * r * norm[nz])
        out[nz] = r ** (d / 2.0) * norm[nz] ** (-d / 2.0) * j
    return _scalar_or_array(out, n)


# --------------------------------------------------------- radius scan


@dataclass(frozen=True)
class ScanResult:
    r: float
    c: float
    alpha: float
    beta: float
    kmax: int
    grid: int
    lo: float
    hi: float
    trend: list = field(default_factory=list)

    def to_dict(self):
        return {
            "r": self.r,
            "c": self.c,
            "alpha": self.alpha,
            "beta": self.beta,
            "kmax": self.kmax,
            "grid": self.grid,
            "lo": self.lo,
            "hi": self.hi,
            "trend": [{"K": k, "c": c} for k, c in self.trend],
        }


def bessel_lower_bound(alpha, r, beta, kmax):
    """c(r) = min_{1<=k<=kmax} k^beta |J_alpha(r sqrt(k))|."""
    return float(_accel.bessel_scan(float(alpha), np.array([float(r)]), int(kmax), float(beta))[0])


def bessel_trend(alpha, r, beta, ks):
    return [(int(k), bessel_lower_bound(alpha, r, beta, k)) for k in ks]


def scan_bessel_radius(alpha, lo, hi, beta, kmax, grid=512, require_hypothesis=True):
    """Pick r on a uniform grid inside (lo, hi) maximising c(r).

    Ties go to the smallest r. The trend table lists c(r, K) for K = 10^2,
    10^3, ... up to kmax.
    """
    if alpha < -0.5:
        raise UnsupportedOrderError(f"order must be >= -1/2, got {alpha}")
    if not (0.0 < lo < hi):
        raise InvalidParameterError("need 0 < lo < hi")
    if require_hypothesis and not beta > 1.25:
        raise InvalidParameterError("the radius scan needs beta > 5/4")
    if kmax < 1 or grid < 1:
        raise InvalidParameterError("kmax and grid must be >= 1")
    radii = lo + (hi - lo) * np.arange(1, grid + 1) / (grid + 1)
    cs = _accel.bessel_scan(float(alpha), radii, int(kmax), float(beta))
    best = int(np.argmax(cs))
    if not cs[best] > 0.0:
        raise ScanFailedError("every candidate radius hits a zero; use a finer grid")
    r = float(radii[best])
    ks = [10**e for e in range(2, 12) if 10**e <= kmax]
    if not ks or ks[-1] != kmax:
        ks.append(int(kmax))
    return ScanResult(
        r=r,
        c=float(cs[best]),
        alpha=float(alpha),
        beta=float(beta),
        kmax=int(kmax),
        grid=int(grid),
        lo=float(lo),
        hi=float(hi),
        trend=bessel_trend(alpha, r, beta, ks),
    )


# ---------------------------------------------------------- diophantine


@dataclass(frozen=True)
class DiophantineResult:
    ok: bool
    h: int
    k: int
    worst: float  # min_k k^gamma |a - h/k|
    delta: float
    gamma: float
    kmax: int

    def to_dict(self):
        return {
            "ok": self.ok,
            "h": self.h,
            "k": self.k,
            "worst": self.worst,
            "delta": self.delta,
            "gamma": self.gamma,
            "kmax": self.kmax,
        }


def diophantine_profile(a, gamma, kmax):
    """k^gamma |a - h_k/k| for k = 1..kmax with h_k the nearest integer to a k."""
    if kmax < 1:
        raise InvalidParameterError("kmax must be >= 1")
    k = np.arange(1, kmax + 1, dtype=np.int64)
    if isinstance(a, Fraction):
        h = np.array([round(a * int(kk)) for kk in k], dtype=np.int64)
        gap = np.array([abs(float(a * int(kk) - int(hh))) for kk, hh in zip(k, h)])
    else:
        ak = float(a) * k
        h = np.rint(ak).astype(np.int64)
        gap = np.abs(ak - h)
    return h, k, gap * k.astype(float) ** (gamma - 1.0)


def check_diophantine(a, delta, gamma, kmax):
    """Check |a - h/k| >= delta k^-gamma for all k <= kmax; report the worst pair."""
    h, k, prof = diophantine_profile(a, gamma, kmax)
    i = int(np.argmin(prof))
    return DiophantineResult(
        ok=bool(prof[i] >= delta),
        h=int(h[i]),
        k=int(k[i]),
        worst=float(prof[i]),
        delta=float(delta),
        gamma=float(gamma),
        kmax=int(kmax),
    )


GOLDEN_SIDE = (math.sqrt(5.0) - 1.0) / 2.0


# ------------------------------------------------------ coefficient rule


@dataclass(frozen=True)
class CoefficientRule:
    """Kernel coefficients g_hat(n) for one of the interval, cube or ball kernels."""

    kind: str
    dim: int
    a: float | None = None
    r: float | None = None

    def __post_init__(self):
        if self.kind not in ("interval", "cube", "ball"):
            raise InvalidParameterError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "cube":
            _check_side(self.a)
        if self.kind == "ball" and not (self.r and self.r > 0):
            raise InvalidParameterError("ball kernel needs a positive radius")

    def raw(self, freqs):
        f = _freqs(freqs, self.dim).reshape(-1, self.dim)
        if self.kind == "interval":
            return interval_kernel_coeff(f)
        if self.kind == "cube":
            return cube_kernel_coeff(f, self.a)
        return ball_kernel_coeff(f, self.r, self.dim)

    def coeff(self, freqs):
        """g_hat(n); a vanishing coefficient is a hard error naming n."""
        f = _freqs(freqs, self.dim).reshape(-1, self.dim)
        vals = np.atleast_1d(self.raw(f))
        bad = np.abs(vals) < 1e-14 * max(1.0, float(np.abs(np.atleast_1d(self.raw(np.zeros((1, self.dim), int)))[0])))
        if bad.any():
            n = tuple(int(v) for v in f[int(np.argmax(bad))])
            raise ZeroCoefficientError(f"{self.kind} kernel coefficient vanishes at n = {n}")
        return vals

    def phi(self, freqs):
        """The multiplier sequence: 1 / conj(g_hat(n))."""
        return 1.0 / np.conj(self.coeff(freqs))


def cube_constant(a, delta, d):
    """Explicit bound: |1/g_hat(n)| <= C prod_k (1 + |n_k|)^gamma.

    Uses |sin(pi a m)| >= 2 ||a m|| >= 2 delta |m|^(1 - gamma).
    """
    return max(1.0 / float(a), math.pi / (2.0 * delta)) ** d


def ball_constant(freqs, r, d, c_scan, beta, gamma):
    """max over the given n of |1/g_hat(n)| / (1 + |n|^2)^(gamma/2), bounded via the scan.

    With J_{d/2}(2 pi r |n|) >= c |n|^(-2 beta) for |n|^2 <= K this is rigorous
    on any support with |n|^2 <= K.
    """
    f = np.asarray(freqs, dtype=float).reshape(-1, d)
    norm2 = np.sum(f * f, axis=1)
    best = 0.0
    if np.any(norm2 == 0):
        best = 1.0 / ball_volume(d, r)
    nz = norm2 > 0
    if nz.any():
        norm = np.sqrt(norm2[nz])
        bound = r ** (-d / 2.0) * norm ** (d / 2.0 + 2.0 * beta) / c_scan
        best = max(best, float(np.max(bound / (1.0 + norm2[nz]) ** (gamma / 2.0))))
    return best
