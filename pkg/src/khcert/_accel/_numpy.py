"""Pure-numpy versions of the kernels in ``_numba``.

Same signatures and results (up to rounding); chunked so that temporary
arrays stay around a few million elements.
"""

import math

import numpy as np

_CHUNK = 1 << 22


def _chunks(n_rows, row_cost):
    step = max(1, _CHUNK // max(1, row_cost))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def radical_inverse(idx, base):
    n = np.asarray(idx, dtype=np.int64).copy()
    num = np.zeros_like(n)
    den = np.ones_like(n)
    while np.any(n > 0):
        live = n > 0
        num[live] = num[live] * base + n[live] % base
        den[live] *= base
        n[live] //= base
    return num / den


def star_disc_1d(r1, g1, n):
    closed = np.bincount(r1, minlength=g1.shape[0]).cumsum()
    opened = np.concatenate(([0], closed[:-1]))
    return float(max(np.max(closed / n - g1), np.max(g1 - opened / n), 0.0))


def star_disc_2d(r1, r2, g1, g2, n):
    m1, m2 = g1.shape[0], g2.shape[0]
    carry = np.zeros(m2, dtype=np.int64)
    best = 0.0
    step = max(1, _CHUNK // m2)
    for start in range(0, m1, step):
        stop = min(m1, start + step)
        lo, hi = np.searchsorted(r1, [start, stop])
        hist = np.zeros((stop - start, m2), dtype=np.int64)
        np.add.at(hist, (r1[lo:hi] - start, r2[lo:hi]), 1)
        closed = hist.cumsum(1).cumsum(0) + carry
        before = np.vstack((carry[None, :], closed[:-1]))
        opened = np.zeros_like(closed)
        opened[:, 1:] = before[:, :-1]
        vol = np.outer(g1[start:stop], g2)
        best = max(best, np.max(closed / n - vol), np.max(vol - opened / n))
        carry = closed[-1]
    return float(best)


def star_disc_3d(r1, r2, r3, g1, g2, g3, n):
    m2, m3 = g2.shape[0], g3.shape[0]
    cnt = np.zeros((m2, m3), dtype=np.int64)
    prev = np.zeros((m2, m3), dtype=np.int64)
    face = np.outer(g2, g3)
    best = 0.0
    bounds = np.searchsorted(r1, np.arange(g1.shape[0] + 1))
    for i1 in range(g1.shape[0]):
        sl = slice(bounds[i1], bounds[i1 + 1])
        np.add.at(cnt, (r2[sl], r3[sl]), 1)
        cur = cnt.cumsum(0).cumsum(1)
        opened = np.zeros_like(cur)
        opened[1:, 1:] = prev[:-1, :-1]
        vol = g1[i1] * face
        best = max(best, np.max(cur / n - vol), np.max(vol - opened / n))
        prev = cur
    return float(best)


def box_sums(lo, hi, pts, w):
    out = np.empty(lo.shape[0])
    for sl in _chunks(lo.shape[0], pts.shape[0] * pts.shape[1]):
        inside = np.all(
            (pts[None, :, :] >= lo[sl, None, :]) & (pts[None, :, :] <= hi[sl, None, :]),
            axis=2,
        )
        out[sl] = inside @ w
    return out


def periodic_box_sums(xs, off_lo, off_hi, pts, w):
    out = np.empty(xs.shape[0])
    for sl in _chunks(xs.shape[0], pts.shape[0] * pts.shape[1] * 3):
        diff = xs[sl, None, :] - pts[None, :, :]
        cnt = np.zeros(diff.shape)
        for n in (-1.0, 0.0, 1.0):
            v = diff + n
            cnt += (v >= off_lo) & (v <= off_hi)
        out[sl] = np.prod(cnt, axis=2) @ w
    return out


def periodic_ball_sums(xs, r, pts, w):
    out = np.empty(xs.shape[0])
    for sl in _chunks(xs.shape[0], pts.shape[0] * pts.shape[1]):
        diff = xs[sl, None, :] - pts[None, :, :]
        diff -= np.floor(diff + 0.5)
        out[sl] = (np.einsum("ijk,ijk->ij", diff, diff) <= r * r) @ w
    return out


def cap_sums(centers, cos_t, pts, w):
    out = np.empty(centers.shape[0])
    for sl in _chunks(centers.shape[0], pts.shape[0]):
        out[sl] = ((centers[sl] @ pts.T) >= cos_t) @ w
    return out


def _clip(poly, a, b, c):
    # keep {a x + b y <= c}
    if len(poly) == 0:
        return poly
    s = poly @ np.array([a, b]) - c
    out = []
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        if s[i] <= 0.0:
            out.append(poly[i])
        if (s[i] < 0.0 < s[j]) or (s[i] > 0.0 > s[j]):
            tt = s[i] / (s[i] - s[j])
            out.append(poly[i] + tt * (poly[j] - poly[i]))
    return np.array(out).reshape(-1, 2)


def polygon_box_areas(poly, lo, hi):
    out = np.zeros(lo.shape[0])
    for b in range(lo.shape[0]):
        if lo[b, 0] > hi[b, 0] or lo[b, 1] > hi[b, 1]:
            continue
        p = _clip(poly, -1.0, 0.0, -lo[b, 0])
        p = _clip(p, 1.0, 0.0, hi[b, 0])
        p = _clip(p, 0.0, -1.0, -lo[b, 1])
        p = _clip(p, 0.0, 1.0, hi[b, 1])
        if len(p) >= 3:
            x, y = p[:, 0], p[:, 1]
            out[b] = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return out


def _series(alpha, t):
    half = 0.5 * t
    term = np.exp(alpha * np.log(half) - math.lgamma(alpha + 1.0))
    total = term.copy()
    q = -half * half
    kmax = int(np.max(half)) + 60 if t.size else 0
    for k in range(1, kmax + 1):
        term = term * q / (k * (k + alpha))
        total += term
    return total


def _asymptotic(alpha, t):
    mu = 4.0 * alpha * alpha
    chi = t - (0.5 * alpha + 0.25) * math.pi
    p = np.ones_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    prev = np.ones_like(t)
    live = np.ones(t.shape, dtype=bool)
    for k in range(1, 80):
        odd = 2.0 * k - 1.0
        nxt = term * (mu - odd * odd) / (k * 8.0 * t)
        live &= np.abs(nxt) <= prev
        term = np.where(live, nxt, term)
        contrib = np.where(live, term, 0.0)
        if k % 2 == 1:
            q += contrib if (k // 2) % 2 == 0 else -contrib
        else:
            p += -contrib if (k // 2) % 2 == 1 else contrib
        prev = np.where(live, np.abs(term), prev)
        live &= prev >= 1e-17
        if not live.any():
            break
    return np.sqrt(2.0 / (math.pi * t)) * (p * np.cos(chi) - q * np.sin(chi))


def _half(alpha, t):
    s = np.sqrt(2.0 / (math.pi * t))
    jm = s * np.cos(t)
    if alpha < 0.0:
        return jm
    j = s * np.sin(t)
    nu = 0.5
    while nu < alpha - 1e-9:
        j, jm = (2.0 * nu / t) * j - jm, j
        nu += 1.0
    return j


def bessel_j(alpha, t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    zero = t == 0.0
    out[zero] = 1.0 if alpha == 0.0 else (np.inf if alpha < 0.0 else 0.0)
    two = 2.0 * alpha
    half_int = two == math.floor(two) and int(two) % 2 != 0
    if half_int:
        m_half = ~zero & (t >= max(1.0, alpha + 1.0))
    else:
        m_half = np.zeros_like(zero)
    m_series = ~zero & ~m_half & (t < 15.0)
    m_asym = ~zero & ~m_half & (t >= 15.0)
    if m_half.any():
        out[m_half] = _half(alpha, t[m_half])
    if m_series.any():
        out[m_series] = _series(alpha, t[m_series])
    if m_asym.any():
        out[m_asym] = _asymptotic(alpha, t[m_asym])
    return out


def bessel_j_scalar(alpha, t):
    return float(bessel_j(alpha, np.array([t]))[0])


def bessel_scan(alpha, radii, kmax, beta):
    k = np.arange(1, kmax + 1, dtype=float)
    root = np.sqrt(k)
    weight = k**beta
    out = np.empty(radii.shape[0])
    for i, r in enumerate(radii):
        out[i] = np.min(weight * np.abs(bessel_j(alpha, r * root)))
    return out


def legendre_table(nmax, z):
    out = np.empty((nmax + 1, z.shape[0]))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = z
    for n in range(1, nmax):
        out[n + 1] = ((2 * n + 1) * z * out[n] - n * out[n - 1]) / (n + 1)
    return out


def _sqrt_integral(p, q, r):
    def g(x):
        s = np.sqrt(np.maximum(0.0, r * r - x * x))
        return 0.5 * (x * s + r * r * np.arcsin(np.clip(x / r, -1.0, 1.0)))

    return np.where(q > p, g(q) - g(p), 0.0)


def _clip_integral(y, a, b, r):
    sgn = np.where(y >= 0.0, 1.0, -1.0)
    w = np.sqrt(np.maximum(0.0, r * r - y * y))
    outer = np.abs(y) >= r
    mid = y * np.maximum(0.0, np.minimum(b, w) - np.maximum(a, -w))
    left = _sqrt_integral(a, np.minimum(b, -w), r)
    right = _sqrt_integral(np.maximum(a, w), b, r)
    inner = mid + sgn * (left + right)
    return np.where(b > a, np.where(outer, sgn * _sqrt_integral(a, b, r), inner), 0.0)


def disc_box_areas(cx, cy, r, lo, hi):
    if r <= 0.0:
        return np.zeros(lo.shape[0])
    a = np.maximum(lo[:, 0] - cx, -r)
    e = np.minimum(hi[:, 0] - cx, r)
    y0 = lo[:, 1] - cy
    y1 = hi[:, 1] - cy
    area = _clip_integral(y1, a, e, r) - _clip_integral(y0, a, e, r)
    return np.where((a < e) & (y0 < y1), area, 0.0)
