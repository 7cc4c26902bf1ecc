"""Loop kernels compiled with numba.

Every function here has a vectorised twin in ``_numpy`` with the same
signature; ``khcert._accel`` picks one set at import time.
"""

import math

import numpy as np
from numba import njit

# ---------------------------------------------------------------- sequences


@njit(cache=True)
def radical_inverse(idx, base):
    out = np.empty(idx.shape[0])
    for i in range(idx.shape[0]):
        n = idx[i]
        num = 0
        den = 1
        while n > 0:
            num = num * base + n % base
            den *= base
            n //= base
        out[i] = num / den
    return out


# ------------------------------------------------------ star discrepancy


@njit(cache=True)
def star_disc_1d(r1, g1, n):
    # r1 sorted ranks into g1 (unique coords + trailing 1.0)
    best = 0.0
    closed = 0
    ptr = 0
    for i in range(g1.shape[0]):
        opened = closed
        while ptr < r1.shape[0] and r1[ptr] == i:
            closed += 1
            ptr += 1
        v = g1[i]
        a = closed / n - v
        b = v - opened / n
        if a > best:
            best = a
        if b > best:
            best = b
    return best


@njit(cache=True)
def star_disc_2d(r1, r2, g1, g2, n):
    m2 = g2.shape[0]
    cnt = np.zeros(m2, dtype=np.int64)
    prev = np.zeros(m2, dtype=np.int64)
    cur = np.zeros(m2, dtype=np.int64)
    best = 0.0
    ptr = 0
    for i1 in range(g1.shape[0]):
        while ptr < r1.shape[0] and r1[ptr] == i1:
            cnt[r2[ptr]] += 1
            ptr += 1
        run = 0
        for i2 in range(m2):
            run += cnt[i2]
            cur[i2] = run
            opened = prev[i2 - 1] if i2 > 0 else 0
            vol = g1[i1] * g2[i2]
            a = run / n - vol
            b = vol - opened / n
            if a > best:
                best = a
            if b > best:
                best = b
        for i2 in range(m2):
            prev[i2] = cur[i2]
    return best


@njit(cache=True)
def star_disc_3d(r1, r2, r3, g1, g2, g3, n):
    m2 = g2.shape[0]
    m3 = g3.shape[0]
    cnt = np.zeros((m2, m3), dtype=np.int64)
    prev = np.zeros((m2, m3), dtype=np.int64)
    cur = np.zeros((m2, m3), dtype=np.int64)
    best = 0.0
    ptr = 0
    for i1 in range(g1.shape[0]):
        while ptr < r1.shape[0] and r1[ptr] == i1:
            cnt[r2[ptr], r3[ptr]] += 1
            ptr += 1
        for i2 in range(m2):
            run = 0
            for i3 in range(m3):
                run += cnt[i2, i3]
                above = cur[i2 - 1, i3] if i2 > 0 else 0
                closed = run + above
                cur[i2, i3] = closed
                if i2 > 0 and i3 > 0:
                    opened = prev[i2 - 1, i3 - 1]
                else:
                    opened = 0
                vol = g1[i1] * g2[i2] * g3[i3]
                a = closed / n - vol
                b = vol - opened / n
                if a > best:
                    best = a
                if b > best:
                    best = b
        for i2 in range(m2):
            for i3 in range(m3):
                prev[i2, i3] = cur[i2, i3]
    return best


# ---------------------------------------------------------- box counting


@njit(cache=True)
def box_sums(lo, hi, pts, w):
    nb, d = lo.shape
    out = np.zeros(nb)
    for b in range(nb):
        s = 0.0
        for j in range(pts.shape[0]):
            inside = True
            for k in range(d):
                c = pts[j, k]
                if c < lo[b, k] or c > hi[b, k]:
                    inside = False
                    break
            if inside:
                s += w[j]
        out[b] = s
    return out


@njit(cache=True)
def periodic_box_sums(xs, off_lo, off_hi, pts, w):
    nx, d = xs.shape
    out = np.zeros(nx)
    for i in range(nx):
        s = 0.0
        for j in range(pts.shape[0]):
            mult = 1.0
            for k in range(d):
                diff = xs[i, k] - pts[j, k]
                c = 0
                for n in range(-1, 2):
                    v = diff + n
                    if v >= off_lo[k] and v <= off_hi[k]:
                        c += 1
                if c == 0:
                    mult = 0.0
                    break
                mult *= c
            if mult != 0.0:
                s += w[j] * mult
        out[i] = s
    return out


@njit(cache=True)
def periodic_ball_sums(xs, r, pts, w):
    # minimum-image distance; exact because r < 1/2
    nx, d = xs.shape
    r2 = r * r
    out = np.zeros(nx)
    for i in range(nx):
        s = 0.0
        for j in range(pts.shape[0]):
            acc = 0.0
            for k in range(d):
                diff = xs[i, k] - pts[j, k]
                diff -= math.floor(diff + 0.5)
                acc += diff * diff
                if acc > r2:
                    break
            if acc <= r2:
                s += w[j]
        out[i] = s
    return out


@njit(cache=True)
def cap_sums(centers, cos_t, pts, w):
    out = np.zeros(centers.shape[0])
    for i in range(centers.shape[0]):
        cx = centers[i, 0]
        cy = centers[i, 1]
        cz = centers[i, 2]
        s = 0.0
        for j in range(pts.shape[0]):
            if cx * pts[j, 0] + cy * pts[j, 1] + cz * pts[j, 2] >= cos_t:
                s += w[j]
        out[i] = s
    return out


# --------------------------------------------------------------- polygons


@njit(cache=True)
def _clip_halfplane(inx, iny, n, a, b, c, outx, outy):
    m = 0
    for i in range(n):
        j = (i + 1) % n
        si = a * inx[i] + b * iny[i] - c
        sj = a * inx[j] + b * iny[j] - c
        if si <= 0.0:
            outx[m] = inx[i]
            outy[m] = iny[i]
            m += 1
        if (si < 0.0 and sj > 0.0) or (si > 0.0 and sj < 0.0):
            tt = si / (si - sj)
            outx[m] = inx[i] + tt * (inx[j] - inx[i])
            outy[m] = iny[i] + tt * (iny[j] - iny[i])
            m += 1
    return m


@njit(cache=True)
def polygon_box_areas(poly, lo, hi):
    nv = poly.shape[0]
    cap = nv + 8
    ax = np.empty(cap)
    ay = np.empty(cap)
    bx = np.empty(cap)
    by = np.empty(cap)
    out = np.zeros(lo.shape[0])
    for b in range(lo.shape[0]):
        if lo[b, 0] > hi[b, 0] or lo[b, 1] > hi[b, 1]:
            continue
        for i in range(nv):
            ax[i] = poly[i, 0]
            ay[i] = poly[i, 1]
        m = _clip_halfplane(ax, ay, nv, -1.0, 0.0, -lo[b, 0], bx, by)
        m = _clip_halfplane(bx, by, m, 1.0, 0.0, hi[b, 0], ax, ay)
        m = _clip_halfplane(ax, ay, m, 0.0, -1.0, -lo[b, 1], bx, by)
        m = _clip_halfplane(bx, by, m, 0.0, 1.0, hi[b, 1], ax, ay)
        area = 0.0
        for i in range(m):
            j = (i + 1) % m
            area += ax[i] * ay[j] - ax[j] * ay[i]
        out[b] = 0.5 * abs(area)
    return out


# ----------------------------------------------------------------- Bessel


@njit(cache=True)
def _bessel_series(alpha, t):
    half = 0.5 * t
    term = math.exp(alpha * math.log(half) - math.lgamma(alpha + 1.0))
    total = term
    q = -half * half
    k = 0
    while k < 400:
        k += 1
        term *= q / (k * (k + alpha))
        total += term
        if k > half and abs(term) <= 1e-17 * abs(total) + 1e-300:
            break
    return total


@njit(cache=True)
def _bessel_asymptotic(alpha, t):
    mu = 4.0 * alpha * alpha
    chi = t - (0.5 * alpha + 0.25) * math.pi
    p = 1.0
    q = 0.0
    term = 1.0
    prev = 1.0
    for k in range(1, 80):
        odd = 2.0 * k - 1.0
        nxt = term * (mu - odd * odd) / (k * 8.0 * t)
        if abs(nxt) > prev:
            break
        term = nxt
        if k % 2 == 1:
            if (k // 2) % 2 == 0:
                q += term
            else:
                q -= term
        else:
            if (k // 2) % 2 == 1:
                p -= term
            else:
                p += term
        prev = abs(term)
        if prev < 1e-17:
            break
    return math.sqrt(2.0 / (math.pi * t)) * (p * math.cos(chi) - q * math.sin(chi))


@njit(cache=True)
def _bessel_half(alpha, t):
    s = math.sqrt(2.0 / (math.pi * t))
    jm = s * math.cos(t)
    if alpha < 0.0:
        return jm
    j = s * math.sin(t)
    nu = 0.5
    while nu < alpha - 1e-9:
        jn = (2.0 * nu / t) * j - jm
        jm = j
        j = jn
        nu += 1.0
    return j


@njit(cache=True)
def bessel_j_scalar(alpha, t):
    if t == 0.0:
        if alpha == 0.0:
            return 1.0
        return np.inf if alpha < 0.0 else 0.0
    two = 2.0 * alpha
    half_int = two == math.floor(two) and (int(two) % 2) != 0
    if half_int and t >= max(1.0, alpha + 1.0):
        return _bessel_half(alpha, t)
    if t < 15.0:
        return _bessel_series(alpha, t)
    return _bessel_asymptotic(alpha, t)


@njit(cache=True)
def bessel_j(alpha, t):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = bessel_j_scalar(alpha, t[i])
    return out


@njit(cache=True)
def bessel_scan(alpha, radii, kmax, beta):
    out = np.empty(radii.shape[0])
    for i in range(radii.shape[0]):
        r = radii[i]
        best = np.inf
        for k in range(1, kmax + 1):
            v = (k ** beta) * abs(bessel_j_scalar(alpha, r * math.sqrt(k)))
            if v < best:
                best = v
        out[i] = best
    return out


# --------------------------------------------------------------- Legendre


@njit(cache=True)
def legendre_table(nmax, z):
    out = np.empty((nmax + 1, z.shape[0]))
    for i in range(z.shape[0]):
        p0 = 1.0
        out[0, i] = p0
        if nmax == 0:
            continue
        p1 = z[i]
        out[1, i] = p1
        for n in range(1, nmax):
            p2 = ((2 * n + 1) * z[i] * p1 - n * p0) / (n + 1)
            out[n + 1, i] = p2
            p0 = p1
            p1 = p2
    return out


# ---------------------------------------------------------- disc ∩ box


@njit(cache=True)
def _sqrt_antideriv(x, r):
    s = math.sqrt(max(0.0, r * r - x * x))
    return 0.5 * (x * s + r * r * math.asin(min(1.0, max(-1.0, x / r))))


@njit(cache=True)
def _sqrt_integral(p, q, r):
    # integral of sqrt(r^2 - x^2) over [p, q], with -r <= p <= q <= r
    if q <= p:
        return 0.0
    return _sqrt_antideriv(q, r) - _sqrt_antideriv(p, r)


@njit(cache=True)
def _clip_integral(y, a, b, r):
    # integral over [a, b] of clip(y, -s(x), s(x)), s(x) = sqrt(r^2 - x^2)
    if a >= b:
        return 0.0
    sgn = 1.0 if y >= 0.0 else -1.0
    if abs(y) >= r:
        return sgn * _sqrt_integral(a, b, r)
    w = math.sqrt(r * r - y * y)
    total = y * max(0.0, min(b, w) - max(a, -w))
    if a < -w:
        total += sgn * _sqrt_integral(a, min(b, -w), r)
    if b > w:
        total += sgn * _sqrt_integral(max(a, w), b, r)
    return total


@njit(cache=True)
def disc_box_areas(cx, cy, r, lo, hi):
    out = np.zeros(lo.shape[0])
    if r <= 0.0:
        return out
    for b in range(lo.shape[0]):
        a = max(lo[b, 0] - cx, -r)
        e = min(hi[b, 0] - cx, r)
        y0 = lo[b, 1] - cy
        y1 = hi[b, 1] - cy
        if a >= e or y0 >= y1:
            continue
        out[b] = _clip_integral(y1, a, e, r) - _clip_integral(y0, a, e, r)
    return out
