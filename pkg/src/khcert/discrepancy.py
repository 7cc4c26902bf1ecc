"""Discrepancy functionals on the torus.

* star discrepancy, exact on the rank grid (d <= 3);
* the 2^d-scaled supremum of |mu(omega ∩ I)| over free intervals I;
* the averaged L^q discrepancy of translated anchored boxes;
* L^2 discrepancies of translated cubes and balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DimensionMismatchError, InvalidParameterError, SizeGuardError
from .estimates import EXACT, MONTE_CARLO, SEARCH, DiscrepancyEstimate
from .pointgen import PointSet, rng_from_seed
from .regions import (
    AxisBox,
    FullCube,
    SignedMeasure,
    UniformPart,
    VolumeConfig,
    ball_volume,
    lattice_shifts,
    require_in_unit_cube,
    restrict,
    sample_region,
)

STAR_WORK_LIMIT = 1 << 29


def _as_measure(pts_or_mu):
    if isinstance(pts_or_mu, SignedMeasure):
        return pts_or_mu
    return SignedMeasure.qmc(pts_or_mu)


def _points(pts):
    return pts.points if isinstance(pts, PointSet) else np.asarray(pts, dtype=float)


# -------------------------------------------------------------- star


def star_discrepancy_exact(pts, max_work=STAR_WORK_LIMIT):
    """sup over anchored boxes [0,t] of |#{x_j in box}/N - vol|, exactly.

    Candidate t-coordinates are the distinct point coordinates and 1; open
    boxes (limits from below) are covered by shifting the count one rank.
    """
    x = _points(pts)
    n, d = x.shape
    if d > 3:
        raise SizeGuardError("exact star discrepancy is implemented for d <= 3; use intersection_discrepancy")
    grids, ranks = [], []
    for k in range(d):
        g = np.unique(x[:, k])
        if g[-1] < 1.0:
            g = np.append(g, 1.0)
        grids.append(g)
        ranks.append(np.searchsorted(g, x[:, k]).astype(np.int64))
    work = int(np.prod([len(g) for g in grids]))
    if work > max_work:
        raise SizeGuardError(
            f"rank grid has {work} cells (limit {max_work}); use intersection_discrepancy in search mode"
        )
    order = np.argsort(ranks[0], kind="stable")
    ranks = [np.ascontiguousarray(r[order]) for r in ranks]
    if d == 1:
        v = _accel.star_disc_1d(ranks[0], grids[0], float(n))
    elif d == 2:
        v = _accel.star_disc_2d(ranks[0], ranks[1], grids[0], grids[1], float(n))
    else:
        v = _accel.star_disc_3d(*ranks, *grids, float(n))
    return DiscrepancyEstimate(float(v), EXACT, 0.0, {"N": n, "dim": d})


# ------------------------------------------------------ shared helpers


class _Parts:
    """Atoms of mu restricted to omega plus the uniform part on omega.

    When omega has no exact area oracle, the uniform part becomes Monte
    Carlo atoms with negative weight and ``coeff`` is set to zero.
    """

    def __init__(self, omega, mu, volume_cfg):
        if mu.dim != omega.dim:
            raise DimensionMismatchError("measure and region dimensions differ")
        require_in_unit_cube(omega)
        self.dim = omega.dim
        atoms, w = restrict(mu, omega)
        self.coeff = mu.uniform_coeff
        self.uniform = UniformPart(omega, volume_cfg)
        self.method = self.uniform.method
        if not self.uniform.exact and self.coeff != 0.0:
            mc = self.uniform.atoms
            atoms = np.concatenate([atoms, mc])
            w = np.concatenate([w, np.full(mc.shape[0], -self.coeff * self.uniform.cell)])
            self.coeff = 0.0
        self.atoms = np.ascontiguousarray(atoms)
        self.weights = np.ascontiguousarray(w)
        self.mc_scale = abs(mu.uniform_coeff) * self.uniform.stderr_scale

    def areas(self, lo, hi):
        if self.coeff == 0.0:
            return np.zeros(lo.shape[0])
        return self.uniform.box_areas(np.ascontiguousarray(lo), np.ascontiguousarray(hi))

    def box_values(self, lo, hi):
        lo = np.ascontiguousarray(lo, dtype=float)
        hi = np.ascontiguousarray(hi, dtype=float)
        vals = _accel.box_sums(lo, hi, self.atoms, self.weights)
        if self.coeff != 0.0:
            vals = vals - self.coeff * self.areas(lo, hi)
        return vals

    def periodic_uniform(self, lo_off, hi_off, xs):
        """sum over shifts n of area(omega ∩ [x + n + lo_off, x + n + hi_off])."""
        total = np.zeros(xs.shape[0])
        if self.coeff == 0.0:
            return total
        for n in lattice_shifts(self.dim):
            lo = np.maximum(xs + n + lo_off, 0.0)
            hi = np.minimum(xs + n + hi_off, 1.0)
            live = np.all(lo <= hi, axis=1)
            if live.any():
                total[live] += self.areas(lo[live], hi[live])
        return total


# --------------------------------------------- intersection discrepancy


@dataclass(frozen=True)
class SearchConfig:
    starts: int = 32
    sweeps: int = 8
    seed: int = 0
    anchored: bool = False
    exhaustive_limit: int = 1 << 22

    def __post_init__(self):
        if self.starts < 0 or self.sweeps < 1:
            raise InvalidParameterError("starts must be >= 0 and sweeps >= 1")


def _face_candidates(ys, upper):
    """Face positions where a closed-box count or its open limit is attained."""
    if upper:
        c = np.concatenate([ys, np.nextafter(ys, -np.inf), [1.0]])
    else:
        c = np.concatenate([ys, np.nextafter(ys, np.inf), [0.0]])
    return np.unique(np.clip(c, 0.0, 1.0))


def _exhaustive(parts, anchored):
    d = parts.dim
    ys = parts.atoms
    axes = []
    for k in range(d):
        his = _face_candidates(ys[:, k], True)
        los = np.array([0.0]) if anchored else _face_candidates(ys[:, k], False)
        L, H = np.meshgrid(los, his, indexing="ij")
        ok = L <= H
        axes.append((L[ok], H[ok]))
    sizes = [a[0].shape[0] for a in axes]
    idx = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
    idx = [i.ravel() for i in idx]
    lo = np.column_stack([axes[k][0][idx[k]] for k in range(d)])
    hi = np.column_stack([axes[k][1][idx[k]] for k in range(d)])
    best, where = 0.0, None
    step = 1 << 16
    for s in range(0, lo.shape[0], step):
        v = np.abs(parts.box_values(lo[s : s + step], hi[s : s + step]))
        i = int(np.argmax(v))
        if v[i] > best:
            best, where = float(v[i]), (lo[s + i], hi[s + i])
    return best, where


def _exhaustive_size(parts, anchored):
    m = 2 * parts.atoms.shape[0] + 1
    per_axis = m if anchored else m * (m + 1) // 2
    return per_axis**parts.dim


def _ascend(parts, lo, hi, sign, sweeps, anchored):
    d = parts.dim
    ys, ws = parts.atoms, parts.weights
    cur = sign * float(parts.box_values(lo[None], hi[None])[0])
    for _ in range(sweeps):
        improved = False
        for k in range(d):
            for upper in (True, False) if not anchored else (True,):
                others = np.ones(ys.shape[0], dtype=bool)
                for j in range(d):
                    if j != k:
                        others &= (ys[:, j] >= lo[j]) & (ys[:, j] <= hi[j])
                yk, wk = ys[others, k], ws[others]
                order = np.argsort(yk, kind="stable")
                yk, wk = yk[order], wk[order]
                cum = np.concatenate([[0.0], np.cumsum(wk)])
                cands = _face_candidates(yk, upper)
                if upper:
                    cands = cands[cands >= lo[k]]
                    base = cum[np.searchsorted(yk, lo[k], "left")]
                    counts = cum[np.searchsorted(yk, cands, "right")] - base
                    blo = np.tile(lo, (cands.shape[0], 1))
                    bhi = np.tile(hi, (cands.shape[0], 1))
                    bhi[:, k] = cands
                else:
                    cands = cands[cands <= hi[k]]
                    top = cum[np.searchsorted(yk, hi[k], "right")]
                    counts = top - cum[np.searchsorted(yk, cands, "left")]
                    blo = np.tile(lo, (cands.shape[0], 1))
                    bhi = np.tile(hi, (cands.shape[0], 1))
                    blo[:, k] = cands
                if cands.shape[0] == 0:
                    continue
                vals = sign * (counts - parts.coeff * parts.areas(blo, bhi))
                i = int(np.argmax(vals))
                if vals[i] > cur + 1e-15:
                    cur = float(vals[i])
                    lo, hi = blo[i].copy(), bhi[i].copy()
                    improved = True
        if not improved:
            break
    return cur, lo, hi


def intersection_discrepancy(omega, pts, search=None, volume_cfg=None):
    """2^d * sup over closed intervals I of |mu(omega ∩ I)|.

    ``pts`` is a PointSet (giving the qmc measure) or a SignedMeasure.
    Small problems are enumerated on the full face grid; otherwise a
    seeded multi-start coordinate ascent returns a lower bound.
    """
    search = search or SearchConfig()
    mu = _as_measure(pts)
    parts = _Parts(omega, mu, volume_cfg or VolumeConfig())
    d = parts.dim
    scale = 2.0**d
    params = {
        "anchored": search.anchored,
        "volume": parts.method,
        "seed": search.seed,
        "starts": search.starts,
        "sweeps": search.sweeps,
    }
    if parts.atoms.shape[0] == 0 and parts.coeff == 0.0:
        return DiscrepancyEstimate(0.0, EXACT, 0.0, params)
    if parts.uniform.exact and _exhaustive_size(parts, search.anchored) <= search.exhaustive_limit:
        best, where = _exhaustive(parts, search.anchored)
        if where is not None:
            params["box"] = {"lo": where[0].tolist(), "hi": where[1].tolist()}
        return DiscrepancyEstimate(scale * best, EXACT, 0.0, params)

    rng = rng_from_seed(search.seed)
    starts = [(np.zeros(d), np.ones(d))]
    blo, bhi = omega.bbox()
    starts.append((np.zeros(d) if search.anchored else blo.copy(), bhi.copy()))
    for _ in range(search.starts):
        u = rng.random((2, d))
        lo, hi = np.minimum(u[0], u[1]), np.maximum(u[0], u[1])
        if search.anchored:
            lo = np.zeros(d)
        starts.append((lo, hi))
    best, where = 0.0, (np.zeros(d), np.ones(d))
    for sign in (1.0, -1.0):
        for lo, hi in starts:
            val, lo2, hi2 = _ascend(parts, lo.copy(), hi.copy(), sign, search.sweeps, search.anchored)
            if val > best:
                best, where = val, (lo2, hi2)
    params["box"] = {"lo": where[0].tolist(), "hi": where[1].tolist()}
    stderr = 0.0
    if not parts.uniform.exact:
        # binomial error of the Monte Carlo volume of the best box
        lo, hi = where
        ob_lo, ob_hi = omega.bbox()
        frac = float(np.prod(np.clip(np.minimum(hi, ob_hi) - np.maximum(lo, ob_lo), 0, None)))
        frac /= max(float(np.prod(ob_hi - ob_lo)), 1e-300)
        stderr = scale * parts.mc_scale * math.sqrt(max(frac * (1 - frac), 0.25 / parts.uniform.cfg.samples))
        params["volume_samples"] = parts.uniform.cfg.samples
        params["volume_seed"] = parts.uniform.cfg.seed
    return DiscrepancyEstimate(scale * best, SEARCH, stderr, params)


# -------------------------------------------------------- L^q average


def _inner_norm(v, q):
    a = np.abs(v)
    if q == math.inf:
        return float(a.max())
    return float(np.mean(a**q) ** (1.0 / q))


def lq_discrepancy(omega, mu, q, mt=256, mx=4096, seed=0, volume_cfg=None):
    """Outer mean over t of the inner L^q norm over x of the periodized measure.

    t and x are uniform samples from one seeded stream, so estimates for
    different q with the same seed use identical samples.
    """
    q = float(q)
    if not q >= 1.0:
        raise InvalidParameterError(f"q must satisfy 1 <= q <= inf, got {q}")
    if mt < 1 or mx < 1:
        raise InvalidParameterError("mt and mx must be >= 1")
    parts = _Parts(omega, mu, volume_cfg or VolumeConfig())
    d = parts.dim
    rng = rng_from_seed(seed)
    inner = np.empty(mt)
    zero_lo = np.zeros(d)
    for i in range(mt):
        t = rng.random(d)
        xs = rng.random((mx, d))
        v = _accel.periodic_box_sums(xs, zero_lo, t, parts.atoms, parts.weights)
        if parts.coeff != 0.0:
            v = v - parts.coeff * parts.periodic_uniform(-t, zero_lo, xs)
        inner[i] = _inner_norm(v, q)
    value = float(inner.mean())
    stderr = float(inner.std(ddof=1) / math.sqrt(mt)) if mt > 1 else 0.0
    mode = SEARCH if q == math.inf else MONTE_CARLO
    params = {"q": q, "mt": mt, "mx": mx, "seed": seed, "volume": parts.method}
    return DiscrepancyEstimate(value, mode, stderr, params)


# ------------------------------------------------------ L^2 of translates


def _rms(v):
    sq = v * v
    m = float(sq.mean())
    value = math.sqrt(m)
    if v.shape[0] < 2 or value == 0.0:
        return value, 0.0
    se_sq = float(sq.std(ddof=1)) / math.sqrt(v.shape[0])
    return value, se_sq / (2.0 * value)


def cube_l2_discrepancy(omega, mu, a, mx=4096, seed=0, volume_cfg=None):
    """RMS over x of sum_n mu((x + n - A) ∩ omega), A = [-a/2, a/2]^d."""
    if not (0.0 < a < 1.0):
        raise InvalidParameterError("cube side must lie in (0, 1)")
    parts = _Parts(omega, mu, volume_cfg or VolumeConfig())
    d = parts.dim
    xs = rng_from_seed(seed).random((mx, d))
    half = np.full(d, a / 2.0)
    v = _accel.periodic_box_sums(xs, -half, half, parts.atoms, parts.weights)
    if parts.coeff != 0.0:
        v = v - parts.coeff * parts.periodic_uniform(-half, half, xs)
    value, stderr = _rms(v)
    params = {"a": a, "mx": mx, "seed": seed, "volume": parts.method}
    return DiscrepancyEstimate(value, MONTE_CARLO, stderr, params)


def ball_l2_discrepancy(omega, mu, r, mx=4096, seed=0, volume_cfg=None):
    """RMS over x of sum_n mu((x + n - B) ∩ omega), B the ball of radius r."""
    if not (0.0 < r < 0.5):
        raise InvalidParameterError("ball radius must lie in (0, 1/2)")
    if mu.dim != omega.dim:
        raise DimensionMismatchError("measure and region dimensions differ")
    require_in_unit_cube(omega)
    volume_cfg = volume_cfg or VolumeConfig()
    d = omega.dim
    atoms, w = restrict(mu, omega)
    c = mu.uniform_coeff
    method = EXACT
    box = None
    if isinstance(omega, AxisBox) and d == 2:
        box = omega
    elif isinstance(omega, FullCube) and d == 2:
        box = AxisBox(np.zeros(2), np.ones(2))
    if c != 0.0 and not isinstance(omega, FullCube) and box is None:
        mc, cell = sample_region(omega, volume_cfg)
        atoms = np.concatenate([atoms, mc])
        w = np.concatenate([w, np.full(mc.shape[0], -c * cell)])
        c = 0.0
        method = MONTE_CARLO
    xs = rng_from_seed(seed).random((mx, d))
    v = _accel.periodic_ball_sums(xs, float(r), np.ascontiguousarray(atoms), np.ascontiguousarray(w))
    if c != 0.0:
        if isinstance(omega, FullCube):
            v = v - c * ball_volume(d, r)
        else:
            area = np.zeros(mx)
            for n in lattice_shifts(2):
                centers = xs + n
                area += _accel.disc_box_areas(
                    0.0,
                    0.0,
                    float(r),
                    np.ascontiguousarray(box.lo - centers),
                    np.ascontiguousarray(box.hi - centers),
                )
            v = v - c * area
    value, stderr = _rms(v)
    params = {"r": r, "mx": mx, "seed": seed, "volume": method}
    if method == MONTE_CARLO:
        params["volume_samples"] = volume_cfg.samples
        params["volume_seed"] = volume_cfg.seed
    return DiscrepancyEstimate(value, MONTE_CARLO, stderr, params)
