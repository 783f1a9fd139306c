"""Convexity workhorses: hulls, projections, centres, means, fixed points.

Everything here runs on sampled stand-ins for convex sets.  A body is the
dyadic midpoint closure of finitely many generators; projections and
centre solvers refine over the continuum by line searches along geodesics
between feasible points, so accuracy is not capped by the sample spacing.

Solver strategy, per space family:

* circumcentre: the radius function ``R(x) = max_i d(x, p_i)`` is convex
  but nonsmooth, and descent toward the farthest point alone can wedge
  between two co-farthest points.  That descent is kept as a cheap first
  stage, then a per-geometry finisher takes over.  Flat spaces get an
  exact support-set solve (Frank-Wolfe on the dual simplex, snapped to the
  affine solution of its support).  Trees use the diametrical pair, whose
  midpoint is the exact centre in any real tree.  Hyperbolic and SPD
  spaces anneal a softmax-weighted tangent-space descent.  Products and
  anything else anneal line searches toward the input points.  A final
  sweep certifies that no sampled candidate improves the radius by more
  than the contract tolerance.

* barycentre: cyclic inductive geodesic averaging is exact at pass
  boundaries in flat spaces and is used everywhere as the warm start,
  followed by slope-greedy geodesic line searches.  Trees get an exact
  per-edge quadratic minimisation, products decompose factorwise, and the
  smooth families use tangent-space fixed-point iteration.

All solvers are deterministic; ``seed`` parameters are accepted where the
interface promises them but never change the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import (
    ConvergenceError,
    DomainError,
    EvanescenceDiagnostic,
)
from .metric_core import DefectReport, Point, distance, geodesic_point
from .spaces.base import ModelSpace
from .spaces.euclidean import EuclideanSpace
from .spaces.hyperbolic import HyperbolicSpace
from .spaces.product import ProductSpace
from .spaces.spd import SPDSpace
from .spaces.tree import TreeSpace

DEFAULT_HULL_DEPTH = 4
MAX_HULL_DEPTH = 6
HULL_SAMPLE_CAP = 20000
CIRCUM_IMPROVE_TOL = 1e-6


# ---------------------------------------------------------------------------
# bodies


class ConvexBody:
    """Sampled stand-in for the closed convex hull of ``generators``."""

    def __init__(self, space: ModelSpace, generators: Sequence[Point], depth: int = DEFAULT_HULL_DEPTH,
                 cap: int = HULL_SAMPLE_CAP):
        if not generators:
            raise DomainError("a convex body needs at least one generator")
        self.space = space
        self.generators = tuple(space.own(p) for p in generators)
        self.depth = int(depth)
        self.samples = tuple(dyadic_hull(space, self.generators, self.depth, cap=cap))
        self._packed = None

    def packed(self):
        if self._packed is None:
            self._packed = self.space.pack(self.samples)
        return self._packed

    def diameter_estimate(self) -> float:
        """Max distance from the first generator, doubled; cheap and sufficient."""
        d = self.space.distances_packed(self.samples[0], self.packed())
        return float(2.0 * d.max())

    def __len__(self) -> int:
        return len(self.samples)


def dyadic_hull(space: ModelSpace, points: Sequence[Point], depth: int,
                cap: int = HULL_SAMPLE_CAP) -> list[Point]:
    """Iterated pairwise geodesic midpoints of ``points``, deduplicated.

    Each round inserts the midpoint of every pair of current samples that
    is not already present.  Raises when the sample count would exceed
    ``cap``; use a lower depth for bodies with many generators.
    """
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    if depth > MAX_HULL_DEPTH:
        raise DomainError(f"depth {depth} exceeds the cap {MAX_HULL_DEPTH}")
    samples = [space.own(p) for p in points]
    scale = 1.0
    for p in points[1:]:
        scale = max(scale, space._distance(points[0].coords, p.coords))
    tol = 1e-9 * scale
    packed = space.pack(samples)
    for _ in range(depth):
        current = list(samples)
        n = len(current)
        for i in range(n):
            for j in range(i + 1, n):
                m = geodesic_point(space, current[i], current[j], 0.5)
                if space.distances_packed(m, packed).min() <= tol:
                    continue
                samples.append(m)
                if len(samples) > cap:
                    raise DomainError(
                        f"dyadic hull exceeded {cap} samples at depth {depth}; "
                        "lower the depth or the generator count"
                    )
                packed = space.pack(samples)
    return samples


def convex_body(space: ModelSpace, generators: Sequence[Point],
                depth: int = DEFAULT_HULL_DEPTH) -> ConvexBody:
    return ConvexBody(space, generators, depth)


# ---------------------------------------------------------------------------
# one-dimensional searches along geodesics


def _bracket_golden(f: Callable[[float], float], f0: float, hi: float = 1.0,
                    h0: float = 1e-6, iters: int = 40) -> tuple[float, float]:
    """Minimise convex ``f`` on [0, hi] given ``f(0)``; doubling bracket, then golden."""
    t_prev, f_prev = 0.0, f0
    t_cur = h0
    f_cur = f(t_cur)
    if f_cur >= f_prev:
        # the minimum sits in [0, h0]; shrink instead of grow
        lo, hi2 = 0.0, t_cur
    else:
        while t_cur < hi:
            t_next = min(t_cur * 2.0, hi)
            f_next = f(t_next)
            if f_next >= f_cur:
                break
            t_prev, f_prev = t_cur, f_cur
            t_cur, f_cur = t_next, f_next
        else:
            t_next = hi
        lo, hi2 = t_prev, min(max(t_cur * 2.0, t_cur), hi)
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t_best = c if fc <= fd else d
    f_best = min(fc, fd)
    if f0 <= f_best:
        return 0.0, f0
    return t_best, f_best


def _greedy_descent(space: ModelSpace, value: Callable[[Point], float], start: Point,
                    targets: Sequence[Point], *, slope_tol: float, scale: float,
                    max_rounds: int = 24, golden_iters: int = 40) -> tuple[Point, float]:
    """Slope-greedy exact line searches toward ``targets``; convex ``value``."""
    c = start
    fc = value(c)
    h = max(1e-9, 1e-7 * scale)
    for _ in range(max_rounds):
        best_slope, best_idx, dists = 0.0, -1, []
        for idx, tgt in enumerate(targets):
            d_ct = distance(space, c, tgt)
            dists.append(d_ct)
            if d_ct <= h:
                continue
            t_h = h / d_ct
            slope = (value(geodesic_point(space, c, tgt, t_h)) - fc) / h
            if slope < best_slope:
                best_slope, best_idx = slope, idx
        if best_idx < 0 or best_slope >= -slope_tol:
            break
        tgt = targets[best_idx]
        f_line = lambda t: value(geodesic_point(space, c, tgt, t))
        t_star, f_star = _bracket_golden(f_line, fc, iters=golden_iters)
        if f_star >= fc - 1e-16 * max(1.0, abs(fc)):
            break
        c = geodesic_point(space, c, tgt, t_star)
        fc = f_star
    return c, fc


# ---------------------------------------------------------------------------
# projection


def project(space: ModelSpace, body: ConvexBody, x: Point, *,
            golden_iters: int = 48, max_rounds: int = 16) -> Point:
    """Nearest point of ``body`` to ``x``.

    Discrete minimum over the samples (ties to the lowest index), then
    exact line searches along geodesics between feasible points, which
    converge to the true projection on the continuum hull.
    """
    space.own(x)
    dists = space.distances_packed(x, body.packed())
    j = int(np.argmin(dists))
    best = body.samples[j]
    if len(body.samples) == 1:
        return best
    scale = body.diameter_estimate() + float(dists[j])

    value = lambda p: distance(space, x, p)
    if len(body.generators) == 2:
        # segment body: one exact search along the generating geodesic
        g0, g1 = body.generators
        f_line = lambda t: value(geodesic_point(space, g0, g1, t))
        f0 = value(g0)
        t_star, f_star = _bracket_golden(f_line, f0, iters=golden_iters + 12)
        cand = geodesic_point(space, g0, g1, t_star)
        return cand if f_star <= value(best) else best

    targets = list(body.generators)
    order = np.argsort(space.distances_packed(best, body.packed()))
    for idx in order[: 8]:
        targets.append(body.samples[int(idx)])
    out, _ = _greedy_descent(
        space, value, best, targets,
        slope_tol=1e-9, scale=scale, max_rounds=max_rounds, golden_iters=golden_iters,
    )
    return out


# ---------------------------------------------------------------------------
# circumcentre


@dataclass(frozen=True)
class CircumResult:
    center: Point
    radius: float


def _max_dist(space: ModelSpace, packed, c: Point) -> float:
    return float(space.distances_packed(c, packed).max())


def _flat_chart(space: ModelSpace):
    """Vectorising chart for spaces isometric to a flat space, else None."""
    if isinstance(space, EuclideanSpace):
        return (lambda p: np.asarray(p.coords, dtype=float),
                lambda v: space.point(v))
    if isinstance(space, ProductSpace) and all(
        isinstance(f, EuclideanSpace) for f in space.factors
    ):
        w = np.sqrt(space.weights)
        dims = [f.dim for f in space.factors]

        def to_vec(p: Point) -> np.ndarray:
            return np.concatenate([wi * np.asarray(c, dtype=float)
                                   for wi, c in zip(w, p.coords)])

        def from_vec(v: np.ndarray) -> Point:
            coords, at = [], 0
            for wi, d in zip(w, dims):
                coords.append(v[at: at + d] / wi)
                at += d
            return space.point(tuple(coords))

        return to_vec, from_vec
    return None


def _ball_of_support(P: np.ndarray) -> tuple[np.ndarray, float]:
    """Centre equidistant from the rows of ``P`` inside their affine hull."""
    base = P[0]
    B = P[1:] - base
    if len(B) == 0:
        return base.copy(), 0.0
    rhs = 0.5 * np.sum(B * B, axis=1)
    lam, *_ = np.linalg.lstsq(B @ B.T, rhs, rcond=None)
    c = base + B.T @ lam
    r = float(np.max(np.linalg.norm(P - c, axis=1)))
    return c, r


def _circum_flat(P: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest enclosing ball of row vectors: dual Frank-Wolfe, support snap."""
    m = len(P)
    if m == 1:
        return P[0].copy(), 0.0
    sq = np.sum(P * P, axis=1)
    lam = np.full(m, 1.0 / m)
    c = lam @ P
    for _ in range(4000):
        grad = sq - 2.0 * (P @ c)  # d(c, p_i)^2 up to the constant |c|^2
        s = int(np.argmax(grad))
        active = np.where(lam > 1e-14)[0]
        a = int(active[np.argmin(grad[active])])
        gap = grad[s] - lam @ grad
        if gap <= 1e-15 * max(1.0, sq.max()):
            break
        # choose between a toward-vertex step and an away step, exact line search
        d_fw = P[s] - c
        g_fw = grad[s] - lam @ grad
        d_aw = c - P[a]
        g_aw = lam @ grad - grad[a]
        if g_fw >= g_aw:
            direction, g_lin, t_max = d_fw, g_fw, 1.0
            upd = ("fw", s)
        else:
            la = lam[a]
            direction, g_lin, t_max = d_aw, g_aw, la / max(1.0 - la, 1e-300)
            upd = ("aw", a)
        denom = 2.0 * float(direction @ direction)
        t = t_max if denom <= 0 else min(max(g_lin / denom, 0.0), t_max)
        if t <= 0:
            break
        if upd[0] == "fw":
            lam *= 1.0 - t
            lam[s] += t
        else:
            lam *= 1.0 + t
            lam[a] -= t
            lam[a] = max(lam[a], 0.0)
        lam /= lam.sum()
        c = lam @ P
    # snap to the exact ball of the support when it still covers everything
    support = np.where(lam > 1e-9)[0]
    if 1 <= len(support) <= P.shape[1] + 1:
        c_snap, r_snap = _ball_of_support(P[support])
        r_all = float(np.max(np.linalg.norm(P - c_snap, axis=1)))
        if r_all <= r_snap + 1e-9 * max(1.0, r_snap):
            return c_snap, r_all
    return c, float(np.max(np.linalg.norm(P - c, axis=1)))


def _circum_tree(space: TreeSpace, points: Sequence[Point], packed) -> Point:
    """Midpoint of a diametrical pair; exact in a real tree."""
    d0 = space.distances_packed(points[0], packed)
    i = int(np.argmax(d0))
    di = space.distances_packed(points[i], packed)
    j = int(np.argmax(di))
    return geodesic_point(space, points[i], points[j], 0.5)


def _has_charts(space: ModelSpace) -> bool:
    return isinstance(space, (HyperbolicSpace, SPDSpace))


def _circum_smooth(space: ModelSpace, packed, c: Point, max_iter: int = 80) -> Point:
    """Pullback iteration: flat smallest-ball in normal coordinates, re-expand.

    The log map at any point is nonexpanding in nonpositive curvature, and
    at the true circumcentre the flat problem over the normal coordinates
    is centred at the origin, so the circumcentre is the unique fixed
    point of this update.
    """
    r = _max_dist(space, packed, c)
    if r == 0.0:
        return c
    eta = 1.0
    for _ in range(max_iter):
        u, _ = _circum_flat(space.log_chart(c, packed))
        n = float(np.linalg.norm(u))
        if n <= 1e-12 * (1.0 + r):
            break
        trial = space.exp_chart(c, eta * u)
        r_trial = _max_dist(space, packed, trial)
        if r_trial <= r + 1e-14 * (1.0 + r):
            c, r = trial, r_trial
            eta = min(1.0, eta * 1.5)
        else:
            eta *= 0.5
            if eta < 1e-4:
                break
    return c


def _circum_anneal_linesearch(space: ModelSpace, points: Sequence[Point], packed,
                              c: Point, levels: int = 30) -> Point:
    """Annealed softmax potential minimised by line searches toward inputs."""
    r0 = _max_dist(space, packed, c)
    if r0 == 0.0:
        return c
    tau = 0.5 * r0 * r0

    r_prev = r0
    stalled = 0
    for _ in range(levels):
        def value(p: Point) -> float:
            d = space.distances_packed(p, packed)
            d2 = d * d
            mx = d2.max()
            return float(mx + tau * np.log(np.mean(np.exp((d2 - mx) / tau))))

        d_now = space.distances_packed(c, packed)
        order = np.argsort(-d_now)[: 6]
        targets = [points[int(k)] for k in order]
        c, _ = _greedy_descent(space, value, c, targets, slope_tol=1e-9 * r0,
                               scale=r0, max_rounds=3, golden_iters=32)
        tau *= 0.5
        r_now = _max_dist(space, packed, c)
        # two stalled levels in a row mean the schedule has converged
        if r_now >= r_prev - 1e-10 * (1.0 + r0):
            stalled += 1
            if stalled >= 2:
                break
        else:
            stalled = 0
        r_prev = r_now
    return c


def circumcenter(space: ModelSpace, points: Sequence[Point], seed: int | None = None,
                 improve_tol: float = CIRCUM_IMPROVE_TOL) -> CircumResult:
    """Centre of the smallest enclosing ball of ``points``.

    Deterministic regardless of ``seed``.  The returned radius is the
    exact maximal distance from the returned centre.
    """
    pts = [space.own(p) for p in points]
    if not pts:
        raise DomainError("circumcenter of an empty set")
    if len(pts) == 1:
        return CircumResult(pts[0], 0.0)
    packed = space.pack(pts)

    chart = _flat_chart(space)
    if chart is not None:
        to_vec, from_vec = chart
        c_vec, _ = _circum_flat(np.array([to_vec(p) for p in pts]))
        c = from_vec(c_vec)
        return CircumResult(c, _max_dist(space, packed, c))

    if isinstance(space, TreeSpace):
        c = _circum_tree(space, pts, packed)
        return CircumResult(c, _max_dist(space, packed, c))

    # discrete warm start over inputs and a few midpoints
    cands = list(pts)
    d0 = space.distances_packed(pts[0], packed)
    far0 = int(np.argmax(d0))
    dfar = space.distances_packed(pts[far0], packed)
    far1 = int(np.argmax(dfar))
    mid = geodesic_point(space, pts[far0], pts[far1], 0.5)
    # any enclosing ball has radius at least half of any pairwise distance,
    # so a midpoint attaining that bound is exactly optimal
    mid_r = _max_dist(space, packed, mid)
    if mid_r <= 0.5 * float(dfar[far1]) + 1e-12 * (1.0 + mid_r):
        return CircumResult(mid, mid_r)
    cands.append(mid)
    best, best_r = None, np.inf
    for cand in cands:
        r = _max_dist(space, packed, cand)
        if r < best_r:
            best, best_r = cand, r

    def finish(c0: Point) -> Point:
        if _has_charts(space):
            return _circum_smooth(space, packed, c0)
        # descent toward the farthest point first; cheap but can wedge
        # between two co-farthest points, so anneal afterwards
        c1, r1 = c0, _max_dist(space, packed, c0)
        beta = 0.5
        while beta > 1e-3:
            far = pts[int(np.argmax(space.distances_packed(c1, packed)))]
            trial = geodesic_point(space, c1, far, beta)
            r_trial = _max_dist(space, packed, trial)
            if r_trial < r1 - 1e-15:
                c1, r1 = trial, r_trial
            else:
                beta *= 0.5
        return _circum_anneal_linesearch(space, pts, packed, c1)

    c = finish(best)
    r = _max_dist(space, packed, c)
    if r > best_r:
        c, r = best, best_r

    # certificate sweep: no sampled candidate may improve the radius
    for _ in range(2):
        improved = None
        for cand in pts + [geodesic_point(space, pts[far0], pts[far1], 0.5)]:
            r_cand = _max_dist(space, packed, cand)
            if r_cand < r - improve_tol:
                improved = (cand, r_cand)
        if improved is None:
            break
        c = finish(improved[0])
        r = _max_dist(space, packed, c)
    return CircumResult(c, r)


def nested_circum_check(space: ModelSpace, inner: ConvexBody, outer: ConvexBody,
                        containment_tol: float = 1e-6) -> DefectReport:
    """Distance between circumcentres of nested bodies against the root bound.

    For closed convex ``inner`` inside ``outer`` with circumradii r and R,
    the centres satisfy d <= sqrt(2) sqrt(R^2 - r^2).  The defect is the
    bound minus the measured centre distance.  Containment is certified by
    sample residuals (nearest outer sample, with a projection fallback).
    """
    for s in inner.samples:
        gap = float(space.distances_packed(s, outer.packed()).min())
        if gap > 1e-9:
            gap = distance(space, s, project(space, outer, s))
        if gap > containment_tol:
            raise DomainError(
                f"inner body sample escapes the outer body by {gap:.3e}"
            )
    res_in = circumcenter(space, inner.samples)
    res_out = circumcenter(space, outer.samples)
    bound = np.sqrt(2.0) * np.sqrt(max(res_out.radius ** 2 - res_in.radius ** 2, 0.0))
    gap = distance(space, res_out.center, res_in.center)
    return DefectReport.of("nested_circum", gap, float(bound),
                           context={"r_inner": res_in.radius, "r_outer": res_out.radius})


# ---------------------------------------------------------------------------
# barycentre


def _check_weights(m: int, weights) -> np.ndarray:
    if weights is None:
        w = np.full(m, 1.0 / m)
    else:
        w = np.asarray(list(weights), dtype=float)
        if w.shape != (m,):
            raise DomainError(f"need {m} weights, got shape {w.shape}")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > 1e-12:
        raise DomainError(f"weights sum to {w.sum()!r}, not 1")
    return w


def _inductive_sweeps(space: ModelSpace, pts: Sequence[Point], w: np.ndarray,
                      passes: int, move_tol: float) -> Point:
    """Cyclic inductive geodesic averaging; exact at pass ends in flat spaces."""
    c = None
    total = 0.0
    prev_end = None
    for _ in range(passes):
        for p, wi in zip(pts, w):
            if wi == 0.0:
                continue
            total += wi
            c = p if c is None else geodesic_point(space, c, p, wi / total)
        if prev_end is not None and distance(space, prev_end, c) < move_tol:
            break
        prev_end = c
    return c


def _bary_value(space: ModelSpace, packed, w: np.ndarray):
    def value(p: Point) -> float:
        d = space.distances_packed(p, packed)
        return float(w @ (d * d))
    return value


def _bary_tree_exact(space: TreeSpace, pts: Sequence[Point], w: np.ndarray) -> Point:
    """Exact minimiser of the weighted squared-distance sum over a tree.

    Along each edge the objective is piecewise quadratic in the offset with
    one linear-route switch per point, so the global minimum sits at an
    edge endpoint, a switch offset, or a quadratic vertex.
    """
    packed = space.pack(pts)
    best_val, best_point = np.inf, None
    for idx, (u, v, L) in enumerate(space.edges):
        a = space.distances_packed(space.vertex(u), packed)
        b = space.distances_packed(space.vertex(v), packed)
        same = packed[0] == idx
        off = packed[1]
        # switch offsets where the route through u stops being shortest
        switches = np.clip((L + b - a) / 2.0, 0.0, L)
        cands = {0.0, float(L)}
        cands.update(float(s) for s in switches)
        cands.update(float(o) for o in off[same])

        def val_at(s: float) -> float:
            du = np.minimum(s + a, (L - s) + b)
            du = np.where(same, np.abs(s - off), du)
            return float(w @ (du * du))

        # quadratic vertices of each linearity cell
        grid = sorted(cands)
        for lo, hi in zip(grid[:-1], grid[1:]):
            if hi - lo <= 0:
                continue
            mid = 0.5 * (lo + hi)
            du_lo = np.minimum(lo + a, (L - lo) + b)
            du_lo = np.where(same, np.abs(lo - off), du_lo)
            du_mid = np.minimum(mid + a, (L - mid) + b)
            du_mid = np.where(same, np.abs(mid - off), du_mid)
            slope = (du_mid - du_lo) / (mid - lo)
            alpha = float(w @ (slope * slope))
            beta = float(w @ (slope * (du_lo - slope * lo)))
            if alpha > 0:
                s_star = -beta / alpha
                if lo < s_star < hi:
                    cands.add(float(s_star))
        for s in cands:
            value = val_at(s)
            if value < best_val - 1e-18:
                best_val, best_point = value, space.edge_point(idx, min(max(s, 0.0), L))
    return best_point


def _bary_karcher(space: ModelSpace, pts: Sequence[Point], w: np.ndarray,
                  start: Point, max_iter: int = 100) -> Point:
    """Tangent fixed-point iteration in normal coordinates."""
    c = start
    packed = space.pack(pts)
    value = _bary_value(space, packed, w)
    fc = value(c)
    scale = float(space.distances_packed(c, packed).max())
    eta = 1.0
    for _ in range(max_iter):
        mean = w @ space.log_chart(c, packed)
        if float(np.linalg.norm(mean)) <= 1e-13 * (1.0 + scale):
            break
        c_new = space.exp_chart(c, eta * mean)
        f_new = value(c_new)
        if f_new <= fc + 1e-18:
            c, fc = c_new, f_new
            eta = min(1.0, eta * 1.5)
        else:
            eta *= 0.5
            if eta < 1e-6:
                break
    return c


@dataclass(frozen=True)
class BarycenterResult:
    """Minimiser together with the attained weighted squared-distance sum."""

    point: Point
    value: float


def _barycenter_point(space: ModelSpace, pts: Sequence[Point], w: np.ndarray,
                      method: str) -> Point:
    if len(pts) == 1:
        return pts[0]

    if method == "auto":
        if isinstance(space, EuclideanSpace):
            vec = sum(wi * np.asarray(p.coords) for wi, p in zip(w, pts))
            return space.point(vec)
        if isinstance(space, ProductSpace):
            factor_points = []
            for i, f in enumerate(space.factors):
                col = [Point(f.space_id, p.coords[i]) for p in pts]
                factor_points.append(_barycenter_point(f, col, w, method))
            return space.from_factors(factor_points)
        if isinstance(space, TreeSpace):
            return _bary_tree_exact(space, pts, w)
        if _has_charts(space):
            start = _inductive_sweeps(space, pts, w, passes=2, move_tol=1e-12)
            return _bary_karcher(space, pts, w, start)
    elif method != "inductive":
        raise DomainError(f"unknown barycenter method {method!r}")

    packed = space.pack(pts)
    value = _bary_value(space, packed, w)
    scale = float(space.distances_packed(pts[0], packed).max()) + 1e-12
    c = _inductive_sweeps(space, pts, w, passes=8, move_tol=1e-10 * scale)
    c, _ = _greedy_descent(space, value, c, pts, slope_tol=1e-10 * max(scale, 1.0),
                           scale=scale, max_rounds=40, golden_iters=44)
    return c


def barycenter(space: ModelSpace, points: Sequence[Point], weights=None, *,
               method: str = "auto") -> BarycenterResult:
    """Weighted barycentre (minimiser of the weighted squared-distance sum).

    Weights default to uniform and must sum to one within 1e-12.  With
    ``method="inductive"`` the generic cyclic averaging route runs even
    where a specialised solver exists; the two agree within solver
    tolerance and the tests cross-check them.
    """
    pts = [space.own(p) for p in points]
    if not pts:
        raise DomainError("barycenter of an empty set")
    w = _check_weights(len(pts), weights)
    c = _barycenter_point(space, pts, w, method)
    value = float(w @ (space.distances_packed(c, space.pack(pts)) ** 2))
    return BarycenterResult(point=c, value=value)


def _paired_barycenters(space, xs, ys, weights):
    if len(xs) != len(ys):
        raise DomainError("the two tuples must share weights, so also length")
    w = _check_weights(len(xs), weights)
    bx = barycenter(space, xs, w).point
    by = barycenter(space, ys, w).point
    gaps = np.array([distance(space, x, y) for x, y in zip(xs, ys)])
    return w, bx, by, gaps


def check_barycenter_contraction(space: ModelSpace, xs: Sequence[Point],
                                 ys: Sequence[Point], weights=None) -> DefectReport:
    """Barycentres move no farther than the weighted mean point gap."""
    w, bx, by, gaps = _paired_barycenters(space, xs, ys, weights)
    lhs = distance(space, bx, by)
    rhs = float(w @ gaps)
    return DefectReport.of("barycenter_contraction", lhs, rhs)


def check_barycenter_variance_bound(space: ModelSpace, xs: Sequence[Point],
                                    ys: Sequence[Point], weights=None) -> DefectReport:
    """Strengthened contraction: the squared barycentre gap is bounded by
    the mean squared point gap minus the variance of the gaps around it."""
    w, bx, by, gaps = _paired_barycenters(space, xs, ys, weights)
    lhs = distance(space, bx, by) ** 2
    rhs = float(w @ gaps**2 - w @ (gaps - distance(space, bx, by)) ** 2)
    return DefectReport.of("barycenter_variance", lhs, rhs)


# ---------------------------------------------------------------------------
# fixed points of non-expanding maps


def fixed_point_nonexpanding(space: ModelSpace, fmap: Callable[[Point], Point],
                             start: Point, tol: float = 1e-6, max_iter: int = 500,
                             window: int = 64) -> Point:
    """Fixed point of a non-expanding self-map with a bounded orbit.

    Follows the circumcentre-of-orbit-tails construction: run the orbit,
    take the circumcentre of a sliding window, restart the orbit there.
    Each restart contracts the distance to the fixed-point set, and the
    restarts form a Cauchy sequence.  Raises ``EvanescenceDiagnostic``
    when the orbit escapes (no fixed point need exist) and
    ``ConvergenceError`` when the budget runs out.
    """
    space.own(start)
    # spot-check the non-expansion claim near the start point
    rng = np.random.default_rng(421)
    probe_scale = 1.0 + distance(space, start, fmap(start))
    for _ in range(6):
        a = space.random_point(rng, probe_scale)
        b = space.random_point(rng, probe_scale)
        dab = distance(space, a, b)
        if distance(space, fmap(a), fmap(b)) > dab + 1e-9 * max(1.0, dab):
            raise DomainError("map expands a sampled pair; not non-expanding")

    evals = 0
    c = start
    trail = [c]
    moves: list[float] = []
    while evals < max_iter:
        orbit = [c]
        x = c
        for _ in range(window - 1):
            if evals >= max_iter:
                break
            x_next = fmap(x)
            evals += 1
            step = distance(space, x_next, x)
            orbit.append(x_next)
            x = x_next
            if step <= tol * 0.1:
                break
        c_new = circumcenter(space, orbit).center if len(orbit) > 1 else orbit[0]
        moves.append(distance(space, c_new, c))
        c = c_new
        trail.append(c)
        res = distance(space, fmap(c), c)
        evals += 1
        if res <= tol:
            return c
        # a bounded orbit pulls the window centres together; sustained
        # straight-line drift at full speed means the orbit escapes
        if len(moves) >= 4:
            total = sum(moves[-4:])
            chord = distance(space, trail[-5], trail[-1])
            if (total >= 20.0 * probe_scale and chord >= 0.9 * total
                    and moves[-1] >= 0.5 * moves[-4]):
                raise EvanescenceDiagnostic(
                    "window centres drift in a consistent direction without "
                    "slowing; no fixed point was found (orbit looks unbounded)",
                    witness={"drift": total, "chord": chord,
                             "map_evaluations": evals},
                )
    err = ConvergenceError(
        f"no fixed point within {max_iter} map evaluations (last residual above tolerance)"
    )
    err.last_iterate = c
    raise err
