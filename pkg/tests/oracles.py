"""Independent reference computations for validating solver outputs.

Every function here recomputes a quantity through a route that shares no
code with the package: heap-based graph search for tree metrics, subset
enumeration for smallest enclosing balls, dense grids for projections
and means, closed forms for rigid motions.  Tests compare the package
against these, not against itself.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np


# ---------------------------------------------------------------------------
# flat geometry


def euclid_cn_sides(x, c, cp) -> tuple[float, float]:
    """Both sides of the semi parallelogram law by direct vector algebra."""
    x, c, cp = (np.asarray(v, dtype=float) for v in (x, c, cp))
    m = 0.5 * (c + cp)
    lhs = 2.0 * float((m - x) @ (m - x))
    rhs = (
        float((c - x) @ (c - x))
        + float((cp - x) @ (cp - x))
        - 0.5 * float((c - cp) @ (c - cp))
    )
    return lhs, rhs


def rotation_displacement(angle: float, radius: float) -> float:
    """Chord moved by a rotation: 2 sin(angle/2) times the centre distance."""
    return 2.0 * abs(np.sin(angle / 2.0)) * radius


def _equidistant_center(P: np.ndarray) -> np.ndarray:
    base = P[0]
    B = P[1:] - base
    if len(B) == 0:
        return base.copy()
    lam = np.linalg.lstsq(B @ B.T, 0.5 * np.sum(B * B, axis=1), rcond=None)[0]
    return base + B.T @ lam


def flat_seb_brute(P) -> tuple[np.ndarray, float]:
    """Smallest enclosing ball by support-subset enumeration; exact.

    The optimal centre is equidistant from some subset of at most dim+1
    points, so enumerating all such subsets and keeping the cheapest
    covering ball is exhaustive.  Only for small point sets.
    """
    P = np.asarray(P, dtype=float)
    n, d = P.shape
    best_r, best_c = np.inf, P[0]
    for m in range(1, min(n, d + 1) + 1):
        for S in itertools.combinations(range(n), m):
            c = _equidistant_center(P[list(S)])
            r = float(np.max(np.linalg.norm(P - c, axis=1)))
            r_sub = float(np.max(np.linalg.norm(P[list(S)] - c, axis=1)))
            if r <= r_sub + 1e-12 * max(1.0, r_sub) and r < best_r:
                best_r, best_c = r, c
    return best_c, best_r


# ---------------------------------------------------------------------------
# trees


def dijkstra_vertex_distances(edges) -> dict:
    """All-pairs vertex distances by heap search over the edge list."""
    adj: dict = {}
    for u, v, l in edges:
        adj.setdefault(u, []).append((v, float(l)))
        adj.setdefault(v, []).append((u, float(l)))
    out = {}
    for src in adj:
        dist = {src: 0.0}
        heap = [(0.0, src)]
        while heap:
            d, w = heapq.heappop(heap)
            if d > dist.get(w, np.inf):
                continue
            for nb, l in adj[w]:
                nd = d + l
                if nd < dist.get(nb, np.inf):
                    dist[nb] = nd
                    heapq.heappush(heap, (nd, nb))
        out[src] = dist
    return out


def tree_point_distance(edges, a, b) -> float:
    """Distance between two tree points given as (u, v, offset_from_u).

    ``offset_from_u`` is measured along the named edge.  Routes through
    either endpoint are compared; in a tree the shorter one is the
    geodesic.
    """
    vd = dijkstra_vertex_distances(edges)
    (ua, va, oa), (ub, vb, ob) = a, b
    la = next(float(l) for u, v, l in edges if {u, v} == {ua, va})
    lb = next(float(l) for u, v, l in edges if {u, v} == {ub, vb})
    if {ua, va} == {ub, vb}:
        ob_from_ua = ob if ub == ua else lb - ob
        return abs(oa - ob_from_ua)
    return min(
        oa + vd[ua][ub] + ob,
        oa + vd[ua][vb] + (lb - ob),
        (la - oa) + vd[va][ub] + ob,
        (la - oa) + vd[va][vb] + (lb - ob),
    )


# ---------------------------------------------------------------------------
# symmetric positive definite matrices


def spd_distance_eig(a, b) -> float:
    """Affine-invariant distance through the generalised eigenvalues of
    (b, a), computed with the plain nonsymmetric eigensolver."""
    ev = np.linalg.eigvals(np.linalg.solve(np.asarray(a, float), np.asarray(b, float)))
    return float(np.sqrt(np.sum(np.log(ev.real) ** 2)))


def spd_commuting_geodesic(a, b, t: float) -> np.ndarray:
    """Geodesic between commuting matrices: entrywise power law on the
    shared eigenbasis (here: both diagonal)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.diag(np.diag(a) ** (1.0 - t) * np.diag(b) ** t)


# ---------------------------------------------------------------------------
# hyperbolic closed forms


def hyp_origin_distance(x: float) -> float:
    """Distance from the apex to the point above spatial (x, 0)."""
    return float(np.arcsinh(abs(x)))


def hyp_axial_displacement(length: float, dist_to_axis: float) -> float:
    """Displacement of a translation of given length along a geodesic, at a
    point at the given distance from the axis:
    sinh(d/2) = sinh(length/2) cosh(dist)."""
    return 2.0 * float(np.arcsinh(np.sinh(length / 2.0) * np.cosh(dist_to_axis)))


def boost_matrix(length: float) -> np.ndarray:
    """Lorentz boost translating the first-axis geodesic by ``length``."""
    m = np.eye(3)
    m[0, 0] = m[1, 1] = np.cosh(length)
    m[0, 1] = m[1, 0] = np.sinh(length)
    return m


# ---------------------------------------------------------------------------
# lattice cocycle


def cocycle_search(j: int, grid_size: int) -> int:
    """The integer n with 0 <= j/N + n < 1, found by scanning."""
    for n in range(-abs(j) - 2, abs(j) + 3):
        if 0.0 <= j / grid_size + n < 1.0:
            return n
    raise AssertionError("no return element found")


def sqint_enum(grid_size: int, g: float) -> float:
    """Second moment of the return word length over the domain cells."""
    k = round(g * grid_size)
    assert abs(g * grid_size - k) < 1e-9, "sample must sit on the grid"
    total = 0
    for j in range(grid_size):
        total += cocycle_search(j - k, grid_size) ** 2
    return total / grid_size
