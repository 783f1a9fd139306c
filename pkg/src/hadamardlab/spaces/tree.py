"""Finite metric trees.

A tree is given by weighted edges on named vertices.  Points are either a
vertex or an interior position ``(edge, offset)`` measured from the edge's
first endpoint; offsets landing on an endpoint are canonicalised to the
vertex form, so each point has one representation.  Geodesics walk the
unique vertex path between edges.  Isometries are label bijections that
preserve adjacency and edge lengths; the full automorphism group is
enumerated on demand (trees here are desk-sized).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..exceptions import ConstructionError, DomainError, MembershipError
from ..metric_core import Point
from .base import ModelSpace

_SNAP = 1e-12


class TreeSpace(ModelSpace):
    def __init__(self, edges: Sequence[tuple]):
        edges = [(str(u), str(v), float(l)) for u, v, l in edges]
        if not edges:
            raise ConstructionError("a tree needs at least one edge")
        for u, v, l in edges:
            if u == v:
                raise ConstructionError(f"loop edge at {u!r}")
            if not l > 0:
                raise ConstructionError(f"edge {u!r}-{v!r} has nonpositive length")
        super().__init__({"kind": "tree", "edges": [[u, v, l] for u, v, l in edges]})
        self.edges = edges
        self.vertices = sorted({w for u, v, _ in edges for w in (u, v)})
        self._vidx = {w: i for i, w in enumerate(self.vertices)}
        n = len(self.vertices)
        if len(edges) != n - 1:
            raise ConstructionError("edge count must be vertex count minus one")
        self._edge_at = {}
        adj: list[list[tuple[int, float, int]]] = [[] for _ in range(n)]
        for idx, (u, v, l) in enumerate(edges):
            key = frozenset((u, v))
            if key in self._edge_at:
                raise ConstructionError(f"duplicate edge {u!r}-{v!r}")
            self._edge_at[key] = idx
            adj[self._vidx[u]].append((self._vidx[v], l, idx))
            adj[self._vidx[v]].append((self._vidx[u], l, idx))
        self._adj = adj
        # all-pairs vertex distances and next-hop table by BFS from each root
        dist = np.full((n, n), np.inf)
        hop = np.full((n, n), -1, dtype=int)
        for r in range(n):
            dist[r, r] = 0.0
            stack = [r]
            seen = {r}
            while stack:
                w = stack.pop()
                for nb, l, _ in adj[w]:
                    if nb in seen:
                        continue
                    seen.add(nb)
                    dist[r, nb] = dist[r, w] + l
                    hop[nb, r] = w  # first step from nb toward r
                    stack.append(nb)
        if not np.all(np.isfinite(dist)):
            raise ConstructionError("tree is not connected")
        self._vdist = dist
        self._hop = hop
        self._lengths = np.array([l for _, _, l in edges])
        self._eu = np.array([self._vidx[u] for u, _, _ in edges])
        self._ev = np.array([self._vidx[v] for _, v, _ in edges])
        self._automorphisms: list[dict] | None = None

    # -- coordinate forms --------------------------------------------------

    def vertex(self, name: str) -> Point:
        return self.point(("v", str(name)))

    def edge_point(self, edge_idx: int, offset: float) -> Point:
        return self.point(("e", int(edge_idx), float(offset)))

    def _canonical(self, coords):
        if not isinstance(coords, tuple) or not coords:
            raise MembershipError(f"not a tree point payload: {coords!r}")
        if coords[0] == "v":
            name = str(coords[1])
            if name not in self._vidx:
                raise MembershipError(f"unknown vertex {name!r}")
            return ("v", name)
        if coords[0] == "e":
            idx, off = int(coords[1]), float(coords[2])
            if not 0 <= idx < len(self.edges):
                raise MembershipError(f"unknown edge index {idx}")
            u, v, l = self.edges[idx]
            if off < -_SNAP or off > l + _SNAP:
                raise MembershipError(f"offset {off} outside [0, {l}]")
            if off <= _SNAP:
                return ("v", u)
            if off >= l - _SNAP:
                return ("v", v)
            return ("e", idx, off)
        raise MembershipError(f"not a tree point payload: {coords!r}")

    def _contains(self, coords, tol: float) -> bool:
        try:
            self._canonical(coords)
        except MembershipError:
            return False
        return True

    def _as_edge(self, coords) -> tuple[int, float]:
        """Internal (edge index, offset) form; vertices sit on an incident edge."""
        if coords[0] == "e":
            return coords[1], coords[2]
        w = self._vidx[coords[1]]
        nb, l, idx = self._adj[w][0]
        u = self._eu[idx]
        return idx, 0.0 if u == w else self._lengths[idx]

    # -- metric ------------------------------------------------------------

    def _endpoint_data(self, coords):
        idx, off = self._as_edge(coords)
        return idx, off, self._eu[idx], self._ev[idx], self._lengths[idx]

    def _distance(self, a, b) -> float:
        ia, oa, ua, va, la = self._endpoint_data(a)
        ib, ob, ub, vb, lb = self._endpoint_data(b)
        if ia == ib:
            return abs(oa - ob)
        d = self._vdist
        return min(
            oa + d[ua, ub] + ob,
            oa + d[ua, vb] + (lb - ob),
            (la - oa) + d[va, ub] + ob,
            (la - oa) + d[va, vb] + (lb - ob),
        )

    def _legs(self, a, b) -> list[tuple[int, float, float]]:
        """Path as (edge, offset_from, offset_to) legs; total equals d(a, b)."""
        ia, oa, ua, va, la = self._endpoint_data(a)
        ib, ob, ub, vb, lb = self._endpoint_data(b)
        if ia == ib:
            return [(ia, oa, ob)]
        d = self._vdist
        combos = (
            (oa + d[ua, ub] + ob, ua, ub, 0.0, 0.0),
            (oa + d[ua, vb] + (lb - ob), ua, vb, 0.0, lb),
            ((la - oa) + d[va, ub] + ob, va, ub, la, 0.0),
            ((la - oa) + d[va, vb] + (lb - ob), va, vb, la, lb),
        )
        _, p, q, exit_off, entry_off = min(combos, key=lambda c: c[0])
        legs = [(ia, oa, exit_off)]
        w = p
        while w != q:
            nxt = self._hop[w, q]
            for nb, l, idx in self._adj[w]:
                if nb == nxt:
                    start = 0.0 if self._eu[idx] == w else l
                    legs.append((idx, start, l - start))
                    break
            w = nxt
        legs.append((ib, entry_off, ob))
        return [leg for leg in legs if abs(leg[2] - leg[1]) > 0.0]

    def _geodesic(self, a, b, t: float):
        legs = self._legs(a, b)
        total = sum(abs(o2 - o1) for _, o1, o2 in legs)
        if total == 0.0:
            return self._canonical(a)
        s = t * total
        for k, (idx, o1, o2) in enumerate(legs):
            step = abs(o2 - o1)
            if s <= step or k == len(legs) - 1:
                frac = 0.0 if step == 0.0 else min(s / step, 1.0)
                return self._canonical(("e", idx, o1 + frac * (o2 - o1)))
            s -= step
        return self._canonical(b)  # pragma: no cover - loop always returns

    def _random_coords(self, rng, scale: float):
        if scale == 0.0:
            return ("v", self.vertices[0])
        w = self._lengths / self._lengths.sum()
        idx = int(rng.choice(len(self.edges), p=w))
        return self._canonical(("e", idx, float(rng.uniform(0.0, self._lengths[idx]))))

    def leaves(self) -> list[str]:
        return [w for w in self.vertices if len(self._adj[self._vidx[w]]) == 1]

    def diameter(self) -> float:
        return float(self._vdist.max() + 0.0)

    # -- isometries: vertex bijections preserving lengths -------------------

    def _validate_payload(self, payload):
        vm = {str(k): str(v) for k, v in dict(payload).items()}
        if sorted(vm) != self.vertices or sorted(vm.values()) != self.vertices:
            raise ConstructionError("vertex map is not a bijection on the tree's vertices")
        for u, v, l in self.edges:
            key = frozenset((vm[u], vm[v]))
            if key not in self._edge_at:
                raise ConstructionError(f"image of edge {u!r}-{v!r} is not an edge")
            if abs(self._lengths[self._edge_at[key]] - l) > _SNAP:
                raise ConstructionError(f"image of edge {u!r}-{v!r} has a different length")
        return vm

    def _apply(self, payload, coords):
        if coords[0] == "v":
            return ("v", payload[coords[1]])
        idx, off = coords[1], coords[2]
        u, v, l = self.edges[idx]
        jdx = self._edge_at[frozenset((payload[u], payload[v]))]
        u2, _, l2 = self.edges[jdx]
        return self._canonical(("e", jdx, off if u2 == payload[u] else l2 - off))

    def _compose(self, first, second):
        return {k: first[v] for k, v in second.items()}

    def _invert(self, payload):
        return {v: k for k, v in payload.items()}

    def _identity_payload(self):
        return {w: w for w in self.vertices}

    def automorphisms(self) -> list["dict[str, str]"]:
        """Every label bijection preserving adjacency and lengths (cached)."""
        if self._automorphisms is None:
            n = len(self.vertices)
            degree = [len(self._adj[i]) for i in range(n)]
            profile = [sorted(l for _, l, _ in self._adj[i]) for i in range(n)]
            order = sorted(range(n), key=lambda i: -degree[i])
            found: list[dict] = []

            def extend(pos: int, img: dict[int, int], used: set[int]):
                if pos == n:
                    found.append({self.vertices[a]: self.vertices[b] for a, b in img.items()})
                    return
                w = order[pos]
                for cand in range(n):
                    if cand in used or degree[cand] != degree[w] or profile[cand] != profile[w]:
                        continue
                    ok = True
                    for nb, l, _ in self._adj[w]:
                        if nb in img:
                            target = self._vdist[img[nb], cand]
                            if abs(target - l) > _SNAP:
                                ok = False
                                break
                            if not any(
                                nb2 == cand for nb2, _, _ in self._adj[img[nb]]
                            ):
                                ok = False
                                break
                    if ok:
                        img[w] = cand
                        used.add(cand)
                        extend(pos + 1, img, used)
                        used.discard(cand)
                        del img[w]

            extend(0, {}, set())
            valid = []
            for vm in found:
                try:
                    valid.append(self._validate_payload(vm))
                except ConstructionError:
                    continue
            self._automorphisms = valid
        return list(self._automorphisms)

    def _random_isometry_payload(self, rng, scale: float):
        autos = self.automorphisms()
        return autos[int(rng.integers(len(autos)))]

    def _payload_to_jsonable(self, payload):
        return {"vertex_map": dict(payload)}

    def _payload_from_jsonable(self, data):
        return dict(data["vertex_map"])

    # -- batching ------------------------------------------------------------

    def pack(self, points):
        rows = [self._endpoint_data(self.own(p).coords) for p in points]
        idx = np.array([r[0] for r in rows], dtype=int)
        off = np.array([r[1] for r in rows])
        return (idx, off, self._eu[idx], self._ev[idx], self._lengths[idx])

    def distances_packed(self, x: Point, packed) -> np.ndarray:
        ia, oa, ua, va, la = self._endpoint_data(self.own(x).coords)
        idx, off, us, vs, ls = packed
        d = self._vdist
        cands = np.minimum.reduce(
            [
                oa + d[ua, us] + off,
                oa + d[ua, vs] + (ls - off),
                (la - oa) + d[va, us] + off,
                (la - oa) + d[va, vs] + (ls - off),
            ]
        )
        return np.where(idx == ia, np.abs(off - oa), cands)

    def point_to_jsonable(self, p: Point):
        c = self.own(p).coords
        return list(c)

    def point_from_jsonable(self, data) -> Point:
        data = list(data)
        if data[0] == "v":
            return self.vertex(data[1])
        return self.edge_point(int(data[1]), float(data[2]))
