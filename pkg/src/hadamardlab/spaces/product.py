"""Products of model spaces with the Pythagorean metric.

``d((x_1..x_n), (y_1..y_n))^2 = sum_i w_i d_i(x_i, y_i)^2`` with unit
weights by default; the weighted form backs the finite L2 construction.
Geodesics run componentwise at a common arc fraction.  Isometries either
act factorwise or, when all factors are copies of one space and weights
match along the permutation, rearrange slots while twisting each by a
factor isometry.  Slot rearrangement is what an induced lattice action
looks like on a discretised fundamental domain, so it lives here once.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..exceptions import ConstructionError, DomainError, MembershipError, SpaceMismatchError
from ..metric_core import Point
from .base import ModelSpace


class ProductSpace(ModelSpace):
    def __init__(self, factors: Sequence[ModelSpace], weights: Sequence[float] | None = None):
        factors = list(factors)
        if not factors:
            raise ConstructionError("a product needs at least one factor")
        if weights is None:
            w = np.ones(len(factors))
            desc = {"kind": "product", "factors": [f.descriptor() for f in factors]}
        else:
            w = np.asarray(list(weights), dtype=float)
            if w.shape != (len(factors),) or np.any(w <= 0):
                raise ConstructionError("weights must be positive, one per factor")
            desc = {
                "kind": "product",
                "factors": [f.descriptor() for f in factors],
                "weights": [float(x) for x in w],
            }
        super().__init__(desc)
        self.factors = factors
        self.weights = w
        self.weights.flags.writeable = False

    # -- metric ------------------------------------------------------------

    def _distance(self, a, b) -> float:
        acc = 0.0
        for f, w, ca, cb in zip(self.factors, self.weights, a, b):
            d = f._distance(ca, cb)
            acc += w * d * d
        return float(np.sqrt(acc))

    def _geodesic(self, a, b, t: float):
        return tuple(f._geodesic(ca, cb, t) for f, ca, cb in zip(self.factors, a, b))

    def _contains(self, coords, tol: float) -> bool:
        if not isinstance(coords, tuple) or len(coords) != len(self.factors):
            return False
        return all(f._contains(c, tol) for f, c in zip(self.factors, coords))

    def _canonical(self, coords):
        if not isinstance(coords, (tuple, list)) or len(coords) != len(self.factors):
            raise MembershipError(
                f"expected {len(self.factors)} factor payloads, got {coords!r}"
            )
        return tuple(f._canonical(c) for f, c in zip(self.factors, coords))

    def _random_coords(self, rng, scale: float):
        return tuple(f._random_coords(rng, scale) for f in self.factors)

    # -- factor access -------------------------------------------------------

    def factor_point(self, i: int, p: Point) -> Point:
        self.own(p)
        if not 0 <= i < len(self.factors):
            raise DomainError(f"no factor {i} in a {len(self.factors)}-factor product")
        return Point(self.factors[i].space_id, p.coords[i])

    def from_factors(self, points: Sequence[Point]) -> Point:
        if len(points) != len(self.factors):
            raise DomainError("wrong number of factor points")
        coords = []
        for f, p in zip(self.factors, points):
            f.own(p)
            coords.append(p.coords)
        return Point(self.space_id, tuple(coords))

    def replace_factors(self, p: Point, fixed: dict[int, Point]) -> Point:
        """Nearest point of the slice holding the given factors fixed."""
        self.own(p)
        coords = list(p.coords)
        for i, q in fixed.items():
            if not 0 <= i < len(self.factors):
                raise DomainError(f"no factor {i}")
            self.factors[i].own(q)
            coords[i] = q.coords
        return Point(self.space_id, tuple(coords))

    # -- isometries ------------------------------------------------------------

    def _validate_payload(self, payload):
        tag = payload[0]
        if tag == "factors":
            parts = tuple(
                f._validate_payload(p) for f, p in zip(self.factors, payload[1], strict=True)
            )
            return ("factors", parts)
        if tag == "perm":
            perm = tuple(int(i) for i in payload[1])
            if sorted(perm) != list(range(len(self.factors))):
                raise ConstructionError("slot map is not a permutation")
            for i, j in enumerate(perm):
                if self.factors[i].space_id != self.factors[j].space_id:
                    raise ConstructionError("permutation mixes non-identical factors")
                if abs(self.weights[i] - self.weights[j]) > 1e-15:
                    raise ConstructionError("permutation does not preserve the weights")
            parts = tuple(
                f._validate_payload(p) for f, p in zip(self.factors, payload[2], strict=True)
            )
            return ("perm", perm, parts)
        raise ConstructionError(f"unknown product isometry payload {tag!r}")

    def _apply(self, payload, coords):
        if payload[0] == "factors":
            return tuple(
                f._apply(p, c) for f, p, c in zip(self.factors, payload[1], coords)
            )
        _, perm, parts = payload
        return tuple(
            f._apply(parts[i], coords[perm[i]]) for i, f in enumerate(self.factors)
        )

    def _as_perm(self, payload):
        if payload[0] == "perm":
            return payload[1], payload[2]
        return tuple(range(len(self.factors))), payload[1]

    def _compose(self, first, second):
        if first[0] == "factors" and second[0] == "factors":
            return (
                "factors",
                tuple(
                    f._compose(p1, p2)
                    for f, p1, p2 in zip(self.factors, first[1], second[1])
                ),
            )
        perm_g, parts_g = self._as_perm(first)
        perm_h, parts_h = self._as_perm(second)
        perm = tuple(perm_h[perm_g[i]] for i in range(len(self.factors)))
        parts = tuple(
            f._compose(parts_g[i], parts_h[perm_g[i]]) for i, f in enumerate(self.factors)
        )
        return ("perm", perm, parts)

    def _invert(self, payload):
        if payload[0] == "factors":
            return ("factors", tuple(f._invert(p) for f, p in zip(self.factors, payload[1])))
        _, perm, parts = payload
        inv = [0] * len(perm)
        for i, j in enumerate(perm):
            inv[j] = i
        out_parts = tuple(
            self.factors[j]._invert(parts[inv[j]]) for j in range(len(perm))
        )
        # reindex: slot j of the inverse reads slot inv[j] of the input
        return ("perm", tuple(inv), out_parts)

    def _identity_payload(self):
        return ("factors", tuple(f._identity_payload() for f in self.factors))

    def _random_isometry_payload(self, rng, scale: float):
        return ("factors", tuple(f._random_isometry_payload(rng, scale) for f in self.factors))

    def _payload_to_jsonable(self, payload):
        if payload[0] == "factors":
            return {
                "factors": [
                    f._payload_to_jsonable(p) for f, p in zip(self.factors, payload[1])
                ]
            }
        return {
            "perm": list(payload[1]),
            "factors": [
                f._payload_to_jsonable(p) for f, p in zip(self.factors, payload[2])
            ],
        }

    def _payload_from_jsonable(self, data):
        parts = tuple(
            f._payload_from_jsonable(p) for f, p in zip(self.factors, data["factors"])
        )
        if "perm" in data:
            return ("perm", tuple(data["perm"]), parts)
        return ("factors", parts)

    def factorwise_isometry(self, parts: Sequence) -> "Isometry":
        """Isometry from one factor isometry per slot."""
        payloads = []
        for f, g in zip(self.factors, parts, strict=True):
            if g.space.space_id != f.space_id:
                raise SpaceMismatchError("factor isometry bound to the wrong space")
            payloads.append(g.payload)
        return self.make_isometry(("factors", tuple(payloads)))

    # -- batching -----------------------------------------------------------------

    def pack(self, points):
        cols = []
        for i, f in enumerate(self.factors):
            cols.append(f.pack([Point(f.space_id, self.own(p).coords[i]) for p in points]))
        return cols

    def distances_packed(self, x: Point, packed) -> np.ndarray:
        self.own(x)
        acc = None
        for i, (f, w) in enumerate(zip(self.factors, self.weights)):
            d = f.distances_packed(Point(f.space_id, x.coords[i]), packed[i])
            acc = w * d * d if acc is None else acc + w * d * d
        return np.sqrt(acc)

    def point_to_jsonable(self, p: Point):
        self.own(p)
        return [
            f.point_to_jsonable(Point(f.space_id, c)) for f, c in zip(self.factors, p.coords)
        ]

    def point_from_jsonable(self, data) -> Point:
        pts = [f.point_from_jsonable(d) for f, d in zip(self.factors, data)]
        return self.from_factors(pts)


def product_space_project(space: ProductSpace, i: int, x: Point) -> Point:
    """Coordinate projection of a product point onto factor ``i``."""
    if not isinstance(space, ProductSpace):
        raise DomainError("product_space_project needs a ProductSpace")
    return space.factor_point(i, x)
