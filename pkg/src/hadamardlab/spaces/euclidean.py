"""Flat space of a fixed dimension.

Serves as the zero-curvature reference: the comparison checks must come out
with defect exactly zero here (up to rounding), which calibrates the sign
conventions used everywhere else.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConstructionError, MembershipError
from ..metric_core import Point
from .base import ModelSpace

_ORTHOGONALITY_TOL = 1e-9


def _as_vector(coords, dim: int) -> np.ndarray:
    v = np.asarray(coords, dtype=float)
    if v.shape != (dim,):
        raise MembershipError(f"expected shape ({dim},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise MembershipError("coordinates must be finite")
    v = v.copy()
    v.flags.writeable = False
    return v


class EuclideanSpace(ModelSpace):
    def __init__(self, dim: int):
        if not isinstance(dim, int) or dim < 1:
            raise ConstructionError(f"dimension must be a positive integer, got {dim!r}")
        super().__init__({"kind": "euclidean", "dim": dim})
        self.dim = dim

    def _distance(self, a, b) -> float:
        return float(np.linalg.norm(a - b))

    def _geodesic(self, a, b, t: float):
        out = (1.0 - t) * a + t * b
        out.flags.writeable = False
        return out

    def _contains(self, coords, tol: float) -> bool:
        try:
            _as_vector(coords, self.dim)
        except MembershipError:
            return False
        return True

    def _canonical(self, coords):
        return _as_vector(coords, self.dim)

    def _random_coords(self, rng, scale: float):
        v = rng.normal(0.0, 1.0, self.dim) * scale if scale > 0 else np.zeros(self.dim)
        v.flags.writeable = False
        return v

    # isometries: x -> Q x + v with Q orthogonal

    def _validate_payload(self, payload):
        q, v = payload
        q = np.asarray(q, dtype=float)
        v = np.asarray(v, dtype=float)
        if q.shape != (self.dim, self.dim) or v.shape != (self.dim,):
            raise ConstructionError("isometry payload has wrong shape")
        if np.max(np.abs(q.T @ q - np.eye(self.dim))) > _ORTHOGONALITY_TOL:
            raise ConstructionError("matrix part is not orthogonal")
        q = q.copy()
        v = v.copy()
        q.flags.writeable = False
        v.flags.writeable = False
        return (q, v)

    def _apply(self, payload, coords):
        q, v = payload
        out = q @ coords + v
        out.flags.writeable = False
        return out

    def _compose(self, first, second):
        q1, v1 = first
        q2, v2 = second
        return self._validate_payload((q1 @ q2, q1 @ v2 + v1))

    def _invert(self, payload):
        q, v = payload
        return self._validate_payload((q.T, -(q.T @ v)))

    def _identity_payload(self):
        return self._validate_payload((np.eye(self.dim), np.zeros(self.dim)))

    def _random_isometry_payload(self, rng, scale: float):
        m = rng.normal(size=(self.dim, self.dim))
        q, r = np.linalg.qr(m)
        q = q @ np.diag(np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r))))
        v = rng.normal(0.0, 1.0, self.dim) * scale
        return (q, v)

    def _payload_to_jsonable(self, payload):
        q, v = payload
        return {"matrix": q.tolist(), "offset": v.tolist()}

    def _payload_from_jsonable(self, data):
        return (np.asarray(data["matrix"], dtype=float), np.asarray(data["offset"], dtype=float))

    # batching

    def pack(self, points):
        return np.array([self.own(p).coords for p in points], dtype=float)

    def distances_packed(self, x: Point, packed) -> np.ndarray:
        return np.linalg.norm(packed - self.own(x).coords, axis=1)

    def point_to_jsonable(self, p: Point):
        return list(map(float, self.own(p).coords))

    def point_from_jsonable(self, data) -> Point:
        return self.point(data)


def rotation_about(space: EuclideanSpace, angle: float, center) -> "Isometry":
    """Planar rotation by ``angle`` about ``center`` (dimension 2 only)."""
    if space.dim != 2:
        raise ConstructionError("rotation_about needs a 2-dimensional space")
    c, s = np.cos(angle), np.sin(angle)
    q = np.array([[c, -s], [s, c]])
    center = center.coords if isinstance(center, Point) else np.asarray(center, dtype=float)
    return space.make_isometry((q, center - q @ center))
