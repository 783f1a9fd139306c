"""Hyperbolic space in the hyperboloid model.

Points are vectors x in R^{1,d} with <x,x> = -1 and x_0 > 0, where
<x,y> = -x_0 y_0 + x_1 y_1 + ... + x_d y_d.  Distances use the chordal
form d = 2 asinh(sqrt(<x-y, x-y>)/2), which stays accurate for nearby
points where acosh(-<x,y>) loses half the significant digits.  Geodesics
are sinh-interpolations inside the plane spanned by the endpoints; every
arithmetic result is renormalised back onto the sheet.

Isometries are Lorentz matrices preserving the upper sheet.  Random ones
are built from spatial rotations and a boost, which generates enough of
the group for fuzzing purposes.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConstructionError, MembershipError
from ..metric_core import Point
from .base import ModelSpace

_LORENTZ_TOL = 1e-9


class HyperbolicSpace(ModelSpace):
    def __init__(self, dim: int):
        if not isinstance(dim, int) or dim < 1:
            raise ConstructionError(f"dimension must be a positive integer, got {dim!r}")
        super().__init__({"kind": "hyperbolic", "dim": dim})
        self.dim = dim
        self._j = np.ones(dim + 1)
        self._j[0] = -1.0

    def _mink(self, a, b) -> float:
        return float(a @ (self._j * b))

    def _normalize(self, v: np.ndarray) -> np.ndarray:
        q = -self._mink(v, v)
        if q <= 0:
            raise MembershipError("vector is not timelike")
        out = v / np.sqrt(q)
        if out[0] < 0:
            out = -out
        out.flags.writeable = False
        return out

    def _distance(self, a, b) -> float:
        diff = a - b
        q = self._mink(diff, diff)
        # the chord between sheet points is spacelike; clamp rounding noise
        return float(2.0 * np.arcsinh(0.5 * np.sqrt(max(q, 0.0))))

    def _geodesic(self, a, b, t: float):
        s = self._distance(a, b)
        if s < 1e-12:
            return self._normalize((1.0 - t) * a + t * b)
        w = np.sinh((1.0 - t) * s) * a + np.sinh(t * s) * b
        return self._normalize(w)

    def _contains(self, coords, tol: float) -> bool:
        v = np.asarray(coords, dtype=float)
        if v.shape != (self.dim + 1,) or not np.all(np.isfinite(v)):
            return False
        return abs(self._mink(v, v) + 1.0) <= max(tol, 1e-12) * max(1.0, v @ v) and v[0] > 0

    def _canonical(self, coords):
        v = np.asarray(coords, dtype=float)
        if v.shape != (self.dim + 1,):
            raise MembershipError(f"expected shape ({self.dim + 1},), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise MembershipError("coordinates must be finite")
        if abs(self._mink(v, v) + 1.0) > 1e-6:
            raise MembershipError("point is too far off the unit hyperboloid")
        if v[0] <= 0:
            raise MembershipError("point lies on the lower sheet")
        return self._normalize(v.copy())

    def _random_coords(self, rng, scale: float):
        spatial = rng.normal(0.0, 1.0, self.dim) * scale if scale > 0 else np.zeros(self.dim)
        v = np.empty(self.dim + 1)
        v[0] = np.sqrt(1.0 + spatial @ spatial)
        v[1:] = spatial
        v.flags.writeable = False
        return v

    def lift(self, spatial) -> Point:
        """Point above given spatial coordinates."""
        spatial = np.asarray(spatial, dtype=float)
        v = np.concatenate(([np.sqrt(1.0 + spatial @ spatial)], spatial))
        return Point(self.space_id, self._normalize(v))

    # isometries: Lorentz matrices with L[0,0] > 0

    def _validate_payload(self, payload):
        m = np.asarray(payload, dtype=float)
        if m.shape != (self.dim + 1, self.dim + 1):
            raise ConstructionError("Lorentz matrix has wrong shape")
        gram = m.T @ (self._j[:, None] * m)
        if np.max(np.abs(gram - np.diag(self._j))) > _LORENTZ_TOL:
            raise ConstructionError("matrix does not preserve the Minkowski form")
        if m[0, 0] <= 0:
            raise ConstructionError("matrix swaps the sheets")
        m = m.copy()
        m.flags.writeable = False
        return m

    def _apply(self, payload, coords):
        return self._normalize(payload @ coords)

    def _compose(self, first, second):
        return self._validate_payload(first @ second)

    def _invert(self, payload):
        # L^{-1} = J L^T J for Lorentz L
        return self._validate_payload(self._j[:, None] * payload.T * self._j)

    def _identity_payload(self):
        return self._validate_payload(np.eye(self.dim + 1))

    def _random_isometry_payload(self, rng, scale: float):
        q = np.linalg.qr(rng.normal(size=(self.dim, self.dim)))[0]
        rot = np.eye(self.dim + 1)
        rot[1:, 1:] = q
        r = rng.normal() * 0.5 * scale
        boost = np.eye(self.dim + 1)
        boost[0, 0] = boost[1, 1] = np.cosh(r)
        boost[0, 1] = boost[1, 0] = np.sinh(r)
        return rot @ boost

    def _payload_to_jsonable(self, payload):
        return {"matrix": payload.tolist()}

    def _payload_from_jsonable(self, data):
        return np.asarray(data["matrix"], dtype=float)

    # batching

    def pack(self, points):
        return np.array([self.own(p).coords for p in points], dtype=float)

    def distances_packed(self, x: Point, packed) -> np.ndarray:
        diff = packed - self.own(x).coords
        q = np.maximum((diff * diff) @ self._j, 0.0)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(q))

    def point_to_jsonable(self, p: Point):
        return list(map(float, self.own(p).coords))

    def point_from_jsonable(self, data) -> Point:
        return self.point(data)

    # tangent-space maps used by the fast mean solvers

    def log_map(self, x: Point, y: Point) -> np.ndarray:
        """Tangent vector at ``x`` pointing to ``y`` with norm d(x, y)."""
        a, b = self.own(x).coords, self.own(y).coords
        d = self._distance(a, b)
        if d < 1e-15:
            return np.zeros(self.dim + 1)
        u = b + self._mink(a, b) * a
        nu = np.sqrt(max(self._mink(u, u), 0.0))
        if nu == 0.0:
            return np.zeros(self.dim + 1)
        return (d / nu) * u

    def exp_map(self, x: Point, v: np.ndarray) -> Point:
        a = self.own(x).coords
        nv = np.sqrt(max(self._mink(v, v), 0.0))
        if nv < 1e-15:
            return x
        return Point(self.space_id, self._normalize(np.cosh(nv) * a + np.sinh(nv) * (v / nv)))

    # normal coordinates: an orthonormal chart of the tangent space at a
    # centre, realised by the boost translating the centre to the apex

    def _boost_from_apex(self, c: np.ndarray) -> np.ndarray:
        b = np.empty((self.dim + 1, self.dim + 1))
        c0, cs = c[0], c[1:]
        b[0, 0] = c0
        b[0, 1:] = cs
        b[1:, 0] = cs
        b[1:, 1:] = np.eye(self.dim) + np.outer(cs, cs) / (1.0 + c0)
        return b

    def log_chart(self, center: Point, points) -> np.ndarray:
        """Normal coordinates of ``points`` at ``center``; rows have norm d."""
        c = self.own(center).coords
        back = self._boost_from_apex(np.concatenate(([c[0]], -c[1:])))
        arr = points if isinstance(points, np.ndarray) else self.pack(points)
        moved = arr @ back.T
        ys = moved[:, 1:]
        norms = np.linalg.norm(ys, axis=1)
        dist = np.arcsinh(norms)
        scale = np.where(norms > 0, dist / np.where(norms > 0, norms, 1.0), 1.0)
        return ys * scale[:, None]

    def exp_chart(self, center: Point, v: np.ndarray) -> Point:
        c = self.own(center).coords
        v = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(v))
        if n < 1e-300:
            return center
        apex = np.concatenate(([np.cosh(n)], np.sinh(n) * (v / n)))
        return Point(self.space_id, self._normalize(self._boost_from_apex(c) @ apex))
