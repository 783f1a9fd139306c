"""Symmetric positive definite matrices with the affine-invariant metric.

d(A, B) = || log(A^{-1/2} B A^{-1/2}) ||_F, realised through symmetric
eigendecompositions, with the geodesic A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}.
The 2x2 case, which the fuzz campaigns hammer, gets a closed form through
the generalised characteristic polynomial so no eigensolver call is needed
for a distance.  Congruences A -> G A G^T by invertible G act by isometries.
Results of matrix arithmetic are resymmetrised before they are stored.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConstructionError, MembershipError
from ..metric_core import Point
from .base import ModelSpace

#: Symmetry/positivity slack; matrix arithmetic erodes more than vector math.
SPD_MEMBERSHIP_TOL = 1e-8


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _eig_sym(m: np.ndarray):
    return np.linalg.eigh(_sym(m))


def _apply_spectral(m: np.ndarray, fn) -> np.ndarray:
    w, u = _eig_sym(m)
    return _sym((u * fn(w)) @ u.T)


class SPDSpace(ModelSpace):
    def __init__(self, size: int):
        if not isinstance(size, int) or size < 1:
            raise ConstructionError(f"matrix size must be a positive integer, got {size!r}")
        super().__init__({"kind": "spd", "size": size})
        self.size = size

    # -- metric ------------------------------------------------------------

    def _gen_eigvals_2x2(self, a, b):
        """Generalised eigenvalues of (b, a) for symmetric 2x2 blocks."""
        det_a = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] ** 2
        det_b = b[..., 0, 0] * b[..., 1, 1] - b[..., 0, 1] ** 2
        cross = (
            a[..., 0, 0] * b[..., 1, 1]
            + a[..., 1, 1] * b[..., 0, 0]
            - 2.0 * a[..., 0, 1] * b[..., 0, 1]
        )
        disc = np.sqrt(np.maximum(cross * cross - 4.0 * det_a * det_b, 0.0))
        lo = (cross - disc) / (2.0 * det_a)
        hi = (cross + disc) / (2.0 * det_a)
        return np.maximum(lo, 1e-300), np.maximum(hi, 1e-300)

    def _distance(self, a, b) -> float:
        if self.size == 2:
            lo, hi = self._gen_eigvals_2x2(a, b)
            return float(np.sqrt(np.log(lo) ** 2 + np.log(hi) ** 2))
        w, u = _eig_sym(a)
        inv_sqrt = (u * (1.0 / np.sqrt(w))) @ u.T
        mid = _sym(inv_sqrt @ b @ inv_sqrt)
        ev = np.linalg.eigvalsh(mid)
        return float(np.sqrt(np.sum(np.log(np.maximum(ev, 1e-300)) ** 2)))

    def _geodesic(self, a, b, t: float):
        w, u = _eig_sym(a)
        sq = (u * np.sqrt(w)) @ u.T
        inv_sqrt = (u * (1.0 / np.sqrt(w))) @ u.T
        mid = _apply_spectral(inv_sqrt @ b @ inv_sqrt, lambda ev: np.maximum(ev, 1e-300) ** t)
        out = _sym(sq @ mid @ sq)
        out.flags.writeable = False
        return out

    def _contains(self, coords, tol: float) -> bool:
        m = np.asarray(coords, dtype=float)
        if m.shape != (self.size, self.size) or not np.all(np.isfinite(m)):
            return False
        tol = max(tol, SPD_MEMBERSHIP_TOL)
        if np.max(np.abs(m - m.T)) > tol * max(1.0, np.max(np.abs(m))):
            return False
        return float(np.linalg.eigvalsh(_sym(m)).min()) > 0.0

    def _canonical(self, coords):
        m = np.asarray(coords, dtype=float)
        if m.shape != (self.size, self.size):
            raise MembershipError(f"expected a {self.size}x{self.size} matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise MembershipError("matrix entries must be finite")
        if np.max(np.abs(m - m.T)) > SPD_MEMBERSHIP_TOL * max(1.0, np.max(np.abs(m))):
            raise MembershipError("matrix is not symmetric")
        m = _sym(m)
        if float(np.linalg.eigvalsh(m).min()) <= 0.0:
            raise MembershipError("matrix is not positive definite")
        m.flags.writeable = False
        return m

    def _random_coords(self, rng, scale: float):
        if scale == 0.0:
            m = np.eye(self.size)
        else:
            s = _sym(rng.normal(0.0, scale, (self.size, self.size)))
            m = _apply_spectral(s, np.exp)
        m.flags.writeable = False
        return m

    # -- isometries: congruence by an invertible matrix ----------------------

    def _validate_payload(self, payload):
        g = np.asarray(payload, dtype=float)
        if g.shape != (self.size, self.size):
            raise ConstructionError("congruence factor has wrong shape")
        if abs(np.linalg.det(g)) < 1e-12:
            raise ConstructionError("congruence factor is singular")
        g = g.copy()
        g.flags.writeable = False
        return g

    def _apply(self, payload, coords):
        out = _sym(payload @ coords @ payload.T)
        out.flags.writeable = False
        return out

    def _compose(self, first, second):
        return self._validate_payload(first @ second)

    def _invert(self, payload):
        return self._validate_payload(np.linalg.inv(payload))

    def _identity_payload(self):
        return self._validate_payload(np.eye(self.size))

    def _random_isometry_payload(self, rng, scale: float):
        g = rng.normal(0.0, 1.0, (self.size, self.size)) * max(scale, 0.1)
        g += np.eye(self.size)
        if abs(np.linalg.det(g)) < 1e-6:
            g += 0.5 * np.eye(self.size)
        return g

    def _payload_to_jsonable(self, payload):
        return {"factor": payload.tolist()}

    def _payload_from_jsonable(self, data):
        return np.asarray(data["factor"], dtype=float)

    # -- batching -------------------------------------------------------------

    def pack(self, points):
        return np.array([self.own(p).coords for p in points], dtype=float)

    def distances_packed(self, x: Point, packed) -> np.ndarray:
        a = self.own(x).coords
        if self.size == 2:
            lo, hi = self._gen_eigvals_2x2(a[None, :, :], packed)
            return np.sqrt(np.log(lo) ** 2 + np.log(hi) ** 2)
        return np.array([self._distance(a, c) for c in packed])

    def point_to_jsonable(self, p: Point):
        return [[float(x) for x in row] for row in self.own(p).coords]

    def point_from_jsonable(self, data) -> Point:
        return self.point(data)

    # -- tangent maps for the fast mean solvers -------------------------------

    def log_map(self, x: Point, y: Point) -> np.ndarray:
        a, b = self.own(x).coords, self.own(y).coords
        w, u = _eig_sym(a)
        sq = (u * np.sqrt(w)) @ u.T
        inv_sqrt = (u * (1.0 / np.sqrt(w))) @ u.T
        mid = _apply_spectral(inv_sqrt @ b @ inv_sqrt, lambda ev: np.log(np.maximum(ev, 1e-300)))
        return _sym(sq @ mid @ sq)

    def exp_map(self, x: Point, v: np.ndarray) -> Point:
        a = self.own(x).coords
        w, u = _eig_sym(a)
        sq = (u * np.sqrt(w)) @ u.T
        inv_sqrt = (u * (1.0 / np.sqrt(w))) @ u.T
        mid = _apply_spectral(inv_sqrt @ v @ inv_sqrt, np.exp)
        return Point(self.space_id, self._canonical(sq @ mid @ sq))

    # normal coordinates: congruence by A^{-1/2} moves the centre to the
    # identity, where the metric on symmetric matrices is the Frobenius one;
    # flattening scales off-diagonal entries by sqrt(2) to keep it Euclidean

    def _flatten_sym(self, mats: np.ndarray) -> np.ndarray:
        iu, ju = np.triu_indices(self.size)
        scale = np.where(iu == ju, 1.0, np.sqrt(2.0))
        return mats[..., iu, ju] * scale

    def _unflatten_sym(self, vec: np.ndarray) -> np.ndarray:
        iu, ju = np.triu_indices(self.size)
        scale = np.where(iu == ju, 1.0, 1.0 / np.sqrt(2.0))
        m = np.zeros((self.size, self.size))
        m[iu, ju] = vec * scale
        return m + np.triu(m, 1).T

    def _batch_logm_sym(self, mats: np.ndarray) -> np.ndarray:
        if self.size == 2:
            p, q, s = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 1]
            mean = 0.5 * (p + s)
            rad = np.hypot(0.5 * (p - s), q)
            l1 = np.maximum(mean + rad, 1e-300)
            l2 = np.maximum(mean - rad, 1e-300)
            f1, f2 = np.log(l1), np.log(l2)
            split = rad > 1e-14 * np.maximum(mean, 1e-300)
            c1 = np.where(split, (f1 - f2) / np.maximum(l1 - l2, 1e-300), 1.0 / l1)
            c0 = np.where(split, f1 - c1 * l1, f1 - 1.0)
            eye = np.eye(2)
            return c0[:, None, None] * eye + c1[:, None, None] * mats
        return np.array([_apply_spectral(m, lambda ev: np.log(np.maximum(ev, 1e-300)))
                         for m in mats])

    def log_chart(self, center: Point, points) -> np.ndarray:
        """Normal coordinates of ``points`` at ``center``; rows have norm d."""
        a = self.own(center).coords
        arr = points if isinstance(points, np.ndarray) else self.pack(points)
        w, u = _eig_sym(a)
        inv_sqrt = (u * (1.0 / np.sqrt(w))) @ u.T
        mids = np.einsum("ab,mbc,cd->mad", inv_sqrt, arr, inv_sqrt)
        mids = 0.5 * (mids + np.transpose(mids, (0, 2, 1)))
        return self._flatten_sym(self._batch_logm_sym(mids))

    def exp_chart(self, center: Point, v: np.ndarray) -> Point:
        a = self.own(center).coords
        w, u = _eig_sym(a)
        sq = (u * np.sqrt(w)) @ u.T
        mid = _apply_spectral(self._unflatten_sym(np.asarray(v, dtype=float)), np.exp)
        return Point(self.space_id, self._canonical(sq @ mid @ sq))
