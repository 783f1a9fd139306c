"""Model space protocol and isometry wrapper.

Every concrete geometry implements :class:`ModelSpace`.  Coordinates are
space-specific; the base class provides the point-level API, batching
hooks used by the solvers, and construction-time self-tests for
isometries.  Subclasses only deal in raw coordinate payloads.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from hashlib import sha256
from typing import Any, Sequence

import numpy as np

from ..exceptions import ConstructionError, DomainError, MembershipError, SpaceMismatchError
from ..metric_core import MEMBERSHIP_TOL, Point

#: Pairs sampled when an isometry is checked for distance preservation.
ISOMETRY_SELFTEST_PAIRS = 8
ISOMETRY_DISTANCE_TOL = 1e-9
_SELFTEST_SEED = 1729


def _descriptor_id(descriptor: dict) -> str:
    blob = json.dumps(descriptor, sort_keys=True, separators=(",", ":"))
    return f"{descriptor['kind']}:{sha256(blob.encode()).hexdigest()[:10]}"


class ModelSpace(ABC):
    """A geodesic space with explicit distance and geodesic formulas."""

    def __init__(self, descriptor: dict):
        self._descriptor = descriptor
        self.space_id = _descriptor_id(descriptor)

    # -- coordinate-level primitives -------------------------------------

    @abstractmethod
    def _distance(self, a, b) -> float: ...

    @abstractmethod
    def _geodesic(self, a, b, t: float): ...

    @abstractmethod
    def _contains(self, coords, tol: float) -> bool: ...

    @abstractmethod
    def _canonical(self, coords):
        """Validated, normalised coordinate payload (raises MembershipError)."""

    @abstractmethod
    def _random_coords(self, rng: np.random.Generator, scale: float): ...

    # -- isometry payload hooks ------------------------------------------

    @abstractmethod
    def _apply(self, payload, coords): ...

    @abstractmethod
    def _compose(self, first, second):
        """Payload acting as: apply ``second``, then ``first``."""

    @abstractmethod
    def _invert(self, payload): ...

    @abstractmethod
    def _validate_payload(self, payload): ...

    def _identity_payload(self):
        raise NotImplementedError

    def _random_isometry_payload(self, rng: np.random.Generator, scale: float):
        raise NotImplementedError

    def _payload_to_jsonable(self, payload):
        raise NotImplementedError(f"{self.kind} isometries have no JSON form")

    def _payload_from_jsonable(self, data):
        raise NotImplementedError(f"{self.kind} isometries have no JSON form")

    # -- point-level API ---------------------------------------------------

    @property
    def kind(self) -> str:
        return self._descriptor["kind"]

    def descriptor(self) -> dict:
        return self._descriptor

    def point(self, coords) -> Point:
        """Build a point, validating membership (tolerance documented per space)."""
        return Point(self.space_id, self._canonical(coords))

    def contains(self, p: Point, tol: float = MEMBERSHIP_TOL) -> bool:
        return p.space_id == self.space_id and self._contains(p.coords, tol)

    def own(self, p: Point) -> Point:
        if p.space_id != self.space_id:
            raise SpaceMismatchError(f"point of {p.space_id!r} used with {self.space_id!r}")
        return p

    def random_point(self, rng: np.random.Generator, scale: float = 1.0) -> Point:
        return Point(self.space_id, self._random_coords(rng, float(scale)))

    def base_point(self) -> Point:
        """A canonical reference point (origin, identity matrix, first vertex)."""
        rng = np.random.default_rng(0)
        return Point(self.space_id, self._random_coords(rng, 0.0))

    # -- batching hooks (overridden where a vectorised form exists) -------

    def pack(self, points: Sequence[Point]):
        return [self.own(p).coords for p in points]

    def distances_packed(self, x: Point, packed) -> np.ndarray:
        xc = self.own(x).coords
        return np.array([self._distance(xc, c) for c in packed], dtype=float)

    # -- isometries --------------------------------------------------------

    def make_isometry(self, payload, check: bool = True) -> "Isometry":
        payload = self._validate_payload(payload)
        iso = Isometry(self, payload)
        if check:
            self._selftest_isometry(iso)
        return iso

    def identity_isometry(self) -> "Isometry":
        return Isometry(self, self._identity_payload())

    def random_isometry(self, rng: np.random.Generator, scale: float = 1.0) -> "Isometry":
        return self.make_isometry(self._random_isometry_payload(rng, float(scale)))

    def _selftest_isometry(self, iso: "Isometry") -> None:
        rng = np.random.default_rng(_SELFTEST_SEED)
        for _ in range(ISOMETRY_SELFTEST_PAIRS):
            x = self.random_point(rng, 1.0)
            y = self.random_point(rng, 1.0)
            d0 = self._distance(x.coords, y.coords)
            d1 = self._distance(iso(x).coords, iso(y).coords)
            if abs(d1 - d0) > ISOMETRY_DISTANCE_TOL * max(1.0, d0):
                raise ConstructionError(
                    f"isometry of {self.space_id} distorts a distance by {abs(d1 - d0):.3e}"
                )

    # -- point serialisation ------------------------------------------------

    def point_to_jsonable(self, p: Point):
        raise NotImplementedError

    def point_from_jsonable(self, data) -> Point:
        raise NotImplementedError


@dataclass(frozen=True)
class Isometry:
    """A distance-preserving self-map of one model space.

    Construction through ``ModelSpace.make_isometry`` validates the payload
    algebraically and samples random pairs to confirm distances are
    preserved within 1e-9.  Composition applies the right factor first, so
    ``(g @ h)(x) == g(h(x))``.
    """

    space: ModelSpace
    payload: Any

    def __call__(self, p: Point) -> Point:
        self.space.own(p)
        return Point(self.space.space_id, self.space._apply(self.payload, p.coords))

    def compose(self, other: "Isometry") -> "Isometry":
        if other.space.space_id != self.space.space_id:
            raise SpaceMismatchError("cannot compose isometries of different spaces")
        return Isometry(self.space, self.space._compose(self.payload, other.payload))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        return Isometry(self.space, self.space._invert(self.payload))

    def to_jsonable(self):
        return self.space._payload_to_jsonable(self.payload)


def apply_isometry(g: Isometry, x: Point) -> Point:
    """Apply ``g`` to ``x`` (function form of ``g(x)``)."""
    if not isinstance(g, Isometry):
        raise DomainError("apply_isometry expects an Isometry")
    return g(x)
