"""Core metric types and comparison-inequality checks.

A point of nonpositive curvature can be recognised at a desk: pick points,
measure a handful of distances, and test the quadratic comparison
inequalities that Euclidean space satisfies with equality.  This module
holds the point/segment/report types shared by every model space and the
two fundamental checks:

* ``check_cn``: the semi parallelogram law.  For the midpoint ``m`` of a
  segment ``[c, c']`` and any ``x``,

      2 d(m,x)^2  <=  d(c,x)^2 + d(c',x)^2 - (1/2) d(c,c')^2.

* ``check_reshetnyak``: a quantitative four-point inequality.  With
  ``x_eps`` and ``xp_eps`` on the segment ``[x, x']`` at distance
  ``eps * d(x,x')`` from ``x`` and from ``x'`` respectively,

      d(x_eps,y)^2 + d(xp_eps,y')^2
          <=  d(x,y)^2 + d(x',y')^2
              + 2 eps d(x,x') ( d(y,y') - (1-eps) d(x,x') ).

Both checks return a :class:`DefectReport` whose ``defect`` is the right
hand side minus the left hand side, so the space passes when the defect is
nonnegative up to tolerance.  Euclidean spaces satisfy the first with
equality, which pins the sign conventions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .exceptions import DomainError, SpaceMismatchError

#: Absolute tolerance for comparison-inequality defects.
DEFECT_TOL = 1e-9

#: Absolute tolerance for membership predicates (SPD spaces relax it; see there).
MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class Point:
    """A point of a model space.

    ``coords`` is a space-specific payload (an array, an (edge, offset)
    pair, a matrix, or a tuple of factor points).  Points are comparable
    only when their ``space_id`` matches; use the owning space to measure
    or move them.
    """

    space_id: str
    coords: Any

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"Point({self.space_id}, {self.coords!r})"


@dataclass(frozen=True)
class GeodesicSegment:
    """The unique geodesic from ``start`` to ``end``, parametrised by arc fraction."""

    space: Any
    start: Point
    end: Point
    length: float

    def point_at(self, t: float) -> Point:
        """Point at arc fraction ``t`` in [0, 1] from ``start``."""
        return geodesic_point(self.space, self.start, self.end, t)


@dataclass(frozen=True)
class DefectReport:
    """Outcome of one inequality check.

    ``defect = rhs - lhs`` exactly as computed; nonnegative means the
    inequality holds.  ``label`` names the check, ``context`` is optional
    free-form data for reports.
    """

    label: str
    lhs: float
    rhs: float
    defect: float
    context: Any = None

    @classmethod
    def of(cls, label: str, lhs: float, rhs: float, context: Any = None) -> "DefectReport":
        return cls(label=label, lhs=lhs, rhs=rhs, defect=rhs - lhs, context=context)

    def passed(self, tol: float = DEFECT_TOL) -> bool:
        return self.defect >= -tol


def _require_same_space(space, *points: Point) -> None:
    for p in points:
        if not isinstance(p, Point):
            raise DomainError(f"expected a Point, got {type(p).__name__}")
        if p.space_id != space.space_id:
            raise SpaceMismatchError(
                f"point belongs to {p.space_id!r}, not {space.space_id!r}"
            )


def distance(space, x: Point, y: Point) -> float:
    """Geodesic distance between two points of ``space``."""
    _require_same_space(space, x, y)
    return space._distance(x.coords, y.coords)


def geodesic_point(space, x: Point, y: Point, t: float) -> Point:
    """Point at arc fraction ``t`` on the geodesic from ``x`` to ``y``.

    ``t`` must lie in [0, 1]; endpoint extension is deliberately not
    offered because segments in trees have no canonical prolongation.
    """
    _require_same_space(space, x, y)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"arc fraction t={t} outside [0, 1]")
    return Point(space.space_id, space._geodesic(x.coords, y.coords, t))


def segment(space, x: Point, y: Point) -> GeodesicSegment:
    """Bundle two points with their distance as a :class:`GeodesicSegment`."""
    return GeodesicSegment(space=space, start=x, end=y, length=distance(space, x, y))


def check_cn(space, x: Point, c: Point, c_prime: Point) -> DefectReport:
    """Semi parallelogram law at the midpoint of ``[c, c_prime]``.

    Returns a report with ``defect >= 0`` (up to tolerance) in any space of
    nonpositive curvature and ``defect == 0`` in Euclidean spaces.
    """
    _require_same_space(space, x, c, c_prime)
    m = geodesic_point(space, c, c_prime, 0.5)
    d_mx = distance(space, m, x)
    d_cx = distance(space, c, x)
    d_cpx = distance(space, c_prime, x)
    d_ccp = distance(space, c, c_prime)
    lhs = 2.0 * d_mx * d_mx
    rhs = d_cpx * d_cpx + d_cx * d_cx - 0.5 * d_ccp * d_ccp
    return DefectReport.of("cn", lhs, rhs)


def check_reshetnyak(
    space, x: Point, x_prime: Point, y: Point, y_prime: Point, eps: float
) -> DefectReport:
    """Four-point comparison for points slid along ``[x, x_prime]``.

    ``eps`` must lie strictly between 0 and 1: the slid points are at
    distance ``eps * d(x, x_prime)`` from ``x`` and from ``x_prime``.
    """
    _require_same_space(space, x, x_prime, y, y_prime)
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps={eps} outside (0, 1)")
    d_xxp = distance(space, x, x_prime)
    x_eps = geodesic_point(space, x, x_prime, eps)
    xp_eps = geodesic_point(space, x, x_prime, 1.0 - eps)
    d_yyp = distance(space, y, y_prime)
    lhs = distance(space, x_eps, y) ** 2 + distance(space, xp_eps, y_prime) ** 2
    rhs = (
        distance(space, x, y) ** 2
        + distance(space, x_prime, y_prime) ** 2
        + 2.0 * eps * d_xxp * (d_yyp - (1.0 - eps) * d_xxp)
    )
    return DefectReport.of("reshetnyak", lhs, rhs)
