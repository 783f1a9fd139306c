"""L2 spaces of maps from a finite measure space into a model space.

A map f assigns a target point to each atom; the metric is the square
root of the weighted sum of squared component distances.  Geodesics run
componentwise at a shared parameter, which makes the whole space a
weighted product of copies of the target, and that product is what the
rest of the package manipulates when it needs the L2 space as a space.

Geodesics carry a semi-density: the profile alpha with alpha_i equal to
the component speed relative to the total speed, normalised so the
weighted square sum is one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .convex import barycenter
from .exceptions import ConstructionError, DomainError, PreconditionError
from .metric_core import DefectReport, Point, distance, geodesic_point
from .spaces.base import Isometry, ModelSpace
from .spaces.product import ProductSpace


@dataclass(frozen=True)
class FiniteMeasureSpace:
    """Finite atomic probability space."""

    atoms: tuple
    weights: tuple

    def __init__(self, atoms: Sequence, weights: Sequence[float]):
        atoms = tuple(atoms)
        weights = tuple(float(w) for w in weights)
        if len(atoms) != len(weights) or not atoms:
            raise ConstructionError("need matching nonempty atoms and weights")
        if len(set(atoms)) != len(atoms):
            raise ConstructionError("atom identifiers must be distinct")
        if any(w <= 0 for w in weights):
            raise ConstructionError("weights must be strictly positive")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ConstructionError(f"weights sum to {sum(weights)!r}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, n: int) -> "FiniteMeasureSpace":
        return cls(tuple(range(n)), tuple(np.full(n, 1.0 / n)))

    def __len__(self) -> int:
        return len(self.atoms)

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights)


@dataclass(frozen=True)
class L2Map:
    """Map from the atoms of ``base`` into ``target``."""

    base: FiniteMeasureSpace
    target: ModelSpace
    values: tuple

    def __init__(self, base: FiniteMeasureSpace, target: ModelSpace,
                 values: Sequence[Point]):
        values = tuple(target.own(v) for v in values)
        if len(values) != len(base):
            raise ConstructionError(
                f"need {len(base)} values, got {len(values)}"
            )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, base: FiniteMeasureSpace, target: ModelSpace,
                 x: Point) -> "L2Map":
        return cls(base, target, (x,) * len(base))


@dataclass(frozen=True)
class SemiDensity:
    """Nonnegative atom profile with weighted square sum one."""

    base: FiniteMeasureSpace
    alpha: tuple

    def __init__(self, base: FiniteMeasureSpace, alpha: Sequence[float]):
        alpha = tuple(float(a) for a in alpha)
        if len(alpha) != len(base):
            raise ConstructionError("alpha length must match the atom count")
        if any(a < 0 for a in alpha):
            raise ConstructionError("semi-density values must be nonnegative")
        total = float(base.weight_array() @ (np.asarray(alpha) ** 2))
        if abs(total - 1.0) > 1e-8:
            raise ConstructionError(
                f"weighted square sum is {total!r}, not 1 within 1e-8"
            )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "alpha", alpha)


def _require_compatible(f: L2Map, fp: L2Map):
    if f.base != fp.base:
        raise DomainError("maps live over different measure spaces")
    if f.target.space_id != fp.target.space_id:
        raise DomainError("maps have different target spaces")


def l2_space(base: FiniteMeasureSpace, target: ModelSpace) -> ProductSpace:
    """The L2 space itself: a weighted product of copies of the target."""
    return ProductSpace([target] * len(base), weights=base.weights)


def as_point(space: ProductSpace, f: L2Map) -> Point:
    return space.from_factors(f.values)


def from_point(base: FiniteMeasureSpace, target: ModelSpace, space: ProductSpace,
               p: Point) -> L2Map:
    values = [Point(target.space_id, c) for c in space.own(p).coords]
    return L2Map(base, target, values)


def l2_distance(f: L2Map, fp: L2Map) -> float:
    _require_compatible(f, fp)
    w = f.base.weight_array()
    d = np.array([distance(f.target, a, b) for a, b in zip(f.values, fp.values)])
    return float(np.sqrt(w @ (d * d)))


def component_distances(f: L2Map, fp: L2Map) -> np.ndarray:
    _require_compatible(f, fp)
    return np.array([distance(f.target, a, b) for a, b in zip(f.values, fp.values)])


def l2_geodesic(f: L2Map, fp: L2Map, t: float) -> tuple[L2Map, SemiDensity]:
    """Point at parameter ``t`` on [f, fp] plus the geodesic's semi-density.

    Components interpolate at the shared parameter ``t``; the component
    speeds relative to the total speed form the semi-density.  For the
    degenerate geodesic (f = fp) the uniform profile is returned.
    """
    _require_compatible(f, fp)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"parameter {t} outside [0, 1]")
    d = component_distances(f, fp)
    total = float(np.sqrt(f.base.weight_array() @ (d * d)))
    if total == 0.0:
        return f, SemiDensity(f.base, np.ones(len(f.base)))
    values = [geodesic_point(f.target, a, b, t) for a, b in zip(f.values, fp.values)]
    return L2Map(f.base, f.target, values), SemiDensity(f.base, d / total)


def barycenter_map(f: L2Map) -> Point:
    """Barycentre of the map's values under the atom weights."""
    return barycenter(f.target, f.values, weights=f.base.weights).point


def rectangle_check(sigma1: tuple[L2Map, L2Map], sigma2: tuple[L2Map, L2Map],
                    t_samples: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
                    flatness_tol: float = 1e-6) -> list[DefectReport]:
    """Per-atom parallelism of two flat-rectangle sides in the L2 space.

    Precondition: the two geodesics bound a flat strip, certified by the
    distance between same-parameter points being constant over the
    sampled parameters; failure raises ``PreconditionError``.  For each
    atom the report bounds the constancy defect of the component distance
    together with the semi-density mismatch of the two sides.
    """
    f1, f1p = sigma1
    f2, f2p = sigma2
    _require_compatible(f1, f1p)
    _require_compatible(f2, f2p)
    _require_compatible(f1, f2)

    geos1, geos2 = [], []
    for t in t_samples:
        g1, a1 = l2_geodesic(f1, f1p, t)
        g2, a2 = l2_geodesic(f2, f2p, t)
        geos1.append(g1)
        geos2.append(g2)
    cross = [l2_distance(a, b) for a, b in zip(geos1, geos2)]
    flat_defect = max(cross) - min(cross)
    if flat_defect > flatness_tol:
        raise PreconditionError(
            f"sides are not parallel: cross distance varies by {flat_defect:.3e}"
        )

    alpha1 = l2_geodesic(f1, f1p, 0.0)[1].alpha
    alpha2 = l2_geodesic(f2, f2p, 0.0)[1].alpha
    reports = []
    for i, atom in enumerate(f1.base.atoms):
        comp = [distance(f1.target, g1.values[i], g2.values[i])
                for g1, g2 in zip(geos1, geos2)]
        dev = max(comp) - min(comp)
        mismatch = abs(alpha1[i] - alpha2[i])
        reports.append(DefectReport.of(
            f"rectangle_atom_{atom}", max(dev, mismatch), 1e-6,
            context={"atom": atom, "distance_deviation": dev,
                     "alpha_mismatch": mismatch},
        ))
    return reports


def commensurator_average(A: Sequence[tuple[Isometry, Sequence[int]]],
                          f: L2Map) -> L2Map:
    """Average of translated copies: atomwise barycentre over the set A.

    Each element of ``A`` is a pair of the isometry it applies on the
    target and the atom permutation induced by its action on the index
    set; permutations must preserve the atom weights.
    """
    if not A:
        raise DomainError("A must be nonempty")
    n = len(f.base)
    w = f.base.weights
    moves = []
    for iso, index_map in A:
        idx = [int(i) for i in index_map]
        if sorted(idx) != list(range(n)):
            raise DomainError("index action is not a permutation of the atoms")
        if any(abs(w[idx[j]] - w[j]) > 1e-15 for j in range(n)):
            raise DomainError("index action does not preserve the atom weights")
        moves.append((iso, idx))
    values = []
    for j in range(n):
        pts = [iso(f.values[idx[j]]) for iso, idx in moves]
        values.append(barycenter(f.target, pts).point)
    return L2Map(f.base, f.target, values)
