"""Splitting pipeline for product-group actions: minimal invariant convex
sets, parallel components, holonomy, and the Pythagorean identity.

The pipeline alternates closing a sample body under one factor's
generators with shrinking to sublevel sets of convex invariant functions
(displacements of commuting generators, and the maximal displacement over
a factor group when the group is finite, which makes that function
exactly invariant).  Minimality is certified heuristically: diameter
stabilisation plus the constancy of convex invariant functions on the
result.  Components are enumerated from translates of the first minimal
set and from extra seeds; the component-space metric is the constant
distance between parallel components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .actions import IsometryRep
from .convex import ConvexBody, project
from .exceptions import (
    ConstructionError,
    DomainError,
    EvanescenceDiagnostic,
    PreconditionError,
)
from .metric_core import DefectReport, Point, distance
from .spaces.base import Isometry, ModelSpace

_ACCEPT_TOL = 1e-5


class ProductAction:
    """Several generator reps acting on one space, factors commuting."""

    def __init__(self, reps: Sequence[IsometryRep]):
        if not reps:
            raise ConstructionError("need at least one factor rep")
        space = reps[0].space
        if any(r.space is not space for r in reps):
            raise ConstructionError("all factors must act on the same space")
        self.space = space
        self.reps = tuple(reps)
        self._certify_commutation()

    def _certify_commutation(self):
        rng = np.random.default_rng(60901)
        pts = [self.space.random_point(rng, 1.0) for _ in range(5)]
        for i in range(len(self.reps)):
            for j in range(i + 1, len(self.reps)):
                for gn, g in self.reps[i].generators.items():
                    for hn, h in self.reps[j].generators.items():
                        for x in pts:
                            gap = distance(self.space, g(h(x)), h(g(x)))
                            if gap > 1e-9 * (1.0 + distance(self.space, x, g(h(x)))):
                                raise ConstructionError(
                                    f"generators {gn!r} (factor {i}) and {hn!r} "
                                    f"(factor {j}) fail to commute by {gap:.3e}"
                                )

    def factor_elements(self, i: int, cap: int = 64) -> list[Isometry] | None:
        """All elements of factor ``i`` when the group closes finitely, else None."""
        space = self.space
        rng = np.random.default_rng(777)
        probes = [space.random_point(rng, 1.0) for _ in range(3)]

        def key(iso: Isometry) -> tuple:
            return tuple(np.round(
                np.concatenate([np.atleast_1d(
                    space.distances_packed(iso(p), space.pack(probes))) for p in probes]),
                9).tolist())

        elems = {key(self.reps[i].resolve([])): self.reps[i].resolve([])}
        frontier = list(elems.values())
        gens = list(self.reps[i].generators.values())
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    c = e.compose(g)
                    k = key(c)
                    if k not in elems:
                        if len(elems) >= cap:
                            return None
                        elems[k] = c
                        nxt.append(c)
            frontier = nxt
        return list(elems.values())


@dataclass
class MinimalSetResult:
    body: ConvexBody
    invariance_residual: float
    shrink_log: list = field(default_factory=list)
    warnings: tuple = ()


def _nearest_gap(space: ModelSpace, body: ConvexBody, x: Point) -> float:
    gap = float(space.distances_packed(x, body.packed()).min())
    if gap > 1e-7:
        gap = min(gap, distance(space, x, project(space, body, x)))
    return gap


def _invariance_residual(space: ModelSpace, body: ConvexBody,
                         gens: Sequence[Isometry]) -> float:
    worst = 0.0
    for g in gens:
        for x in body.samples:
            worst = max(worst, _nearest_gap(space, body, g(x)))
    return worst


def minimal_invariant_set(action: ProductAction, factor: int, seed: Point,
                          rounds: int = 40, hull_depth: int = 2) -> MinimalSetResult:
    """Candidate minimal nonempty closed convex invariant set of one factor.

    Alternates generator closure of the sample body with shrinking to the
    sublevel set of convex invariant functions at their sampled minimum
    plus slack; stops when the diameter stabilises.  Unbounded orbits are
    reported as the evanescent alternative.
    """
    space = action.space
    space.own(seed)
    if not 0 <= factor < len(action.reps):
        raise DomainError(f"no factor {factor}")
    gens_i = list(action.reps[factor].generators.values())
    other_gens = [g for j, r in enumerate(action.reps) if j != factor
                  for g in r.generators.values()]
    elements = action.factor_elements(factor)

    funcs: list[Callable[[Point], float]] = []
    for g in other_gens:
        funcs.append(lambda x, g=g: distance(space, g(x), x))
    if elements is not None:
        funcs.append(lambda x: max(distance(space, e(x), x) for e in elements))

    scale = 1.0 + max((distance(space, g(seed), seed) for g in gens_i), default=0.0)
    escape_cap = 1e4 * scale
    current = [seed]
    log: list[dict] = []
    warnings: list[str] = []
    prev_diam = None
    body = ConvexBody(space, current, depth=hull_depth)
    for rnd in range(rounds):
        closure = list(current)
        for g in gens_i:
            for x in current:
                y = g(x)
                if distance(space, y, seed) > escape_cap:
                    raise EvanescenceDiagnostic(
                        "factor orbit escaped the boundedness cap; minimal "
                        "set construction only applies to bounded orbits",
                        witness={"escape_distance": distance(space, y, seed)},
                    )
                closure.append(y)
        body = ConvexBody(space, closure, depth=hull_depth)

        for f in funcs:
            vals = np.array([f(x) for x in body.samples])
            m = float(vals.min())
            slack = max(1e-9, 1e-6 * scale)
            keep = [x for x, v in zip(body.samples, vals) if v <= m + slack]
            if not keep:
                slack *= 2.0
                keep = [x for x, v in zip(body.samples, vals) if v <= m + slack]
                if not keep:
                    warnings.append("sublevel shrink emptied the samples; "
                                    "previous body accepted")
                    keep = list(body.samples)
            if len(keep) < len(body.samples):
                body = ConvexBody(space, keep, depth=hull_depth)

        diam = body.diameter_estimate()
        log.append({"round": rnd, "diameter": diam, "samples": len(body.samples)})
        if prev_diam is not None and abs(diam - prev_diam) < 1e-6:
            current = list(body.generators)
            break
        prev_diam = diam
        gens = list(body.generators)
        if len(gens) > 24:
            # keep the extremes so a growing orbit cannot fake stabilisation
            order = np.argsort([-distance(space, seed, x) for x in gens])
            far = [gens[k] for k in order[:8]]
            rest = [gens[k] for k in order[8:]]
            gens = far + rest[:: max(1, len(rest) // 16)]
        current = gens
    else:
        diams = [e["diameter"] for e in log]
        if diams[-1] > diams[len(diams) // 2] + 1e-3 * scale:
            raise EvanescenceDiagnostic(
                "sample body kept growing through the whole iteration cap; "
                "the factor orbit looks unbounded",
                witness={"diameter_history": diams},
            )
        warnings.append("diameter did not stabilise within the round cap")

    residual = _invariance_residual(space, body, gens_i)
    return MinimalSetResult(body=body, invariance_residual=residual,
                            shrink_log=log, warnings=tuple(warnings))


def component_distance(space: ModelSpace, a: MinimalSetResult,
                       b: MinimalSetResult) -> float:
    """Distance between parallel components: the constant gap value."""
    gaps = [distance(space, x, project(space, b.body, x)) for x in a.body.samples]
    return float(np.mean(gaps))


def parallel_transport_check(C: MinimalSetResult, Cp: MinimalSetResult,
                             tol: float = _ACCEPT_TOL) -> DefectReport:
    """Constancy of the gap to the other component, and the projection
    being isometric with an identity round trip.

    Non-constant gap means the components are not parallel; that is an
    entry failure (``PreconditionError``), not a defect.
    """
    space = C.body.space
    feet = [project(space, Cp.body, x) for x in C.body.samples]
    gaps = [distance(space, x, f) for x, f in zip(C.body.samples, feet)]
    osc = max(gaps) - min(gaps)
    if osc > tol:
        raise PreconditionError(
            f"gap to the other component varies by {osc:.3e}; not parallel"
        )
    iso_defect = 0.0
    n = len(C.body.samples)
    for i in range(n):
        for j in range(i + 1, min(i + 5, n)):
            d_orig = distance(space, C.body.samples[i], C.body.samples[j])
            d_img = distance(space, feet[i], feet[j])
            iso_defect = max(iso_defect, abs(d_img - d_orig))
    roundtrip = max(
        distance(space, project(space, C.body, f), x)
        for x, f in zip(C.body.samples, feet)
    )
    worst = max(osc, iso_defect, roundtrip)
    return DefectReport.of(
        "parallel_transport", worst, tol,
        context={"gap": float(np.mean(gaps)), "oscillation": osc,
                 "isometry_defect": iso_defect, "roundtrip": roundtrip},
    )


def holonomy_check(C1: MinimalSetResult, C2: MinimalSetResult,
                   C3: MinimalSetResult, tol: float = _ACCEPT_TOL) -> DefectReport:
    """Round trip through two other components must be the identity."""
    space = C1.body.space
    worst = 0.0
    for x in C1.body.samples:
        y = project(space, C2.body, x)
        z = project(space, C3.body, y)
        back = project(space, C1.body, z)
        worst = max(worst, distance(space, back, x))
    return DefectReport.of("holonomy", worst, tol)


@dataclass
class SplittingResult:
    base: MinimalSetResult
    components: list
    splitting_map: Callable[[Point], tuple[Point, int]]
    pythagoras_residual: float
    holonomy_residual: float
    star_residual: float
    parallel_reports: list
    diagnostics: tuple = ()


def build_splitting(action: ProductAction, seeds: Sequence[Point],
                    tol: float = _ACCEPT_TOL) -> SplittingResult:
    """Two-factor splitting: minimal set, parallel components, residuals.

    Components are the translates of the first factor's minimal set along
    second-factor elements plus minimal sets grown from extra seeds.
    Residuals cover the Pythagorean identity across components, holonomy
    triviality, and triviality of the star action; a non-trivial star
    action is reported as a contradiction diagnostic.
    """
    if len(action.reps) != 2:
        raise DomainError("splitting handles exactly two factors; "
                          "reduce higher products recursively")
    if not seeds:
        raise DomainError("need at least one seed")
    space = action.space
    z1 = minimal_invariant_set(action, 0, seeds[0])
    diagnostics: list[str] = []

    g2_elements = action.factor_elements(1)
    if g2_elements is None:
        g2_elements = action.reps[1].ball(radius=2)
    components: list[MinimalSetResult] = [z1]
    for g in g2_elements:
        translated = [g(x) for x in z1.body.generators]
        cand = MinimalSetResult(
            body=ConvexBody(space, translated, depth=z1.body.depth),
            invariance_residual=z1.invariance_residual,
            shrink_log=[], warnings=())
        if all(component_distance(space, cand, c) > 1e-8 for c in components):
            components.append(cand)
    for seed in seeds[1:]:
        cand = minimal_invariant_set(action, 0, seed)
        if all(component_distance(space, cand, c) > 1e-8 for c in components):
            components.append(cand)

    parallel_reports = []
    for i in range(len(components)):
        for j in range(i + 1, len(components)):
            parallel_reports.append(
                parallel_transport_check(components[i], components[j], tol))

    # distances between components, then the Pythagorean identity
    k = len(components)
    comp_dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            comp_dist[i, j] = comp_dist[j, i] = component_distance(
                space, components[i], components[j])

    def splitting_map(x: Point) -> tuple[Point, int]:
        gaps = [distance(space, x, project(space, c.body, x)) for c in components]
        return project(space, z1.body, x), int(np.argmin(gaps))

    rng = np.random.default_rng(2025)
    pythagoras = 0.0
    for _ in range(min(200, 20 * k * k)):
        i, j = rng.integers(0, k, size=2)
        xi = components[i].body.samples[rng.integers(len(components[i].body.samples))]
        xj = components[j].body.samples[rng.integers(len(components[j].body.samples))]
        p1i = project(space, z1.body, xi)
        p1j = project(space, z1.body, xj)
        lhs = distance(space, xi, xj) ** 2
        rhs = distance(space, p1i, p1j) ** 2 + comp_dist[i, j] ** 2
        pythagoras = max(pythagoras, abs(lhs - rhs))

    holonomy = 0.0
    for i in range(k):
        for j in range(k):
            for l in range(k):
                if len({i, j, l}) < 2:
                    continue
                rep = holonomy_check(components[i], components[j],
                                     components[l], tol)
                holonomy = max(holonomy, rep.lhs)

    star = 0.0
    for g in action.reps[1].generators.values():
        for z in z1.body.samples:
            star = max(star, distance(space, project(space, z1.body, g(z)),
                                      project(space, z1.body, z)))
    if star > tol:
        diagnostics.append(
            f"star action is non-trivial (residual {star:.3e}); a Clifford "
            "direction survived, which contradicts the splitting; check the "
            "scenario or tolerances"
        )

    return SplittingResult(
        base=z1, components=components, splitting_map=splitting_map,
        pythagoras_residual=pythagoras, holonomy_residual=holonomy,
        star_residual=star, parallel_reports=parallel_reports,
        diagnostics=tuple(diagnostics))
