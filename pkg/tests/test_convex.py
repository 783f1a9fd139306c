"""Hulls, projections, circumcentres, barycentres, fixed points."""

import numpy as np
import pytest

from hadamardlab import distance, geodesic_point, rotation_about
from hadamardlab.convex import (
    BarycenterResult,
    ConvexBody,
    barycenter,
    check_barycenter_contraction,
    check_barycenter_variance_bound,
    circumcenter,
    dyadic_hull,
    fixed_point_nonexpanding,
    nested_circum_check,
    project,
)
from hadamardlab.exceptions import (
    ConvergenceError,
    DomainError,
    EvanescenceDiagnostic,
)

from .oracles import flat_seb_brute


def _pts(space, coords):
    return [space.point(np.asarray(c, dtype=float)) for c in coords]


# ---------------------------------------------------------------------------
# hulls


def test_dyadic_hull_segment_counts(spaces):
    space = spaces["euclidean-2"]
    gens = _pts(space, [[0, 0], [1, 0]])
    # depth-2 refinement of a segment gives the five dyadic points
    samples = dyadic_hull(space, gens, depth=2)
    xs = sorted(p.coords[0] for p in samples)
    assert np.allclose(xs, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_dyadic_hull_depth_domain(spaces):
    space = spaces["euclidean-2"]
    gens = _pts(space, [[0, 0], [1, 0]])
    with pytest.raises(DomainError):
        dyadic_hull(space, gens, depth=-1)
    with pytest.raises(DomainError):
        dyadic_hull(space, gens, depth=7)
    with pytest.raises(DomainError):
        dyadic_hull(space, gens, depth=4, cap=10)


def test_convex_body_basics(spaces):
    space = spaces["euclidean-2"]
    body = ConvexBody(space, _pts(space, [[0, 0], [2, 0]]), depth=3)
    assert len(body) == len(body.samples)
    # estimate doubles the max distance from the first sample: upper bound
    assert body.diameter_estimate() == pytest.approx(4.0, abs=1e-12)
    arr = body.packed()
    assert arr.shape == (len(body), 2)
    with pytest.raises(DomainError):
        ConvexBody(space, [], depth=2)


# ---------------------------------------------------------------------------
# projection


def test_projection_euclidean_triangle(spaces):
    space = spaces["euclidean-2"]
    body = ConvexBody(space, _pts(space, [[0, 0], [1, 0], [0, 1]]), depth=5)
    cases = [([2.0, 2.0], [0.5, 0.5]), ([-1.0, 0.7], [0.0, 0.7]),
             ([0.2, 0.2], [0.2, 0.2])]
    # foot on the hypotenuse, foot on an edge, and an interior fixed point
    for x, want in cases:
        got = project(space, body, space.point(np.array(x)))
        assert distance(space, got, space.point(np.array(want))) <= 2e-6, (x, got.coords)


def test_projection_euclidean_square_corner(spaces):
    space = spaces["euclidean-2"]
    body = ConvexBody(space, _pts(space, [[0, 0], [1, 0], [0, 1], [1, 1]]), depth=5)
    got = project(space, body, space.point(np.array([2.0, 2.0])))
    assert distance(space, got, space.point(np.array([1.0, 1.0]))) <= 2e-6


def test_projection_segment_fast_path(spaces):
    space = spaces["euclidean-2"]
    body = ConvexBody(space, _pts(space, [[0, 0], [4, 0]]), depth=2)
    got = project(space, body, space.point(np.array([1.3, 2.0])))
    assert np.allclose(got.coords, [1.3, 0.0], atol=1e-8)
    # beyond an endpoint the projection clamps
    got = project(space, body, space.point(np.array([9.0, 2.0])))
    assert np.allclose(got.coords, [4.0, 0.0], atol=1e-8)


def test_projection_hyperbolic_segment_matches_grid(spaces, rng):
    space = spaces["hyperbolic-2"]
    a, b = space.lift([-1.0, 0.3]), space.lift([1.2, 0.8])
    body = ConvexBody(space, [a, b], depth=1)
    for _ in range(5):
        x = space.random_point(rng, 1.2)
        got = project(space, body, x)
        ts = np.linspace(0.0, 1.0, 4001)
        best = min((distance(space, x, geodesic_point(space, a, b, t)) for t in ts))
        assert distance(space, x, got) <= best + 1e-5


def test_projection_is_nonexpanding(spaces, rng):
    for name in ("euclidean-2", "hyperbolic-2", "tree-tripod", "spd-2"):
        space = spaces[name]
        pts = [space.random_point(rng, 1.0) for _ in range(3)]
        body = ConvexBody(space, pts, depth=2)
        for _ in range(10):
            x = space.random_point(rng, 1.5)
            y = space.random_point(rng, 1.5)
            lhs = distance(space, project(space, body, x), project(space, body, y))
            assert lhs <= distance(space, x, y) + 1e-6


def test_projection_fixes_members(spaces, rng):
    space = spaces["tree-tripod"]
    pts = [space.vertex("a"), space.vertex("b")]
    body = ConvexBody(space, pts, depth=3)
    inside = space.edge_point(0, 0.4)
    assert distance(space, project(space, body, inside), inside) <= 1e-6


# ---------------------------------------------------------------------------
# circumcentres


def test_circumcenter_flat_matches_brute_force(spaces, rng):
    space = spaces["euclidean-2"]
    for _ in range(20):
        raw = rng.normal(size=(5, 2)) * 2.0
        res = circumcenter(space, _pts(space, raw))
        center, radius = flat_seb_brute(raw)
        assert np.allclose(res.center.coords, center, atol=1e-9)
        assert res.radius == pytest.approx(radius, abs=1e-9)


def test_circumcenter_two_points_is_midpoint(spaces, rng):
    for name in ("euclidean-3", "hyperbolic-2", "spd-2"):
        space = spaces[name]
        x, y = space.random_point(rng, 1.0), space.random_point(rng, 1.0)
        res = circumcenter(space, [x, y])
        mid = geodesic_point(space, x, y, 0.5)
        assert distance(space, res.center, mid) <= 1e-6
        assert res.radius == pytest.approx(distance(space, x, y) / 2, abs=1e-6)


def test_circumcenter_single_point(spaces):
    space = spaces["euclidean-2"]
    p = space.point(np.array([2.0, -1.0]))
    res = circumcenter(space, [p])
    assert distance(space, res.center, p) == 0.0
    assert res.radius == 0.0


def test_circumcenter_tripod_hand_value(spaces):
    space = spaces["tree-tripod"]
    pts = [space.vertex("a"), space.vertex("b"), space.vertex("c")]
    res = circumcenter(space, pts)
    # all three leaves at distance 1 from o: centre is o, radius 1
    assert space.own(res.center).coords == ("v", "o")
    assert res.radius == pytest.approx(1.0, abs=1e-9)


def test_circumcenter_tree_uneven_legs():
    from hadamardlab import make_space
    space = make_space({"kind": "tree", "edges": [
        ["o", "a", 1.0], ["o", "b", 1.0], ["o", "c", 2.0]]})
    pts = [space.vertex("a"), space.vertex("b"), space.vertex("c")]
    res = circumcenter(space, pts)
    # diametrical pair is a..c (distance 3); midpoint lies on the c-leg
    got = space.own(res.center).coords
    assert got[0] == "e" and got[1] == 2
    assert got[2] == pytest.approx(0.5, abs=1e-9)
    assert res.radius == pytest.approx(1.5, abs=1e-9)


def test_circumcenter_is_deterministic(spaces, rng):
    space = spaces["spd-2"]
    pts = [space.random_point(rng, 0.8) for _ in range(4)]
    r1 = circumcenter(space, pts)
    r2 = circumcenter(space, pts)
    assert distance(space, r1.center, r2.center) == 0.0
    assert r1.radius == r2.radius


def test_circumcenter_covers_and_is_locally_optimal(spaces, rng):
    for name in ("hyperbolic-2", "spd-2", "product-tripod-line"):
        space = spaces[name]
        pts = [space.random_point(rng, 1.0) for _ in range(4)]
        res = circumcenter(space, pts)
        worst = max(distance(space, res.center, p) for p in pts)
        assert worst <= res.radius + 1e-6
        # no nearby competitor does strictly better
        for p in pts:
            cand = geodesic_point(space, res.center, p, 0.05)
            cand_r = max(distance(space, cand, q) for q in pts)
            assert cand_r >= res.radius - 1e-4


def test_nested_circum_bound(spaces, rng):
    for name in ("euclidean-2", "tree-tripod", "hyperbolic-2"):
        space = spaces[name]
        for _ in range(10):
            pts = [space.random_point(rng, 1.0) for _ in range(4)]
            inner = ConvexBody(space, pts[:2], depth=1)
            outer = ConvexBody(space, pts, depth=1)
            report = nested_circum_check(space, inner, outer)
            assert report.label == "nested_circum"
            assert report.defect >= -1e-6


def test_nested_circum_rejects_escapees(spaces):
    space = spaces["euclidean-2"]
    inner = ConvexBody(space, _pts(space, [[5, 5], [6, 5]]), depth=1)
    outer = ConvexBody(space, _pts(space, [[0, 0], [1, 0], [0, 1]]), depth=1)
    with pytest.raises(DomainError):
        nested_circum_check(space, inner, outer)


# ---------------------------------------------------------------------------
# barycentres


def test_barycenter_flat_is_weighted_mean(spaces, rng):
    space = spaces["euclidean-3"]
    pts = [space.random_point(rng, 1.0) for _ in range(5)]
    w = rng.random(5)
    w /= w.sum()
    res = barycenter(space, pts, w)
    assert isinstance(res, BarycenterResult)
    mean = sum(wi * p.coords for wi, p in zip(w, pts))
    assert np.allclose(res.point.coords, mean, atol=1e-12)


def test_barycenter_default_weights_uniform(spaces):
    space = spaces["euclidean-2"]
    pts = _pts(space, [[0, 0], [3, 0], [0, 3]])
    res = barycenter(space, pts)
    assert np.allclose(res.point.coords, [1.0, 1.0], atol=1e-12)


def test_barycenter_value_is_attained_objective(spaces, rng):
    space = spaces["hyperbolic-2"]
    pts = [space.random_point(rng, 1.0) for _ in range(4)]
    w = np.full(4, 0.25)
    res = barycenter(space, pts, w)
    value = sum(wi * distance(space, res.point, p) ** 2 for wi, p in zip(w, pts))
    assert res.value == pytest.approx(value, abs=1e-9)


def test_barycenter_spd_diagonal_closed_form(spaces):
    space = spaces["spd-2"]
    pts = [space.point(np.diag(d)) for d in ([1.0, 8.0], [4.0, 2.0], [16.0, 1.0])]
    w = np.array([0.5, 0.25, 0.25])
    res = barycenter(space, pts, w)
    # commuting matrices: barycentre is the weighted log-Euclidean mean
    logs = sum(wi * np.log(np.diag(p.coords)) for wi, p in zip(w, pts))
    assert np.allclose(res.point.coords, np.diag(np.exp(logs)), atol=1e-8)


def test_barycenter_tree_two_point_interpolation(spaces):
    space = spaces["tree-tripod"]
    res = barycenter(space, [space.vertex("a"), space.vertex("b")],
                     np.array([0.25, 0.75]))
    # two-point barycentre is the geodesic point at the complementary weight
    want = geodesic_point(space, space.vertex("a"), space.vertex("b"), 0.75)
    assert distance(space, res.point, want) <= 1e-6


def test_barycenter_routes_agree(spaces, rng):
    for name in ("euclidean-2", "hyperbolic-2", "spd-2", "tree-tripod"):
        space = spaces[name]
        pts = [space.random_point(rng, 0.8) for _ in range(4)]
        w = rng.random(4)
        w /= w.sum()
        fast = barycenter(space, pts, w)
        slow = barycenter(space, pts, w, method="inductive")
        gap = abs(slow.value - fast.value)
        assert gap <= 1e-6
        # variance inequality: d(y, b)^2 <= F(y) - F(b) at the minimiser b,
        # so a small value gap pins the two locations together
        assert distance(space, fast.point, slow.point) <= 2 * np.sqrt(gap + 1e-9)


def test_barycenter_input_validation(spaces):
    space = spaces["euclidean-2"]
    pts = _pts(space, [[0, 0], [1, 0]])
    with pytest.raises(DomainError):
        barycenter(space, [])
    with pytest.raises(DomainError):
        barycenter(space, pts, np.array([0.3, 0.3]))
    with pytest.raises(DomainError):
        barycenter(space, pts, np.array([-0.5, 1.5]))
    with pytest.raises(DomainError):
        barycenter(space, pts, np.array([0.5, 0.5]), method="simulated-annealing")


def test_barycenter_contraction_and_variance(spaces, rng):
    for name in ("euclidean-2", "hyperbolic-2", "tree-tripod", "spd-2"):
        space = spaces[name]
        for _ in range(10):
            xs = [space.random_point(rng, 1.0) for _ in range(3)]
            ys = [space.random_point(rng, 1.0) for _ in range(3)]
            w = rng.random(3)
            w /= w.sum()
            assert check_barycenter_contraction(space, xs, ys, w).defect >= -1e-9
            assert check_barycenter_variance_bound(space, xs, ys, w).defect >= -1e-9


def test_barycenter_contraction_tight_under_translation(spaces, rng):
    space = spaces["euclidean-2"]
    xs = [space.random_point(rng, 1.0) for _ in range(3)]
    v = np.array([0.7, -0.2])
    ys = [space.point(x.coords + v) for x in xs]
    w = np.full(3, 1 / 3)
    rep = check_barycenter_contraction(space, xs, ys, w)
    # translating every anchor moves the barycentre by exactly the same vector
    assert abs(rep.defect) <= 1e-9


# ---------------------------------------------------------------------------
# fixed points


def test_fixed_point_of_rotation(spaces):
    space = spaces["euclidean-2"]
    g = rotation_about(space, 1.0, np.array([3.0, 4.0]))
    start = space.point(np.zeros(2))
    got = fixed_point_nonexpanding(space, g, start)
    assert distance(space, got, space.point(np.array([3.0, 4.0]))) <= 1e-6


def test_fixed_point_rejects_expanding_maps(spaces):
    space = spaces["euclidean-2"]

    def double(p):
        return space.point(2.0 * p.coords)

    with pytest.raises(DomainError):
        fixed_point_nonexpanding(space, double, space.point(np.array([1.0, 0.0])))


def test_fixed_point_flags_drift(spaces):
    space = spaces["euclidean-2"]
    g = space.make_isometry((np.eye(2), np.array([1.0, 0.0])))
    with pytest.raises(EvanescenceDiagnostic):
        fixed_point_nonexpanding(space, g, space.point(np.zeros(2)))


def test_fixed_point_budget_exhaustion(spaces):
    space = spaces["euclidean-2"]
    g = rotation_about(space, 1e-3, np.array([50.0, 0.0]))
    with pytest.raises(ConvergenceError) as err:
        fixed_point_nonexpanding(space, g, space.point(np.zeros(2)),
                                 tol=1e-12, max_iter=3)
    assert err.value.last_iterate is not None
