"""Comparison inequalities and the report type, pinned by hand values."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamardlab import (
    DefectReport,
    check_cn,
    check_reshetnyak,
    distance,
    geodesic_point,
    segment,
)
from hadamardlab.exceptions import DomainError, SpaceMismatchError

from .oracles import euclid_cn_sides

coord = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


def test_defect_report_sign_convention():
    rep = DefectReport.of("demo", lhs=1.0, rhs=3.0, context={"k": 1})
    assert rep.defect == 2.0
    assert rep.passed()
    assert rep.passed(tol=0.0)
    bad = DefectReport.of("demo", lhs=3.0, rhs=1.0)
    assert bad.defect == -2.0
    assert not bad.passed()
    assert bad.passed(tol=2.5)


def test_cn_matches_vector_arithmetic(spaces, rng):
    space = spaces["euclidean-2"]
    for _ in range(200):
        x, c, cp = (rng.normal(size=2) for _ in range(3))
        rep = check_cn(space, space.point(x), space.point(c), space.point(cp))
        lhs, rhs = euclid_cn_sides(x, c, cp)
        assert rep.lhs == pytest.approx(lhs, abs=1e-9)
        assert rep.rhs == pytest.approx(rhs, abs=1e-9)
        # flat space satisfies the law with equality
        assert abs(rep.defect) <= 1e-9


@settings(max_examples=150, derandomize=True, deadline=None)
@given(st.tuples(*(coord,) * 6))
def test_cn_flat_equality_property(spaces, vals):
    space = spaces["euclidean-2"]
    x = space.point(vals[0:2])
    c = space.point(vals[2:4])
    cp = space.point(vals[4:6])
    assert abs(check_cn(space, x, c, cp).defect) <= 1e-7 * (1 + max(map(abs, vals)) ** 2)


def test_cn_tripod_hand_value(spaces):
    # x, c, c' at the three unit leaves; the midpoint of [c, c'] is the
    # branch vertex, so lhs = 2 and both cross distances are 2
    space = spaces["tree-tripod"]
    x, c, cp = space.vertex("a"), space.vertex("b"), space.vertex("c")
    rep = check_cn(space, x, c, cp)
    assert rep.lhs == pytest.approx(2.0, abs=1e-12)
    assert rep.rhs == pytest.approx(6.0, abs=1e-12)
    assert rep.defect == pytest.approx(4.0, abs=1e-12)


def test_cn_nonnegative_across_builtin_spaces(spaces, rng):
    for space in spaces.values():
        for _ in range(50):
            pts = [space.random_point(rng, 1.0) for _ in range(3)]
            assert check_cn(space, *pts).passed()


def test_reshetnyak_flat_degenerate_equality(spaces, rng):
    # y = x and y' = x' turns the four-point inequality into an identity
    space = spaces["euclidean-3"]
    for eps in (0.1, 0.25, 0.5, 0.9):
        x = space.point(rng.normal(size=3))
        xp = space.point(rng.normal(size=3))
        rep = check_reshetnyak(space, x, xp, x, xp, eps)
        assert abs(rep.defect) <= 1e-9


def test_reshetnyak_nonnegative_across_builtin_spaces(spaces, rng):
    for space in spaces.values():
        for _ in range(30):
            pts = [space.random_point(rng, 1.0) for _ in range(4)]
            for eps in (0.1, 0.5, 0.9):
                assert check_reshetnyak(space, *pts, eps).passed()


def test_reshetnyak_eps_domain(spaces):
    space = spaces["euclidean-2"]
    pts = [space.point([i, 0]) for i in range(4)]
    for eps in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            check_reshetnyak(space, *pts, eps)


def test_geodesic_endpoint_and_additivity(spaces, rng):
    for space in spaces.values():
        x = space.random_point(rng, 1.0)
        y = space.random_point(rng, 1.0)
        d = distance(space, x, y)
        # near-zero SPD distances carry sqrt(eps) cancellation noise
        assert distance(space, geodesic_point(space, x, y, 0.0), x) <= 5e-8
        assert distance(space, geodesic_point(space, x, y, 1.0), y) <= 5e-8
        for t in (0.25, 0.5, 0.75):
            m = geodesic_point(space, x, y, t)
            assert distance(space, x, m) == pytest.approx(t * d, abs=1e-9)
            assert distance(space, m, y) == pytest.approx((1 - t) * d, abs=1e-9)


def test_geodesic_parameter_domain(spaces):
    space = spaces["euclidean-2"]
    x, y = space.point([0, 0]), space.point([1, 0])
    for t in (-0.1, 1.1):
        with pytest.raises(DomainError):
            geodesic_point(space, x, y, t)


def test_segment_bundle(spaces):
    space = spaces["euclidean-2"]
    seg = segment(space, space.point([0, 0]), space.point([3, 4]))
    assert seg.length == pytest.approx(5.0)
    assert np.allclose(seg.point_at(0.5).coords, [1.5, 2.0])


def test_space_mismatch_rejected(spaces):
    e2, e3 = spaces["euclidean-2"], spaces["euclidean-3"]
    with pytest.raises(SpaceMismatchError):
        distance(e2, e2.point([0, 0]), e3.point([0, 0, 0]))
    with pytest.raises(DomainError):
        distance(e2, e2.point([0, 0]), (0.0, 0.0))
