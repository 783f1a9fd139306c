"""Square-integrable maps over finite bases, and lattice induction."""

import numpy as np
import pytest

from hadamardlab import builtin_space, distance
from hadamardlab.exceptions import ConstructionError, DomainError, PreconditionError
from hadamardlab.induction import (
    InducedAction,
    LatticeScenario,
    induced_act,
    induction_transfer_chain,
    square_integrability_estimate,
)
from hadamardlab.l2 import (
    FiniteMeasureSpace,
    L2Map,
    SemiDensity,
    as_point,
    barycenter_map,
    commensurator_average,
    component_distances,
    from_point,
    l2_distance,
    l2_geodesic,
    l2_space,
    rectangle_check,
)

from .oracles import cocycle_search, sqint_enum


@pytest.fixture()
def plane():
    return builtin_space("euclidean-2")


def _map(base, target, rows):
    return L2Map(base, target, [target.point(np.asarray(r, float)) for r in rows])


# ---------------------------------------------------------------------------
# measure spaces and maps


def test_measure_space_validation():
    with pytest.raises(ConstructionError):
        FiniteMeasureSpace(("a", "a"), (0.5, 0.5))
    with pytest.raises(ConstructionError):
        FiniteMeasureSpace(("a", "b"), (0.5, 0.6))
    with pytest.raises(ConstructionError):
        FiniteMeasureSpace(("a", "b"), (1.0, 0.0))
    base = FiniteMeasureSpace.uniform(4)
    assert np.allclose(base.weights, 0.25)


def test_l2_map_validation(plane):
    base = FiniteMeasureSpace.uniform(3)
    with pytest.raises(ConstructionError):
        _map(base, plane, [[0, 0], [1, 1]])
    f = L2Map.constant(base, plane, plane.point(np.array([2.0, 1.0])))
    assert len(f.values) == 3


def test_semi_density_validation():
    base = FiniteMeasureSpace.uniform(2)
    SemiDensity(base, np.array([1.0, 1.0]))  # sum w a^2 = 1
    with pytest.raises(ConstructionError):
        SemiDensity(base, np.array([1.0, -1.0]))
    with pytest.raises(ConstructionError):
        SemiDensity(base, np.array([2.0, 2.0]))


def test_l2_space_and_point_roundtrip(plane):
    base = FiniteMeasureSpace(("p", "q"), (0.25, 0.75))
    space = l2_space(base, plane)
    assert np.allclose(space.weights, [0.25, 0.75])
    f = _map(base, plane, [[1, 0], [0, 2]])
    p = as_point(space, f)
    again = from_point(base, plane, space, p)
    for a, b in zip(f.values, again.values):
        assert distance(plane, a, b) <= 1e-12


def test_l2_distance_weighted_pythagoras(plane):
    base = FiniteMeasureSpace(("p", "q"), (0.25, 0.75))
    f = _map(base, plane, [[0, 0], [0, 0]])
    g = _map(base, plane, [[2, 0], [0, 2]])
    # sqrt(0.25 * 4 + 0.75 * 4) = 2
    assert l2_distance(f, g) == pytest.approx(2.0, abs=1e-12)
    comps = component_distances(f, g)
    assert np.allclose(comps, [2.0, 2.0], atol=1e-12)


def test_l2_geodesic_semi_density(plane, rng):
    base = FiniteMeasureSpace.uniform(5)
    for _ in range(25):
        f = _map(base, plane, rng.normal(size=(5, 2)))
        g = _map(base, plane, rng.normal(size=(5, 2)))
        for t in (0.25, 0.5, 0.8):
            h, alpha = l2_geodesic(f, g, t)
            # normalisation: the weighted square sum of alpha is one
            w = np.asarray(base.weights)
            a = np.asarray(alpha.alpha)
            assert abs(float(w @ a**2) - 1.0) <= 1e-8
            # the interpolate sits at the right distances
            assert l2_distance(f, h) == pytest.approx(
                t * l2_distance(f, g), abs=1e-9)


def test_l2_geodesic_degenerate_and_domain(plane):
    base = FiniteMeasureSpace.uniform(3)
    f = _map(base, plane, [[0, 0], [1, 0], [2, 0]])
    h, alpha = l2_geodesic(f, f, 0.5)
    # coincident endpoints give the uniform semi-density
    assert np.allclose(np.asarray(alpha.alpha), 1.0, atol=1e-12)
    with pytest.raises(DomainError):
        l2_geodesic(f, f, 1.5)
    with pytest.raises(DomainError):
        l2_geodesic(f, f, -0.1)


def test_barycenter_map(plane):
    base = FiniteMeasureSpace(("p", "q"), (0.25, 0.75))
    f = _map(base, plane, [[4, 0], [0, 4]])
    b = barycenter_map(f)
    assert np.allclose(b.coords, [1.0, 3.0], atol=1e-9)


def test_rectangle_check_parallel_transport(plane):
    base = FiniteMeasureSpace.uniform(2)
    f0 = _map(base, plane, [[0, 0], [5, 0]])
    f1 = _map(base, plane, [[0, 3], [5, 3]])
    g0 = _map(base, plane, [[1, 0], [6, 0]])
    g1 = _map(base, plane, [[1, 3], [6, 3]])
    reports = rectangle_check((f0, f1), (g0, g1),
                              t_samples=np.linspace(0, 1, 9))
    assert all(r.label.startswith("rectangle_atom_") for r in reports)
    assert all(abs(r.defect) <= 1e-6 for r in reports)


def test_rectangle_check_rejects_skew(plane):
    base = FiniteMeasureSpace.uniform(2)
    f0 = _map(base, plane, [[0, 0], [5, 0]])
    f1 = _map(base, plane, [[0, 3], [5, 3]])
    g0 = _map(base, plane, [[1, 0], [6, 0]])
    skew = _map(base, plane, [[9, 9], [6, 3]])
    with pytest.raises(PreconditionError):
        rectangle_check((f0, f1), (g0, skew),
                        t_samples=np.linspace(0, 1, 9))


# ---------------------------------------------------------------------------
# commensurator averaging


def test_commensurator_average_identity_pair(plane):
    base = FiniteMeasureSpace.uniform(2)
    f = _map(base, plane, [[1, 0], [0, 1]])
    e = plane.make_isometry((np.eye(2), np.zeros(2)))
    shift = plane.make_isometry((np.eye(2), np.array([2.0, 0.0])))
    out = commensurator_average([(e, [0, 1]), (shift, [0, 1])], f)
    # atomwise midpoint of f and f shifted by (2, 0)
    assert np.allclose(out.values[0].coords, [2.0, 0.0], atol=1e-9)
    assert np.allclose(out.values[1].coords, [1.0, 1.0], atol=1e-9)


def test_commensurator_average_nonexpansive(plane, rng):
    base = FiniteMeasureSpace.uniform(3)
    rot = plane.make_isometry(
        (np.array([[0.0, -1.0], [1.0, 0.0]]), np.array([0.5, 0.0])))
    e = plane.make_isometry((np.eye(2), np.zeros(2)))
    A = [(e, [0, 1, 2]), (rot, [1, 2, 0]), (rot.inverse(), [2, 0, 1])]
    for _ in range(20):
        f = _map(base, plane, rng.normal(size=(3, 2)) * 2)
        g = _map(base, plane, rng.normal(size=(3, 2)) * 2)
        lhs = l2_distance(commensurator_average(A, f), commensurator_average(A, g))
        assert lhs <= l2_distance(f, g) + 1e-9


def test_commensurator_average_perm_validation(plane):
    base = FiniteMeasureSpace.uniform(2)
    f = _map(base, plane, [[0, 0], [1, 1]])
    e = plane.make_isometry((np.eye(2), np.zeros(2)))
    with pytest.raises(DomainError):
        commensurator_average([(e, [0, 0])], f)
    uneven = FiniteMeasureSpace(("p", "q"), (0.3, 0.7))
    g = _map(uneven, plane, [[0, 0], [1, 1]])
    # swapping atoms of unequal mass does not preserve the measure
    with pytest.raises(DomainError):
        commensurator_average([(e, [1, 0])], g)


# ---------------------------------------------------------------------------
# lattice induction


def _scenario(n):
    target = builtin_space("euclidean-2")
    gen = target.make_isometry((np.eye(2), np.array([1.0, 0.0])))
    return LatticeScenario(grid_size=n, target=target, generator=gen)


def test_cocycle_matches_search():
    sc = _scenario(8)
    for j in range(-24, 24):
        assert sc.chi(j) == cocycle_search(j, 8)
    # domain cells themselves need no correction
    assert all(sc.chi(j) == 0 for j in range(8))


def test_gamma_power_and_cap():
    sc = _scenario(4)
    x = sc.target.point(np.array([0.5, 2.0]))
    got = sc.gamma_power(3)(x)
    assert np.allclose(got.coords, [3.5, 2.0], atol=1e-12)
    back = sc.gamma_power(-2)(x)
    assert np.allclose(back.coords, [-1.5, 2.0], atol=1e-12)
    with pytest.raises(DomainError):
        sc.gamma_power(65)


def test_grid_index():
    sc = _scenario(8)
    assert sc.grid_index(0.5) == 4
    assert sc.grid_index(0.0) == 0
    with pytest.raises(DomainError):
        sc.grid_index(0.3)


def test_cell_routing_hand_check():
    sc = _scenario(8)
    action = InducedAction(sc)
    sources, twists = action.cell_routing(3 / 8)
    assert list(sources) == [(j - 3) % 8 for j in range(8)]
    # cells 0..2 wrap around the circle and pick up one generator power
    assert list(twists) == [1, 1, 1, 0, 0, 0, 0, 0]


def test_induced_action_is_isometric(rng):
    sc = _scenario(8)
    action = InducedAction(sc)
    space = action.space
    for h in (1 / 8, 3 / 8, 5 / 8):
        g = action.isometry(h)
        for _ in range(10):
            x = space.random_point(rng, 1.0)
            y = space.random_point(rng, 1.0)
            assert abs(distance(space, g(x), g(y)) -
                       distance(space, x, y)) <= 1e-9


def test_induced_action_composes(rng):
    sc = _scenario(8)
    action = InducedAction(sc)
    space = action.space
    g = action.isometry(3 / 8)
    h = action.isometry(6 / 8)
    combined = action.isometry(9 / 8)
    for _ in range(10):
        x = space.random_point(rng, 1.0)
        assert distance(space, g(h(x)), combined(x)) <= 1e-8


def test_induced_act_matches_isometry_route(rng):
    sc = _scenario(4)
    action = InducedAction(sc)
    space = action.space
    f = L2Map(sc.base, sc.target,
              [sc.target.point(rng.normal(size=2)) for _ in range(4)])
    for h in (0.25, 0.5, 1.75, -0.25):
        moved = induced_act(action, h, f)
        via_iso = action.isometry(h)(as_point(space, f))
        assert distance(space, as_point(space, moved), via_iso) <= 1e-12


def test_square_integrability_values():
    sc = _scenario(8)
    vals = square_integrability_estimate(sc, [0.0, 2.5])
    assert vals[0] == 0.0
    assert vals[1] == 6.5
    # grid refinement does not change the unit-shift estimate
    sc64 = _scenario(64)
    assert square_integrability_estimate(sc64, [2.5])[0] == 6.5
    # matches direct enumeration of squared cocycle lengths
    assert vals[1] == pytest.approx(sqint_enum(8, 2.5), abs=1e-12)


def test_transfer_chain_integer_elements(rng):
    sc = _scenario(8)
    action = InducedAction(sc)
    ladder = [
        L2Map(sc.base, sc.target,
              [sc.target.point(rng.normal(size=2)) for _ in range(8)])
        for _ in range(2)
    ]
    report = induction_transfer_chain(action, ladder, [1, 2, 3])
    # integer elements act cellwise by the same generator power, so the
    # barycentre route and the l2 route move in lockstep
    assert report.lattice_elements == (1, 2, 3)
    assert max(max(row) for row in report.equivariance_gaps) <= 1e-9
    assert np.allclose(report.bar_displacements, report.l2_displacements,
                       atol=1e-9)
    assert np.allclose(np.asarray(report.bar_displacements)[:, 0],
                       [1.0, 2.0, 3.0], atol=1e-9)
    assert report.contraction_ok
