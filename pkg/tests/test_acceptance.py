"""Acceptance sweep: one test per headline guarantee, at pinned tolerances.

``pytest tests/test_acceptance.py -v`` prints a pass/fail line per
guarantee.  Every sweep draws its randomness from a per-trial Philox
stream, so any single trial can be replayed in isolation by seed and
trial index.
"""

from pathlib import Path

import numpy as np

from hadamardlab import (
    builtin_space,
    check_cn,
    check_reshetnyak,
    distance,
    make_space,
    rotation_about,
)
from hadamardlab.actions import IsometryRep, evanescence_probe
from hadamardlab.convex import (
    ConvexBody,
    barycenter,
    check_barycenter_contraction,
    check_barycenter_variance_bound,
    fixed_point_nonexpanding,
    nested_circum_check,
)
from hadamardlab.harness import load_scenario, run_scenario
from hadamardlab.induction import (
    InducedAction,
    LatticeScenario,
    induced_act,
    square_integrability_estimate,
)
from hadamardlab.l2 import (
    FiniteMeasureSpace,
    L2Map,
    commensurator_average,
    l2_distance,
    l2_geodesic,
    rectangle_check,
)

SPACES = (
    "euclidean-2",
    "euclidean-3",
    "hyperbolic-2",
    "tree-tripod",
    "tree-path",
    "tree-caterpillar",
    "spd-2",
    "product-plane",
    "product-tripod-line",
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

# sup displacement of a unit rotation at distance d from the centre is
# 2 sin(1/2) d, the chord length of a one-radian arc
ROTATION_SLOPE = 2 * np.sin(0.5)


def _stream(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(trial))


def test_a01_cn_inequality_sweep(spaces):
    """Midpoint comparison holds on 10^4 random triples per space."""
    for name in SPACES:
        space = spaces[name]
        flat = name.startswith("euclidean")
        lo, hi = np.inf, -np.inf
        for trial in range(10_000):
            rng = _stream(101, trial)
            p = space.random_point(rng, scale=1.0)
            q = space.random_point(rng, scale=1.0)
            r = space.random_point(rng, scale=1.0)
            d = check_cn(space, p, q, r).defect
            lo, hi = min(lo, d), max(hi, d)
        assert lo >= -1e-9, f"{name}: worst midpoint defect {lo:.3e}"
        if flat:
            # flat spaces attain the comparison with equality
            assert hi <= 1e-9, f"{name}: equality violated by {hi:.3e}"


def test_a02_reshetnyak_gluing_sweep(spaces):
    """Four-point gluing comparison holds on 10^3 quadruples per space."""
    eps_grid = (0.1, 0.25, 0.5, 0.9)
    for name in SPACES:
        space = spaces[name]
        lo = np.inf
        for trial in range(1_000):
            rng = _stream(103, trial)
            pts = [space.random_point(rng, scale=1.0) for _ in range(4)]
            for eps in eps_grid:
                lo = min(lo, check_reshetnyak(space, *pts, eps=eps).defect)
        assert lo >= -1e-9, f"{name}: worst gluing defect {lo:.3e}"


def test_a03_nested_circumcenter_bound(spaces):
    """Centre drift of nested hulls obeys the root bound, 10^3 pairs each."""
    for name in SPACES:
        space = spaces[name]
        lo = np.inf
        for trial in range(1_000):
            rng = _stream(31, trial)
            pts = [space.random_point(rng, scale=1.0) for _ in range(4)]
            inner = ConvexBody(space, pts[:2], depth=1)
            outer = ConvexBody(space, pts, depth=1)
            lo = min(lo, nested_circum_check(space, inner, outer).defect)
        assert lo >= -1e-6, f"{name}: worst nesting defect {lo:.3e}"


def test_a04_barycenter_inequalities(spaces):
    """Contraction and variance bounds on 10^3 weighted pairs per space."""
    for name in SPACES:
        space = spaces[name]
        lo = np.inf
        for trial in range(1_000):
            rng = _stream(23, trial)
            xs = [space.random_point(rng, scale=1.0) for _ in range(3)]
            ys = [space.random_point(rng, scale=1.0) for _ in range(3)]
            w = rng.uniform(0.2, 1.0, size=3)
            w = w / w.sum()
            lo = min(lo, check_barycenter_contraction(space, xs, ys, weights=w).defect)
            lo = min(lo, check_barycenter_variance_bound(space, xs, ys, weights=w).defect)
        assert lo >= -1e-6, f"{name}: worst barycentre defect {lo:.3e}"
    # flat case: the barycentre is the weighted mean, to solver precision
    for name in ("euclidean-2", "euclidean-3"):
        space = spaces[name]
        worst = 0.0
        for trial in range(1_000):
            rng = _stream(29, trial)
            xs = [space.random_point(rng, scale=1.0) for _ in range(4)]
            w = rng.uniform(0.2, 1.0, size=4)
            w = w / w.sum()
            b = barycenter(space, xs, weights=w).point
            mean = np.average([p.coords for p in xs], axis=0, weights=w)
            worst = max(worst, float(np.linalg.norm(b.coords - mean)))
        assert worst <= 1e-9, f"{name}: mean gap {worst:.3e}"


def test_a05_rotation_fixed_point():
    """Orbit circumcentres find the centre of a planar rotation."""
    space = builtin_space("euclidean-2")
    iso = rotation_about(space, 1.0, np.array([3.0, 4.0]))
    found = fixed_point_nonexpanding(
        space, iso, space.point([0.0, 0.0]), tol=1e-6, max_iter=500
    )
    gap = distance(space, found, space.point([3.0, 4.0]))
    assert gap <= 1e-6, f"fixed point off by {gap:.3e}"


def test_a06_l2_geodesic_semidensity():
    """Geodesics of maps carry normalised semi-densities; rectangles agree."""
    base = FiniteMeasureSpace("abcdef", (0.05, 0.1, 0.15, 0.2, 0.22, 0.28))
    target = builtin_space("euclidean-2")
    w = base.weight_array()
    worst = 0.0
    for trial in range(1_000):
        rng = _stream(41, trial)
        f = L2Map(base, target, [target.random_point(rng, scale=1.0) for _ in base.atoms])
        g = L2Map(base, target, [target.random_point(rng, scale=1.0) for _ in base.atoms])
        _, dens = l2_geodesic(f, g, float(rng.uniform(0.0, 1.0)))
        total = float(w @ np.asarray(dens.alpha) ** 2)
        worst = max(worst, abs(total - 1.0))
    assert worst <= 1e-8, f"normalisation off by {worst:.3e}"

    # translating both endpoints by a common isometry yields a flat
    # rectangle, and both sides must report the same atom profile
    t_samples = np.linspace(0.0, 1.0, 9)
    worst = 0.0
    for trial in range(100):
        rng = _stream(43, trial)
        f0 = L2Map(base, target, [target.random_point(rng, scale=1.0) for _ in base.atoms])
        f1 = L2Map(base, target, [target.random_point(rng, scale=1.0) for _ in base.atoms])
        shift = target.make_isometry((np.eye(2), rng.normal(size=2)))
        g0 = L2Map(base, target, [shift(p) for p in f0.values])
        g1 = L2Map(base, target, [shift(p) for p in f1.values])
        for rep in rectangle_check((f0, f1), (g0, g1), t_samples=t_samples):
            worst = max(worst, abs(rep.defect))
    assert worst <= 1e-6, f"atom profile disagreement {worst:.3e}"


def test_a07_induced_action_isometry_and_composition():
    """Induced grid actions are isometric and compose, at two resolutions."""
    target = make_space({"kind": "euclidean", "dim": 1})
    gen = target.make_isometry((np.eye(1), np.array([1.0])))
    for grid in (8, 64):
        sc = LatticeScenario(grid_size=grid, target=target, generator=gen)
        action = InducedAction(sc)
        rng = np.random.default_rng(47)
        f = L2Map(sc.base, target,
                  [target.point(rng.normal(size=1)) for _ in range(grid)])
        g = L2Map(sc.base, target,
                  [target.point(rng.normal(size=1)) for _ in range(grid)])
        d0 = l2_distance(f, g)
        span = 3 * grid
        af = {j: induced_act(action, j / grid, f) for j in range(-span, span + 1)}
        ag = {j: induced_act(action, j / grid, g) for j in range(-span, span + 1)}
        iso_gap = max(abs(l2_distance(af[j], ag[j]) - d0) for j in af)
        assert iso_gap <= 1e-9, f"grid {grid}: isometry gap {iso_gap:.3e}"
        comp_gap = 0.0
        for j1 in range(-span, span + 1):
            for j2 in range(-span, span + 1):
                if abs(j1 + j2) > span:
                    continue
                two_step = induced_act(action, j1 / grid, af[j2])
                comp_gap = max(comp_gap, l2_distance(two_step, af[j1 + j2]))
        assert comp_gap <= 1e-8, f"grid {grid}: composition gap {comp_gap:.3e}"

    # return-word second moment: zero at the identity, grid-stable elsewhere
    sc64 = LatticeScenario(grid_size=64, target=target, generator=gen)
    sc128 = LatticeScenario(grid_size=128, target=target, generator=gen)
    zero64, coarse = square_integrability_estimate(sc64, [0.0, 2.5])
    zero128, fine = square_integrability_estimate(sc128, [0.0, 2.5])
    assert zero64 == 0.0 and zero128 == 0.0
    assert abs(coarse - fine) <= 0.02 * fine, f"estimates {coarse} vs {fine}"


def test_a08_commensurator_average_nonexpansion():
    """Averaging over one, two, and four commensurating moves is 1-Lipschitz."""
    base = FiniteMeasureSpace.uniform(5)
    target = builtin_space("euclidean-2")
    rot = rotation_about(target, 0.9, np.array([0.5, -0.2]))
    swirl = rotation_about(target, -1.3, np.array([0.0, 0.0]))
    shift = target.make_isometry((np.eye(2), np.array([1.0, 0.0])))
    flip = target.make_isometry((np.diag([1.0, -1.0]), np.array([0.0, 0.5])))
    family = [
        (rot, [1, 2, 3, 4, 0]),
        (shift, [0, 1, 2, 3, 4]),
        (swirl, [2, 3, 4, 0, 1]),
        (flip, [4, 3, 2, 1, 0]),
    ]
    for size in (1, 2, 4):
        A = family[:size]
        worst = -np.inf
        for trial in range(1_000):
            rng = _stream(53, trial)
            f = L2Map(base, target,
                      [target.random_point(rng, scale=1.0) for _ in range(5)])
            g = L2Map(base, target,
                      [target.random_point(rng, scale=1.0) for _ in range(5)])
            stretch = l2_distance(commensurator_average(A, f),
                                  commensurator_average(A, g)) - l2_distance(f, g)
            worst = max(worst, stretch)
        assert worst <= 1e-6, f"|A|={size}: expansion by {worst:.3e}"


def test_a09_splitting_scenarios():
    """Product splittings pass the rectangle, holonomy, and star checks."""
    for stem in ("split_rotation_blocks", "split_tree_line"):
        report = run_scenario(load_scenario(SCENARIOS / f"{stem}.json"))
        assert not report.failed, f"{stem}: {[r.name for r in report.failed]}"
        by_name = {r.name: r for r in report.records}
        for key in ("pythagoras_residual", "holonomy_residual",
                    "star_action_residual"):
            rec = by_name[key]
            assert rec.defect <= 1e-5, f"{stem}.{key}: {rec.defect:.3e}"
            assert rec.tolerance <= 1e-5, f"{stem}.{key}: tol {rec.tolerance}"


def test_a10_evanescence_scenarios():
    """Escape probes classify translation, rotation, and a trivial factor."""
    expected = {
        "evanescence_translation": "evanescent-witness",
        "evanescence_rotation": "non-evanescent-fit",
        "evanescence_trivial_factor": "evanescent-witness",
    }
    for stem, verdict in expected.items():
        report = run_scenario(load_scenario(SCENARIOS / f"{stem}.json"))
        assert not report.failed, f"{stem}: {[r.name for r in report.failed]}"
        by_name = {r.name: r for r in report.records}
        assert f"verdict {verdict}" in by_name["evanescence_verdict"].detail, (
            f"{stem}: {by_name['evanescence_verdict'].detail}"
        )
        if verdict == "non-evanescent-fit":
            rel = by_name["displacement_slope_relative_error"].defect
            assert rel <= 0.05, f"{stem}: slope off by {rel:.3%}"

    # the fitted slope agrees with the closed form for a unit rotation
    space = builtin_space("euclidean-2")
    rep = IsometryRep(space, {"r": rotation_about(space, 1.0, np.zeros(2))})
    verdict = evanescence_probe(rep, ["r"], space.point([0.0, 0.0]),
                                radii=[1.0, 2.0, 4.0, 8.0, 16.0, 32.0])
    assert verdict.verdict == "non-evanescent-fit"
    rel = abs(verdict.lam - ROTATION_SLOPE) / ROTATION_SLOPE
    assert rel <= 0.05, f"fitted slope {verdict.lam} vs {ROTATION_SLOPE}"


def test_a11_lattice_counterexample_scenario():
    """Dense-orbit lattice scenario: isometric action, dense projections."""
    report = run_scenario(load_scenario(SCENARIOS / "counterexample_lattice.json"))
    assert not report.failed, f"failed: {[r.name for r in report.failed]}"
    by_name = {r.name: r for r in report.records}
    iso = by_name["action_isometry_gap_max"]
    assert iso.defect <= 1e-9, f"isometry gap {iso.defect:.3e}"
    density = by_name["projection_density_gap_max"]
    assert density.defect < 0.05, f"max projection gap {density.defect:.4f}"
