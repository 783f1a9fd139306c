"""Task runners: one function per scenario task, plus the fuzz suite.

Randomness is counter-based: every trial draws from its own
``Philox(key=seed)`` stream jumped by the trial index, so results do not
depend on execution order and a thread pool (sized by the
``HADAMARD_LAB_THREADS`` environment variable) can split trials freely.
All per-invariant aggregation uses min/max, which is order-free.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from ..actions import evanescence_probe
from ..convex import (
    ConvexBody,
    barycenter,
    check_barycenter_contraction,
    check_barycenter_variance_bound,
    circumcenter,
    nested_circum_check,
    project,
)
from ..exceptions import EvanescenceDiagnostic
from ..induction import InducedAction, LatticeScenario, square_integrability_estimate
from ..l2 import FiniteMeasureSpace, L2Map, as_point, commensurator_average, l2_distance
from ..metric_core import check_cn, check_reshetnyak, distance, geodesic_point
from ..spaces import builtin_space
from ..spaces.base import ModelSpace
from ..spaces.euclidean import EuclideanSpace
from ..splitting import ProductAction, build_splitting
from .report import Record, Report
from .scenario import Scenario, ScenarioError, build_isometry

FUZZ_SPACES = ("euclidean-2", "hyperbolic-2", "tree-tripod", "spd-2",
               "product-tripod-line")
HEAVY_TRIAL_CAP = 100


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HADAMARD_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _stream(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(trial))


def _map_trials(fn: Callable[[int], object], trials: int) -> list:
    workers = _threads()
    if workers == 1 or trials < 8:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


# ---------------------------------------------------------------------------
# axioms


def _axiom_trial(space: ModelSpace, rng: np.random.Generator,
                 eps_list: Sequence[float]) -> dict:
    pts = [space.random_point(rng, 1.0) for _ in range(4)]
    x, c, cp, z = pts
    out = {"cn": check_cn(space, x, c, cp).defect}
    out["resh"] = min(
        check_reshetnyak(space, x, c, cp, z, eps).defect for eps in eps_list)
    dxy = distance(space, x, c)
    out["sym"] = abs(dxy - distance(space, c, x))
    out["tri"] = distance(space, x, c) + distance(space, c, z) - distance(space, x, z)
    m = geodesic_point(space, x, z, 0.5)
    half = distance(space, x, z) / 2.0
    out["mid"] = max(abs(distance(space, x, m) - half),
                     abs(distance(space, m, z) - half))
    return out


def task_axioms(sc: Scenario) -> list[Record]:
    space = sc.space
    trials = int(sc.params.get("trials", 400))
    eps_list = [float(e) for e in sc.params.get("eps", (0.1, 0.25, 0.5, 0.9))]

    rows = _map_trials(
        lambda t: _axiom_trial(space, _stream(sc.seed, t), eps_list), trials)
    records = [
        Record.bound("cn_defect_min", min(r["cn"] for r in rows),
                     sc.tol("cn", 1e-9), detail=f"{trials} trials"),
        Record.bound("reshetnyak_defect_min", min(r["resh"] for r in rows),
                     sc.tol("reshetnyak", 1e-9),
                     detail=f"{trials} trials x {len(eps_list)} eps"),
        Record.residual("symmetry_gap_max", max(r["sym"] for r in rows),
                        sc.tol("symmetry", 1e-9)),
        Record.bound("triangle_defect_min", min(r["tri"] for r in rows),
                     sc.tol("triangle", 1e-9)),
        Record.residual("midpoint_gap_max", max(r["mid"] for r in rows),
                        sc.tol("midpoint", 1e-9)),
    ]

    if sc.actions:
        worst = 0.0
        pair_rng = _stream(sc.seed, trials + 1)
        pairs = [(space.random_point(pair_rng, 1.0), space.random_point(pair_rng, 1.0))
                 for _ in range(max(8, trials // 10))]
        for rep in sc.actions:
            for g in rep.generators.values():
                for a, b in pairs:
                    worst = max(worst, abs(distance(space, g(a), g(b))
                                           - distance(space, a, b)))
        records.append(Record.residual(
            "action_isometry_gap_max", worst, sc.tol("isometry", 1e-9),
            detail=f"{len(pairs)} pairs per generator"))

    density = sc.params.get("density")
    if density:
        surd = math.sqrt(float(density.get("surd", 2)))
        span = int(density.get("range", 50))
        vals = sorted(
            math.modf(n + m * surd)[0] % 1.0
            for n in range(-span, span + 1)
            for m in range(-span, span + 1)
        )
        gaps = [b - a for a, b in zip(vals, vals[1:])]
        gaps.append(vals[0] + 1.0 - vals[-1])
        records.append(Record.residual(
            "projection_density_gap_max", max(gaps),
            float(density.get("max_gap", 0.05)),
            detail=f"{len(vals)} fractional parts"))
    return records


# ---------------------------------------------------------------------------
# circumcenter / barycenter


def _circum_trial(space: ModelSpace, rng: np.random.Generator, cloud: int) -> dict:
    pts = [space.random_point(rng, 1.0) for _ in range(cloud)]
    res = circumcenter(space, pts)
    cover = max(distance(space, res.center, p) for p in pts) - res.radius
    inner = ConvexBody(space, pts[: max(2, cloud // 2)], depth=2)
    outer = ConvexBody(space, pts, depth=2)
    nested = nested_circum_check(space, inner, outer).defect
    return {"cover": cover, "nested": nested}


def task_circumcenter(sc: Scenario) -> list[Record]:
    trials = int(sc.params.get("trials", 60))
    cloud = int(sc.params.get("cloud", 5))
    rows = _map_trials(
        lambda t: _circum_trial(sc.space, _stream(sc.seed, t), cloud), trials)
    return [
        Record.residual("circum_cover_excess_max",
                        max(r["cover"] for r in rows),
                        sc.tol("cover", 1e-6), detail=f"{trials} trials"),
        Record.bound("nested_circum_defect_min",
                     min(r["nested"] for r in rows),
                     sc.tol("nested", 1e-6)),
    ]


def task_barycenter(sc: Scenario) -> list[Record]:
    space = sc.space
    trials = int(sc.params.get("trials", 150))
    size = int(sc.params.get("tuple", 4))

    def trial(t: int) -> dict:
        rng = _stream(sc.seed, t)
        xs = [space.random_point(rng, 1.0) for _ in range(size)]
        ys = [space.random_point(rng, 1.0) for _ in range(size)]
        w = rng.random(size)
        w /= w.sum()
        out = {
            "contract": check_barycenter_contraction(space, xs, ys, w).defect,
            "variance": check_barycenter_variance_bound(space, xs, ys, w).defect,
        }
        if isinstance(space, EuclideanSpace):
            mean = sum(wi * np.asarray(p.coords) for wi, p in zip(w, xs))
            out["mean_gap"] = float(
                np.linalg.norm(barycenter(space, xs, w).point.coords - mean))
        return out

    rows = _map_trials(trial, trials)
    records = [
        Record.bound("barycenter_contraction_defect_min",
                     min(r["contract"] for r in rows),
                     sc.tol("contraction", 1e-6), detail=f"{trials} trials"),
        Record.bound("barycenter_variance_defect_min",
                     min(r["variance"] for r in rows),
                     sc.tol("variance", 1e-6)),
    ]
    if isinstance(space, EuclideanSpace):
        records.append(Record.residual(
            "barycenter_mean_gap_max", max(r["mean_gap"] for r in rows),
            sc.tol("mean", 1e-9)))
    return records


# ---------------------------------------------------------------------------
# evanescence


def task_evanescence(sc: Scenario) -> list[Record]:
    if not sc.actions:
        raise ScenarioError("evanescence task needs one action")
    rep = sc.actions[0]
    params = sc.params
    qs = params.get("Q", list(rep.generators))
    x0 = (sc.space.point_from_jsonable(params["x0"]) if "x0" in params
          else sc.space.base_point())
    radii = [float(r) for r in params.get("radii", (1, 2, 4, 8, 16, 32))]
    verdict = evanescence_probe(rep, qs, x0, radii,
                                directions=int(params.get("directions", 64)))
    records = []
    expect = params.get("expect")
    detail = f"verdict {verdict.verdict}"
    if verdict.lam is not None:
        detail += f", slope {verdict.lam:.6g}"
    if verdict.bound is not None:
        detail += f", bound {verdict.bound:.6g}"
    if expect:
        records.append(Record.flag("evanescence_verdict",
                                   verdict.verdict == expect, detail=detail))
    else:
        records.append(Record.flag("evanescence_probe_ran", True, detail=detail))
    target = params.get("lambda_target")
    if target is not None:
        lam = verdict.lam if verdict.lam is not None else 0.0
        rel = abs(lam - float(target)) / max(abs(float(target)), 1e-30)
        records.append(Record.residual(
            "displacement_slope_relative_error", rel,
            float(params.get("lambda_rel_tol", 0.05)),
            detail=f"fitted {lam:.8g} target {float(target):.8g}"))
    return records


# ---------------------------------------------------------------------------
# induction


def _lattice_from_params(sc: Scenario, grid_size: int) -> LatticeScenario:
    if "gamma" not in sc.params:
        raise ScenarioError("induction tasks need params.gamma")
    gamma = build_isometry(sc.space, sc.params["gamma"])
    return LatticeScenario(grid_size, sc.space, gamma,
                           word_cap=int(sc.params.get("word_cap", 64)))


def task_induce(sc: Scenario) -> list[Record]:
    sizes = sc.params.get("N", 8)
    sizes = [int(n) for n in (sizes if isinstance(sizes, list) else [sizes])]
    word_len = int(sc.params.get("word_length", 3))
    n_maps = int(sc.params.get("maps", 3))
    records = []
    for grid_size in sizes:
        scen = _lattice_from_params(sc, grid_size)
        action = InducedAction(scen)
        big = action.space
        rng = _stream(sc.seed, grid_size)
        maps = [
            as_point(big, L2Map(scen.base, scen.target,
                                [scen.target.random_point(rng, 1.0)
                                 for _ in range(grid_size)]))
            for _ in range(n_maps)
        ]
        elements = [j / grid_size for j in range(-word_len, word_len + 1)]
        isos = {j: action.isometry(j / grid_size)
                for j in range(-2 * word_len, 2 * word_len + 1)}

        iso_gap = 0.0
        for j in range(-word_len, word_len + 1):
            for a in maps:
                for b in maps:
                    iso_gap = max(iso_gap, abs(
                        distance(big, isos[j](a), isos[j](b))
                        - distance(big, a, b)))
        comp_gap = 0.0
        for j in range(-word_len, word_len + 1):
            for k in range(-word_len, word_len + 1):
                combined = isos[j + k]
                for a in maps:
                    comp_gap = max(comp_gap, distance(
                        big, combined(a), isos[j](isos[k](a))))
        records.append(Record.residual(
            f"induced_isometry_gap_max_N{grid_size}", iso_gap,
            sc.tol("isometry", 1e-9),
            detail=f"{len(elements)} grid elements, {n_maps} maps"))
        records.append(Record.residual(
            f"induced_composition_gap_max_N{grid_size}", comp_gap,
            sc.tol("composition", 1e-8)))
    return records


def task_sqint(sc: Scenario) -> list[Record]:
    g_values = [float(g) for g in sc.params.get("g_values", (0.0,))]
    sizes = sc.params.get("N", [64, 128])
    sizes = [int(n) for n in (sizes if isinstance(sizes, list) else [sizes])]
    records = []
    estimates = {}
    for grid_size in sizes:
        scen = _lattice_from_params(sc, grid_size)
        estimates[grid_size] = square_integrability_estimate(scen, g_values)
    for i, g in enumerate(g_values):
        if g == 0.0:
            worst = max(abs(estimates[n][i]) for n in sizes)
            records.append(Record.residual(
                "sqint_zero_element_exact", worst, 0.0,
                detail="estimate at the identity"))
    if len(sizes) >= 2:
        rel_tol = float(sc.params.get("stability_rel_tol", 0.02))
        worst_rel = 0.0
        for i, g in enumerate(g_values):
            vals = [estimates[n][i] for n in sizes]
            ref = max(abs(v) for v in vals)
            if ref > 0:
                worst_rel = max(worst_rel, (max(vals) - min(vals)) / ref)
        records.append(Record.residual(
            "sqint_grid_stability_rel", worst_rel, rel_tol,
            detail=f"sizes {sizes}, elements {g_values}"))
    for grid_size in sizes:
        detail = ", ".join(f"g={g}: {v:.6g}"
                           for g, v in zip(g_values, estimates[grid_size]))
        records.append(Record.flag(f"sqint_values_N{grid_size}", True, detail=detail))
    return records


# ---------------------------------------------------------------------------
# commensurator averaging


def task_average(sc: Scenario) -> list[Record]:
    atoms = int(sc.params.get("atoms", 4))
    trials = int(sc.params.get("trials", 100))
    sets = sc.params.get("sets")
    if not sets:
        raise ScenarioError("average task needs params.sets")
    base = FiniteMeasureSpace.uniform(atoms)
    records = []
    for idx, desc in enumerate(sets):
        family = [(build_isometry(sc.space, el["iso"]),
                   [int(j) for j in el.get("perm", range(atoms))])
                  for el in desc]

        def trial(t: int, family=family) -> float:
            rng = _stream(sc.seed, t)
            f = L2Map(base, sc.space,
                      [sc.space.random_point(rng, 1.0) for _ in range(atoms)])
            g = L2Map(base, sc.space,
                      [sc.space.random_point(rng, 1.0) for _ in range(atoms)])
            before = l2_distance(f, g)
            after = l2_distance(commensurator_average(family, f),
                                commensurator_average(family, g))
            return before - after

        worst = min(_map_trials(trial, trials))
        records.append(Record.bound(
            f"average_nonexpansion_defect_min_size{len(family)}", worst,
            sc.tol("nonexpansion", 1e-6), detail=f"{trials} pairs"))
    return records


# ---------------------------------------------------------------------------
# splitting


def task_split(sc: Scenario) -> list[Record]:
    if len(sc.actions) != 2:
        raise ScenarioError("split task needs exactly two actions")
    seeds = [sc.space.point_from_jsonable(p) for p in sc.params.get("seeds", [])]
    if not seeds:
        raise ScenarioError("split task needs params.seeds")
    action = ProductAction(sc.actions)
    tol = sc.tol("splitting", 1e-5)
    try:
        result = build_splitting(action, seeds, tol=tol)
    except EvanescenceDiagnostic as diag:
        return [Record.flag("splitting_diagnostic", False, detail=str(diag))]
    records = [
        Record.residual("minimal_set_invariance", result.base.invariance_residual,
                        tol, detail=f"{len(result.components)} components"),
        Record.residual("pythagoras_residual", result.pythagoras_residual, tol),
        Record.residual("holonomy_residual", result.holonomy_residual, tol),
        Record.residual("star_action_residual", result.star_residual, tol),
    ]
    if result.parallel_reports:
        records.append(Record.residual(
            "parallel_transport_max", max(r.lhs for r in result.parallel_reports),
            tol, detail=f"{len(result.parallel_reports)} pairs"))
    for note in result.diagnostics:
        records.append(Record.flag("splitting_contradiction", False, detail=note))
    return records


TASKS: dict[str, Callable[[Scenario], list]] = {
    "axioms": task_axioms,
    "circumcenter": task_circumcenter,
    "barycenter": task_barycenter,
    "evanescence": task_evanescence,
    "induce": task_induce,
    "average": task_average,
    "split": task_split,
    "sqint": task_sqint,
}

TASK_NAMES = tuple(TASKS)


def run_scenario(sc: Scenario, *, trials_override: int | None = None,
                 seed_override: int | None = None,
                 tol_overrides: dict | None = None) -> Report:
    if seed_override is not None:
        sc.seed = int(seed_override)
    if trials_override is not None:
        sc.params["trials"] = int(trials_override)
    if tol_overrides:
        sc.tolerances.update(tol_overrides)
    records = TASKS[sc.task](sc)
    return Report(task=sc.task, seed=sc.seed, records=records,
                  scenario_name=sc.name, scenario_echo=sc.raw)


# ---------------------------------------------------------------------------
# fuzz suite


def _fuzz_space(name: str, trials: int, seed: int, offset: int) -> list[Record]:
    space = builtin_space(name)
    heavy = min(trials, HEAVY_TRIAL_CAP)

    def cheap(t: int) -> dict:
        rng = _stream(seed, offset + t)
        return _axiom_trial(space, rng, (0.25,))

    def heavy_trial(t: int) -> dict:
        rng = _stream(seed, offset + trials + t)
        pts = [space.random_point(rng, 1.0) for _ in range(4)]
        # segment body keeps the projection on its cheap two-point path
        body = ConvexBody(space, pts[:2], depth=2)
        x, y = space.random_point(rng, 1.5), space.random_point(rng, 1.5)
        lip = distance(space, x, y) - distance(space, project(space, body, x),
                                               project(space, body, y))
        res = circumcenter(space, pts)
        cover = max(distance(space, res.center, p) for p in pts) - res.radius
        nested = nested_circum_check(space, ConvexBody(space, pts[:2], depth=1),
                                     ConvexBody(space, pts, depth=1)).defect
        ys = [space.random_point(rng, 1.0) for _ in range(4)]
        w = rng.random(4)
        w /= w.sum()
        return {
            "lip": lip,
            "cover": cover,
            "nested": nested,
            "contract": check_barycenter_contraction(space, pts, ys, w).defect,
            "variance": check_barycenter_variance_bound(space, pts, ys, w).defect,
        }

    rows = _map_trials(cheap, trials)
    heavy_rows = _map_trials(heavy_trial, heavy)
    d = f"{trials} trials"
    hd = f"{heavy} trials"
    return [
        Record.bound(f"{name}.cn_defect_min",
                     min(r["cn"] for r in rows), 1e-9, detail=d),
        Record.bound(f"{name}.reshetnyak_defect_min",
                     min(r["resh"] for r in rows), 1e-9, detail=d),
        Record.bound(f"{name}.triangle_defect_min",
                     min(r["tri"] for r in rows), 1e-9, detail=d),
        Record.residual(f"{name}.midpoint_gap_max",
                        max(r["mid"] for r in rows), 1e-9, detail=d),
        Record.bound(f"{name}.projection_lipschitz_defect_min",
                     min(r["lip"] for r in heavy_rows), 1e-6, detail=hd),
        Record.residual(f"{name}.circum_cover_excess_max",
                        max(r["cover"] for r in heavy_rows), 1e-6, detail=hd),
        Record.bound(f"{name}.nested_circum_defect_min",
                     min(r["nested"] for r in heavy_rows), 1e-6, detail=hd),
        Record.bound(f"{name}.barycenter_contraction_defect_min",
                     min(r["contract"] for r in heavy_rows), 1e-6, detail=hd),
        Record.bound(f"{name}.barycenter_variance_defect_min",
                     min(r["variance"] for r in heavy_rows), 1e-6, detail=hd),
    ]


def run_fuzz(space_names: Sequence[str] | None = None, trials: int = 100,
             seed: int = 0) -> Report:
    """Invariant sweep across spaces; deterministic for a given seed.

    Distance-only invariants run the full trial count; solver-backed ones
    (projection, circumcentre, barycentre) cap at 100 trials each so the
    sweep stays inside the runtime budget.
    """
    if trials < 1:
        raise ScenarioError("trials must be at least 1")
    names = list(space_names) if space_names else list(FUZZ_SPACES)
    records = []
    for i, name in enumerate(names):
        records.extend(_fuzz_space(name, trials, seed, offset=i * 50_000_000))
    return Report(task="fuzz", seed=seed, records=records,
                  scenario_name="fuzz: " + ",".join(names),
                  scenario_echo={"spaces": names, "trials": trials})
