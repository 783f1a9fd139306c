import numpy as np
import time

from hadamardlab.spaces import make_space, builtin_space
from hadamardlab.spaces.euclidean import rotation_about
from hadamardlab.actions import IsometryRep
from hadamardlab.convex import ConvexBody
from hadamardlab.splitting import (
    ProductAction, MinimalSetResult, minimal_invariant_set,
    parallel_transport_check, holonomy_check, build_splitting,
    component_distance,
)
from hadamardlab.metric_core import distance
from hadamardlab.exceptions import PreconditionError, EvanescenceDiagnostic

E2 = make_space({"kind": "euclidean", "dim": 2})

# 1. C4 rotations, seed (1,0) -> {(0,0)}
rot = rotation_about(E2, np.pi / 2, [0.0, 0.0])
G1 = IsometryRep(E2, {"r": rot})
triv = IsometryRep(E2, {"e": E2.identity_isometry()})
act = ProductAction([G1, triv])
t0 = time.perf_counter()
res = minimal_invariant_set(act, 0, E2.point([1.0, 0.0]))
t1 = time.perf_counter()
ctr = res.body.samples[0]
print("C4 minimal:", ctr.coords, "diam", res.body.diameter_estimate(),
      "resid", res.invariance_residual, "rounds", len(res.shrink_log),
      f"{(t1-t0)*1e3:.1f}ms")
assert np.allclose(ctr.coords, [0, 0], atol=1e-9) and res.body.diameter_estimate() < 1e-9

# 2. trivial G1 -> {seed}
res2 = minimal_invariant_set(ProductAction([triv, G1]), 0, E2.point([3.0, 4.0]))
print("trivial G1:", res2.body.samples[0].coords, "diam", res2.body.diameter_estimate())
assert np.allclose(res2.body.samples[0].coords, [3, 4]) and res2.body.diameter_estimate() == 0.0

# 3. reflection x1 -> -x1, seed (1,5) -> {(0,5)}
refl = E2.make_isometry((np.diag([-1.0, 1.0]), np.zeros(2)))
G1r = IsometryRep(E2, {"s": refl})
res3 = minimal_invariant_set(ProductAction([G1r, triv]), 0, E2.point([1.0, 5.0]))
print("reflection minimal:", res3.body.samples[0].coords, "diam", res3.body.diameter_estimate())
assert np.allclose(res3.body.samples[0].coords, [0, 5], atol=1e-9)

# 4. parallel lines heights 0 and 3
def seg(y):
    return MinimalSetResult(
        body=ConvexBody(E2, [E2.point([-2.0, y]), E2.point([2.0, y])], depth=4),
        invariance_residual=0.0)

rep = parallel_transport_check(seg(0.0), seg(3.0))
print("parallel lines:", rep.label, "gap", rep.context["gap"], "worst", rep.lhs, "passed", rep.passed(1e-6))
assert abs(rep.context["gap"] - 3.0) < 1e-9 and rep.passed(1e-9)

rep_same = parallel_transport_check(seg(1.0), seg(1.0))
print("same component: gap", rep_same.context["gap"], "worst", rep_same.lhs)
assert rep_same.context["gap"] < 1e-12

# non-parallel -> PreconditionError
tilt = MinimalSetResult(
    body=ConvexBody(E2, [E2.point([-2.0, 0.0]), E2.point([2.0, 2.0])], depth=4),
    invariance_residual=0.0)
try:
    parallel_transport_check(seg(0.0), tilt)
    print("FAIL: no precondition error")
except PreconditionError as e:
    print("non-parallel raises:", str(e)[:60])

# 5. holonomy of three parallel lines in R3
E3 = make_space({"kind": "euclidean", "dim": 3})
def seg3(y, z):
    return MinimalSetResult(
        body=ConvexBody(E3, [E3.point([-2.0, y, z]), E3.point([2.0, y, z])], depth=4),
        invariance_residual=0.0)
h = holonomy_check(seg3(0, 0), seg3(3, 0), seg3(0, 4))
print("holonomy 3 lines:", h.lhs, "passed", h.passed(1e-5))
assert h.passed(1e-5)
h0 = holonomy_check(seg3(1, 1), seg3(1, 1), seg3(1, 1))
assert h0.lhs < 1e-12

# 6. C4 x C4 factorwise on R2 x R2
P = make_space({"kind": "product", "factors": [
    {"kind": "euclidean", "dim": 2}, {"kind": "euclidean", "dim": 2}], "weights": [1.0, 1.0]})
F0, F1 = P.factors
r0 = P.factorwise_isometry([rotation_about(F0, np.pi / 2, [0.0, 0.0]), F1.identity_isometry()])
r1 = P.factorwise_isometry([F0.identity_isometry(), rotation_about(F1, np.pi / 2, [0.0, 0.0])])
act44 = ProductAction([IsometryRep(P, {"a": r0}), IsometryRep(P, {"b": r1})])
seeds = [P.from_factors([F0.point([1.0, 0.0]), F1.point([0.5, 0.25])])]
t0 = time.perf_counter()
split = build_splitting(act44, seeds)
t1 = time.perf_counter()
print("C4xC4: components", len(split.components),
      "pyth", split.pythagoras_residual, "hol", split.holonomy_residual,
      "star", split.star_residual, "diag", split.diagnostics, f"{(t1-t0)*1e3:.0f}ms")
for c in split.components:
    print("   comp:", [np.round(x.coords[0], 6).tolist() for x in c.body.samples[:1]],
          [np.round(x.coords[1], 6).tolist() for x in c.body.samples[:1]])
assert split.pythagoras_residual <= 1e-6
assert split.holonomy_residual <= 1e-6
assert split.star_residual <= 1e-6 and not split.diagnostics

# 7. tree autos x reflection on tripod x R
TP = builtin_space("product-tripod-line")
T, L = TP.factors
autos = [a for a in T.automorphisms()]
print("tripod autos:", autos)
nontriv = [a for a in autos if any(k != v for k, v in a.items())]
gens = {f"a{i}": TP.factorwise_isometry([T.make_isometry(a), L.identity_isometry()])
        for i, a in enumerate(nontriv[:2])}
reflL = TP.factorwise_isometry([T.identity_isometry(),
                                L.make_isometry((np.array([[-1.0]]), np.zeros(1)))])
actTL = ProductAction([IsometryRep(TP, gens), IsometryRep(TP, {"s": reflL})])
seedsTL = [TP.from_factors([T.vertex("a"), L.point([1.0])]),
           TP.from_factors([T.vertex("b"), L.point([2.0])])]
t0 = time.perf_counter()
splitTL = build_splitting(actTL, seedsTL)
t1 = time.perf_counter()
print("tripodxR: components", len(splitTL.components),
      "pyth", splitTL.pythagoras_residual, "hol", splitTL.holonomy_residual,
      "star", splitTL.star_residual, f"{(t1-t0)*1e3:.0f}ms")
# product metric recovery: component distance vs built-in line distance
cs = splitTL.components
for i in range(len(cs)):
    for j in range(i + 1, len(cs)):
        D = component_distance(TP, cs[i], cs[j])
        ti = cs[i].body.samples[0].coords[1][0]
        tj = cs[j].body.samples[0].coords[1][0]
        print(f"   D(comp{i},comp{j}) = {D:.9f} vs |t_i - t_j| = {abs(ti-tj):.9f}")
        assert abs(D - abs(ti - tj)) < 1e-5
assert splitTL.pythagoras_residual <= 1e-5 and splitTL.holonomy_residual <= 1e-5

# 8. G2 trivial -> single component
split1 = build_splitting(ProductAction([G1, triv]), [E2.point([1.0, 0.0])])
print("G2 trivial: components", len(split1.components), "pyth", split1.pythagoras_residual)
assert len(split1.components) == 1

# 9. unbounded orbit -> evanescence diagnostic
trans = E2.make_isometry((np.eye(2), np.array([1.0, 0.0])))
try:
    minimal_invariant_set(ProductAction([IsometryRep(E2, {"t": trans}), triv]),
                          0, E2.point([0.0, 0.0]))
    print("FAIL: no evanescence diagnostic")
except EvanescenceDiagnostic as e:
    print("translation orbit raises:", str(e)[:60])

print("all splitting checks passed")
