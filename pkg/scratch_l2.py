import numpy as np
from hadamardlab import builtin_space, make_space
from hadamardlab.l2 import (
    FiniteMeasureSpace, L2Map, SemiDensity, as_point, barycenter_map,
    commensurator_average, from_point, l2_distance, l2_geodesic, l2_space,
    rectangle_check,
)
from hadamardlab.induction import (
    InducedAction, LatticeScenario, induced_act, square_integrability_estimate,
    induction_transfer_chain,
)
from hadamardlab.metric_core import distance

E1 = make_space({"kind": "euclidean", "dim": 1})
E2 = builtin_space("euclidean-2")
T = builtin_space("tree-tripod")

# l2_distance example: two atoms weight 1/2, distances 3 and 4 -> sqrt(12.5)
base2 = FiniteMeasureSpace(("a", "b"), (0.5, 0.5))
f = L2Map(base2, E2, [E2.point([0, 0]), E2.point([0, 0])])
fp = L2Map(base2, E2, [E2.point([3, 0]), E2.point([0, 4])])
print("l2 distance:", l2_distance(f, fp), "expect", np.sqrt(12.5))
print("constant maps:", l2_distance(L2Map.constant(base2, E2, E2.point([1, 1])),
                                    L2Map.constant(base2, E2, E2.point([4, 5]))), "expect 5")

# geodesic + semi-density
g, alpha = l2_geodesic(f, fp, 0.5)
print("midpoint comps:", [tuple(v.coords) for v in g.values])
print("alpha:", alpha.alpha, "check sum:", 0.5 * alpha.alpha[0] ** 2 + 0.5 * alpha.alpha[1] ** 2)
gq, _ = l2_geodesic(f, fp, 0.3)
print("speed check:", l2_distance(f, gq), "expect", 0.3 * l2_distance(f, fp))

# degenerate
gd, ad = l2_geodesic(f, f, 0.7)
print("degenerate alpha:", ad.alpha)

# barycenter_map: tree target, two atoms on two tripod leaves -> path midpoint
tf = L2Map(base2, T, [T.edge_point(0, 1.0), T.edge_point(1, 1.0)])
bm = barycenter_map(tf)
print("tree bary map:", bm.coords, "(expect vertex o / midpoint of 2-path = branch)")

base2w = FiniteMeasureSpace(("a", "b"), (0.25, 0.75))
tfw = L2Map(base2w, T, [T.edge_point(0, 1.0), T.edge_point(1, 1.0)])
bmw = barycenter_map(tfw)
print("weighted tree bary map:", bmw.coords, "(expect on edge 1: minimize .25(1+s)^2+.75(1-s)^2 -> s=0.5)")

# rectangle check: parallel segments in R2
f1 = L2Map(base2, E2, [E2.point([0, 0]), E2.point([0, 1])])
f1p = L2Map(base2, E2, [E2.point([2, 0]), E2.point([2, 1])])
f2 = L2Map(base2, E2, [E2.point([0, 5]), E2.point([0, 6])])
f2p = L2Map(base2, E2, [E2.point([2, 5]), E2.point([2, 6])])
reps = rectangle_check((f1, f1p), (f2, f2p))
print("rectangle defects:", [(r.label, round(r.lhs, 12), r.passed()) for r in reps])

# non-rectangle -> PreconditionError
from hadamardlab.exceptions import PreconditionError
f3 = L2Map(base2, E2, [E2.point([4, 0]), E2.point([0, 9])])
try:
    rectangle_check((f1, f1p), (f1, f3))
    print("precondition NOT raised (bad)")
except PreconditionError as e:
    print("precondition ok:", e)

# induced action: N=8, target R, gamma = +1
gamma = E1.make_isometry((np.eye(1), np.array([1.0])))
sc = LatticeScenario(8, E1, gamma)
act = InducedAction(sc)
vals = [E1.point([float(j)]) for j in range(8)]  # f(j/8) = j
fmap = L2Map(sc.base, E1, vals)

h0 = induced_act(act, 0.0, fmap)
print("h=0 identity:", l2_distance(h0, fmap))

h1 = induced_act(act, 1.0, fmap)   # lattice element: pointwise gamma
print("h=1 values:", [float(v.coords[0]) for v in h1.values], "(expect j+1 each)")

h38 = induced_act(act, 3.0 / 8.0, fmap)
print("h=3/8 values:", [float(v.coords[0]) for v in h38.values],
      "(expect [5+1,6+1,7+1,0,1,2,3,4])")

# isometric + composes via perm isometries
iso38 = act.isometry(3.0 / 8.0)
iso28 = act.isometry(2.0 / 8.0)
comp = iso38.compose(iso28)
direct = act.isometry(5.0 / 8.0)
pt = as_point(act.space, fmap)
print("compose err:", distance(act.space, comp(pt), direct(pt)))
fm2 = L2Map(sc.base, E1, [E1.point([float(j * j % 5)]) for j in range(8)])
print("isometric err:", abs(l2_distance(induced_act(act, 3 / 8, fmap), induced_act(act, 3 / 8, fm2))
                            - l2_distance(fmap, fm2)))

# square integrability: g=0 -> 0; g=2.5 -> 6.5
print("sqint:", square_integrability_estimate(sc, [0.0, 2.5]), "(expect [0.0, 6.5])")

# N stability 64 vs 128
sc64 = LatticeScenario(64, E1, gamma)
sc128 = LatticeScenario(128, E1, gamma)
e64 = square_integrability_estimate(sc64, [2.5])[0]
e128 = square_integrability_estimate(sc128, [2.5])[0]
print("sqint N=64:", e64, "N=128:", e128, "rel gap:", abs(e64 - e128) / e64)

# commensurator average: A = {e} identity; two translations -> midpoint average
ident = E1.make_isometry((np.eye(1), np.zeros(1)))
idx_id = list(range(8))
favg = commensurator_average([(ident, idx_id)], fmap)
print("F_{e} identity:", l2_distance(favg, fmap))
t2 = E1.make_isometry((np.eye(1), np.array([2.0])))
t4 = E1.make_isometry((np.eye(1), np.array([4.0])))
favg2 = commensurator_average([(t2, idx_id), (t4, idx_id)], fmap)
print("F_{t2,t4} first values:", [float(v.coords[0]) for v in favg2.values[:3]], "(expect j+3)")

# transfer chain
ladder = [L2Map(sc.base, E1, [E1.point([float(n)]) for _ in range(8)]) for n in (1, 2, 4, 8)]
rep = induction_transfer_chain(act, ladder, [1, 2])
print("chain contraction ok:", rep.contraction_ok, "gaps max:", max(max(r) for r in rep.equivariance_gaps))
print("bar disp row m=1:", rep.bar_displacements[0], "l2 disp:", rep.l2_displacements[0])
print("l2 spread:", rep.l2_spread)
