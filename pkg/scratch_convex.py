import time
import numpy as np
from hadamardlab import builtin_space
from hadamardlab.convex import (
    ConvexBody, barycenter, circumcenter, convex_body, dyadic_hull,
    fixed_point_nonexpanding, nested_circum_check, project,
)
from hadamardlab.metric_core import distance, geodesic_point
from hadamardlab.spaces.euclidean import rotation_about

E2 = builtin_space("euclidean-2")
H2 = builtin_space("hyperbolic-2")
T = builtin_space("tree-tripod")
S = builtin_space("spd-2")
PT = builtin_space("product-tripod-line")

# hull counts: segment depth 2 -> 5 samples
seg = dyadic_hull(E2, [E2.point([0, 0]), E2.point([1, 0])], 2)
print("segment depth-2 samples:", len(seg))

# projection onto a Euclidean triangle vs closed form
tri = convex_body(E2, [E2.point([0, 0]), E2.point([2, 0]), E2.point([0, 2])], depth=3)
x = E2.point([2.0, 2.0])
p = project(E2, tri, x)
print("euclid proj:", p.coords, "expect [1,1]", "err=", np.linalg.norm(np.asarray(p.coords) - [1, 1]))
x2 = E2.point([-1.0, 0.7])
p2 = project(E2, tri, x2)
print("euclid proj2:", p2.coords, "expect [0,0.7] err=", np.linalg.norm(np.asarray(p2.coords) - [0, 0.7]))

# segment projection in H2
a, b = H2.lift([0.0, 0.0]), H2.lift([1.2, 0.0])
segbody = convex_body(H2, [a, b], depth=1)
q = H2.lift([0.6, 0.8])
pr = project(H2, segbody, q)
# foot should be near spatial x ~ 0.6-ish; check stationarity instead
ts = np.linspace(0, 1, 2001)
ds = [distance(H2, q, geodesic_point(H2, a, b, t)) for t in ts]
tbest = ts[int(np.argmin(ds))]
print("H2 seg proj resid:", distance(H2, q, pr), "grid best:", min(ds), "diff:", distance(H2, q, pr) - min(ds))

# circumcenter: euclidean exact
pts = [E2.point([1, 0]), E2.point([-1, 0]), E2.point([0, 0.5])]
res = circumcenter(E2, pts)
print("euclid circ:", res.center.coords, "r=", res.radius, "(expect [0,0] r=1... actually smallest ball of these: diameter pair (1,0),(-1,0) mid 0 r 1; (0,0.5) inside -> [0,0] r=1)")

# tree circumcenter: tripod leaves at 1,1,2 (long third leg)
from hadamardlab import make_space
T = make_space({"kind": "tree", "edges": [["o", "a", 1.0], ["o", "b", 1.0], ["o", "c", 2.0]]})
ta = T.edge_point(0, 1.0); tb = T.edge_point(1, 1.0); tc = T.edge_point(2, 2.0)
res_t = circumcenter(T, [ta, tb, tc])
print("tree circ:", res_t.center.coords, "r=", res_t.radius, "(expect edge 2 offset 0.5, r=1.5)")

# H2 circumcenter of a symmetric triple: center should be near lift(0,0)
ang = np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])
ppts = [H2.lift([0.9 * np.cos(t), 0.9 * np.sin(t)]) for t in ang]
t0 = time.perf_counter()
res_h = circumcenter(H2, ppts)
t1 = time.perf_counter()
dists = [distance(H2, res_h.center, p) for p in ppts]
print("H2 circ r=", res_h.radius, "spread=", max(dists) - min(dists), "time(ms)=", (t1 - t0) * 1e3)

# SPD circumcenter symmetric-ish pair+1
A = S.point([[2, 0], [0, 1]]); B = S.point([[1, 0], [0, 2]]); C = S.point([[1.5, 0.3], [0.3, 1.5]])
t0 = time.perf_counter()
res_s = circumcenter(S, [A, B, C])
t1 = time.perf_counter()
ds_ = [distance(S, res_s.center, p) for p in [A, B, C]]
print("SPD circ r=", res_s.radius, "dists=", np.round(ds_, 8), "time(ms)=", (t1 - t0) * 1e3)

# chart roundtrips
for sp, pt_pair in [(H2, (H2.lift([0.3, -0.2]), H2.lift([1.1, 0.7]))),
                    (S, (A, C))]:
    cpt, other = pt_pair
    V = sp.log_chart(cpt, [other])
    back = sp.exp_chart(cpt, V[0])
    print(type(sp).__name__, "chart roundtrip err:", distance(sp, back, other),
          "norm vs dist:", abs(np.linalg.norm(V[0]) - distance(sp, cpt, other)))

# flat SEB vs brute force over support subsets
from hadamardlab.convex import _circum_flat, _ball_of_support
import itertools
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(60):
    P = rng.normal(size=(rng.integers(2, 9), rng.integers(2, 5)))
    c_fw, r_fw = _circum_flat(P)
    best_r = np.inf
    for k in range(1, min(len(P), P.shape[1] + 1) + 1):
        for sub in itertools.combinations(range(len(P)), k):
            c_s, _ = _ball_of_support(P[list(sub)])
            r_s = np.max(np.linalg.norm(P - c_s, axis=1))
            best_r = min(best_r, r_s)
    worst = max(worst, abs(r_fw - best_r))
print("flat SEB worst radius gap vs brute:", worst)

# product tree x line circumcenter
Tb = builtin_space("tree-tripod")
ba = Tb.edge_point(0, 1.0); bb = Tb.edge_point(1, 1.0); bc = Tb.edge_point(2, 1.0)
line = PT.factors[1]
ppts2 = [PT.from_factors([ba, line.point([0.0])]), PT.from_factors([bb, line.point([1.0])]),
         PT.from_factors([bc, line.point([-0.5])])]
t0 = time.perf_counter()
res_p = circumcenter(PT, ppts2)
t1 = time.perf_counter()
dp = [distance(PT, res_p.center, p) for p in ppts2]
print("prod circ r=", res_p.radius, "dists=", np.round(dp, 7), "time(ms)=", (t1 - t0) * 1e3)

# nested circum on E2
inner = convex_body(E2, [E2.point([0, 0]), E2.point([1, 0])], depth=2)
outer = convex_body(E2, [E2.point([0, 0]), E2.point([1, 0]), E2.point([0.5, 1.5])], depth=2)
rep = nested_circum_check(E2, inner, outer)
print("nested:", rep.label, "lhs=", rep.lhs, "rhs=", rep.rhs, "defect=", rep.defect, "passed:", rep.passed())

# barycenter euclid = mean
bpts = [E2.point([0, 0]), E2.point([1, 0]), E2.point([0, 1])]
bc = barycenter(E2, bpts)
print("euclid bary:", bc.coords, "expect [1/3,1/3]")
bc_w = barycenter(E2, bpts, weights=[0.5, 0.25, 0.25])
print("weighted:", bc_w.coords, "expect [0.25,0.25]")

# tree barycenter vs brute grid (on the 1,1,2 tripod)
tpts = [ta, tb, tc]
bt = barycenter(T, tpts)
grid_best, grid_val = None, np.inf
for eidx in range(3):
    L = T.edges[eidx][2]
    for s in np.linspace(0, L, 4001):
        pt_ = T.edge_point(eidx, s)
        v = sum(distance(T, pt_, q_) ** 2 for q_ in tpts) / 3
        if v < grid_val:
            grid_val, grid_best = v, pt_
vb = sum(distance(T, bt, q_) ** 2 for q_ in tpts) / 3
print("tree bary:", bt.coords, "val=", vb, "grid val=", grid_val, "gap=", vb - grid_val)

# H2 barycenter stationarity: symmetric triple -> center
bh = barycenter(H2, ppts)
print("H2 bary spatial:", np.round(np.asarray(bh.coords)[1:], 9), "(expect ~0,0)")

# SPD bary of {diag(2,1), diag(1,2)} should be geodesic midpoint
bs = barycenter(S, [A, B])
mid = geodesic_point(S, A, B, 0.5)
print("SPD bary vs midpoint:", distance(S, bs, mid))

# inductive method agrees
bi = barycenter(H2, ppts, method="inductive")
print("H2 inductive vs auto:", distance(H2, bh, bi))

# fixed point: rotation about (3,4) by 1 rad
g = rotation_about(E2, 1.0, E2.point([3.0, 4.0]))
t0 = time.perf_counter()
fp = fixed_point_nonexpanding(E2, lambda p: g(p), E2.point([0.0, 0.0]), tol=1e-6)
t1 = time.perf_counter()
print("fixed point:", np.round(fp.point.coords, 8), "res=", fp.residual,
      "evals=", fp.map_evaluations, "time(ms)=", (t1 - t0) * 1e3)

# translation -> diagnostic
from hadamardlab.exceptions import EvanescenceDiagnostic
tr = E2.make_isometry((np.eye(2), np.array([1.0, 0.0])))
try:
    fixed_point_nonexpanding(E2, lambda p: tr(p), E2.point([0.0, 0.0]), max_iter=4000)
    print("translation: NO DIAGNOSTIC (bad)")
except EvanescenceDiagnostic as e:
    print("translation diagnostic ok:", e.witness)
except Exception as e:
    print("translation raised", type(e).__name__, e)
