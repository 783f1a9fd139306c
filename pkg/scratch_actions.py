import numpy as np
from hadamardlab import builtin_space
from hadamardlab.actions import (
    IsometryRep, detect_clifford, displacement, evanescence_probe, evanescent_ladder,
)
from hadamardlab.spaces.euclidean import rotation_about
from hadamardlab.metric_core import distance

E2 = builtin_space("euclidean-2")
H2 = builtin_space("hyperbolic-2")
PT = builtin_space("product-tripod-line")

# translation rep
tr = E2.make_isometry((np.eye(2), np.array([3.0, 4.0])))
rep = IsometryRep(E2, {"t": tr})
print("names:", rep.names())
print("disp t at (7,-2):", displacement(rep, "t", E2.point([7.0, -2.0])), "(expect 5)")
print("disp identity word:", displacement(rep, [], E2.point([1.0, 1.0])))
print("disp word [t,t]:", displacement(rep, ["t", "t"], E2.point([0, 0])), "(expect 10)")

cl = detect_clifford(rep, "t")
print("clifford translation:", cl.is_clifford, cl.displacement, cl.translation_direction)

rot = rotation_about(E2, np.pi, E2.point([0.0, 0.0]))
rrep = IsometryRep(E2, {"r": rot})
cl2 = detect_clifford(rrep, "r")
print("clifford rotation pi:", cl2.is_clifford, "spread:", round(cl2.spread, 3))

# evanescence: translation -> witness
radii = [2.0 * 2 ** k for k in range(7)]  # 2..128
v1 = evanescence_probe(rep, ["t"], E2.point([0.0, 0.0]), radii)
print("translation verdict:", v1.verdict, "bound:", v1.bound)

# rotation by 1 rad -> fit with lam ~ 2 sin(1/2) = 0.9589
rot1 = rotation_about(E2, 1.0, E2.point([0.0, 0.0]))
r1rep = IsometryRep(E2, {"r": rot1})
v2 = evanescence_probe(r1rep, ["r"], E2.point([0.0, 0.0]), radii)
print("rotation verdict:", v2.verdict, "lam:", v2.lam, "expect", 2 * np.sin(0.5), "d0:", v2.d0)

# short schedule -> inconclusive
v3 = evanescence_probe(r1rep, ["r"], E2.point([0.0, 0.0]), [2.0, 4.0])
print("short schedule:", v3.verdict)

# product with trivial second factor: tripod automorphism x identity
T = PT.factors[0]
autos = T.automorphisms()
nontriv = next(a for a in autos if any(a[k] != k for k in a))
iso_t = T.make_isometry(nontriv)
line = PT.factors[1]
iso_prod = PT.factorwise_isometry([iso_t, line.make_isometry((np.eye(1), np.zeros(1)))])
prep = IsometryRep(PT, {"g": iso_prod})
x0 = PT.from_factors([T.vertex("o"), line.point([0.0])])
v4 = evanescence_probe(prep, ["g"], x0, radii)
print("product trivial-factor verdict:", v4.verdict, "bound:", v4.bound)

# ladder: translation with y_n = (n^2, 0)
ys = [E2.point([float(n * n), 0.0]) for n in range(1, 9)]
lad = evanescent_ladder(rep, ["t"], ys, x0=E2.point([0.0, 0.0]))
print("ladder points:", [tuple(np.round(p.coords, 6)) for p in lad.points[:3]], "...")
print("ladder disps:", np.round(lad.displacements, 9), "limsup:", lad.limsup_estimate)

# rotation ladder displacements grow
lad2 = evanescent_ladder(r1rep, ["r"], ys, x0=E2.point([0.0, 0.0]))
print("rotation ladder disps:", np.round(lad2.displacements, 4))

# hyperbolic axial translation: displacement off-axis grows -> not clifford
boost = np.eye(3); r_ = 0.7
boost[0, 0] = boost[1, 1] = np.cosh(r_); boost[0, 1] = boost[1, 0] = np.sinh(r_)
ax = H2.make_isometry(boost)
hrep = IsometryRep(H2, {"b": ax})
print("axis disp:", displacement(hrep, "b", H2.lift([0.0, 0.0])), "(expect", r_, ")")
off = H2.lift([0.0, 1.5])
print("off-axis disp:", displacement(hrep, "b", off), "(expect >", r_, ")")
print("clifford hyperbolic:", detect_clifford(hrep, "b").is_clifford)
