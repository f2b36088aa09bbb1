"""Gentleness of the free group coned off along its cyclic cosets.

Cone off a Cayley ball of F2 = <a, b> along every coset of <a> and of <b>,
measure the fiber counts G[R1][R2] of the canonical map, and fit bound
families.  The x^y family fits with a small constant; polynomial families
need a constant that grows with R2, which is the point.
"""

import numpy as np

from polyhyp import coneoff as co
from polyhyp import gp
from polyhyp.graphcore import FiniteGraph

R = 7
spec = gp.raag(FiniteGraph(2), window=R)
X = gp.cayley_ball(spec, R)
P = co.Collection(X, [m for _, m in gp.parabolic_collection(spec, X, lams=[("a",), ("b",)])])
print(f"ball of radius {R}: {X.n} vertices, {len(P)} cosets, multiplicity {P.multiplicity()}")

cone = co.cone_off(X, P)
a3, b3 = X.index(gp.normalize(spec, "a^3")), X.index(gp.normalize(spec, "b^3"))
print("d_X(a^3, b^3) =", X.dist_from(a3)[b3], " d_cone =", cone.dist_from(a3)[b3])

# %% profile of the canonical map
phi = co.VertexMap.canonical(X, P)
prof = co.gentleness_profile(phi, 4, 3)
print("\nG[R1][R2]  (rows R1 = 0..4, columns R2 = 0..3)")
print(prof.G)

# each cone step can leave along a line of length 2R1+1, so the counts are
# bounded by (2(2R1+1))^(2R2)
gamma = co.collection_growth(X, P, 4)
bound = np.array([[(2 * g) ** (2 * r2) for r2 in range(4)] for g in gamma])
print("within the choices-for-x bound:", bool((prof.G <= bound).all()))

# %% fits
for fam in ("lin", "pol:1", "pol:2", "pol:4", "exp"):
    f = co.fit_constant(prof, fam)
    print(f"{fam:6s} C = {f.C}")
f = co.fit_constant(prof, "lin", prefactor=False)
print("lin without prefactor: C =", f.C)

# %% for contrast: the constant map only sees the growth of the ball
const = co.gentleness_profile(co.VertexMap.constant(X), R, 1, sampling="center")
print("\nconstant map, |B(1,R1)| for R1 = 0..R:", const.G[:, 1].tolist())
