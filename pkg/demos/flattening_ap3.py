"""Coning off F2 x Z along its polynomial-growth parabolics.

A(P3) = <a, b, c | [a,b], [b,c]> is F2 x Z with b central.  Its Cayley
balls contain ever larger flat squares, so their four-point delta grows
with the radius.  After coning off the cosets of the polynomial-growth
parabolics <a,b> and <b,c> the delta stays put.
"""

from polyhyp import coneoff as co
from polyhyp import gp, hyp
from polyhyp import median as md
from polyhyp.graphcore import path_graph

spec = gp.raag(path_graph(3), window=8)
print("polynomial parabolics:", ["".join(spec.names[u] for u in lam) for lam in gp.polynomial_parabolics(spec)])

# delta over 200 random vertices (seed 0) of each ball
for R in (4, 6, 8):
    X = gp.cayley_ball(spec, R)
    P = co.Collection(X, [m for _, m in gp.parabolic_collection(spec, X, maximal=True)])
    cone = co.cone_off(X, P)
    raw = hyp.four_point_delta(X, sample=200)
    flat = hyp.four_point_delta(cone, sample=200)
    print(f"R={R}: {X.n:5d} vertices  delta raw {raw.delta:4.1f}  coned {flat.delta:4.1f}")

# %% where the flats go
# rectangles whose vertical sides run along the central b direction: in the
# cone-off each column is a clique, so vertical lines are close; two columns
# an a-step apart share an <a,b> coset, an a·c pair of steps does not
X = gp.cayley_ball(spec, 3)
P = co.Collection(X, [m for _, m in gp.parabolic_collection(spec, X, maximal=True)])
cone = co.cone_off(X, P)
tally = {}
for r in md.flat_rectangles(X, 2, 2):
    for rr in (r, r.transposed()):
        cols = {X.edge_label(rr.embedding[(i, j)], rr.embedding[(i, j + 1)])
                for i in range(rr.a + 1) for j in range(rr.b)}
        if cols != {spec.idx["b"]}:
            continue
        (c,) = hyp.classify_rectangles(X, cone, [rr], 1)
        tally[c.classification] = tally.get(c.classification, 0) + 1
print("\nrectangles with vertical b-lines, thinness at K=1:", tally)
