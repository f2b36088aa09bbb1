"""Hyperplanes, sectors and median triangles in a quasi-median ball.

The syllable metric on a graph product is quasi-median: each coset of a
vertex group is a clique, and hyperplanes are classes of edges generated
by squares and triangles.  Distances count separating hyperplanes.
"""

from polyhyp import gp
from polyhyp import median as md
from polyhyp.graphcore import cycle_graph, path_graph

# A(C4) = F2 x F2 with every Z cut to Z/5 so the ball stays small
spec = gp.raag(cycle_graph(4), window=2)
g = gp.qm_ball(spec, 2, strict=False)
dec = md.hyperplanes(g, "quasi-median")
print(f"QM ball: {g.n} vertices, {len(dec.classes)} hyperplanes")
J = dec.class_of(g.index(()), g.index(gp.normalize(spec, "a")))
print("sectors of the a-hyperplane through 1:", sorted(len(c) for c in md.sectors(dec, J).components))

w = lambda s: g.index(gp.normalize(spec, s))
x, y = w("a^2"), w("b c^-1")
print("d(a^2, b c^-1) =", g.dist_from(x)[y], " separating hyperplanes:", len(md.separating_hyperplanes(dec, x, y)))

# %% median triangles
# a, c and bd meet at a median vertex; three points of one <a>-coset span a
# triangle that cannot shrink
name = lambda v: gp.format_word(spec, g.payloads[v]) or "1"
for triple in (("a", "c", "b d"), ("a", "a^-1", "")):
    t = md.median_triangle(g, *(w(s) for s in triple))
    print(f"median triangle of {[s or '1' for s in triple]}:", [name(v) for v in t])

# %% which presentation graphs give F2 x F2
for name, s in [("A(C4)", gp.raag(cycle_graph(4))), ("A(P4)", gp.raag(path_graph(4))),
                ("C(C5)", gp.racg(cycle_graph(5))), ("C(C6)", gp.racg(cycle_graph(6)))]:
    print(f"{name}: F2 {gp.contains_F2(s)}, F2xF2 {gp.contains_F2xF2(s)}, witness {gp.f2xf2_witness(s)}")
