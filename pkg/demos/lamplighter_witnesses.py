"""Many disjoint paths in the lamplighter graph.

From (∅, 0) to y = ({0..13}, 13) we build ceil(2^(R/4)) paths that wander
out to the left and right, switching on distinct patterns of extra lamps.
Two paths with different patterns never meet once we are R away from the
endpoints, so the number of disjoint detours grows exponentially in R.
"""

import itertools

from polyhyp import lamp

y = lamp.vertex(range(14), 13)
d = lamp.lamp_distance_closed_form(y)
print("d(x, y) =", d, "(BFS agrees:", lamp.lamp_distance(lamp.ORIGIN, y) == d, ")")

for R in (6, 7, 8, 9):
    fam = lamp.path_family(range(14), 13, R)
    ok, why = lamp.verify_exp_connected(fam.x, fam.y, 2 ** 0.25, 6, R, fam)
    lengths = [len(q) - 1 for q in fam.paths]
    print(f"R={R}: N={len(fam.paths)} paths, lengths {min(lengths)}..{max(lengths)} <= 6d = {6 * d}; verified {ok}")

fam = lamp.path_family(range(14), 13, 6)
print()
print(lamp.format_family(fam))

# %% the binary tree inside
# Φ sends a bit string to (positions of its ones, its length).  Distinct
# strings of length n land on distinct states, so spheres keep size 2^n,
# but distances are only preserved up to a factor 2.
strings = ["".join(b) for n in range(7) for b in itertools.product("01", repeat=n)]
ratios = set()
for s, t in itertools.combinations(strings, 2):
    dl = lamp.lamp_distance_closed_form(lamp.tree_embedding(s), lamp.tree_embedding(t))
    ratios.add(dl / lamp.tree_distance(s, t))
print("d_Lamp / d_tree ranges over", min(ratios), "..", max(ratios))
