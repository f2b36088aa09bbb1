import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import four_point_brute, graphs, nx_distances, trees
from polyhyp import coneoff as co
from polyhyp import gp, hyp
from polyhyp import median as md
from polyhyp.graphcore import FiniteGraph, cycle_graph, grid_graph, path_graph


def grid(lo, hi):
    g = grid_graph(range(lo, hi + 1), range(lo, hi + 1))
    return g, {p: i for i, p in enumerate(g.payloads)}


# ------------------------------------------------------------------ delta


def test_delta_examples():
    assert hyp.four_point_delta(path_graph(7)).delta == 0
    assert hyp.four_point_delta(hyp.binary_tree(4)).delta == 0
    c4 = hyp.four_point_delta(cycle_graph(4))
    assert c4.delta == four_point_brute(cycle_graph(4).distances()) == 1.0
    assert hyp.delta_of_quadruple(cycle_graph(4), *c4.witness) == c4.delta
    single = hyp.four_point_delta(FiniteGraph(1))
    assert single.delta == 0 and single.quadruples == 0


def test_delta_rejects_disconnected():
    with pytest.raises(ValueError):
        hyp.four_point_delta(FiniteGraph(4, [(0, 1)]))


def test_delta_sampling():
    g, _ = grid(0, 15)
    rep = hyp.four_point_delta(g)
    assert rep.sampled and rep.sample_size == 200
    again = hyp.four_point_delta(g)
    assert again.delta == rep.delta and again.witness == rep.witness
    assert hyp.delta_of_quadruple(g, *rep.witness) == rep.delta
    small = hyp.four_point_delta(cycle_graph(10), sample=6, seed=3)
    assert small.sample_size == 6 and small.quadruples == 15
    # the sample is a lower bound for the exhaustive value
    assert small.delta <= hyp.four_point_delta(cycle_graph(10), sample="exhaustive").delta


def test_cycles_delta_grows():
    ds = [hyp.four_point_delta(cycle_graph(n)).delta for n in (4, 8, 12, 16)]
    assert ds == sorted(ds) and ds[-1] > ds[0]


@settings(max_examples=40)
@given(graphs(min_n=1, max_n=8, connected=True))
def test_delta_matches_brute_and_diameter_bound(g):
    D = nx_distances(g)
    rep = hyp.four_point_delta(g, sample="exhaustive")
    assert rep.delta == four_point_brute(D)
    assert rep.delta <= D.max() / 2
    assert 2 * rep.delta == int(2 * rep.delta)


@settings(max_examples=40)
@given(trees(max_n=14))
def test_trees_are_zero_hyperbolic(t):
    assert hyp.four_point_delta(t).delta == 0


# --------------------------------------------------------------- Bowditch


def tree_geodesic(t):
    D = t.distances()

    def eta(x, y):
        return [v for v in range(t.n) if D[x, v] + D[v, y] == D[x, y]]
    return eta


@given(trees(max_n=10))
def test_bowditch_tree_geodesics(t):
    eta = tree_geodesic(t)
    # tripod inclusion with no slack; adjacent pairs need D >= 1
    assert hyp.bowditch_check(t, eta, 0, pairs=[]).ok
    assert hyp.bowditch_check(t, eta, 1).ok
    assert hyp.bowditch_check(t, eta, 0).ok == (t.n == 1)


def test_bowditch_grid_intervals_fail():
    g, idx = grid(-1, 4)
    x, y, z = idx[(3, 0)], idx[(0, 3)], idx[(0, 0)]
    res = hyp.bowditch_check(g, lambda u, v: md.interval(g, u, v), 2, pairs=[], triples=[(x, y, z)])
    assert not res.ok and res.violation == (x, y, z)
    # at the full defect the triple passes
    assert hyp.bowditch_check(g, lambda u, v: md.interval(g, u, v), 3, pairs=[], triples=[(x, y, z)]).ok


def test_bowditch_whole_set():
    g = cycle_graph(7)
    res = hyp.bowditch_check(g, lambda u, v: range(g.n), int(g.distances().max()))
    assert res.ok


def test_bowditch_first_condition():
    g = path_graph(5)
    res = hyp.bowditch_check(g, lambda u, v: range(5), 1)
    assert not res.ok and len(res.violation) == 2


def test_bowditch_contract():
    g = path_graph(4)
    with pytest.raises(ValueError):
        hyp.bowditch_check(g, lambda u, v: [u], 3)
    with pytest.raises(ValueError):
        hyp.bowditch_check(g, lambda u, v: {0, 3, u, v}, 3, pairs=[(0, 3)], triples=[(0, 3, 1)])


# -------------------------------------------------------------- rectangles


def test_degenerate_rectangles():
    g = path_graph(4)
    (c,) = hyp.classify_rectangles(g, g, [md.FlatRectangle(0, 0, {(0, 0): 2})], 0)
    assert c.classification == "both" and c.K_horizontal == c.K_vertical == 0
    # a = 0: one vertical line, but the horizontal "lines" are distinct points
    r = md.FlatRectangle(0, 3, {(0, j): j for j in range(4)})
    (c,) = hyp.classify_rectangles(g, g, [r], 0)
    assert c.classification == "vertical-thin" and c.K_vertical == 0 and c.K_horizontal == 3


def test_flat_square_without_coning():
    g, idx = grid(-2, 2)
    r = md.FlatRectangle(2, 2, {(i, j): idx[(i, j)] for i in range(3) for j in range(3)})
    (c,) = hyp.classify_rectangles(g, g, [r], 0)
    assert c.classification == "neither" and c.K_horizontal == 2 and c.K_vertical == 2


def ap3():
    spec = gp.raag(path_graph(3), window=4)
    g = gp.cayley_ball(spec, 3)
    P = co.Collection(g, [m for _, m in gp.parabolic_collection(spec, g, maximal=True)])
    return g, co.cone_off(g, P)


def labels(g, r, vertical):
    if vertical:
        pairs = [((i, j), (i, j + 1)) for i in range(r.a + 1) for j in range(r.b)]
    else:
        pairs = [((i, j), (i + 1, j)) for i in range(r.a) for j in range(r.b + 1)]
    return {g.edge_label(r.embedding[p], r.embedding[q]) for p, q in pairs}


def test_central_direction_is_thin():
    # in A(P3) = F2 × Z the central b-lines lie in coned cosets
    g, cone = ap3()
    seen = 0
    for r in md.flat_rectangles(g, 2, 2):
        for rr in (r, r.transposed()):
            if labels(g, rr, True) != {1}:
                continue
            (c,) = hyp.classify_rectangles(g, cone, [rr], 1)
            seen += 1
            assert c.K_horizontal <= 1
            if len(labels(g, rr, False)) == 1:
                assert c.K_vertical <= 1 and c.classification == "both"
            else:
                # columns a·c apart sit in different maximal cosets
                assert c.K_vertical == 2 and c.classification == "horizontal-thin"
    assert seen > 0


def test_classification_matches_networkx_and_axis_swap():
    g, cone = ap3()
    D = nx_distances(cone)
    rects = md.flat_rectangles(g, 2, 1)[:40]
    for r, c in zip(rects, hyp.classify_rectangles(g, cone, rects, 1)):
        rows = [r.row(j) for j in range(r.b + 1)]
        kh = max(max(D[np.ix_(p, q)].min(1).max(), D[np.ix_(p, q)].min(0).max()) for p in rows for q in rows)
        assert kh == c.K_horizontal
        (t,) = hyp.classify_rectangles(g, cone, [r.transposed()], 1)
        assert (t.K_horizontal, t.K_vertical) == (c.K_vertical, c.K_horizontal)
        swap = {"horizontal-thin": "vertical-thin", "vertical-thin": "horizontal-thin"}
        assert t.classification == swap.get(c.classification, c.classification)


# ---------------------------------------------------------------- detours


def test_detour_examples():
    t = hyp.binary_tree(4)
    x, y = t.index("0000"), t.index("1111")
    assert hyp.detour_length(t, x, y, 0, 1) == math.inf
    c8 = cycle_graph(8)
    assert hyp.detour_length(c8, 0, 4, 2, 1) == 4
    g, idx = grid(-6, 6)
    g6 = g.induced([i for i, (a, b) in enumerate(g.payloads) if abs(a) + abs(b) <= 6])[0]
    pl = [p for p in g.payloads if abs(p[0]) + abs(p[1]) <= 6]
    k = {p: i for i, p in enumerate(pl)}
    assert hyp.detour_length(g6, k[(-4, 0)], k[(4, 0)], k[(0, 0)], 2) == 14


def test_detour_precondition():
    with pytest.raises(ValueError):
        hyp.detour_length(cycle_graph(8), 0, 4, 1, 2)
    with pytest.raises(ValueError):
        hyp.detour_length(cycle_graph(8), 0, 3, 6, 1)


def test_detour_grows_on_right_angled_c5():
    spec = gp.racg(cycle_graph(5))
    g = gp.cayley_ball(spec, 7)
    x = g.index(gp.normalize(spec, "a c e"))
    y = g.index(gp.normalize(spec, "b d a"))
    assert g.dist_from(x)[y] == 6
    ds = [hyp.detour_length(g, x, y, 0, s) for s in range(4)]
    assert ds == sorted(ds) and ds[-1] > 6 * ds[0]
    assert all(d >= 6 for d in ds)


@settings(max_examples=40)
@given(graphs(min_n=3, max_n=10, connected=True), st.data())
def test_detour_at_least_distance(g, data):
    D = g.distances()
    x, y = data.draw(st.integers(0, g.n - 1)), data.draw(st.integers(0, g.n - 1))
    mids = [c for c in range(g.n) if D[x, c] + D[c, y] == D[x, y]]
    c = data.draw(st.sampled_from(mids))
    s = int(min(D[x, c], D[c, y]))
    d = hyp.detour_length(g, x, y, c, s)
    assert d >= D[x, y]


# --------------------------------------------------------------- sequences


def test_nogentle_examples():
    v = hyp.nogentle_sequences(math.e, 1)
    assert v["r"] == pytest.approx(1) and v["R"] == pytest.approx(1) and v["sigma"] == pytest.approx(1)
    assert v["fact_R"]
    v = hyp.nogentle_sequences(10 ** 6, 1)
    assert v["R"] == pytest.approx(math.log(1e6) ** 4) and 3.6e4 < v["R"] < 3.7e4 and v["fact_R"]
    ratios = [hyp.nogentle_sequences(10 ** k, 1)["ratio"] for k in (3, 6, 9)]
    assert ratios[0] > ratios[1] > ratios[2]
    with pytest.raises(ValueError):
        hyp.nogentle_sequences(1, 1)


def test_sphere_growth_examples():
    t = hyp.binary_tree(6)
    rep = hyp.sphere_growth_check(t, lambda n: n, co.VertexMap.identity(t))
    assert rep.first_violation is None and rep.sizes_ok
    assert [s for _, s, _, _ in rep.levels] == [2 ** n for n in range(7)]
    rep = hyp.sphere_growth_check(t, lambda n: 1, co.VertexMap.constant(t))
    assert all(not ok for n, _, _, ok in rep.levels if n >= 1)
    depth = t.dist_from(0).astype(int)
    rep = hyp.sphere_growth_check(t, lambda n: n / 2, co.VertexMap(t, path_graph(7), depth))
    assert rep.first_violation is None
    assert [far for _, _, far, _ in rep.levels] == list(range(7))
