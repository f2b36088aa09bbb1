import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import graphs, nx_distances
from polyhyp import coneoff as co
from polyhyp import gp
from polyhyp import median as md
from polyhyp.graphcore import (FiniteGraph, complete_graph, cycle_graph, grid_graph, is_isomorphic,
                               path_graph)

F2 = gp.raag(FiniteGraph(2), window=8)


def f2_cone(R):
    g = gp.cayley_ball(F2, R)
    P = co.Collection(g, [m for _, m in gp.parabolic_collection(F2, g, lams=[("a",), ("b",)])])
    return g, P


def word(spec, g, s):
    return g.index(gp.normalize(spec, s))


def z_line(R):
    spec = gp.raag(FiniteGraph(1), window=R)
    return gp.cayley_ball(spec, R)


def z2(R):
    spec = gp.raag(FiniteGraph(2, [(0, 1)]), window=R)
    return spec, gp.cayley_ball(spec, R)


# ---------------------------------------------------------------- cone-off


def test_cone_off_examples():
    p5 = path_graph(5)
    c = co.cone_off(p5, co.Collection(p5, [range(5)]))
    assert c.distances().max() == 1
    assert co.cone_off(p5, co.Collection(p5, [])).edges == p5.edges
    g, P = f2_cone(3)
    c = co.cone_off(g, P)
    assert c.dist_from(word(F2, g, "a^3"))[word(F2, g, "b^3")] == 2


def test_collection_rejects_bad_members():
    p5 = path_graph(5)
    with pytest.raises(ValueError):
        co.Collection(p5, [[0, 4]])
    with pytest.raises(ValueError):
        co.Collection(p5, [[]])
    P = co.Collection(p5, [[0, 4], [1, 2]], on_disconnected="split")
    assert P.members == [[0], [4], [1, 2]]
    # duplicates collapse
    assert len(co.Collection(p5, [[1, 2], [2, 1]])) == 1


@pytest.mark.parametrize("gamma,orders", [
    (FiniteGraph(2), (2, 3)),
    (path_graph(3), (3, 2, 2)),
    (cycle_graph(4), (2, 2, 2, 2)),
    (FiniteGraph(3, [(0, 1)]), (3, 3, 2)),
])
def test_coned_cayley_ball_is_qm_ball(gamma, orders):
    spec = gp.product_of(gamma, [f"c{k}" for k in orders])
    for R in range(1, 4):
        cay = gp.cayley_ball(spec, R)
        P = co.Collection(cay, [m for _, m in gp.parabolic_collection(spec, cay, lams=[(u,) for u in range(gamma.n)])])
        cone = co.cone_off(cay, P)
        qm = gp.qm_ball(spec, R)
        assert set(cay.payloads) == set(qm.payloads)
        key = {i: qm.index(w) for i, w in enumerate(cay.payloads)}
        mapped = {tuple(sorted((key[u], key[v]))) for u, v in cone.edges}
        assert mapped == set(qm.edges)


# ------------------------------------------------------------ fiber counts


def test_fiber_count_examples():
    g = z_line(10)
    ident = co.VertexMap.identity(g)
    assert co.fiber_count(ident, 0, 0, 3, 3) == 7
    const = co.VertexMap.constant(g)
    assert co.fiber_count(const, 0, 0, 4, 0) == 9
    f, P = f2_cone(6)
    phi = co.VertexMap.canonical(f, P)
    assert co.fiber_count(phi, 0, 0, 2, 1) == 9


def test_fiber_count_coverage():
    g = z_line(4)
    with pytest.raises(co.CoverageError):
        co.fiber_count(co.VertexMap.identity(g), 0, 0, 5, 1)


@given(st.integers(3, 9), st.integers(4, 12), st.data())
def test_fiber_count_invariant_under_codomain_automorphism(n, m, data):
    dom = path_graph(n)
    cyc = cycle_graph(m)
    img = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    # fibers only need a total map, not a Lipschitz one
    phi = co.VertexMap(dom, cyc, img)
    shift, flip = data.draw(st.integers(0, m - 1)), data.draw(st.booleans())
    sigma = lambda v: ((-v if flip else v) + shift) % m
    psi = co.VertexMap(dom, cyc, [sigma(v) for v in img])
    p, q = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, m - 1))
    R1, R2 = data.draw(st.integers(0, n)), data.draw(st.integers(0, m))
    assert co.fiber_count(phi, p, q, R1, R2) == co.fiber_count(psi, p, sigma(q), R1, R2)


def test_lipschitz_constant():
    g = path_graph(4)
    assert co.VertexMap(g, path_graph(7), [0, 2, 4, 6]).lipschitz == 2
    assert co.VertexMap.constant(g).lipschitz == 0
    assert co.VertexMap.identity(g).lipschitz == 1
    with pytest.raises(ValueError):
        co.VertexMap(g, path_graph(2), [0, 1, 2, 0])


# ---------------------------------------------------------------- profiles


def test_profile_identity_on_line():
    prof = co.gentleness_profile(co.VertexMap.identity(z_line(12)), 5, 5)
    for R1, R2 in itertools.product(range(6), repeat=2):
        assert prof.G[R1, R2] == 2 * min(R1, R2) + 1
    assert prof.is_monotone()


def product_with_tree(R):
    """Cayley ball of Z × (Z2*Z2*Z2) and the projection onto the tree factor."""
    spec = gp.product_of(FiniteGraph(4, [(0, 1), (0, 2), (0, 3)]), ["z:window=8", "c2", "c2", "c2"])
    X = gp.cayley_ball(spec, R)
    tree = gp.racg(FiniteGraph(3))
    T = gp.cayley_ball(tree, R)
    img = [T.index(tuple((u - 1, e) for u, e in gp.coset_key(spec, w, [0]))) for w in X.payloads]
    return co.VertexMap(X, T, img)


def test_projection_to_tree_bound():
    phi = product_with_tree(6)
    prof = co.gentleness_profile(phi, 3, 3)
    ball = lambda r: 1 + 3 * (2 ** r - 1)
    for R1, R2 in itertools.product(range(4), repeat=2):
        assert prof.G[R1, R2] <= (2 * R1 + 1) * ball(min(R1, R2))
    # the bound is attained when R2 >= R1: the whole ball maps into B(q,R2)
    assert prof.G[3, 3] == co.fiber_count(phi, 0, 0, 3, 3)


def test_free_group_coneoff_is_xy_gentle():
    g, P = f2_cone(7)
    prof = co.gentleness_profile(co.VertexMap.canonical(g, P), 4, 3)
    assert prof.is_monotone()
    # with the prefactor C = 2: G <= 2·(2R1)^(2R2); without it (1,1) fails, G = 5 > 4
    for R1, R2 in itertools.product(range(1, 5), range(1, 4)):
        assert prof.G[R1, R2] <= 2 * (2 * R1) ** (2 * R2)
    assert prof.G[1, 1] == 5
    assert prof.G[0].tolist() == [1] * 4


def test_free_group_prop_bound():
    # choices-for-x count: G <= (N·γ_P(R1))^(2R2) with multiplicity N = 2
    g, P = f2_cone(7)
    assert P.multiplicity() == 2
    gamma = co.collection_growth(g, P, 4)
    assert gamma.tolist() == [2 * r + 1 for r in range(5)]
    ok, _ = co.syllabic_all_pairs(*f2_cone(3))
    assert ok
    prof = co.gentleness_profile(co.VertexMap.canonical(g, P), 4, 3)
    for R1, R2 in itertools.product(range(5), range(4)):
        assert prof.G[R1, R2] <= (2 * gamma[R1]) ** (2 * R2)


def test_profile_sampling_modes():
    g = z_line(8)
    phi = co.VertexMap.identity(g)
    a = co.gentleness_profile(phi, 3, 2, sampling="center")
    b = co.gentleness_profile(phi, 3, 2, sampling=[0])
    c = co.gentleness_profile(phi, 3, 2, threads=3)
    assert np.array_equal(a.G, b.G) and np.array_equal(a.G, c.G)
    with pytest.raises(ValueError):
        co.gentleness_profile(phi, 3, 2, sampling="random")
    with pytest.raises(co.CoverageError):
        co.gentleness_profile(phi, 9, 2)


@settings(max_examples=30)
@given(graphs(min_n=2, max_n=9, connected=True), graphs(min_n=1, max_n=6), st.data())
def test_profile_monotone_and_matches_fibers(X, Z, data):
    img = data.draw(st.lists(st.integers(0, Z.n - 1), min_size=X.n, max_size=X.n))
    phi = co.VertexMap(X, Z, img)
    prof = co.gentleness_profile(phi, 3, 3)
    assert prof.is_monotone()
    assert set(prof.G[0].tolist()) <= {0, 1}
    brute = np.zeros((4, 4), dtype=int)
    DX, DZ = nx_distances(X), nx_distances(Z)
    for p, q in itertools.product(range(X.n), range(Z.n)):
        for R1, R2 in itertools.product(range(4), repeat=2):
            c = sum(1 for v in range(X.n) if DX[p, v] <= R1 and DZ[q, img[v]] <= R2)
            brute[R1, R2] = max(brute[R1, R2], c)
    assert np.array_equal(prof.G, brute)


# ------------------------------------------------------------------ fitting


def test_fit_identity_on_line():
    prof = co.gentleness_profile(co.VertexMap.identity(z_line(12)), 5, 5)
    fit = co.fit_constant(prof, "pol:1")
    assert not fit.infinite and fit.C <= 3
    # minimality by scan
    G = prof.G
    for C in range(1, fit.C):
        assert any(G[r1, r2] > C * C * r1 for r1 in range(1, 6) for r2 in range(1, 6))


def test_fit_constant_on_z2():
    _, g = z2(6)
    prof = co.gentleness_profile(co.VertexMap.constant(g), 5, 1, sampling="center")
    fit = co.fit_constant(prof, "pol:2")
    assert not fit.infinite
    assert prof.G[5, 1] == 2 * 25 + 2 * 5 + 1


def test_fit_flags_infinite():
    G = np.array([[1, 1], [1, 10 ** 9]])
    assert co.fit_constant(G, "pol:1", bound=100).infinite
    assert co.fit_constant(G, "lin", bound=2 ** 16).C is not None
    with pytest.raises(ValueError):
        co.fit_constant(G, "quadratic")


def test_fit_without_prefactor():
    G = np.array([[1, 1, 1], [1, 9, 81], [1, 25, 625]])
    # at (1,1): 2^2 = 4 < 9 but 3^3 = 27 >= 9
    fit = co.fit_constant(G, "lin", prefactor=False)
    assert fit.C == 3
    C = fit.C
    assert all(G[a, b] <= (C * a) ** (C * b) for a in (1, 2) for b in (1, 2))
    assert any(G[a, b] > ((C - 1) * a) ** ((C - 1) * b) for a in (1, 2) for b in (1, 2))


# -------------------------------------------------------------- syllabicity


def test_syllabic_examples():
    p5 = path_graph(5)
    w = co.is_syllabic_pair(p5, co.Collection(p5, []), 0, 4)
    assert w.host_length == 4 and w.host_path == [0, 1, 2, 3, 4]
    w = co.is_syllabic_pair(p5, co.Collection(p5, [range(5)]), 0, 4)
    assert w.cone_path == [0, 4] and w.host_path == [0, 1, 2, 3, 4]
    g, P = f2_cone(5)
    y = word(F2, g, "a b a b")
    w = co.is_syllabic_pair(g, P, 0, y)
    assert len(w.cone_path) - 1 == 4 and w.host_length == 4
    assert co.quasi_inequality(g, w.cone_path)


def test_non_syllabic_line_in_grid():
    g = grid_graph(range(-3, 4), range(-2, 3))
    idx = {p: i for i, p in enumerate(g.payloads)}
    P = co.Collection(g, [[idx[(x, 0)] for x in range(-3, 4)]])
    x, y = idx[(-3, 1)], idx[(3, 1)]
    assert co.is_syllabic_pair(g, P, x, y) is None
    ok, bad = co.is_strongly_syllabic_sample(g, P, pairs=[(x, y)])
    assert not ok and bad == (x, y)
    assert co.quasi_syllabic_constants(g, P, [(x, y)]) == (1, 2)


def test_strongly_syllabic_vertex_cosets():
    for spec, R in ((F2, 3), (gp.raag(path_graph(3), window=3), 2), (gp.racg(cycle_graph(5)), 3)):
        g = gp.cayley_ball(spec, R)
        P = co.Collection(g, [m for _, m in gp.parabolic_collection(spec, g, lams=[(u,) for u in range(len(spec.names))])])
        ok, bad = co.is_strongly_syllabic_sample(g, P)
        assert ok, bad


@settings(max_examples=40)
@given(graphs(min_n=2, max_n=8, connected=True), st.data())
def test_syllabic_witness_is_quasi_10(g, data):
    k = data.draw(st.integers(1, 3))
    members = []
    for _ in range(k):
        seed = data.draw(st.integers(0, g.n - 1))
        size = data.draw(st.integers(1, 3))
        m = [seed]
        for _ in range(size):
            nb = [v for u in m for v in g.adj[u] if v not in m]
            if nb:
                m.append(data.draw(st.sampled_from(sorted(nb))))
        members.append(m)
    P = co.Collection(g, members)
    x, y = data.draw(st.integers(0, g.n - 1)), data.draw(st.integers(0, g.n - 1))
    w = co.is_syllabic_pair(g, P, x, y)
    if w is not None:
        assert co.quasi_inequality(g, w.cone_path, 1, 0)
        assert w.host_path[0] == x and w.host_path[-1] == y
        assert len(w.host_path) - 1 == w.host_length == g.dist_from(x)[y]
        c = co.cone_off(g, P)
        assert len(w.cone_path) - 1 == c.dist_from(x)[y]


# --------------------------------------------------------- parallel closure


def test_parallel_closure_full_coset_family():
    spec, g = z2(3)
    dec = md.hyperplanes(g)
    P = co.Collection(g, [m for _, m in gp.parabolic_collection(spec, g, lams=[("a",)])])
    assert co.check_parallel_closure(g, dec, P) == (True, None)


def test_parallel_closure_single_coset_fails():
    g = grid_graph(range(-2, 3), range(-2, 3))
    idx = {p: i for i, p in enumerate(g.payloads)}
    dec = md.hyperplanes(g)
    P = co.Collection(g, [[idx[(x, 0)] for x in range(-2, 3)]])
    ok, bad = co.check_parallel_closure(g, dec, P)
    assert not ok
    (x, y), (a, b) = bad
    assert md.parallel_pairs(dec, x, y, a, b)
    assert not P.comembers()[a, b]
    with pytest.raises(ValueError):
        co.check_parallel_closure(g, dec, P, reading="xy")


def test_parallel_closure_ay_reading():
    g = grid_graph(range(-2, 3), range(-2, 3))
    idx = {p: i for i, p in enumerate(g.payloads)}
    dec = md.hyperplanes(g)
    P = co.Collection(g, [[idx[(x, 0)] for x in range(-2, 3)]])
    ok, bad = co.check_parallel_closure(g, dec, P, reading="ay")
    assert not ok


# ----------------------------------------------------------- growth, horoballs


def test_collection_growth_examples():
    g, P = f2_cone(6)
    assert co.collection_growth(g, P, 5).tolist() == [2 * r + 1 for r in range(6)]
    single = co.Collection(g, [[v] for v in range(g.n)])
    assert co.collection_growth(g, single, 4).tolist() == [1] * 5
    spec = gp.raag(path_graph(3), window=4)
    h = gp.cayley_ball(spec, 4)
    Q = co.Collection(h, [m for _, m in gp.parabolic_collection(spec, h, lams=[("a", "b")])])
    assert co.collection_growth(h, Q, 4).tolist() == [2 * r * r + 2 * r + 1 for r in range(5)]


def test_horoball_examples():
    e = FiniteGraph(2, [(0, 1)])
    h = co.horoball(e, 1)
    assert h.n == 4 and len(h.edges) == 4
    assert is_isomorphic(co.horoball(cycle_graph(5), 0), cycle_graph(5))
    p = path_graph(9)
    h = co.horoball(p, 3)
    d = h.dist_from(0)[8]
    assert d <= 7
    assert d == nx_distances(h)[0, 8]
    with pytest.raises(ValueError):
        co.horoball(p, -1)


def test_horoball_levels_shrink_distances():
    p = path_graph(17)
    ds = [co.horoball(p, L).dist_from(0)[16] for L in range(6)]
    assert all(a >= b for a, b in zip(ds, ds[1:]))
    assert ds[0] == 16
