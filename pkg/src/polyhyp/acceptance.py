"""End-to-end acceptance runs.

Each `criterion_k()` returns a Check: pass/fail, a one-line summary, the
measured numbers and the wall time.  Everything is deterministic.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import coneoff as co
from . import gp, hyp, lamp
from . import median as md
from .graphcore import (FiniteGraph, complete_graph, cycle_graph, get_pattern,
                        hypercube, is_isomorphic, path_graph)


@dataclass
class Check:
    number: int
    title: str
    ok: bool
    summary: str
    data: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit: float = math.inf

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.number:2d} {self.title}: {self.summary} ({self.seconds:.1f}s, limit {self.limit:g}s)"


def _timed(number, title, limit):
    def wrap(fn):
        def run(**kw):
            t = time.perf_counter()
            ok, summary, data = fn(**kw)
            dt = time.perf_counter() - t
            within = dt < limit
            if not within:
                summary += f"; over time limit"
            return Check(number, title, bool(ok and within), summary, data, dt, limit)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ------------------------------------------------------------------ 1


def small_products(max_vertices=4, orders=(2, 3)):
    """One representative per isomorphism class of (graph, vertex orders)."""
    seen = set()
    out = []
    for n in range(1, max_vertices + 1):
        pairs = list(itertools.combinations(range(n), 2))
        perms = list(itertools.permutations(range(n)))
        for mask in range(1 << len(pairs)):
            es = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            for ords in itertools.product(orders, repeat=n):
                key = min((tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in es)),
                           tuple(ords[p.index(i)] for i in range(n))) for p in perms)
                if key in seen:
                    continue
                seen.add(key)
                out.append(gp.product_of(FiniteGraph(n, es), [gp.VertexGroup(o) for o in ords]))
    return out


def rewrite_length(spec, word):
    """Least length reachable by swapping adjacent commuting syllables and
    merging adjacent syllables of one vertex group.  Independent of the
    normal-form code."""
    start = tuple(word)
    seen = {start}
    q = deque([start])
    best = len(start)
    while q:
        w = q.popleft()
        best = min(best, len(w))
        for i in range(len(w) - 1):
            (u, e), (v, f) = w[i], w[i + 1]
            if u == v:
                m = spec.groups[u].reduce(e + f)
                nxt = w[:i] + (((u, m),) if m else ()) + w[i + 2:]
            elif v in spec.comm[u]:
                nxt = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                q.append(nxt)
    return best


@_timed(1, "normal form vs QM-ball BFS", 60)
def criterion_1(max_len=5, oracle_every=97):
    products = small_products()
    words = 0
    rewrites = 0
    for spec in products:
        g = gp.qm_ball(spec, max_len)
        D = g.dist_from(0)
        index = {w: i for i, w in enumerate(g.payloads)}
        letters = [(u, e) for u, grp in enumerate(spec.groups) for e in range(1, grp.order)]
        for L in range(max_len + 1):
            for w in itertools.product(letters, repeat=L):
                nf = gp.normalize(spec, w)
                if len(nf) != D[index[nf]]:
                    return False, f"{gp.format_word(spec, w)} in {spec.to_text()!r}", {}
                words += 1
                if words % oracle_every == 0:
                    rewrites += 1
                    if rewrite_length(spec, w) != len(nf):
                        return False, f"rewriting oracle disagrees on {gp.format_word(spec, w)}", {}
    return True, f"{len(products)} products, {words} words, {rewrites} rewriting cross-checks", \
        {"products": len(products), "words": words}


# ------------------------------------------------------------------ 2


def _sep_counts(dec):
    S = dec.sector_matrix()
    n = dec.host.n
    sep = np.zeros((n, n), dtype=np.int64)
    for row in S:
        sep += row[:, None] != row[None, :]
    return sep


@_timed(2, "distance = number of separating hyperplanes", 60)
def criterion_2():
    hosts = [("(Z2)^3", gp.qm_ball(gp.racg(complete_graph(3)), 4))]
    for name, G in [("C4", cycle_graph(4)), ("C5", cycle_graph(5)), ("P4", path_graph(4))]:
        for R in (3, 4, 5):
            hosts.append((f"C({name}) R={R}", gp.qm_ball(gp.racg(G), R)))
    pairs = 0
    for name, g in hosts:
        dec = md.hyperplanes(g)
        if name == "(Z2)^3" and not (is_isomorphic(g, hypercube(3)) and all(dec.interior)):
            return False, "QM graph of (Z2)^3 is not an all-interior 3-cube", {}
        if (g.distances() != _sep_counts(dec)).any():
            return False, f"identity fails on {name}", {}
        pairs += g.n * g.n
    return True, f"{len(hosts)} hosts, {pairs} ordered pairs", {"hosts": [h for h, _ in hosts]}


# ------------------------------------------------------------------ 3


def free_group_coneoff(R=8):
    spec = gp.raag(FiniteGraph(2), window=R)
    g = gp.cayley_ball(spec, R)
    P = co.Collection(g, [m for _, m in gp.parabolic_collection(spec, g, lams=[("a",), ("b",)])])
    return spec, g, P


@_timed(3, "free-group cone-off is x^y-gentle", 300)
def criterion_3(R=8, R1max=6, R2max=3, Cmax=4):
    spec, g, P = free_group_coneoff(R)
    phi = co.VertexMap.canonical(g, P)
    prof = co.gentleness_profile(phi, R1max, R2max)
    fit = co.fit_constant(prof, "lin", prefactor=False)
    G = prof.G
    bad = [(r1, r2) for r1 in range(R1max + 1) for r2 in range(R2max + 1)
           if G[r1, r2] > (2 * (2 * r1 + 1)) ** (2 * r2)]
    gamma = co.collection_growth(g, P, R1max)
    gamma_ok = all(gamma[r] <= 2 * r + 1 for r in range(R1max + 1))
    ok = not fit.infinite and fit.C <= Cmax and not bad and gamma_ok
    return ok, f"C = {fit.C}, certificate violations {bad}, gamma_P = {gamma.tolist()}", \
        {"G": G.tolist(), "C": fit.C, "bad": bad}


# ------------------------------------------------------------------ 4


@_timed(4, "constant map is not polynomially gentle", 60)
def criterion_4(Rmax=8, kmax=8, bound=2 ** 16):
    """Constant maps on F2 balls: x^k must fail for every k, exp(x) must fit."""
    spec = gp.raag(FiniteGraph(2), window=Rmax)
    rows = {}
    worst_exp = 0
    finite_pol = []
    for R in range(1, Rmax + 1):
        g = gp.cayley_ball(spec, R)
        prof = co.gentleness_profile(co.VertexMap.constant(g), R, 1, sampling="center")
        for k in range(1, kmax + 1):
            f = co.fit_constant(prof, f"pol:{k}", bound=bound)
            if not f.infinite:
                finite_pol.append((R, k, f.C))
        e = co.fit_constant(prof, "exp", bound=bound)
        worst_exp = max(worst_exp, math.inf if e.infinite else e.C)
        rows[R] = prof.G[:, 1].tolist()
    ok = not finite_pol and worst_exp <= 3
    fits = ", ".join(f"R={R} k={k} C={C}" for R, k, C in finite_pol[-3:])
    return ok, f"exp fits with C = {worst_exp}; polynomial fits found {len(finite_pol)} (e.g. {fits})", \
        {"exp_C": worst_exp, "pol_fits": finite_pol, "G": rows}


# ------------------------------------------------------------------ 5


@_timed(5, "lamplighter path families", 300)
def criterion_5():
    S, p = range(14), 13
    y = lamp.vertex(S, p)
    d = lamp.lamp_distance_closed_form(y)
    d_bfs = lamp.lamp_distance(lamp.ORIGIN, y)
    out = []
    for R in (6, 7, 8):
        fam = lamp.path_family(S, p, R)
        ok, why = lamp.verify_exp_connected(fam.x, fam.y, 2 ** 0.25, 6, R, fam)
        if len(fam.paths) < math.ceil(2 ** (R / 4)) or not ok:
            return False, f"R={R}: {why}", {}
        out.append((R, len(fam.paths), max(len(q) - 1 for q in fam.paths)))
    chain = all(2 ** (R // 2) - 1 >= (7 / 8) * 2 ** (R // 2) >= 2 ** (R / 4) for R in range(6, 65))
    ok = chain and d == d_bfs
    return ok, f"d = {d}, (R, N, longest) = {out}, chain {chain}", {"families": out}


# ------------------------------------------------------------------ 6


@_timed(6, "tree embedding is isometric", 120)
def criterion_6(max_len=8, sphere_max=12):
    """Exact isometry of Φ on strings of length <= max_len, and 2^n images of
    the tree sphere S(o,n).  Also records the worst distortion d_Lamp / d_tree."""
    strings = [""] + ["".join(b) for L in range(1, max_len + 1) for b in itertools.product("01", repeat=L)]
    # every relative position Φ(u)^{-1}Φ(v) lies in [-max_len, max_len]
    dist, lo, w = lamp.bfs_table((-max_len - 1, max_len + 1))
    imgs = [lamp.tree_embedding(s) for s in strings]
    checked, broken, ratio, example = 0, 0, 1.0, None
    for i, (s, u) in enumerate(zip(strings, imgs)):
        for t, v in zip(strings[i + 1:], imgs[i + 1:]):
            dl = int(dist[lamp.encode(lamp.relative(u, v), lo, w)])
            if dl != lamp.lamp_distance_closed_form(u, v):
                return False, f"BFS and closed form disagree on {s!r}, {t!r}", {}
            dt = lamp.tree_distance(s, t)
            checked += 1
            if dl != dt:
                broken += 1
                example = example or (s, t, dl, dt)
            ratio = max(ratio, dl / dt)
    sizes = [len({lamp.tree_embedding("".join(b)) for b in itertools.product("01", repeat=n)})
             for n in range(sphere_max + 1)]
    sizes_ok = sizes == [2 ** n for n in range(sphere_max + 1)]
    ok = broken == 0 and sizes_ok
    summary = (f"{checked - broken}/{checked} pairs isometric, worst d_Lamp/d_tree = {ratio:g}"
               + (f" (e.g. {example[0]!r},{example[1]!r}: {example[2]} vs {example[3]})" if example else "")
               + f"; |S(o,n)| = 2^n for n <= {sphere_max}: {sizes_ok}")
    return ok, summary, {"pairs": checked, "non_isometric": broken, "distortion": ratio, "sizes": sizes}


# ------------------------------------------------------------------ 7


CRITERION_7 = {
    "A(C4)": (lambda: gp.raag(cycle_graph(4)), True),
    "C(K33)": (lambda: gp.racg(get_pattern("K33").graph), True),
    "C(K33+)": (lambda: gp.racg(get_pattern("K33+").graph), True),
    "C(K33++)": (lambda: gp.racg(get_pattern("K33++").graph), True),
    "NF2*NF3": (lambda: gp.racg(get_pattern("NF2*NF3").graph), True),
    "A(P3)": (lambda: gp.raag(path_graph(3)), False),
    "A(tree)": (lambda: gp.raag(FiniteGraph(5, [(0, 1), (0, 2), (0, 3), (3, 4)])), False),
    "C(C5)": (lambda: gp.racg(cycle_graph(5)), False),
    "D_inf": (lambda: gp.racg(FiniteGraph(2)), False),
    "(Z2)^4": (lambda: gp.racg(complete_graph(4)), False),
}


@_timed(7, "graphical F2xF2 criterion table", 1)
def criterion_7():
    got = {name: gp.contains_F2xF2(make()) for name, (make, _) in CRITERION_7.items()}
    wrong = [n for n, (_, want) in CRITERION_7.items() if got[n] != want]
    return not wrong, "all match" if not wrong else f"mismatch {wrong}", {"table": got}


# ------------------------------------------------------------------ 8


def ap3_cone(R, window=8):
    spec = gp.raag(path_graph(3), window=window)
    g = gp.cayley_ball(spec, R)
    P = co.Collection(g, [m for _, m in gp.parabolic_collection(spec, g, maximal=True)])
    return g, co.cone_off(g, P)


@_timed(8, "cone-off flattens A(P3)", 600)
def criterion_8(radii=(4, 6, 8), sample=200, seed=0):
    raw, coned = [], []
    for R in radii:
        g, c = ap3_cone(R)
        raw.append(hyp.four_point_delta(g, sample=sample, seed=seed).delta)
        coned.append(hyp.four_point_delta(c, sample=sample, seed=seed).delta)
    ok = len(set(coned)) == 1 and all(a < b for a, b in zip(raw, raw[1:]))
    return ok, f"raw δ {raw}, coned δ {coned} (sample {sample})", {"raw": raw, "coned": coned}


# ------------------------------------------------------------------ 9


def qm_with_parabolics(spec, R):
    g = gp.qm_ball(spec, R, strict=False)
    P = co.Collection(g, [m for _, m in gp.parabolic_collection(spec, g)])
    return g, P


@_timed(9, "parallel closure and syllabic pairs", 600)
def criterion_9(R=4):
    hosts = [("A(P3), Z window 2", gp.raag(path_graph(3), window=2)),
             ("C(C5)", gp.racg(cycle_graph(5)))]
    info = []
    for name, spec in hosts:
        g, P = qm_with_parabolics(spec, R)
        dec = md.hyperplanes(g, "quasi-median")
        ok, bad = co.check_parallel_closure(g, dec, P)
        if not ok:
            return False, f"{name}: closure fails at {bad}", {}
        cone = co.cone_off(g, P)
        ok, bad = co.syllabic_all_pairs(g, P, cone=cone)
        if not ok:
            return False, f"{name}: pair {bad} is not syllabic", {}
        info.append(f"{name} ({g.n} vertices, {len(P.members)} cosets)")
    return True, "; ".join(info), {}


# ------------------------------------------------------------------ 10


@_timed(10, "sequence facts", 1)
def criterion_10(s=1):
    ns = [10 ** (4 + k / 4) for k in range(21)]
    rows = [hyp.nogentle_sequences(n, s) for n in ns]
    fails = [f"10^{math.log10(r['n']):.2f}" for r in rows if not r["fact_R"]]
    ratios = [r["ratio"] for r in rows]
    decreasing = all(a > b for a, b in zip(ratios, ratios[1:]))
    ok = not fails and decreasing
    return ok, f"R_n < n/2 fails at {fails or 'none'}; ratio decreasing {decreasing}", \
        {"fails": fails, "ratios": ratios}


ALL = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
       criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(only=None):
    out = []
    for k, fn in enumerate(ALL, 1):
        if only and k not in only:
            continue
        out.append(fn())
    return out
