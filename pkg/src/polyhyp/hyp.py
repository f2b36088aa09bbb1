"""Hyperbolicity at desk scale.

Four-point δ, a Bowditch-style thin-triangle criterion for families of
connected sets η(x,y), thinness of flat rectangles in a cone-off, detours
around balls, and numeric checks of the log-power sequences used in the
non-gentleness argument for trees.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graphcore import FiniteGraph


@dataclass
class DeltaReport:
    delta: float
    witness: tuple
    quadruples: int
    sampled: bool
    sample_size: int


def _delta_exact(D, ids):
    """Max four-point defect over all quadruples of `ids` (D is the full matrix on ids)."""
    n = len(ids)
    best, wit, count = 0.0, (), 0
    for i in range(n):
        for j in range(i + 1, n - 2):
            ks = np.arange(j + 1, n)
            if len(ks) < 2:
                continue
            ku, lu = np.triu_indices(len(ks), 1)
            k, l = ks[ku], ks[lu]
            s1 = D[i, j] + D[k, l]
            s2 = D[i, k] + D[j, l]
            s3 = D[i, l] + D[j, k]
            S = np.sort(np.stack([s1, s2, s3]), axis=0)
            gap = S[2] - S[1]
            count += len(gap)
            m = int(gap.argmax())
            if gap[m] / 2 > best:
                best = gap[m] / 2
                wit = (ids[i], ids[j], ids[k[m]], ids[l[m]])
    return best, wit, count


def four_point_delta(g, sample="auto", seed=0, threshold=200):
    """Gromov four-point δ: half the gap between the two largest pair sums.

    sample="exhaustive" scans every quadruple; an integer k scans every
    quadruple of k seeded random vertices; "auto" is exhaustive up to
    `threshold` vertices and samples `threshold` vertices above that.
    """
    if not g.is_connected():
        raise ValueError("graph must be connected")
    n = g.n
    if n < 4:
        return DeltaReport(0.0, (), 0, False, n)
    if sample == "auto":
        sample = "exhaustive" if n <= threshold else threshold
    if sample == "exhaustive":
        ids = np.arange(n)
        D = g.distances()
        sampled = False
    else:
        k = min(int(sample), n)
        rng = np.random.default_rng(seed)
        ids = np.sort(rng.choice(n, size=k, replace=False))
        D = g.dist_rows(ids)[:, ids]
        sampled = k < n
    delta, wit, count = _delta_exact(D, ids)
    return DeltaReport(float(delta), tuple(int(v) for v in wit), count, sampled, len(ids))


def delta_of_quadruple(g, w, x, y, z):
    D = g.dist_rows([w, x, y, z])
    s = sorted([D[0, x] + D[2, z], D[0, y] + D[1, z], D[0, z] + D[1, y]])
    return (s[2] - s[1]) / 2


# ------------------------------------------------------------ Bowditch


@dataclass
class BowditchResult:
    ok: bool
    violation: tuple | None = None
    detail: str = ""


def _check_eta(g, eta, x, y):
    s = set(eta(x, y))
    if x not in s or y not in s:
        raise ValueError(f"eta({x},{y}) misses an endpoint")
    sub, _ = g.induced(s)
    if not sub.is_connected():
        raise ValueError(f"eta({x},{y}) is not connected")
    return sorted(s)


def bowditch_check(g, eta, D, pairs=None, triples=None):
    """Check both thin-set hypotheses at level D.

    (1) diam η(x,y) <= D whenever d(x,y) <= 1;  (2) η(x,y) lies in the
    D-neighbourhood of η(x,z) ∪ η(z,y).  Defaults to all pairs and all
    triples of vertices.
    """
    Dm = g.distances()
    n = g.n
    cache = {}

    def E(x, y):
        if (x, y) not in cache:
            cache[(x, y)] = _check_eta(g, eta, x, y)
        return cache[(x, y)]

    if pairs is None:
        pairs = [(x, y) for x in range(n) for y in range(n) if Dm[x, y] <= 1]
    for x, y in pairs:
        if Dm[x, y] > 1:
            continue
        s = E(x, y)
        diam = Dm[np.ix_(s, s)].max()
        if diam > D:
            return BowditchResult(False, (x, y), f"diam eta = {diam:g} > {D}")
    if triples is None:
        triples = ((x, y, z) for x in range(n) for y in range(n) for z in range(n))
    for x, y, z in triples:
        s = E(x, y)
        t = sorted(set(E(x, z)) | set(E(z, y)))
        gap = Dm[np.ix_(s, t)].min(1).max()
        if gap > D:
            return BowditchResult(False, (x, y, z), f"eta(x,y) leaves the {D}-neighbourhood by {gap - D:g}")
    return BowditchResult(True)


# ------------------------------------------------------------ rectangles


def hausdorff(Dm, A, B):
    sub = Dm[np.ix_(A, B)]
    return float(max(sub.min(1).max(), sub.min(0).max()))


@dataclass
class RectangleClass:
    rect: object
    classification: str
    K_horizontal: float
    K_vertical: float


def classify_rectangles(host, cone, rects, K):
    """Thinness of each rectangle's lines in the cone-off metric.

    Horizontal lines are [0,a]×{j}, vertical lines {i}×[0,b]; a family is
    thin when all its lines are pairwise within Hausdorff distance K.
    """
    if cone.n < host.n:
        raise ValueError("cone-off must contain the host vertices")
    out = []
    for r in rects:
        vs = sorted(set(r.embedding.values()))
        pos = {v: i for i, v in enumerate(vs)}
        Dm = cone.dist_rows(vs)[:, vs]
        rows = [[pos[v] for v in r.row(j)] for j in range(r.b + 1)]
        cols = [[pos[v] for v in r.column(i)] for i in range(r.a + 1)]
        kh = max((hausdorff(Dm, p, q) for p in rows for q in rows), default=0.0)
        kv = max((hausdorff(Dm, p, q) for p in cols for q in cols), default=0.0)
        h, v = kh <= K, kv <= K
        c = "both" if h and v else "horizontal-thin" if h else "vertical-thin" if v else "neither"
        out.append(RectangleClass(r, c, kh, kv))
    return out


# ------------------------------------------------------------ detours


def detour_length(g, x, y, center, s):
    """Shortest x–y path avoiding the closed ball B(center, s), or inf.

    The endpoints themselves are never blocked.  Requires center on a
    geodesic from x to y at distance >= s from both ends.
    """
    dc = g.dist_from(center)
    dxy = g.dist_from(x)[y]
    if dc[x] + dc[y] != dxy or dc[x] < s or dc[y] < s:
        raise ValueError("center must lie on a geodesic [x,y] at distance >= s from both ends")
    blocked = (dc <= s)
    blocked[x] = blocked[y] = False
    dist = {x: 0}
    q = deque([x])
    while q:
        v = q.popleft()
        if v == y:
            return dist[v]
        for w in g.adj[v]:
            if w not in dist and not blocked[w]:
                dist[w] = dist[v] + 1
                q.append(w)
    return math.inf


# ------------------------------------------------------------ sequences


def nogentle_sequences(n, s):
    """r_n = ln(n)^2, R_n = ln(n)^(2(s+1)), σ_n = ln(n)^(2s+3), with the two facts.

    fact_R: R_n < n/2.  ratio: σ_n / (n / ln n)^(1/s), which must tend to 0.
    """
    if n < 2 or s < 1:
        raise ValueError("need n >= 2 and s >= 1")
    L = math.log(n)
    r = L ** 2
    R = L ** (2 * (s + 1))
    sigma = L ** (2 * s + 3)
    return {"n": n, "s": s, "r": r, "R": R, "sigma": sigma,
            "fact_R": R < n / 2, "ratio": sigma / (n / L) ** (1 / s)}


def binary_tree(depth):
    """Rooted binary tree to the given depth; payloads are bit strings, root ''."""
    words = [""]
    es = []
    for i in range(2 ** depth - 1):
        for b in "01":
            es.append((i, len(words)))
            words.append(words[i] + b)
    return FiniteGraph(len(words), es, words, meta={"center": 0, "radius": depth})


@dataclass
class SphereReport:
    levels: list = field(default_factory=list)
    first_violation: int | None = None
    sizes_ok: bool = True


def sphere_growth_check(tree, sigma, phi):
    """For each n: does some x with d(o,x)=n satisfy d(φ(o),φ(x)) >= σ(n)?

    Also checks |S(o,n)| = 2^n.  Levels are (n, |S(o,n)|, max image distance, holds).
    """
    o = tree.meta.get("center", 0)
    d = tree.dist_from(o)
    depth = int(d.max())
    img = phi.image
    dz = phi.codomain.dist_from(img[o])
    rep = SphereReport()
    for n in range(depth + 1):
        S = np.flatnonzero(d == n)
        far = float(dz[img[S]].max())
        holds = far >= sigma(n)
        rep.levels.append((n, len(S), far, holds))
        if len(S) != 2 ** n:
            rep.sizes_ok = False
        if not holds and rep.first_violation is None:
            rep.first_violation = n
    return rep
