"""Finite graphs, balls, BFS metrics and labeled induced-subgraph search.

Vertices are dense integers 0..n-1.  A vertex may carry an arbitrary
payload (a reduced word, a lamplighter state, a name...) and edges may carry
a label.  Everything here is immutable after construction, so a graph can be
shared read-only between worker threads.

Cardinality classes of vertex groups are the strings "2" (order exactly two)
and "3+" (order at least three, including infinite).  Pattern vertices carry
one of the constraints "2", "3+", "nontrivial" or None.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

CARD_CLASSES = ("2", "3+")
CONSTRAINTS = ("2", "3+", "nontrivial", None)


class UnknownVertexError(KeyError):
    pass


class FiniteGraph:
    """Simple undirected graph on 0..n-1 with optional payloads and edge labels.

    `meta` holds free-form metadata; balls store "center" and "radius" there,
    which the hyperplane code uses to flag boundary classes.
    """

    def __init__(self, n, edges=(), payloads=None, edge_labels=None, meta=None):
        n = int(n)
        if n < 0:
            raise ValueError("negative vertex count")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise UnknownVertexError((u, v))
            es.add((u, v) if u < v else (v, u))
        self.n = n
        self.edges = frozenset(es)
        nbrs = [[] for _ in range(n)]
        for u, v in es:
            nbrs[u].append(v)
            nbrs[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in nbrs)
        if payloads is None:
            payloads = [None] * n
        payloads = list(payloads)
        if len(payloads) != n:
            raise ValueError("payload count does not match vertex count")
        self.payloads = tuple(payloads)
        labels = {}
        if edge_labels:
            for (u, v), lab in edge_labels.items():
                e = (u, v) if u < v else (v, u)
                if e not in es:
                    raise ValueError(f"label on non-edge {e}")
                labels[e] = lab
        self.edge_labels = labels
        self.meta = dict(meta or {})
        self._csr = None
        self._rows = {}
        self._full = None
        self._index = None

    def __repr__(self):
        return f"FiniteGraph(n={self.n}, m={len(self.edges)})"

    def __len__(self):
        return self.n

    def __contains__(self, v):
        return isinstance(v, (int, np.integer)) and 0 <= v < self.n

    def check(self, v):
        if v not in self:
            raise UnknownVertexError(v)
        return int(v)

    def degree(self, v):
        return len(self.adj[v])

    def has_edge(self, u, v):
        return ((u, v) if u < v else (v, u)) in self.edges

    def edge_label(self, u, v):
        return self.edge_labels.get((u, v) if u < v else (v, u))

    def sorted_edges(self):
        return sorted(self.edges)

    def index(self, payload):
        """Vertex id carrying `payload` (payloads must be hashable)."""
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.payloads)}
        try:
            return self._index[payload]
        except KeyError:
            raise UnknownVertexError(payload) from None

    def csr(self):
        if self._csr is None:
            if self.edges:
                e = np.array(sorted(self.edges), dtype=np.int64)
                r = np.concatenate([e[:, 0], e[:, 1]])
                c = np.concatenate([e[:, 1], e[:, 0]])
            else:
                r = c = np.zeros(0, dtype=np.int64)
            self._csr = csr_matrix((np.ones(len(r)), (r, c)), shape=(self.n, self.n))
        return self._csr

    def dist_from(self, s):
        """Distances from s to every vertex (float array, inf when unreachable)."""
        s = self.check(s)
        if self._full is not None:
            return self._full[s]
        row = self._rows.get(s)
        if row is None:
            row = shortest_path(self.csr(), method="D", unweighted=True, indices=s)
            self._rows[s] = row
        return row

    def dist_rows(self, sources):
        """Distance rows for several sources at once, shape (len(sources), n)."""
        sources = [self.check(s) for s in sources]
        if self._full is not None:
            return self._full[sources]
        if not sources:
            return np.zeros((0, self.n))
        return shortest_path(self.csr(), method="D", unweighted=True, indices=sources)

    def distances(self):
        """All-pairs distance matrix (cached; quadratic memory)."""
        if self._full is None:
            if self.n == 0:
                self._full = np.zeros((0, 0))
            else:
                self._full = shortest_path(self.csr(), method="D", unweighted=True)
        return self._full

    def is_connected(self):
        if self.n <= 1:
            return True
        k, _ = connected_components(self.csr(), directed=False)
        return k == 1

    def components(self, removed_edges=()):
        """Component label per vertex after deleting `removed_edges`."""
        if not removed_edges:
            return connected_components(self.csr(), directed=False)[1]
        gone = {(u, v) if u < v else (v, u) for u, v in removed_edges}
        keep = [e for e in self.edges if e not in gone]
        if keep:
            e = np.array(keep, dtype=np.int64)
            m = csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(self.n, self.n))
        else:
            m = csr_matrix((self.n, self.n))
        return connected_components(m, directed=False)[1]

    def induced(self, vertices, meta=None):
        """Induced subgraph; returns (graph, original ids in new order)."""
        ids = sorted({self.check(v) for v in vertices})
        pos = {v: i for i, v in enumerate(ids)}
        es = []
        labels = {}
        for v in ids:
            for w in self.adj[v]:
                if v < w and w in pos:
                    es.append((pos[v], pos[w]))
                    lab = self.edge_labels.get((v, w))
                    if lab is not None:
                        labels[(pos[v], pos[w])] = lab
        sub = FiniteGraph(len(ids), es, [self.payloads[v] for v in ids], labels, meta)
        return sub, ids

    def with_edges(self, extra, label=None):
        """Same vertices plus extra edges (labels kept where already present)."""
        labels = dict(self.edge_labels)
        es = set(self.edges)
        for u, v in extra:
            e = (u, v) if u < v else (v, u)
            if e not in es:
                es.add(e)
                if label is not None:
                    labels[e] = label
        return FiniteGraph(self.n, es, self.payloads, labels, self.meta)

    def diameter(self):
        d = self.distances()
        return float(d.max()) if d.size else 0.0


@dataclass(frozen=True)
class BallWithRadii:
    graph: FiniteGraph
    center: int
    radius: int
    dist: np.ndarray
    ids: tuple = field(default=())

    def __post_init__(self):
        assert self.dist[self.center] == 0
        assert self.dist.max(initial=0) <= self.radius


def bfs_ball(g, p, R):
    """Induced subgraph on the closed ball B(p,R), with exact distances.

    The result's graph carries meta center/radius so hyperplane
    decompositions computed on it can flag boundary classes.
    """
    p = g.check(p)
    if R < 0:
        raise ValueError("negative radius")
    dist = {p: 0}
    q = deque([p])
    while q:
        v = q.popleft()
        if dist[v] == R:
            continue
        for w in g.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    sub, ids = g.induced(dist)
    center = ids.index(p)
    sub.meta.update(center=center, radius=int(R))
    d = np.array([dist[v] for v in ids], dtype=np.int64)
    return BallWithRadii(sub, center, int(R), d, tuple(ids))


def distance(g, x, y):
    """Edge-count distance, math.inf when x and y lie in different components."""
    x, y = g.check(x), g.check(y)
    if x == y:
        return 0
    d = g.dist_from(x)[y]
    return math.inf if np.isinf(d) else int(d)


# ---------------------------------------------------------------- builders


def path_graph(n):
    return FiniteGraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return FiniteGraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return FiniteGraph(n, itertools.combinations(range(n), 2))


def complete_bipartite(a, b):
    return FiniteGraph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(k):
    return FiniteGraph(1 << k, [(v, v ^ (1 << i)) for v in range(1 << k) for i in range(k) if not v & (1 << i)],
                       payloads=list(range(1 << k)))


def grid_graph(xs, ys):
    """Grid on the integer box xs × ys; payloads are the (x, y) coordinates."""
    pts = [(x, y) for x in xs for y in ys]
    pos = {p: i for i, p in enumerate(pts)}
    es = []
    for (x, y), i in pos.items():
        for q in ((x + 1, y), (x, y + 1)):
            if q in pos:
                es.append((i, pos[q]))
    return FiniteGraph(len(pts), es, pts)


def disjoint_union(g, h):
    es = list(g.edges) + [(u + g.n, v + g.n) for u, v in h.edges]
    return FiniteGraph(g.n + h.n, es, list(g.payloads) + list(h.payloads))


def join(g, h):
    """Disjoint union plus every edge between the two sides."""
    u = disjoint_union(g, h)
    extra = [(i, g.n + j) for i in range(g.n) for j in range(h.n)]
    return FiniteGraph(u.n, list(u.edges) + extra, u.payloads)


# --------------------------------------------------------- pattern search


@dataclass(frozen=True)
class LabeledPattern:
    name: str
    graph: FiniteGraph
    constraints: tuple

    def __post_init__(self):
        if len(self.constraints) != self.graph.n:
            raise ValueError("one constraint per pattern vertex")
        for c in self.constraints:
            if c not in CONSTRAINTS:
                raise ValueError(f"bad constraint {c!r}")


def card_of(payload):
    """Cardinality class stored in a vertex payload, or None."""
    if payload in CARD_CLASSES:
        return payload
    if isinstance(payload, dict):
        return payload.get("card")
    return getattr(payload, "card", None)


def satisfies(label, constraint):
    if constraint is None:
        return True
    if constraint == "nontrivial":
        # vertex groups are nontrivial by convention, an unknown class included
        return True
    return label == constraint


def find_induced(g, labels, pat):
    """Injective map pattern -> g realizing pat as a labeled induced subgraph.

    Returns a tuple (image of pattern vertex i at position i) or None.  The
    search is exhaustive, so None certifies that no embedding exists.
    `labels` may be None, in which case classes are read from payloads.
    """
    k = pat.graph.n
    if k == 0:
        return ()
    if labels is None:
        labels = [card_of(p) for p in g.payloads]
    if len(labels) != g.n:
        raise ValueError("labels must cover every vertex")
    P = pat.graph
    # connected-first order: each vertex after the first, if possible, adjacent
    # to an earlier one, largest degree first
    order = []
    left = set(range(k))
    while left:
        touching = [v for v in left if any(P.has_edge(v, w) for w in order)]
        pool = touching or list(left)
        v = max(pool, key=lambda v: (P.degree(v), -v))
        order.append(v)
        left.remove(v)
    cands = []
    for v in order:
        c = pat.constraints[v]
        cands.append([x for x in range(g.n) if g.degree(x) >= P.degree(v) and satisfies(labels[x], c)])
    img = [None] * k
    used = set()

    def extend(i):
        if i == k:
            return True
        v = order[i]
        for x in cands[i]:
            if x in used:
                continue
            ok = True
            for j in range(i):
                w = order[j]
                if P.has_edge(v, w) != g.has_edge(x, img[w]):
                    ok = False
                    break
            if not ok:
                continue
            img[v] = x
            used.add(x)
            if extend(i + 1):
                return True
            used.discard(x)
            img[v] = None
        return False

    return tuple(img) if extend(0) else None


def _pattern(name, g, cons):
    return LabeledPattern(name, g, tuple(cons))


def nf_patterns():
    """The three configurations giving a free subgroup of rank two."""
    nf1 = _pattern("NF1", FiniteGraph(2), ("nontrivial", "3+"))
    nf2 = _pattern("NF2", FiniteGraph(3), ("2", "2", "2"))
    nf3 = _pattern("NF3", FiniteGraph(3, [(1, 2)]), ("2", "2", "2"))
    return [nf1, nf2, nf3]


def join_pattern(p, q):
    return _pattern(f"{p.name}*{q.name}", join(p.graph, q.graph), p.constraints + q.constraints)


def builtin_patterns():
    """Fixed pattern library.

    NF1, NF2, NF3; the nine joins NFi*NFj (ordered, so NF1*NF2 and NF2*NF1
    both appear); and the unlabeled graphs C4, K33, K33+ and K33++.  The
    joins stand in for the product-of-free-groups figure, which is
    reconstructed here as joins of two NF configurations.
    """
    nf = nf_patterns()
    out = list(nf)
    out += [join_pattern(p, q) for p in nf for q in nf]
    k1k2 = FiniteGraph(3, [(1, 2)])
    out.append(_pattern("C4", cycle_graph(4), (None,) * 4))
    out.append(_pattern("K33", complete_bipartite(3, 3), (None,) * 6))
    out.append(_pattern("K33+", join(FiniteGraph(3), k1k2), (None,) * 6))
    out.append(_pattern("K33++", join(k1k2, k1k2), (None,) * 6))
    return out


def get_pattern(name):
    for p in builtin_patterns():
        if p.name == name:
            return p
    raise KeyError(name)


def is_isomorphic(g, h):
    """Tiny-graph isomorphism test by exhaustive search."""
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    return find_induced(h, None, LabeledPattern("g", g, (None,) * g.n)) is not None


# --------------------------------------------------------- exchange format


def graph_to_dict(g, labels=None, edge_classes=None):
    verts = []
    for i, p in enumerate(g.payloads):
        d = {"id": i}
        if isinstance(p, dict):
            if "label" in p:
                d["label"] = p["label"]
        elif p is not None:
            d["label"] = p if isinstance(p, str) else repr(p)
        c = labels[i] if labels is not None else card_of(p)
        if c is not None:
            d["card"] = c
        verts.append(d)
    out = {"vertices": verts, "edges": [list(e) for e in g.sorted_edges()]}
    if g.edge_labels:
        out["edge_labels"] = [[u, v, str(l)] for (u, v), l in sorted(g.edge_labels.items())]
    if edge_classes is not None:
        out["edge_classes"] = [[u, v, int(c)] for (u, v), c in sorted(edge_classes.items())]
    return out


def graph_from_dict(d):
    """Inverse of graph_to_dict; payloads become {"label", "card"} dicts.

    External ids may be arbitrary; they are mapped to dense ids in listed order.
    """
    verts = d.get("vertices", [])
    ext = {}
    payloads = []
    for i, v in enumerate(verts):
        ext[v.get("id", i)] = i
        p = {k: v[k] for k in ("label", "card") if k in v}
        payloads.append(p or None)
    es = [(ext[u], ext[v]) for u, v in d.get("edges", [])]
    labels = {(ext[u], ext[v]): l for u, v, l in d.get("edge_labels", [])}
    return FiniteGraph(len(verts), es, payloads, labels)


def write_graph(g, path, **kw):
    with open(path, "w") as f:
        json.dump(graph_to_dict(g, **kw), f, indent=1)


def read_graph(path):
    with open(path) as f:
        return graph_from_dict(json.load(f))
