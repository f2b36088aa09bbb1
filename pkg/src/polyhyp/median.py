"""Hyperplanes of median and quasi-median graphs.

A hyperplane is an equivalence class of edges, generated by "opposite sides
of an induced 4-cycle" and, in quasi-median mode, also by "sides of a common
triangle".  Deleting the edges of a hyperplane cuts the host into halfspaces
(median) or sectors (quasi-median).

Hosts are finite, usually balls.  When the host carries ball metadata
(`meta["center"]`, `meta["radius"]`) every class with an edge touching the
boundary sphere is flagged non-interior, since truncation can split or merge
classes of the ambient graph there.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

MODES = ("median", "quasi-median")


class SearchExhausted(RuntimeError):
    pass


class NonUniqueError(RuntimeError):
    pass


def induced_squares(g):
    """Yield induced 4-cycles v-a-w-b once each, as (v, a, w, b)."""
    for v in range(g.n):
        nv = set(g.adj[v])
        for a, b in itertools.combinations(g.adj[v], 2):
            if g.has_edge(a, b):
                continue
            for w in set(g.adj[a]).intersection(g.adj[b]):
                # v is the least vertex of the square and a < b, so each square appears once
                if w <= v or w in nv:
                    continue
                yield v, a, w, b


def _e(u, v):
    return (u, v) if u < v else (v, u)


class HyperplaneDecomposition:
    def __init__(self, host, mode, edge_class, classes, transverse):
        self.host = host
        self.mode = mode
        self.edge_class = edge_class
        self.classes = classes
        self.transverse_pairs = transverse
        self._labels = {}
        self._sectors = None
        self._edges = np.array(sorted(edge_class), dtype=np.int64).reshape(-1, 2)
        self._ecls = np.array([edge_class[tuple(e)] for e in self._edges], dtype=np.int64)
        self.interior = self._interior_flags()

    def __len__(self):
        return len(self.classes)

    def __repr__(self):
        return f"HyperplaneDecomposition({self.mode}, {len(self.classes)} classes)"

    def _interior_flags(self):
        m = self.host.meta
        if "center" not in m or "radius" not in m:
            return [True] * len(self.classes)
        d = self.host.dist_from(m["center"])
        bd = d >= m["radius"]
        return [not any(bd[u] or bd[v] for u, v in es) for es in self.classes]

    def class_of(self, u, v):
        return self.edge_class[_e(u, v)]

    def labels_of(self, J):
        """Set of edge labels carried by class J."""
        return {self.host.edge_label(u, v) for u, v in self.classes[J]}

    def transverse(self, J, H):
        return (min(J, H), max(J, H)) in self.transverse_pairs

    def sector_labels(self, J):
        """Component label of every vertex once the edges of J are deleted."""
        if self._sectors is not None:
            return self._sectors[J]
        lab = self._labels.get(J)
        if lab is None:
            n = self.host.n
            keep = self._ecls != J
            e = self._edges[keep]
            m = csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
            lab = connected_components(m, directed=False)[1].astype(np.int32)
            self._labels[J] = lab
        return lab

    def sector_matrix(self):
        """(classes × vertices) array of sector labels."""
        if self._sectors is None:
            S = np.empty((len(self.classes), self.host.n), dtype=np.int32)
            for J in range(len(self.classes)):
                S[J] = self.sector_labels(J)
            self._sectors = S
            self._labels = {}
        return self._sectors


def hyperplanes(g, mode="median"):
    """Partition the edges of g into hyperplane classes by union-find."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not g.is_connected():
        raise ValueError("host must be connected")
    edges = g.sorted_edges()
    ds = DisjointSet(edges)
    squares = []
    for v, a, w, b in induced_squares(g):
        e1, e2, e3, e4 = _e(v, a), _e(b, w), _e(v, b), _e(a, w)
        ds.merge(e1, e2)
        ds.merge(e3, e4)
        squares.append((e1, e3))
    if mode == "quasi-median":
        for u, v in edges:
            for w in set(g.adj[u]).intersection(g.adj[v]):
                ds.merge((u, v), _e(u, w))
                ds.merge((u, v), _e(v, w))
    roots = {}
    edge_class = {}
    classes = []
    for e in edges:
        r = ds[e]
        if r not in roots:
            roots[r] = len(classes)
            classes.append([])
        edge_class[e] = roots[r]
        classes[roots[r]].append(e)
    trans = set()
    for e1, e3 in squares:
        J, H = edge_class[e1], edge_class[e3]
        if J != H:
            trans.add((min(J, H), max(J, H)))
    return HyperplaneDecomposition(g, mode, edge_class, classes, trans)


@dataclass
class SectorPartition:
    hyperplane: int
    components: list = field(default_factory=list)


def sectors(dec, J):
    if not 0 <= J < len(dec.classes):
        raise KeyError(J)
    lab = dec.sector_labels(J)
    comps = {}
    for v, c in enumerate(lab):
        comps.setdefault(int(c), set()).add(v)
    return SectorPartition(J, [comps[c] for c in sorted(comps)])


def path_classes(dec, path):
    g = dec.host
    out = []
    for u, v in zip(path, path[1:]):
        if not g.has_edge(u, v):
            raise ValueError(f"{u} and {v} are not adjacent")
        out.append(dec.class_of(u, v))
    return out


def is_geodesic(dec, path):
    """A path is geodesic iff it crosses no hyperplane twice."""
    cl = path_classes(dec, list(path))
    return len(set(cl)) == len(cl)


def separating_hyperplanes(dec, x, y):
    if dec._sectors is not None:
        S = dec._sectors
        return set(np.flatnonzero(S[:, x] != S[:, y]).tolist())
    return {J for J in range(len(dec.classes)) if dec.sector_labels(J)[x] != dec.sector_labels(J)[y]}


def median_vertex(g, x, y, z):
    D = g.dist_rows([x, y, z])
    dxy, dyz, dxz = D[0, y], D[1, z], D[0, z]
    ok = (D[0] + D[1] == dxy) & (D[1] + D[2] == dyz) & (D[0] + D[2] == dxz)
    m = np.flatnonzero(ok)
    return int(m[0]) if len(m) == 1 else None


def interval(g, x, y):
    D = g.dist_rows([x, y])
    return set(np.flatnonzero(D[0] + D[1] == D[0, y]).tolist())


def median_triangle(g, x1, x2, x3):
    """The median triangle of smallest perimeter.

    Every median triangle satisfies d(xi,xj) = d(xi,yi) + d(yi,yj) + d(yj,xj),
    so its perimeter is sum d(xi,xj) - 2 sum d(xi,yi); we maximise the latter.
    Raises NonUniqueError when two distinct triangles tie.
    """
    xs = (x1, x2, x3)
    D = g.dist_rows(xs)
    d12, d13, d23 = D[0, x2], D[0, x3], D[1, x3]
    c1 = np.flatnonzero((D[0] + D[1] == d12) & (D[0] + D[2] == d13))
    c2 = np.flatnonzero((D[1] + D[0] == d12) & (D[1] + D[2] == d23))
    c3 = np.flatnonzero((D[2] + D[0] == d13) & (D[2] + D[1] == d23))
    cand = np.unique(np.concatenate([c1, c2, c3]))
    DC = g.dist_rows(cand)
    pos = {int(v): i for i, v in enumerate(cand)}
    best, found = -1, []
    for y1 in c1:
        r1 = DC[pos[int(y1)]]
        ok2 = c2[D[0, y1] + r1[c2] + D[1, c2] == d12]
        for y2 in ok2:
            r2 = DC[pos[int(y2)]]
            ok3 = c3[(D[0, y1] + r1[c3] + D[2, c3] == d13) & (D[1, y2] + r2[c3] + D[2, c3] == d23)]
            if not len(ok3):
                continue
            s = D[0, y1] + D[1, y2] + D[2, ok3]
            top = s.max()
            hits = [(int(y1), int(y2), int(y3)) for y3 in ok3[s == top]]
            if top > best:
                best, found = top, hits
            elif top == best:
                found += hits
    if len(found) != 1:
        raise NonUniqueError(f"{len(found)} minimal median triangles for {xs}")
    return found[0]


def gate(g, x, Y):
    Y = sorted(set(Y))
    sub, _ = g.induced(Y)
    if not sub.is_connected():
        raise ValueError("Y must induce a connected subgraph")
    dx = g.dist_from(x)
    DY = g.dist_rows(Y)[:, Y]
    ok = [y for i, y in enumerate(Y) if np.all(dx[Y] == dx[y] + DY[i])]
    return ok[0] if len(ok) == 1 else None


def parallel_key(dec, a, b):
    """The sectors containing a but not b, as (class, sector label) pairs."""
    S = dec.sector_matrix()
    sep = np.flatnonzero(S[:, a] != S[:, b])
    return frozenset(zip(sep.tolist(), S[sep, a].tolist()))


def parallel_pairs(dec, a, b, x, y):
    return parallel_key(dec, a, b) == parallel_key(dec, x, y)


def parallel_geodesic(dec, alpha, x, y):
    """Geodesic from x to y crossing the classes of alpha in the same order, or None."""
    g = dec.host
    dy = g.dist_from(y)
    path = [x]
    for J in path_classes(dec, list(alpha)):
        cur = path[-1]
        nxt = [w for w in g.adj[cur] if dec.class_of(cur, w) == J and dy[w] == dy[cur] - 1]
        if not nxt:
            return None
        path.append(nxt[0])
    return path if path[-1] == y else None


# ---------------------------------------------------------- grid embeddings


@dataclass(frozen=True)
class FlatRectangle:
    a: int
    b: int
    embedding: dict

    def row(self, j):
        return [self.embedding[(i, j)] for i in range(self.a + 1)]

    def column(self, i):
        return [self.embedding[(i, j)] for j in range(self.b + 1)]

    def transposed(self):
        return FlatRectangle(self.b, self.a, {(j, i): v for (i, j), v in self.embedding.items()})


def is_isometric(g, emb):
    pts = list(emb)
    vs = [emb[p] for p in pts]
    if len(set(vs)) != len(vs):
        return False
    D = g.dist_rows(vs)[:, vs]
    P = np.array(pts)
    L1 = np.abs(P[:, None, :] - P[None, :, :]).sum(-1)
    return bool(np.array_equal(D, L1))


def _grid_images(a, b, emb):
    """The embedding read in each of the 8 symmetric orientations."""
    out = []
    for swap in (False, True):
        A, B = (b, a) if swap else (a, b)
        for fi in (False, True):
            for fj in (False, True):
                key = []
                for j in range(B + 1):
                    for i in range(A + 1):
                        p, q = (j, i) if swap else (i, j)
                        if fi:
                            p = a - p
                        if fj:
                            q = b - q
                        key.append(emb[(p, q)])
                out.append(((A, B), tuple(key)))
    return out


def flat_rectangles(g, a_max, b_max):
    """All isometric grids [0,a]×[0,b], 1<=a<=a_max, 1<=b<=b_max, up to symmetry."""
    D = g.distances()
    seen = set()
    out = []
    for a in range(1, a_max + 1):
        for b in range(1, b_max + 1):
            pts = [(i, j) for j in range(b + 1) for i in range(a + 1)]
            for emb in _fill(g, D, pts, {}):
                key = min(k for k in _grid_images(a, b, emb) if k[0][0] <= a_max and k[0][1] <= b_max)
                if key in seen:
                    continue
                seen.add(key)
                for k in _grid_images(a, b, emb):
                    seen.add(k)
                out.append(FlatRectangle(a, b, dict(emb)))
    return out


def _fill(g, D, pts, fixed, cand_fn=None):
    """Backtracking isometric fill of lattice points, in the given order.

    Each point after the first must have an already-placed grid neighbour;
    candidates are the host neighbours of that image at the right distances.
    """
    emb = dict(fixed)
    todo = [p for p in pts if p not in emb]
    placed = [p for p in pts if p in emb]

    def cands(p):
        if cand_fn is not None:
            return cand_fn(p, emb)
        if not emb:
            return range(g.n)
        i, j = p
        for q in ((i - 1, j), (i, j - 1), (i + 1, j), (i, j + 1)):
            if q in emb:
                return g.adj[emb[q]]
        return range(g.n)

    def rec(k):
        if k == len(todo):
            yield dict(emb)
            return
        p = todo[k]
        used = set(emb.values())
        for v in cands(p):
            if v in used:
                continue
            if all(D[v, emb[q]] == abs(p[0] - q[0]) + abs(p[1] - q[1]) for q in placed):
                emb[p] = v
                placed.append(p)
                yield from rec(k + 1)
                placed.pop()
                del emb[p]

    yield from rec(0)


@dataclass(frozen=True)
class Staircase:
    a: int
    b: int
    corner: int
    segment: tuple
    embedding: dict

    @property
    def degenerate(self):
        return self.a == 0 or self.b == 0


def staircase_witness(g, geodesic, z):
    """Isometric staircase with corner z whose broken path lies on `geodesic`.

    Tries every subsegment p_i..p_j with d(z,p_i) + d(z,p_j) = j - i as the
    broken path (so a + b <= d(x,y)); lattice coordinates of the path follow
    from distances to z, and the region below it is filled by backtracking.
    """
    path = list(geodesic)
    L = len(path) - 1
    dz = g.dist_from(z)
    if dz[path[0]] + dz[path[-1]] != g.dist_from(path[0])[path[-1]]:
        raise ValueError("z is not in the interval between the endpoints")
    dd = g.dist_rows(path)
    if not np.all(dd[0, path] == np.arange(L + 1)):
        raise ValueError("path is not a geodesic")
    D = None
    segs = [(i, j) for i in range(L + 1) for j in range(i, L + 1) if dz[path[i]] + dz[path[j]] == j - i]
    segs.sort(key=lambda s: s[0] - s[1])
    if z in path:
        # z on the geodesic: the straight piece from z to the farther end is a
        # staircase with a = 0, and the simplest witness
        k = path.index(z)
        segs = [(k, L) if L - k >= k else (0, k)] + segs
    for i, j in segs:
        a, b = int(dz[path[i]]), int(dz[path[j]])
        coords = []
        for k in range(i, j + 1):
            r = int(dz[path[k]])
            s2, t2 = r + a - (k - i), r - a + (k - i)
            if s2 % 2 or t2 % 2 or s2 < 0 or t2 < 0:
                break
            coords.append((s2 // 2, t2 // 2))
        else:
            steps = zip(coords, coords[1:])
            if not all((s1 - s0, t1 - t0) in ((-1, 0), (0, 1)) for (s0, t0), (s1, t1) in steps):
                continue
            top = {}
            for s, t in coords:
                top[t] = max(top.get(t, -1), s)
            region = [(s, t) for t in range(b + 1) for s in range(top[t] + 1)]
            fixed = {c: path[i + k] for k, c in enumerate(coords)}
            fixed[(0, 0)] = z
            if not is_isometric(g, fixed):
                continue
            if D is None:
                D = g.distances()
            for emb in _fill(g, D, region, fixed):
                return Staircase(a, b, z, (i, j), emb)
    raise SearchExhausted(f"no staircase found over {len(segs)} segments (a+b <= {L})")
