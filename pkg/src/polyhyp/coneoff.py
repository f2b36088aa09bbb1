"""Cone-offs, syllabic collections, horoballs and gentleness profiles.

The cone-off of a host X along a collection P adds an edge between any two
vertices lying in a common member.  For the canonical map X -> ConeOff(X,P)
(or any vertex map φ: X -> Z) the profile

    G[R1][R2] = max_{p,q} |B(p,R1) ∩ φ^{-1}(B(q,R2))|

measures how gentle φ is; `fit_constant` then finds the least C with
G <= C·F(C·R1, C·R2) for a named bound family F.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .graphcore import FiniteGraph


class CoverageError(ValueError):
    """A requested radius reaches past the generated part of a host."""


# ------------------------------------------------------------- collections


class Collection:
    """Distinct, nonempty, connected vertex subsets of a host, with tags.

    on_disconnected="split" replaces a disconnected member by its
    components (useful for cosets cut by a ball boundary); the default
    rejects it.
    """

    def __init__(self, host, members, tags=None, on_disconnected="error"):
        self.host = host
        members = [sorted(set(int(v) for v in m)) for m in members]
        tags = list(tags) if tags is not None else ["custom"] * len(members)
        if len(tags) != len(members):
            raise ValueError("one tag per member")
        out, out_tags, seen = [], [], set()
        for m, t in zip(members, tags):
            if not m:
                raise ValueError("empty member")
            for v in m:
                host.check(v)
            sub, ids = host.induced(m)
            if sub.is_connected():
                pieces = [m]
            elif on_disconnected == "split":
                lab = sub.components()
                pieces = [[ids[i] for i in np.flatnonzero(lab == c)] for c in np.unique(lab)]
            else:
                raise ValueError(f"member {t!r} does not induce a connected subgraph")
            for piece in pieces:
                key = tuple(piece)
                if key not in seen:
                    seen.add(key)
                    out.append(list(piece))
                    out_tags.append(t)
        self.members = out
        self.tags = out_tags

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def incidence(self):
        """Boolean (vertices × members) incidence matrix."""
        M = np.zeros((self.host.n, len(self.members)), dtype=bool)
        for j, m in enumerate(self.members):
            M[m, j] = True
        return M

    def multiplicity(self):
        """Local finiteness constant: max number of members through a vertex."""
        if not self.members:
            return 0
        return int(self.incidence().sum(1).max())

    def comembers(self):
        M = self.incidence().astype(np.float32)
        return (M @ M.T) > 0


def cone_off(host, P):
    """Host plus a clique on every member; vertex ids and metadata kept."""
    members = P.members if isinstance(P, Collection) else P
    extra = []
    for m in members:
        extra.extend(itertools.combinations(sorted(m), 2))
    return host.with_edges(extra)


def collection_growth(host, P, Rmax):
    """γ_P(R) = max over members P and x in P of |B(x,R) ∩ P|, R = 0..Rmax."""
    out = np.zeros(Rmax + 1, dtype=np.int64)
    for m in P.members:
        D = host.dist_rows(m)[:, m]
        for R in range(Rmax + 1):
            out[R] = max(out[R], int((D <= R).sum(1).max()))
    return out


def horoball(base, levels):
    """Combinatorial horoball over `base`: vertex (x, n) has id n*|base| + x.

    Vertical edges join (x,n) to (x,n+1); at level n, distinct x, y are joined
    when d_base(x,y) <= 2^n, so level 0 reproduces the base.
    """
    if levels < 0:
        raise ValueError("levels must be >= 0")
    N = base.n
    D = base.distances() if N else np.zeros((0, 0))
    es = []
    for n in range(levels + 1):
        iu, iv = np.nonzero(np.triu(D <= 2 ** n, 1))
        es.extend(zip((iu + n * N).tolist(), (iv + n * N).tolist()))
        if n < levels:
            es.extend((x + n * N, x + (n + 1) * N) for x in range(N))
    payloads = [(base.payloads[x] if base.payloads[x] is not None else x, n)
                for n in range(levels + 1) for x in range(N)]
    return FiniteGraph(N * (levels + 1), es, payloads)


# ------------------------------------------------------------ vertex maps


class VertexMap:
    """φ: domain -> codomain given by an image array."""

    def __init__(self, domain, codomain, image):
        image = np.asarray(image, dtype=np.int64)
        if image.shape != (domain.n,):
            raise ValueError("map must be total on the domain")
        if len(image) and (image.min() < 0 or image.max() >= codomain.n):
            raise ValueError("image outside the codomain")
        self.domain = domain
        self.codomain = codomain
        self.image = image
        self._lip = None

    @classmethod
    def identity(cls, g):
        return cls(g, g, np.arange(g.n))

    @classmethod
    def canonical(cls, host, P):
        """The canonical map from a host to its cone-off."""
        return cls(host, cone_off(host, P), np.arange(host.n))

    @classmethod
    def constant(cls, domain, point=None):
        if point is None:
            point = FiniteGraph(1)
        return cls(domain, point, np.zeros(domain.n, dtype=np.int64))

    @property
    def lipschitz(self):
        """Max over domain edges of the image distance."""
        if self._lip is None:
            worst = 0
            far = []
            for u, v in self.domain.edges:
                a, b = self.image[u], self.image[v]
                if a != b and not self.codomain.has_edge(a, b):
                    far.append((a, b))
                elif a != b:
                    worst = 1
            for a, b in far:
                worst = max(worst, self.codomain.dist_from(a)[b])
            self._lip = worst
        return self._lip


def _check_cover(g, p, R, what):
    m = g.meta
    if "center" in m and "radius" in m:
        if g.dist_from(m["center"])[p] + R > m["radius"]:
            raise CoverageError(f"{what}: ball of radius {R} about {p} leaves the generated radius {m['radius']}")


def fiber_count(phi, p, q, R1, R2):
    """|B(p,R1) ∩ φ^{-1}(B(q,R2))|, exact on the generated hosts."""
    X, Z = phi.domain, phi.codomain
    X.check(p)
    Z.check(q)
    _check_cover(X, p, R1, "domain")
    dx = X.dist_from(p)
    dz = Z.dist_from(q)
    return int(np.sum((dx <= R1) & (dz[phi.image] <= R2)))


@dataclass
class GentlenessProfile:
    G: np.ndarray
    sampling: str
    centers: list = field(default_factory=list)

    @property
    def R1max(self):
        return self.G.shape[0] - 1

    @property
    def R2max(self):
        return self.G.shape[1] - 1

    def eta_hat(self):
        """log G[R1max][R2] / log R1max for each R2 (nan when R1max < 2)."""
        if self.R1max < 2:
            return np.full(self.R2max + 1, np.nan)
        with np.errstate(divide="ignore"):
            return np.log(self.G[-1].astype(float)) / math.log(self.R1max)

    def is_monotone(self):
        G = self.G
        return bool(np.all(np.diff(G, axis=0) >= 0) and np.all(np.diff(G, axis=1) >= 0))

    def rows(self):
        eta = self.eta_hat()
        for R1 in range(self.R1max + 1):
            for R2 in range(self.R2max + 1):
                yield R1, R2, int(self.G[R1, R2]), float(eta[R2])


def _profile_one(phi, p, R1max, R2max, qmask):
    X, Z = phi.domain, phi.codomain
    dx = dijkstra(X.csr(), unweighted=True, indices=p, limit=R1max + 0.5)
    near = np.flatnonzero(dx <= R1max)
    imgs, inv = np.unique(phi.image[near], return_inverse=True)
    # weight of image u at radius R1: number of near vertices at distance <= R1 mapping to u
    W = np.zeros((R1max + 1, len(imgs)))
    lev = dx[near].astype(np.int64)
    for R1 in range(R1max + 1):
        W[R1] = np.bincount(inv[lev <= R1], minlength=len(imgs))
    DZ = dijkstra(Z.csr(), unweighted=True, indices=imgs, limit=R2max + 0.5)
    if DZ.ndim == 1:
        DZ = DZ[None, :]
    if qmask is not None:
        DZ = DZ[:, qmask]
    cols = np.flatnonzero(np.isfinite(DZ).any(0))
    DZ = DZ[:, cols]
    out = np.zeros((R1max + 1, R2max + 1), dtype=np.int64)
    if DZ.shape[1] == 0:
        return out
    for R2 in range(R2max + 1):
        C = W @ (DZ <= R2)
        out[:, R2] = np.rint(C.max(1)).astype(np.int64)
    return out


def default_centers(phi, R1max):
    """Exhaustive p over the inner ball of the domain, or all of it without metadata."""
    X = phi.domain
    m = X.meta
    if "center" in m and "radius" in m:
        d = X.dist_from(m["center"])
        return np.flatnonzero(d <= m["radius"] - R1max).tolist()
    return list(range(X.n))


def gentleness_profile(phi, R1max, R2max, sampling="exhaustive", q_centers=None, threads=1):
    """Max-table of fiber counts over p in the sample and q in the codomain.

    sampling: "exhaustive" (inner ball of the domain), "center" (the ball's
    center only) or an explicit list of domain vertices.
    """
    X = phi.domain
    if isinstance(sampling, str):
        if sampling == "exhaustive":
            ps = default_centers(phi, R1max)
        elif sampling == "center":
            ps = [X.meta.get("center", 0)]
        else:
            raise ValueError(f"unknown sampling {sampling!r}")
        desc = sampling
    else:
        ps = [int(p) for p in sampling]
        desc = "centers"
    if not ps:
        raise CoverageError(f"no domain vertex has its {R1max}-ball inside the host")
    for p in ps:
        _check_cover(X, p, R1max, "domain")
    qmask = None
    if q_centers is not None:
        qmask = np.zeros(phi.codomain.n, dtype=bool)
        qmask[list(q_centers)] = True
    work = lambda p: _profile_one(phi, p, R1max, R2max, qmask)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            tabs = list(ex.map(work, ps))
    else:
        tabs = [work(p) for p in ps]
    G = np.maximum.reduce(tabs)
    return GentlenessProfile(G, desc, ps)


# ---------------------------------------------------------- bound families


def family_log(name, x, y):
    """log F(x, y) for the named family, vectorised; x, y >= 1."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if name == "lin":
        return y * np.log(x)
    if name == "exp":
        return x
    if name.startswith("pol:"):
        return int(name[4:]) * np.log(x)
    raise ValueError(f"unknown family {name!r}")


def family_value(name, x, y):
    """Exact F(x,y) as a Python number (integers for pol and lin)."""
    if name == "lin":
        return x ** y
    if name == "exp":
        return math.exp(x)
    if name.startswith("pol:"):
        return x ** int(name[4:])
    raise ValueError(f"unknown family {name!r}")


@dataclass(frozen=True)
class FitResult:
    family: str
    C: int | None
    infinite: bool
    bound: int


def fit_constant(profile, family, bound=2 ** 16, cells=None, prefactor=True):
    """Least integer C in 1..bound with G <= C·F(C·R1, C·R2) on every cell.

    prefactor=False drops the leading C and fits G <= F(C·R1, C·R2).

    Only cells with R1 >= 1 and R2 >= 1 are used (all families degenerate at
    zero).  The predicate is monotone in C, so the least C is found by
    bisection; log comparisons are confirmed exactly when close.
    """
    G = profile.G if isinstance(profile, GentlenessProfile) else np.asarray(profile)
    if cells is None:
        cells = [(r1, r2) for r1 in range(1, G.shape[0]) for r2 in range(1, G.shape[1])]
    r1 = np.array([c[0] for c in cells], dtype=float)
    r2 = np.array([c[1] for c in cells], dtype=float)
    g = np.array([G[c] for c in cells], dtype=float)
    lg = np.log(np.maximum(g, 1))

    def ok(C):
        lc = math.log(C) if prefactor else 0.0
        rhs = lc + family_log(family, C * r1, C * r2)
        bad = lg > rhs + 1e-9
        if bad.any():
            return False
        close = np.flatnonzero(np.abs(lg - rhs) <= 1e-9)
        for i in close:
            if family != "exp" and C * r2[i] <= 4096:
                if int(g[i]) > (C if prefactor else 1) * family_value(family, C * int(r1[i]), C * int(r2[i])):
                    return False
        return True

    if not cells:
        return FitResult(family, 1, False, bound)
    if not ok(bound):
        return FitResult(family, None, True, bound)
    lo, hi = 1, bound
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return FitResult(family, lo, False, bound)


# ------------------------------------------------------------- syllabicity


@dataclass
class SyllabicWitness:
    cone_path: list
    host_path: list
    host_length: int


def _host_geodesic(host, u, v):
    du = host.dist_from(v)
    path = [u]
    while path[-1] != v:
        cur = path[-1]
        path.append(next(w for w in host.adj[cur] if du[w] == du[cur] - 1))
    return path


def _dag_sums(H, Cd, A, x, want_max=False):
    """Min (or max) of sum H[p_i, p_i+1] over cone geodesics from x to every vertex.

    Layers are the cone spheres about x; a step u -> v is a cone edge with
    Cd[x,v] = Cd[x,u] + 1.  Returns (sums, predecessor).
    """
    n = len(Cd)
    dc = Cd[x]
    fill = -np.inf if want_max else np.inf
    best = np.full(n, fill)
    pred = np.full(n, -1, dtype=np.int64)
    best[x] = 0.0
    finite = dc[np.isfinite(dc)]
    top = int(finite.max()) if len(finite) else 0
    layers = [np.flatnonzero(dc == k) for k in range(top + 1)]
    for k in range(top):
        U, L = layers[k], layers[k + 1]
        if not len(L):
            break
        S = np.where(A[np.ix_(U, L)], best[U][:, None] + H[np.ix_(U, L)], fill)
        i = S.argmax(0) if want_max else S.argmin(0)
        best[L] = S[i, np.arange(len(L))]
        pred[L] = U[i]
    return best, pred


def _local_problem(host, cone, x, y):
    dcx, dcy = cone.dist_rows([x, y])
    V = np.flatnonzero(dcx + dcy == dcx[y])
    H = host.dist_rows(V)[:, V]
    Cd = cone.dist_rows(V)[:, V]
    A = Cd == 1
    return V, H, Cd, A


def is_syllabic_pair(host, P, x, y, cone=None):
    """A cone geodesic from x to y whose host expansion is a host geodesic, or None."""
    cone = cone if cone is not None else cone_off(host, P)
    if x == y:
        return SyllabicWitness([x], [x], 0)
    V, H, Cd, A = _local_problem(host, cone, x, y)
    pos = {int(v): i for i, v in enumerate(V)}
    best, pred = _dag_sums(H, Cd, A, pos[x])
    j = pos[y]
    dh = host.dist_from(x)[y]
    if best[j] != dh:
        return None
    seq = [j]
    while seq[-1] != pos[x]:
        seq.append(int(pred[seq[-1]]))
    cone_path = [int(V[i]) for i in reversed(seq)]
    hp = [cone_path[0]]
    for u, v in zip(cone_path, cone_path[1:]):
        hp.extend(_host_geodesic(host, u, v)[1:])
    return SyllabicWitness(cone_path, hp, int(dh))


def quasi_inequality(host, path, A=1, B=0):
    """d_X(x,y) >= (1/A)·sum d_X(p_i,p_i+1) - B along the vertex sequence."""
    d = host.dist_from(path[0])[path[-1]]
    s = sum(host.dist_from(u)[v] for u, v in zip(path, path[1:]))
    return d >= s / A - B


def syllabic_all_pairs(host, P, cone=None, sources=None):
    """Check every pair (x,y), x in sources, for a host-extendable cone geodesic.

    Returns (True, None) or (False, (x, y)) for the first failing pair.
    """
    cone = cone if cone is not None else cone_off(host, P)
    H = host.distances()
    Cd = cone.distances()
    A = Cd == 1
    for x in (range(host.n) if sources is None else sources):
        best, _ = _dag_sums(H, Cd, A, x)
        bad = np.flatnonzero(best != H[x])
        if len(bad):
            return False, (int(x), int(bad[0]))
    return True, None


def is_strongly_syllabic_sample(host, P, pairs=None, cone=None):
    """Every cone geodesic between the sampled pairs extends to a host geodesic.

    Equivalent to: the largest host length over cone geodesics equals d_X.
    pairs=None checks all pairs.  Returns (ok, counterexample pair or None).
    """
    cone = cone if cone is not None else cone_off(host, P)
    if pairs is None:
        H = host.distances()
        Cd = cone.distances()
        A = Cd == 1
        for x in range(host.n):
            best, _ = _dag_sums(H, Cd, A, x, want_max=True)
            bad = np.flatnonzero(best != H[x])
            if len(bad):
                return False, (x, int(bad[0]))
        return True, None
    for x, y in pairs:
        if x == y:
            continue
        V, H, Cd, A = _local_problem(host, cone, x, y)
        pos = {int(v): i for i, v in enumerate(V)}
        best, _ = _dag_sums(H, Cd, A, pos[x], want_max=True)
        if best[pos[y]] != host.dist_from(x)[y]:
            return False, (x, y)
    return True, None


def quasi_syllabic_constants(host, P, pairs, grid_A=(1, 2, 3), grid_B=(0, 1, 2, 3), cone=None):
    """Least (A,B) in the grid certified by cone geodesics on the sampled pairs, or None.

    Cone geodesics are (A,B)-quasigeodesics in the cone-off for every A >= 1,
    B >= 0, so only the host inequality needs checking.
    """
    cone = cone if cone is not None else cone_off(host, P)
    worst = []
    for x, y in pairs:
        if x == y:
            continue
        V, H, Cd, A = _local_problem(host, cone, x, y)
        pos = {int(v): i for i, v in enumerate(V)}
        best, _ = _dag_sums(H, Cd, A, pos[x])
        worst.append((host.dist_from(x)[y], best[pos[y]]))
    for a in grid_A:
        for b in grid_B:
            if all(d >= s / a - b for d, s in worst):
                return a, b
    return None


# ------------------------------------------------------- parallel closure


def _pair_hashes(dec, rng):
    """Two exact integer hashes of the parallel key of every ordered pair.

    key(u,v) = {(J, sector of u) : J separates u and v};  with random weights
    w[J,s], hash(u,v) = sum_J w[J,S[J,u]] - sum_{(J,s) ∋ u,v} w[J,s].  All
    arithmetic is in float64 on integers below 2^53, hence exact.
    """
    S = dec.sector_matrix()
    k, n = S.shape
    offs = np.concatenate([[0], np.cumsum(S.max(1) + 1)])
    cols = (S + offs[:-1, None]).T  # n × k column ids
    E = np.zeros((n, offs[-1]))
    E[np.arange(n)[:, None], cols] = 1.0
    out = []
    for _ in range(2):
        w = rng.integers(1, 2 ** 20, size=offs[-1]).astype(float)
        total = w[cols].sum(1)
        same = (E * w) @ E.T
        out.append((total[:, None] - same).astype(np.int64))
    return out


def check_parallel_closure(host, dec, P, reading="ab", seed=0):
    """For parallel pairs (x,y), (a,b) with x,y in a common member, check that
    a,b (reading "ab") or a,y (reading "ay") lie in a common member.

    Returns (ok, counterexample) where the counterexample is ((x,y),(a,b)).
    """
    if reading not in ("ab", "ay"):
        raise ValueError("reading must be 'ab' or 'ay'")
    from .median import parallel_pairs

    n = host.n
    CM = P.comembers()
    h1, h2 = _pair_hashes(dec, np.random.default_rng(seed))
    off = ~np.eye(n, dtype=bool)
    key = (h1[off] << 31) ^ h2[off]
    uu, vv = np.nonzero(off)
    cm = CM[off]
    _, grp = np.unique(key, return_inverse=True)
    ngrp = grp.max() + 1 if len(grp) else 0
    rep = np.full(ngrp, -1, dtype=np.int64)
    cmi = np.flatnonzero(cm)
    rep[grp[cmi[::-1]]] = cmi[::-1]
    if reading == "ab":
        for t in np.flatnonzero((rep[grp] >= 0) & ~cm):
            r = rep[grp[t]]
            x, y, a, b = int(uu[r]), int(vv[r]), int(uu[t]), int(vv[t])
            if parallel_pairs(dec, x, y, a, b):
                return False, ((x, y), (a, b))
        return True, None
    order = np.argsort(grp, kind="stable")
    bounds = np.flatnonzero(np.diff(grp[order])) + 1
    for idx in np.split(order, bounds):
        xs = idx[cm[idx]]
        if not len(xs):
            continue
        for t in idx:
            a, b = int(uu[t]), int(vv[t])
            for s in xs:
                x2, y2 = int(uu[s]), int(vv[s])
                if not CM[a, y2] and parallel_pairs(dec, x2, y2, a, b):
                    return False, ((x2, y2), (a, b))
    return True, None
