"""Graph products of cyclic groups.

A group element is stored as its canonical graphically reduced word: a tuple
of syllables (u, e) where u is a vertex of the presentation graph and e a
nonzero residue (finite cyclic group) or nonzero integer (infinite cyclic
group).  Among the shuffle-equivalent reduced words we keep the
lexicographically least one for the vertex order, so two words represent the
same element iff their canonical tuples are equal.

Balls are produced either in the word metric of a finite generating set
(`cayley_ball`) or in the syllable metric (`qm_ball`), where every nontrivial
element of every vertex group is a generator.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .graphcore import FiniteGraph, find_induced, nf_patterns, join_pattern


class WindowOverflowError(ValueError):
    """An infinite cyclic syllable left its enumeration window."""


class WordParseError(ValueError):
    pass


@dataclass(frozen=True)
class VertexGroup:
    """Cyclic group of the given order; order 0 means infinite cyclic.

    Infinite cyclic groups are enumerated in the window -W..W.
    """

    order: int
    window: int = 0
    gens: tuple = (1,)

    def __post_init__(self):
        if self.order == 1 or self.order < 0:
            raise ValueError("vertex groups must be nontrivial")
        if self.order == 0 and self.window < 1:
            raise ValueError("infinite cyclic group needs window >= 1")
        if not self.gens or any(self.reduce(s) == 0 for s in self.gens):
            raise ValueError("generators must be nontrivial")

    @property
    def infinite(self):
        return self.order == 0

    @property
    def card(self):
        return "2" if self.order == 2 else "3+"

    def reduce(self, e):
        return e % self.order if self.order else e

    def elements(self):
        if self.order:
            return list(range(1, self.order))
        return [e for e in range(-self.window, self.window + 1) if e]

    def in_window(self, e):
        return self.order > 0 or abs(e) <= self.window

    def describe(self):
        s = f"c{self.order}" if self.order else f"z:window={self.window}"
        if tuple(self.gens) != (1,):
            s += " gens=" + ",".join(map(str, self.gens))
        return s


def parse_group(desc, gens=None):
    """'c3' -> order 3, 'z' or 'z:window=8' -> infinite cyclic."""
    desc = desc.strip().lower()
    gens = tuple(gens) if gens else (1,)
    if desc.startswith("c"):
        return VertexGroup(int(desc[1:]), gens=gens)
    if desc.startswith("z"):
        w = 8
        m = re.match(r"z(?::window=(\d+))?$", desc)
        if not m:
            raise ValueError(f"bad group descriptor {desc!r}")
        if m.group(1):
            w = int(m.group(1))
        return VertexGroup(0, w, gens)
    raise ValueError(f"bad group descriptor {desc!r}")


class GraphProductSpec:
    """Presentation graph plus one cyclic group per vertex.

    Vertices are numbered in the order of `names`; that order is also the
    order used for canonical shuffles.
    """

    def __init__(self, names, groups, edges):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate vertex names")
        self.groups = tuple(g if isinstance(g, VertexGroup) else parse_group(g) for g in groups)
        if len(self.groups) != len(self.names):
            raise ValueError("one group per vertex")
        idx = {a: i for i, a in enumerate(self.names)}
        es = [(idx[a] if isinstance(a, str) else a, idx[b] if isinstance(b, str) else b) for a, b in edges]
        self.gamma = FiniteGraph(len(self.names), es,
                                 [{"label": a, "card": g.card} for a, g in zip(self.names, self.groups)])
        self.comm = tuple(frozenset(a) for a in self.gamma.adj)
        self.idx = idx

    def __repr__(self):
        return f"GraphProductSpec({', '.join(f'{a}:{g.describe()}' for a, g in zip(self.names, self.groups))}; " \
               f"{len(self.gamma.edges)} edges)"

    @property
    def cards(self):
        return [g.card for g in self.groups]

    def vertex(self, u):
        return self.idx[u] if isinstance(u, str) else int(u)

    def with_window(self, W):
        gs = [VertexGroup(0, W, g.gens) if g.infinite else g for g in self.groups]
        return GraphProductSpec(self.names, gs, self.gamma.edges)

    def generators(self):
        """Symmetric generating set as syllables."""
        out = []
        for u, g in enumerate(self.groups):
            seen = set()
            for s in g.gens:
                for t in (g.reduce(s), g.reduce(-s)):
                    if t and t not in seen:
                        seen.add(t)
                        out.append((u, t))
        return out

    def to_text(self):
        lines = [f"vertex {a} {g.describe()}" for a, g in zip(self.names, self.groups)]
        lines += [f"edge {self.names[u]} {self.names[v]}" for u, v in self.gamma.sorted_edges()]
        return "\n".join(lines) + "\n"


def parse_spec(text):
    """Line-based spec: 'vertex a c2', 'vertex b z:window=8 gens=1,2', 'edge a b'."""
    names, groups, edges = [], [], []
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertex" and len(tok) >= 3:
            gens = None
            for t in tok[3:]:
                if t.startswith("gens="):
                    gens = [int(x) for x in t[5:].split(",")]
                else:
                    raise ValueError(f"line {ln}: unknown option {t!r}")
            names.append(tok[1])
            groups.append(parse_group(tok[2], gens))
        elif tok[0] == "edge" and len(tok) == 3:
            edges.append((tok[1], tok[2]))
        else:
            raise ValueError(f"line {ln}: cannot parse {line!r}")
    return GraphProductSpec(names, groups, edges)


def read_spec(path):
    with open(path) as f:
        return parse_spec(f.read())


def product_of(gamma, groups, names=None):
    """Graph product over a FiniteGraph with one group descriptor per vertex."""
    if isinstance(groups, (str, VertexGroup)):
        groups = [groups] * gamma.n
    names = names or [_default_name(i) for i in range(gamma.n)]
    return GraphProductSpec(names, groups, gamma.edges)


def raag(gamma, window=8, names=None):
    return product_of(gamma, VertexGroup(0, window), names)


def racg(gamma, names=None):
    return product_of(gamma, VertexGroup(2), names)


def _default_name(i):
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(97 + r) + s
    return s


# ------------------------------------------------------------------ words


def parse_word(spec, text):
    """'a b^-1 c^3' -> list of syllables.  Identity syllables are rejected."""
    out = []
    for tok in text.split():
        m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?", tok)
        if not m or m.group(1) not in spec.idx:
            raise WordParseError(f"bad syllable {tok!r}")
        u = spec.idx[m.group(1)]
        e = int(m.group(2)) if m.group(2) is not None else 1
        if spec.groups[u].reduce(e) == 0:
            raise WordParseError(f"identity syllable {tok!r}")
        out.append((u, e))
    return out


def format_word(spec, w):
    if not w:
        return "1"
    return " ".join(spec.names[u] if e == 1 else f"{spec.names[u]}^{e}" for u, e in w)


def _as_word(spec, w):
    if isinstance(w, str):
        return parse_word(spec, w)
    return w


def _canonical(spec, w):
    """Lex-least shuffle of a reduced word: pull the least movable syllable forward."""
    rest = list(w)
    out = []
    comm = spec.comm
    while rest:
        best = None
        for i, (u, e) in enumerate(rest):
            if all(rest[j][0] in comm[u] for j in range(i)):
                if best is None or u < rest[best][0]:
                    best = i
        out.append(rest.pop(best))
    return tuple(out)


def _absorb(spec, out, u, e):
    """Right-multiply the reduced list `out` by the syllable (u, e) in place."""
    g = spec.groups[u]
    e = g.reduce(e)
    if e == 0:
        return
    comm = spec.comm[u]
    j = len(out) - 1
    while j >= 0 and out[j][0] != u and out[j][0] in comm:
        j -= 1
    if j >= 0 and out[j][0] == u:
        ne = g.reduce(out[j][1] + e)
        if ne == 0:
            del out[j]
        else:
            out[j] = (u, ne)
    else:
        out.append((u, e))


def normalize(spec, word):
    """Canonical graphically reduced word of the element spelled by `word`."""
    out = []
    for u, e in _as_word(spec, word):
        if not 0 <= u < len(spec.groups):
            raise ValueError(f"unknown vertex {u}")
        _absorb(spec, out, u, e)
    return _canonical(spec, out)


def multiply(spec, w1, w2):
    return normalize(spec, list(_as_word(spec, w1)) + list(_as_word(spec, w2)))


def inverse(spec, w):
    return normalize(spec, [(u, -e) for u, e in reversed(list(_as_word(spec, w)))])


def equal(spec, w1, w2):
    return normalize(spec, w1) == normalize(spec, w2)


def syllable_length(spec, w):
    return len(normalize(spec, w))


def _rmul(spec, w, u, e):
    out = list(w)
    _absorb(spec, out, u, e)
    return _canonical(spec, out)


def _in_window(spec, w):
    return all(spec.groups[u].in_window(e) for u, e in w)


# ------------------------------------------------------------------ balls


def cayley_ball(spec, R):
    """Ball of radius R about 1 in the word metric of the generating sets.

    Raises WindowOverflowError if an infinite cyclic syllable inside the ball
    exceeds its window (i.e. when some W < R).
    """
    gens = spec.generators()
    index = {(): 0}
    words = [()]
    frontier = [()]
    es = {}
    for r in range(R):
        nxt = []
        for w in frontier:
            for u, s in gens:
                x = _rmul(spec, w, u, s)
                if x not in index:
                    if not _in_window(spec, x):
                        raise WindowOverflowError(f"{format_word(spec, x)} leaves the window at radius {r + 1}")
                    index[x] = len(words)
                    words.append(x)
                    nxt.append(x)
        frontier = nxt
    for w, i in index.items():
        for u, s in gens:
            j = index.get(_rmul(spec, w, u, s))
            if j is not None and j != i:
                es[(min(i, j), max(i, j))] = u
    return FiniteGraph(len(words), es.keys(), words, es, meta={"center": 0, "radius": R, "metric": "cayley"})


def strip_terminal(spec, w, u):
    """w with its u-syllable removed if that syllable can be shuffled to the end."""
    comm = spec.comm[u]
    j = len(w) - 1
    while j >= 0 and w[j][0] != u and w[j][0] in comm:
        j -= 1
    if j >= 0 and w[j][0] == u:
        return _canonical(spec, w[:j] + w[j + 1:])
    return w


def qm_ball(spec, R, strict=True):
    """Ball of radius R about 1 in QM(Γ,𝒢), the syllable-metric Cayley graph.

    Vertices are canonical words of syllable length <= R whose infinite cyclic
    syllables lie in their windows; two vertices are adjacent when they lie
    in a common coset of a vertex group, and the edge is labelled by that
    vertex.  With strict=True every window must be at least R; with
    strict=False any window is accepted, and the result is exactly the QM ball
    of the graph product in which each Z is replaced by Z/(2W+1).
    """
    for u, g in enumerate(spec.groups):
        if g.infinite and g.window < R and strict:
            raise WindowOverflowError(f"window {g.window} of {spec.names[u]} below radius {R}")
    gens = [(u, e) for u, g in enumerate(spec.groups) for e in g.elements()]
    index = {(): 0}
    words = [()]
    frontier = [()]
    for _ in range(R):
        nxt = []
        for w in frontier:
            for u, e in gens:
                x = _rmul(spec, w, u, e)
                if len(x) == len(w) + 1 and x not in index and _in_window(spec, x):
                    index[x] = len(words)
                    words.append(x)
                    nxt.append(x)
        frontier = nxt
    cosets = {}
    for i, w in enumerate(words):
        for u in range(len(spec.groups)):
            cosets.setdefault((u, strip_terminal(spec, w, u)), []).append(i)
    es = {}
    for (u, _), mem in cosets.items():
        for i, j in itertools.combinations(mem, 2):
            es[(min(i, j), max(i, j))] = u
    return FiniteGraph(len(words), es.keys(), words, es, meta={"center": 0, "radius": R, "metric": "qm"})


def ball(spec, R, metric="qm", strict=True):
    if metric == "qm":
        return qm_ball(spec, R, strict)
    if metric == "cayley":
        return cayley_ball(spec, R)
    raise ValueError(f"unknown metric {metric!r}")


# -------------------------------------------------------------- parabolics


def coset_key(spec, w, lam):
    """Shortest element of the coset w<Λ>: strip terminal Λ-syllables repeatedly."""
    lam = {spec.vertex(u) for u in lam}
    w = tuple(w)
    changed = True
    while changed:
        changed = False
        for j in range(len(w) - 1, -1, -1):
            u = w[j][0]
            if u in lam and all(v in spec.comm[u] for v, _ in w[j + 1:]):
                w = _canonical(spec, w[:j] + w[j + 1:])
                changed = True
                break
    return w


def parabolic_cosets(spec, g, lam):
    """Group the vertices of a ball (payloads = words) by their <Λ>-coset."""
    out = {}
    for i, w in enumerate(g.payloads):
        out.setdefault(coset_key(spec, w, lam), []).append(i)
    return out


def join_factors(spec, lam):
    """Maximal join decomposition of the subgraph induced on Λ.

    Factors are the connected components of the complement graph.
    """
    lam = sorted({spec.vertex(u) for u in lam})
    seen = set()
    out = []
    for s in lam:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        k = 0
        while k < len(comp):
            v = comp[k]
            k += 1
            for w in lam:
                if w not in seen and w not in spec.comm[v]:
                    seen.add(w)
                    comp.append(w)
        out.append(sorted(comp))
    return out


def parabolic_has_polynomial_growth(spec, lam):
    """<Λ> has polynomial growth iff each join factor is a single vertex or a
    non-adjacent pair of order-two vertices (an infinite dihedral factor)."""
    for f in join_factors(spec, lam):
        if len(f) == 1:
            continue
        if len(f) == 2 and all(spec.groups[u].order == 2 for u in f):
            continue
        return False
    return True


def polynomial_parabolics(spec):
    """All nonempty Λ ⊆ V(Γ) with <Λ> of polynomial growth, as sorted tuples."""
    k = len(spec.names)
    out = []
    for r in range(1, k + 1):
        for lam in itertools.combinations(range(k), r):
            if parabolic_has_polynomial_growth(spec, lam):
                out.append(lam)
    return out


def parabolic_collection(spec, g, lams=None, maximal=False):
    """Members (tag, vertex ids) of the cosets of the given parabolics in a ball.

    Defaults to every polynomial-growth parabolic.  maximal=True keeps only
    the inclusion-maximal Λ, which gives the same cone-off.
    """
    if lams is None:
        lams = polynomial_parabolics(spec)
    lams = [tuple(sorted(spec.vertex(u) for u in lam)) for lam in lams]
    if maximal:
        lams = [l for l in lams if not any(set(l) < set(m) for m in lams)]
    out = []
    for lam in lams:
        tag = "".join(spec.names[u] for u in lam)
        for key, mem in parabolic_cosets(spec, g, lam).items():
            out.append(((tag, key), mem))
    return out


# ------------------------------------------------------- graphical criteria


def contains_F2(spec):
    """Γ contains one of the three free-subgroup configurations."""
    return any(find_induced(spec.gamma, spec.cards, p) is not None for p in nf_patterns())


def contains_F2xF2(spec):
    """Γ contains an induced join of two free-subgroup configurations."""
    nf = nf_patterns()
    return any(find_induced(spec.gamma, spec.cards, join_pattern(p, q)) is not None for p in nf for q in nf)


def f2xf2_witness(spec):
    nf = nf_patterns()
    for p in nf:
        for q in nf:
            pat = join_pattern(p, q)
            emb = find_induced(spec.gamma, spec.cards, pat)
            if emb is not None:
                return pat.name, [spec.names[i] for i in emb]
    return None


def induced_joins(spec):
    """All pairs (Φ, Ψ) of nonempty disjoint vertex sets with every Φ–Ψ pair adjacent."""
    k = len(spec.names)
    out = []
    for mask in range(1, 3 ** k):
        a, b = [], []
        m = mask
        for u in range(k):
            m, r = divmod(m, 3)
            if r == 1:
                a.append(u)
            elif r == 2:
                b.append(u)
        if a and b and a[0] < b[0] and all(v in spec.comm[u] for u in a for v in b):
            out.append((tuple(a), tuple(b)))
    return out
