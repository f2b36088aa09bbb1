"""The lamplighter graph over Z.

A vertex is a pair (S, p): S a finite set of lit lamps, p the lamplighter's
position.  (S,p) is joined to (S,p±1) and to (S △ {p}, p).  The graph is
the Cayley graph of Z/2 ≀ Z, so d(u,v) = d(e, u^{-1}v) with
u^{-1}v = ((S1 △ S2) - p1, p2 - p1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class WindowExit(ValueError):
    pass


class UnstableWindow(RuntimeError):
    pass


def vertex(S=(), p=0):
    return (frozenset(S), int(p))


ORIGIN = vertex()


def _in(v, window):
    lo, hi = window
    S, p = v
    return lo <= p <= hi and all(lo <= i <= hi for i in S)


def lamp_neighbors(v, window=None):
    S, p = v
    out = [(S, p + 1), (S, p - 1), (S ^ {p}, p)]
    if window is None:
        return out
    if not _in(v, window):
        raise WindowExit(f"{v} outside window {window}")
    return [w for w in out if _in(w, window)]


def relative(u, v):
    """u^{-1} v, the translate of v seen from u placed at the origin."""
    (S1, p1), (S2, p2) = u, v
    return (frozenset(i - p1 for i in S1 ^ S2), p2 - p1)


def distance_from_origin(v):
    """Closed form: |S| plus the shorter of the left-first and right-first sweeps."""
    S, p = v
    pts = set(S) | {0, p}
    lo, hi = min(pts), max(pts)
    left = (0 - lo) + (hi - lo) + (hi - p)
    right = (hi - 0) + (hi - lo) + (p - lo)
    return len(S) + min(left, right)


def lamp_distance_closed_form(x, y=None):
    """d(x,y) by translation to the origin (y=None means d(origin, x))."""
    if y is None:
        return distance_from_origin(x)
    return distance_from_origin(relative(x, y))


def bfs_table(window, source=ORIGIN):
    """BFS distances from `source` on the windowed graph.

    States are encoded as mask * width + (p - lo), with bit i of mask for
    lamp lo + i.  Returns (dist array, lo, width); unreached states are -1.
    """
    lo, hi = window
    w = hi - lo + 1
    if w > 24:
        raise ValueError("window too wide for a full table")
    N = (1 << w) * w
    dist = np.full(N, -1, dtype=np.int16)
    S, p = source
    if not _in(source, window):
        raise WindowExit(f"{source} outside window {window}")
    s0 = sum(1 << (i - lo) for i in S) * w + (p - lo)
    dist[s0] = 0
    frontier = np.array([s0], dtype=np.int64)
    d = 0
    while len(frontier):
        d += 1
        mask, pos = np.divmod(frontier, w)
        nxt = [frontier[pos < w - 1] + 1, frontier[pos > 0] - 1, (mask ^ (1 << pos)) * w + pos]
        cand = np.unique(np.concatenate(nxt))
        cand = cand[dist[cand] < 0]
        dist[cand] = d
        frontier = cand
    return dist, lo, w


def encode(v, lo, w):
    S, p = v
    return sum(1 << (i - lo) for i in S) * w + (p - lo)


def _hull(*vs):
    pts = {0}
    for S, p in vs:
        pts |= set(S) | {p}
    return min(pts), max(pts)


def lamp_distance(x, y, window=None):
    """BFS distance in a windowed Lamp graph, widening until it stabilises twice."""
    rel = relative(x, y)
    lo, hi = window if window is not None else _hull(rel)
    if not _in(rel, (lo, hi)):
        raise WindowExit(f"{y} relative to {x} outside window")
    vals = []
    for k in range(3):
        dist, l0, w = bfs_table((lo - 2 * k, hi + 2 * k))
        vals.append(int(dist[encode(rel, l0, w)]))
    if len(set(vals)) != 1:
        raise UnstableWindow(f"distance changed under widening: {vals}")
    return vals[0]


def tree_embedding(bits):
    """Φ(x1..xn) = ({i : x_i = 1}, n)."""
    if any(b not in "01" for b in bits):
        raise ValueError("bits must be a 0/1 string")
    return vertex((i + 1 for i, b in enumerate(bits) if b == "1"), len(bits))


def tree_distance(u, v):
    k = 0
    while k < min(len(u), len(v)) and u[k] == v[k]:
        k += 1
    return len(u) + len(v) - 2 * k


# -------------------------------------------------------------- path families


@dataclass
class PathFamily:
    x: tuple
    y: tuple
    R: int
    paths: list = field(default_factory=list)
    index: list = field(default_factory=list)


def _walk(start, moves):
    """Apply a move string ('L', 'R', 'T') to a start state."""
    S, p = set(start[0]), start[1]
    out = [(frozenset(S), p)]
    for m in moves:
        if m == "L":
            p -= 1
        elif m == "R":
            p += 1
        else:
            S ^= {p}
        out.append((frozenset(S), p))
    return out


def _sweep(frm, to, on):
    """Moves walking from frm to to, toggling at each position of `on`
    (including the start).  Consecutive sweeps never share a toggled endpoint."""
    step = "R" if to > frm else "L"
    mv = []
    p = frm
    if p in on:
        mv.append("T")
    while p != to:
        p += 1 if step == "R" else -1
        mv.append(step)
        if p in on:
            mv.append("T")
    return mv


def itinerary(S, p, A, B, h):
    """Moves of π(A,B): five sweeps through [-h, p+h].

    left to -h lighting A; right to p+h lighting S and B; left to -h putting
    A out; right to p+h; left to p putting B out.
    """
    S, A, B = set(S), set(A), set(B)
    mv = []
    mv += _sweep(0, -h, A)
    mv += _sweep(-h, p + h, S | B)
    mv += _sweep(p + h, -h, A)
    mv += _sweep(-h, p + h, set())
    mv += _sweep(p + h, p, B)
    return mv


def subset_of(i, slots):
    return [s for k, s in enumerate(slots) if (i >> k) & 1]


def path_family(S, p, R):
    """N = ceil(2^(R/4)) paths from (∅,0) to (S,p) realising π(A_i,B_i).

    A_i ⊆ [-h,-1] and B_i ⊆ [p+1,p+h], h = floor(R/2), both read off the
    binary expansion of i, so the A's are distinct and so are the B's.
    """
    S = frozenset(S)
    if any(i < 0 or i > p for i in S):
        raise ValueError("S must lie in [0, p]")
    x, y = ORIGIN, vertex(S, p)
    d = distance_from_origin(y)
    if not (6 <= R and 2 * R < d):
        raise ValueError(f"need 6 <= R < d/2 = {d / 2}")
    h = R // 2
    N = math.ceil(2 ** (R / 4))
    if N > 2 ** h - 1:
        raise ValueError("not enough lamp slots for the requested family")
    fam = PathFamily(x, y, R)
    for i in range(1, N + 1):
        A = [-(k + 1) for k in subset_of(i, range(h))]
        B = [p + 1 + k for k in subset_of(i, range(h))]
        fam.paths.append(_walk(x, itinerary(S, p, A, B, h)))
        fam.index.append((frozenset(A), frozenset(B)))
    return fam


def verify_exp_connected(x, y, a, L, R, family):
    """Check N >= a^R, valid paths of length <= L·d(x,y), and pairwise disjointness
    of the paths once the R-balls about x and y are removed.  Returns (ok, reason)."""
    x, y = vertex(*x), vertex(*y)
    paths = family.paths if isinstance(family, PathFamily) else family
    if len(paths) < a ** R:
        return False, f"only {len(paths)} paths, need {a ** R:.3f}"
    d = lamp_distance_closed_form(x, y)
    outside = []
    for k, path in enumerate(paths):
        if path[0] != x or path[-1] != y:
            return False, f"path {k} has wrong endpoints"
        for u, v in zip(path, path[1:]):
            if v not in lamp_neighbors(u):
                return False, f"path {k} is not a path at {u} -> {v}"
        if len(path) - 1 > L * d:
            return False, f"path {k} has length {len(path) - 1} > {L} * {d}"
        outside.append({v for v in path if lamp_distance_closed_form(x, v) > R
                        and lamp_distance_closed_form(y, v) > R})
    for i in range(len(outside)):
        for j in range(i + 1, len(outside)):
            common = outside[i] & outside[j]
            if common:
                return False, f"paths {i} and {j} meet at {sorted(next(iter(common))[0]), next(iter(common))[1]}"
    return True, "ok"


# ---------------------------------------------------------------- text format


def format_state(v):
    S, p = v
    return "{" + ",".join(map(str, sorted(S))) + "}@" + str(p)


def _rle(moves):
    out = []
    k = 0
    while k < len(moves):
        j = k
        while j < len(moves) and moves[j] == moves[k]:
            j += 1
        out.append(moves[k] + (str(j - k) if j - k > 1 else ""))
        k = j
    return " ".join(out)


def path_moves(path):
    mv = []
    for (S1, p1), (S2, p2) in zip(path, path[1:]):
        mv.append("R" if p2 == p1 + 1 else "L" if p2 == p1 - 1 else "T")
    return "".join(mv)


def format_family(fam):
    """One line per path: start state, then the run-length move string."""
    lines = [f"# x={format_state(fam.x)} y={format_state(fam.y)} R={fam.R} N={len(fam.paths)}"]
    for (A, B), path in zip(fam.index, fam.paths):
        lines.append(f"A={sorted(A)} B={sorted(B)} start={format_state(path[0])} moves={_rle(path_moves(path))}")
    return "\n".join(lines) + "\n"


def parse_state(s):
    body, p = s.split("@")
    body = body.strip("{}")
    return vertex([int(t) for t in body.split(",") if t], int(p))


def parse_family_paths(text):
    import re
    paths = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        start = parse_state(re.search(r"start=(\S+)", line).group(1))
        moves = "".join(m[0] * (int(m[1:]) if len(m) > 1 else 1)
                        for m in line.split("moves=", 1)[1].split())
        paths.append(_walk(start, moves))
    return paths
