"""Shared fixtures: reference graphs, random-graph sampling, and a
brute-force 1-connection oracle that works straight from the degree
conditions."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from semcov.graph import MixedGraph, coates_digraph


@pytest.fixture
def cyclic4() -> MixedGraph:
    """Four vertices, the 3-cycle 2->3->4->2 fed from 1 along two routes,
    and a bidirected pair {3,4} on top of the directed edge (not simple)."""
    return MixedGraph(
        4, ((1, 2), (1, 3), (2, 3), (3, 4), (4, 2)), ((3, 4),)
    )


@pytest.fixture
def verma() -> MixedGraph:
    """The classic acyclic 4-vertex benchmark graph."""
    return MixedGraph(4, ((1, 2), (2, 3), (3, 4), (1, 3)), ((2, 4),))


@pytest.fixture
def onecycle4() -> MixedGraph:
    """Four vertices, one directed 3-cycle fed from a source along two
    routes, no bidirected edges; the smallest graph whose first covariance
    relation appears only at degree 6."""
    return MixedGraph(4, ((1, 2), (1, 3), (2, 3), (3, 4), (4, 2)))


def random_mixed_graph(
    rng: random.Random,
    max_n: int = 7,
    p_directed: float = 0.3,
    p_bidirected: float = 0.2,
) -> MixedGraph:
    """Sample a mixed graph; cyclic and acyclic both come out of this."""
    n = rng.randint(1, max_n)
    directed = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and rng.random() < p_directed:
                directed.append((i, j))
    bidirected = [
        (i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if rng.random() < p_bidirected
    ]
    return MixedGraph(n, tuple(directed), tuple(bidirected))


def graph_corpus(seed: int, count: int, **kwargs) -> list[MixedGraph]:
    rng = random.Random(seed)
    return [random_mixed_graph(rng, **kwargs) for _ in range(count)]


def random_simple_graph(rng: random.Random, max_n: int = 8) -> MixedGraph:
    """Sample a simple mixed graph: each vertex pair carries at most one
    edge, drawn among i->j, j->i, i<->j and none. Two-cycles are excluded
    by construction but longer directed cycles appear freely."""
    n = rng.randint(2, max_n)
    directed = []
    bidirected = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            r = rng.random()
            if r < 0.16:
                directed.append((i, j))
            elif r < 0.32:
                directed.append((j, i))
            elif r < 0.44:
                bidirected.append((i, j))
    return MixedGraph(n, tuple(directed), tuple(bidirected))


# -- brute-force 1-connection oracle ----------------------------------------


def oracle_one_connections(g: MixedGraph, i: int, j: int) -> set:
    """All 1-connections from i to j, found by exhausting functional
    subgraphs of the Coates digraph.

    Every vertex except the sink picks exactly one outgoing edge; a
    choice is a 1-connection when the sink has indegree 1 and everyone
    else except the source has indegree 1 (the source has 0). For i = j
    the source is dropped from the digraph entirely and every remaining
    vertex needs indegree 1. Each valid choice decomposes uniquely into
    the i-to-j path plus cycles; self-loops are discarded so the result
    is comparable with one_connections output.
    """
    coates = coates_digraph(g)
    succ: dict[int, list[int]] = {v: [] for v in range(1, g.n + 1)}
    for (u, v) in coates.edges:
        succ[u].append(v)

    if i == j:
        choosers = [v for v in range(1, g.n + 1) if v != i]
        options = [[w for w in succ[v] if w != i] for v in choosers]
    else:
        choosers = [v for v in range(1, g.n + 1) if v != j]
        options = [succ[v] for v in choosers]

    found = set()
    for pick in itertools.product(*options):
        nxt = dict(zip(choosers, pick))
        indeg: dict[int, int] = {}
        for w in pick:
            indeg[w] = indeg.get(w, 0) + 1
        if i != j:
            if indeg.get(i, 0) != 0 or indeg.get(j, 0) != 1:
                continue
            if any(indeg.get(v, 0) != 1 for v in choosers if v != i):
                continue
            path = [i]
            seen = {i}
            while path[-1] != j:
                step = nxt[path[-1]]
                if step in seen:
                    break
                path.append(step)
                seen.add(step)
            if path[-1] != j:
                continue
        else:
            if any(indeg.get(v, 0) != 1 for v in choosers):
                continue
            path, seen = [i], {i}
        cycles = []
        rest = [v for v in choosers if v not in seen]
        visited = set(seen)
        ok = True
        for start in rest:
            if start in visited:
                continue
            cyc = [start]
            visited.add(start)
            w = nxt[start]
            while w != start:
                if w in visited:
                    ok = False
                    break
                cyc.append(w)
                visited.add(w)
                w = nxt[w]
            if not ok:
                break
            if len(cyc) > 1:
                m = cyc.index(min(cyc))
                cycles.append(tuple(cyc[m:] + cyc[:m]))
        if ok:
            found.add((tuple(path), tuple(sorted(cycles))))
    return found


# -- exact numeric covariance oracle ----------------------------------------


def rational_covariance(
    g: MixedGraph, point: dict
) -> list[list[Fraction]]:
    """(I - L)^-T W (I - L)^-1 over Fractions by Gaussian elimination."""
    n = g.n
    imL = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    for (a, b) in g.directed:
        imL[a - 1][b - 1] -= point[("l", a, b)]
    W = [[Fraction(0)] * n for _ in range(n)]
    for v in range(1, n + 1):
        W[v - 1][v - 1] = point[("w", v, v)]
    for (a, b) in g.bidirected:
        W[a - 1][b - 1] = point[("w", a, b)]
        W[b - 1][a - 1] = point[("w", a, b)]

    inv = _invert(imL)
    invT = [[inv[c][r] for c in range(n)] for r in range(n)]
    return _matmul(_matmul(invT, W), inv)


def _invert(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [row[:] + [Fraction(int(r == c)) for c in range(n)]
         for r, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        scale = a[col][col]
        a[col] = [x / scale for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [
        [sum((a[r][t] * b[t][c] for t in range(k)), Fraction(0))
         for c in range(m)]
        for r in range(n)
    ]


def random_point(g: MixedGraph, rng: random.Random) -> dict:
    """Random rational parameter values, small numerators to keep the
    Fraction arithmetic quick but generic enough to avoid accidents."""
    point = {}
    for v in g.lambda_variables():
        point[v] = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    for v in g.omega_variables():
        point[v] = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    return point
