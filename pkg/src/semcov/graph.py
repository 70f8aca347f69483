"""Mixed graphs and the combinatorial structures built on them.

A mixed graph on vertices 1..n has directed edges (i, j), i -> j, and
bidirected edges {i, j}, stored with i < j. Self-loops and duplicates are
rejected. Both edge lists may otherwise overlap freely; graphs where every
vertex pair carries at most one edge of any kind are called simple and get
special treatment in the identifiability module.

The functions here enumerate simple cycles (Johnson's algorithm), simple
paths, vertex-disjoint cycle families and 1-connections, and generate the
two benchmark families: chains of cycles and Erdos-Renyi style random
graphs conditioned on an exact cycle count.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .poly import Polynomial, Var, lam, om

Cycle = tuple[int, ...]
Path = tuple[int, ...]
Edge = tuple[int, int]


class GraphError(ValueError):
    """Invalid graph data (bad vertex, self-loop, duplicate edge...)."""


class GraphFormatError(GraphError):
    """Malformed graph text: not JSON, or not the expected shape."""


class GenerationError(RuntimeError):
    """Random generation failed to hit the target within the attempt cap."""


@dataclass(frozen=True)
class MixedGraph:
    """Vertices 1..n with directed and bidirected edge sets."""

    n: int
    directed: tuple[Edge, ...] = ()
    bidirected: tuple[Edge, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise GraphError("vertex count n must be a positive integer")
        directed = tuple(sorted(tuple(e) for e in self.directed))
        seen: set[Edge] = set()
        for i, j in directed:
            self._check_pair(i, j, "directed")
            if (i, j) in seen:
                raise GraphError(f"duplicate directed edge ({i},{j})")
            seen.add((i, j))
        bidirected = tuple(
            sorted(tuple(sorted(e)) for e in self.bidirected)
        )
        seenb: set[Edge] = set()
        for i, j in bidirected:
            self._check_pair(i, j, "bidirected")
            if (i, j) in seenb:
                raise GraphError(f"duplicate bidirected edge {{{i},{j}}}")
            seenb.add((i, j))
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "bidirected", bidirected)

    def _check_pair(self, i: int, j: int, kind: str):
        for v in (i, j):
            if not isinstance(v, int) or isinstance(v, bool):
                raise GraphError(f"{kind} edge ({i},{j}): vertices must be integers")
            if not 1 <= v <= self.n:
                raise GraphError(
                    f"{kind} edge ({i},{j}): vertex {v} out of range 1..{self.n}"
                )
        if i == j:
            raise GraphError(f"{kind} edge ({i},{j}): self-loops are not allowed")

    @property
    def simple(self) -> bool:
        """At most one edge of any kind between each vertex pair."""
        pairs: set[Edge] = set()
        for i, j in self.directed:
            key = (min(i, j), max(i, j))
            if key in pairs:
                return False
            pairs.add(key)
        for e in self.bidirected:
            if e in pairs:
                return False
            pairs.add(e)
        return True

    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Out-neighbor lists, ascending; every vertex is a key."""
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for i, j in self.directed:
            adj[i].append(j)
        return {v: tuple(sorted(ws)) for v, ws in adj.items()}

    def lambda_variables(self) -> tuple[Var, ...]:
        return tuple(lam(i, j) for i, j in self.directed)

    def omega_variables(self) -> tuple[Var, ...]:
        diag = tuple(om(i, i) for i in range(1, self.n + 1))
        return diag + tuple(om(i, j) for i, j in self.bidirected)


# -- file format -----------------------------------------------------------


def _edge_entries(obj: dict, key: str) -> list[tuple[int, int]]:
    raw = obj.get(key, [])
    if not isinstance(raw, list):
        raise GraphFormatError(f"field '{key}' must be a list of [i, j] pairs")
    out = []
    for idx, item in enumerate(raw):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in item)
        ):
            raise GraphFormatError(
                f"{key}[{idx}]: expected a pair of integers, got {item!r}"
            )
        out.append((item[0], item[1]))
    return out


def parse_graph(text: str) -> MixedGraph:
    """Parse the JSON graph format.

    The format is an object with a positive integer field "n" and optional
    lists "directed" and "bidirected" of 1-indexed [i, j] pairs. Errors are
    raised as GraphFormatError (syntax or shape, with position) or
    GraphError (semantic, with the offending edge).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(obj, dict):
        raise GraphFormatError("top level must be an object")
    if "n" not in obj:
        raise GraphFormatError("missing required field 'n'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphFormatError("field 'n' must be a positive integer")
    unknown = set(obj) - {"n", "directed", "bidirected"}
    if unknown:
        raise GraphFormatError(f"unknown fields: {sorted(unknown)}")
    directed = _edge_entries(obj, "directed")
    bidirected = _edge_entries(obj, "bidirected")
    return MixedGraph(n, tuple(directed), tuple(bidirected))


def graph_to_dict(g: MixedGraph) -> dict:
    return {
        "n": g.n,
        "directed": [list(e) for e in g.directed],
        "bidirected": [list(e) for e in g.bidirected],
    }


def serialize_graph(g: MixedGraph) -> str:
    """Canonical text form; bidirected pairs are written with i < j."""
    return json.dumps(graph_to_dict(g), indent=2) + "\n"


# -- cycles and paths ------------------------------------------------------


def _tarjan_sccs(vertices: list[int], adj: dict[int, list[int]]) -> list[list[int]]:
    # Iterative Tarjan; deterministic given the input ordering.
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work: list[tuple[int, Iterator[int]]] = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def iter_cycles(g: MixedGraph) -> Iterator[Cycle]:
    """Lazily yield the simple directed cycles of g.

    Johnson's algorithm. Each cycle appears exactly once, as the vertex
    tuple rotated so the smallest vertex comes first. Laziness matters for
    the random generator, which abandons oversupplied samples early.
    """
    full_adj = {v: list(ws) for v, ws in g.adjacency().items()}
    for s in range(1, g.n + 1):
        # Restrict to vertices >= s and take the component containing s.
        vertices = [v for v in range(s, g.n + 1)]
        adj = {v: [w for w in full_adj[v] if w >= s] for v in vertices}
        comp = None
        for scc in _tarjan_sccs(vertices, adj):
            if s in scc:
                comp = set(scc)
                break
        if comp is None or len(comp) < 2:
            continue
        local = {v: [w for w in adj[v] if w in comp] for v in comp}
        blocked: set[int] = set()
        bmap: dict[int, set[int]] = {v: set() for v in comp}
        path: list[int] = []
        emitted = [0]

        def unblock(u: int):
            pending = [u]
            while pending:
                v = pending.pop()
                if v in blocked:
                    blocked.discard(v)
                    pending.extend(bmap[v])
                    bmap[v].clear()

        def circuit(v: int) -> Iterator[Cycle]:
            before = emitted[0]
            path.append(v)
            blocked.add(v)
            for w in local[v]:
                if w == s:
                    emitted[0] += 1
                    yield tuple(path)
                elif w not in blocked:
                    yield from circuit(w)
            if emitted[0] > before:
                unblock(v)
            else:
                for w in local[v]:
                    bmap[w].add(v)
            path.pop()

        yield from circuit(s)


def enumerate_cycles(g: MixedGraph) -> list[Cycle]:
    """All simple cycles, canonical rotation, sorted lexicographically."""
    return sorted(iter_cycles(g))


def enumerate_paths(g: MixedGraph, i: int, j: int) -> list[Path]:
    """All simple directed paths i -> j as vertex tuples, sorted.

    The empty path (i,) is included exactly when i = j; it is the only
    path in that case since a simple path cannot revisit its start.
    """
    for v in (i, j):
        if not 1 <= v <= g.n:
            raise GraphError(f"vertex {v} out of range 1..{g.n}")
    if i == j:
        return [(i,)]
    adj = g.adjacency()
    out: list[Path] = []
    path = [i]
    seen = {i}

    def walk(v: int):
        for w in adj[v]:
            if w == j:
                out.append(tuple(path) + (j,))
            elif w not in seen:
                seen.add(w)
                path.append(w)
                walk(w)
                path.pop()
                seen.discard(w)

    walk(i)
    return sorted(out)


# -- cycle families and 1-connections --------------------------------------


@dataclass(frozen=True)
class DisjointCycleFamily:
    """A set of pairwise vertex-disjoint simple cycles."""

    cycles: tuple[Cycle, ...]
    vertices: frozenset[int] = field(compare=False)

    @classmethod
    def of(cls, cycles: Sequence[Cycle]) -> "DisjointCycleFamily":
        cycles = tuple(sorted(cycles))
        verts: set[int] = set()
        for c in cycles:
            for v in c:
                if v in verts:
                    raise GraphError(f"cycles are not vertex-disjoint at {v}")
            verts.update(c)
        return cls(cycles, frozenset(verts))

    @property
    def num_cycles(self) -> int:
        return len(self.cycles)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def edges(self) -> tuple[Edge, ...]:
        out = []
        for c in self.cycles:
            for a, b in zip(c, c[1:] + (c[0],)):
                out.append((a, b))
        return tuple(out)


EMPTY_FAMILY = DisjointCycleFamily((), frozenset())


def disjoint_cycle_families(cycles: Sequence[Cycle]) -> list[DisjointCycleFamily]:
    """Every subset of pairwise vertex-disjoint cycles, empty set included.

    Output is sorted by the cycle tuple sequence, so the empty family comes
    first and the order is reproducible.
    """
    cycles = sorted(cycles)
    masks = []
    for c in cycles:
        m = 0
        for v in c:
            m |= 1 << v
        masks.append(m)
    out: list[DisjointCycleFamily] = []
    chosen: list[Cycle] = []

    def rec(idx: int, used: int):
        if idx == len(cycles):
            verts = frozenset(v for c in chosen for v in c)
            out.append(DisjointCycleFamily(tuple(chosen), verts))
            return
        rec(idx + 1, used)
        if masks[idx] & used == 0:
            chosen.append(cycles[idx])
            rec(idx + 1, used | masks[idx])
            chosen.pop()

    rec(0, 0)
    return sorted(out, key=lambda f: f.cycles)


@dataclass(frozen=True)
class OneConnection:
    """A simple path i -> j plus disjoint cycles avoiding the path.

    Together with self-loops at every untouched vertex this is exactly a
    spanning subgraph of the Coates digraph in which i has in-degree 0 and
    out-degree 1, j has in-degree 1 and out-degree 0, and every other
    vertex has in-degree and out-degree 1 (all degrees 1 when i = j, where
    the path is the single vertex (i,)).
    """

    source: int
    sink: int
    path: Path
    family: DisjointCycleFamily

    def coates_cycle_count(self, n: int) -> int:
        """Cycles in the spanning structure: family cycles plus self-loops."""
        return self.family.num_cycles + (n - self.family.num_vertices - len(self.path))

    def edges(self) -> tuple[Edge, ...]:
        path_edges = tuple(zip(self.path, self.path[1:]))
        return path_edges + self.family.edges()


def one_connections(g: MixedGraph, i: int, j: int) -> list[OneConnection]:
    """All 1-connections from i to j, ordered by (path, family)."""
    families = disjoint_cycle_families(enumerate_cycles(g))
    out: list[OneConnection] = []
    for p in enumerate_paths(g, i, j):
        pset = set(p)
        for fam in families:
            if fam.vertices.isdisjoint(pset):
                out.append(OneConnection(i, j, p, fam))
    return out


@dataclass(frozen=True)
class CoatesDigraph:
    """Weighted digraph of (I - Lambda)^T: negated edge weights plus unit
    self-loops at every vertex."""

    graph: MixedGraph
    edges: tuple[Edge, ...]

    def weight(self, u: int, v: int) -> Polynomial:
        if u == v:
            return Polynomial.one()
        if (u, v) not in self.edges:
            raise GraphError(f"({u},{v}) is not an edge of the Coates digraph")
        return -Polynomial.variable(lam(u, v))


def coates_digraph(g: MixedGraph) -> CoatesDigraph:
    loops = tuple((v, v) for v in range(1, g.n + 1))
    return CoatesDigraph(g, g.directed + loops)


# -- generators ------------------------------------------------------------


def gen_cycle_chain(count: int, length: int) -> MixedGraph:
    """Chain of `count` directed cycles of even `length`, no bidirected edges.

    Cycle i (0-based) sits on vertices i*length + 1 .. (i+1)*length, in
    order, and its midpoint vertex i*length + length//2 + 1 feeds the first
    vertex of cycle i+1. Deterministic by construction.
    """
    if count < 1:
        raise GraphError("cycle count must be at least 1")
    if length < 2 or length % 2 != 0:
        raise GraphError("cycle length must be an even integer >= 2")
    edges: list[Edge] = []
    for i in range(count):
        base = i * length
        for k in range(length):
            edges.append((base + k + 1, base + (k + 1) % length + 1))
        if i + 1 < count:
            edges.append((base + length // 2 + 1, (i + 1) * length + 1))
    return MixedGraph(count * length, tuple(edges))


def gen_erdos_renyi(
    n: int,
    p_directed: float,
    p_bidirected: float,
    cycles: int,
    seed: int = 0,
    max_attempts: int = 1000,
) -> MixedGraph:
    """Random mixed graph conditioned on an exact simple-cycle count.

    Each ordered pair (i, j), i != j, gets a directed edge with probability
    p_directed; each unordered pair gets a bidirected edge with probability
    p_bidirected. Samples are rejected until one has exactly `cycles`
    simple cycles. Attempt k draws from random.Random(seed*1000003 + k), so
    results are reproducible and the stream advances per attempt. Raises
    GenerationError when max_attempts samples all miss the target.
    """
    if n < 1:
        raise GraphError("n must be at least 1")
    for name, p in (("p_directed", p_directed), ("p_bidirected", p_bidirected)):
        if not 0.0 <= p <= 1.0:
            raise GraphError(f"{name} must lie in [0, 1]")
    if cycles < 0:
        raise GraphError("cycle target must be nonnegative")
    if max_attempts < 1:
        raise GraphError("max_attempts must be at least 1")
    for attempt in range(max_attempts):
        rng = random.Random(seed * 1_000_003 + attempt)
        directed = []
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j and rng.random() < p_directed:
                    directed.append((i, j))
        bidirected = []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                if rng.random() < p_bidirected:
                    bidirected.append((i, j))
        g = MixedGraph(n, tuple(directed), tuple(bidirected))
        found = 0
        for _ in iter_cycles(g):
            found += 1
            if found > cycles:
                break
        if found == cycles:
            return g
    raise GenerationError(
        f"no sample with exactly {cycles} cycles in {max_attempts} attempts"
    )
