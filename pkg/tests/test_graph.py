"""Graph construction, file format, cycle/path/1-connection enumeration
and the two generators, checked against brute-force oracles."""

from __future__ import annotations

import itertools
import random

import pytest

from conftest import graph_corpus, oracle_one_connections, random_mixed_graph
from semcov.graph import (
    EMPTY_FAMILY,
    DisjointCycleFamily,
    GenerationError,
    GraphError,
    GraphFormatError,
    MixedGraph,
    coates_digraph,
    disjoint_cycle_families,
    enumerate_cycles,
    enumerate_paths,
    gen_cycle_chain,
    gen_erdos_renyi,
    graph_to_dict,
    iter_cycles,
    one_connections,
    parse_graph,
    serialize_graph,
)
from semcov.poly import Polynomial, lam


# -- construction and validation ---------------------------------------------


def test_graph_normalizes_edge_order():
    g = MixedGraph(3, ((2, 1), (1, 2)), ((3, 1),))
    assert g.directed == ((1, 2), (2, 1))
    assert g.bidirected == ((1, 3),)


@pytest.mark.parametrize(
    "n,directed,bidirected",
    [
        (0, (), ()),
        (-2, (), ()),
        (2, ((1, 1),), ()),
        (2, (), ((2, 2),)),
        (2, ((1, 3),), ()),
        (2, ((0, 1),), ()),
        (2, (), ((1, 5),)),
        (3, ((1, 2), (1, 2)), ()),
        (3, (), ((1, 2), (2, 1))),
        (2, ((1, True),), ()),
    ],
)
def test_graph_rejects_bad_data(n, directed, bidirected):
    with pytest.raises(GraphError):
        MixedGraph(n, directed, bidirected)


def test_simple_property():
    assert MixedGraph(3, ((1, 2),), ((1, 3),)).simple
    assert not MixedGraph(2, ((1, 2), (2, 1))).simple
    assert not MixedGraph(2, ((1, 2),), ((1, 2),)).simple
    assert MixedGraph(1).simple


def test_adjacency_covers_every_vertex():
    g = MixedGraph(4, ((2, 1), (2, 3)))
    assert g.adjacency() == {1: (), 2: (1, 3), 3: (), 4: ()}


def test_variable_lists(verma):
    lams = verma.lambda_variables()
    oms = verma.omega_variables()
    assert lams == tuple(("l", i, j) for i, j in verma.directed)
    assert oms[:4] == tuple(("w", i, i) for i in range(1, 5))
    assert oms[4:] == (("w", 2, 4),)


# -- file format --------------------------------------------------------------


def test_parse_serialize_round_trip():
    rng = random.Random(7)
    for _ in range(50):
        g = random_mixed_graph(rng)
        assert parse_graph(serialize_graph(g)) == g


def test_parse_accepts_minimal_object():
    assert parse_graph('{"n": 2}') == MixedGraph(2)


@pytest.mark.parametrize(
    "text",
    [
        "not json at all",
        "[1, 2]",
        '{"directed": []}',
        '{"n": "three"}',
        '{"n": 0}',
        '{"n": true}',
        '{"n": 2, "extra": 1}',
        '{"n": 2, "directed": 3}',
        '{"n": 2, "directed": [[1]]}',
        '{"n": 2, "directed": [[1, 2, 3]]}',
        '{"n": 2, "directed": [[1, "2"]]}',
        '{"n": 2, "bidirected": [[1, 2.5]]}',
    ],
)
def test_parse_rejects_malformed_text(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_parse_reports_semantic_errors_as_graph_errors():
    with pytest.raises(GraphError):
        parse_graph('{"n": 2, "directed": [[1, 1]]}')
    with pytest.raises(GraphError):
        parse_graph('{"n": 2, "directed": [[1, 4]]}')


def test_graph_to_dict_shape(cyclic4):
    d = graph_to_dict(cyclic4)
    assert d == {
        "n": 4,
        "directed": [[1, 2], [1, 3], [2, 3], [3, 4], [4, 2]],
        "bidirected": [[3, 4]],
    }


# -- cycles -------------------------------------------------------------------


def brute_force_cycles(g: MixedGraph) -> set[tuple[int, ...]]:
    """Every simple cycle, found by trying all vertex arrangements that
    start at their smallest vertex."""
    edges = set(g.directed)
    found = set()
    for k in range(2, g.n + 1):
        for combo in itertools.combinations(range(1, g.n + 1), k):
            first = combo[0]
            for rest in itertools.permutations(combo[1:]):
                cyc = (first,) + rest
                if all(
                    (cyc[t], cyc[(t + 1) % k]) in edges for t in range(k)
                ):
                    found.add(cyc)
    return found


def test_cycles_match_brute_force():
    for g in graph_corpus(seed=11, count=40, max_n=6):
        got = enumerate_cycles(g)
        assert got == sorted(got)
        assert len(set(got)) == len(got)
        assert set(got) == brute_force_cycles(g)


def test_cycles_canonical_rotation(cyclic4):
    assert enumerate_cycles(cyclic4) == [(2, 3, 4)]


def test_cycles_complete_digraph():
    n = 4
    g = MixedGraph(
        n, tuple((i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j)
    )
    # Cycle count over all lengths: sum_k C(n,k) * (k-1)!.
    want = sum(
        len(list(itertools.combinations(range(n), k)))
        * len(list(itertools.permutations(range(k - 1))))
        for k in range(2, n + 1)
    )
    assert len(enumerate_cycles(g)) == want


def test_iter_cycles_is_lazy(cyclic4):
    it = iter_cycles(cyclic4)
    assert next(it) == (2, 3, 4)


# -- paths --------------------------------------------------------------------


def brute_force_paths(g: MixedGraph, i: int, j: int) -> set[tuple[int, ...]]:
    if i == j:
        return {(i,)}
    edges = set(g.directed)
    inner = [v for v in range(1, g.n + 1) if v not in (i, j)]
    found = set()
    for k in range(len(inner) + 1):
        for mid in itertools.permutations(inner, k):
            p = (i,) + mid + (j,)
            if all((a, b) in edges for a, b in zip(p, p[1:])):
                found.add(p)
    return found


def test_paths_match_brute_force():
    for g in graph_corpus(seed=23, count=25, max_n=5):
        for i in range(1, g.n + 1):
            for j in range(1, g.n + 1):
                got = enumerate_paths(g, i, j)
                assert got == sorted(got)
                assert set(got) == brute_force_paths(g, i, j)


def test_paths_trivial_and_errors(verma):
    assert enumerate_paths(verma, 2, 2) == [(2,)]
    assert enumerate_paths(verma, 4, 1) == []
    with pytest.raises(GraphError):
        enumerate_paths(verma, 0, 2)
    with pytest.raises(GraphError):
        enumerate_paths(verma, 1, 9)


# -- cycle families and 1-connections -----------------------------------------


def test_family_construction_rejects_overlap():
    with pytest.raises(GraphError):
        DisjointCycleFamily.of(((1, 2), (2, 3)))


def test_family_edges():
    fam = DisjointCycleFamily.of(((1, 2), (3, 4, 5)))
    assert fam.num_cycles == 2
    assert fam.num_vertices == 5
    assert fam.edges() == ((1, 2), (2, 1), (3, 4), (4, 5), (5, 3))


def test_families_include_empty_and_are_disjoint():
    for g in graph_corpus(seed=31, count=20, max_n=6):
        fams = disjoint_cycle_families(enumerate_cycles(g))
        assert fams[0] == EMPTY_FAMILY
        seen = set()
        for fam in fams:
            assert fam.cycles not in seen
            seen.add(fam.cycles)
            used = set()
            for c in fam.cycles:
                assert used.isdisjoint(c)
                used.update(c)


def test_families_of_two_disjoint_cycles():
    g = MixedGraph(4, ((1, 2), (2, 1), (3, 4), (4, 3)))
    fams = disjoint_cycle_families(enumerate_cycles(g))
    assert [f.cycles for f in fams] == [
        (),
        ((1, 2),),
        ((1, 2), (3, 4)),
        ((3, 4),),
    ]


def test_one_connections_match_oracle():
    rng = random.Random(47)
    graphs = [random_mixed_graph(rng, max_n=6) for _ in range(18)]
    graphs += [random_mixed_graph(rng, max_n=7, p_directed=0.25) for _ in range(4)]
    for g in graphs:
        for i in range(1, g.n + 1):
            for j in range(1, g.n + 1):
                got = {
                    (c.path, tuple(sorted(c.family.cycles)))
                    for c in one_connections(g, i, j)
                }
                assert got == oracle_one_connections(g, i, j), (g, i, j)


def test_one_connection_fields(cyclic4):
    conns = one_connections(cyclic4, 1, 2)
    assert [(c.path, c.family.cycles) for c in conns] == [
        ((1, 2), ()),
        ((1, 3, 4, 2), ()),
    ]
    direct = conns[0]
    assert direct.source == 1 and direct.sink == 2
    assert direct.edges() == ((1, 2),)
    # Self-loops at 3 and 4 are the only cycles of the spanning structure.
    assert direct.coates_cycle_count(cyclic4.n) == 2


def test_coates_digraph(cyclic4):
    cd = coates_digraph(cyclic4)
    assert set(cd.edges) == set(cyclic4.directed) | {
        (v, v) for v in range(1, 5)
    }
    assert cd.weight(2, 2) == Polynomial.one()
    assert cd.weight(1, 2) == -Polynomial.variable(lam(1, 2))
    with pytest.raises(GraphError):
        cd.weight(2, 1)


# -- generators ---------------------------------------------------------------


def test_chain_generator_structure():
    g = gen_cycle_chain(3, 4)
    assert g.n == 12
    assert len(g.directed) == 3 * 4 + 2
    assert g.bidirected == ()
    cycles = enumerate_cycles(g)
    assert len(cycles) == 3
    assert all(len(c) == 4 for c in cycles)
    # Bridges leave each cycle's midpoint for the next cycle's entry.
    assert (3, 5) in g.directed and (7, 9) in g.directed


def test_chain_generator_single_cycle():
    g = gen_cycle_chain(1, 2)
    assert g.n == 2
    assert g.directed == ((1, 2), (2, 1))


@pytest.mark.parametrize("count,length", [(0, 2), (1, 3), (1, 0), (-1, 4)])
def test_chain_generator_rejects_bad_parameters(count, length):
    with pytest.raises(GraphError):
        gen_cycle_chain(count, length)


def test_er_generator_deterministic_and_exact():
    a = gen_erdos_renyi(8, 0.25, 0.1, 2, seed=5)
    b = gen_erdos_renyi(8, 0.25, 0.1, 2, seed=5)
    assert a == b
    assert len(enumerate_cycles(a)) == 2
    c = gen_erdos_renyi(8, 0.25, 0.1, 2, seed=6)
    assert len(enumerate_cycles(c)) == 2


def test_er_generator_acyclic_target():
    g = gen_erdos_renyi(6, 0.2, 0.0, 0, seed=1)
    assert enumerate_cycles(g) == []
    assert g.bidirected == ()


def test_er_generator_gives_up():
    with pytest.raises(GenerationError):
        gen_erdos_renyi(3, 0.0, 0.0, 5, seed=0, max_attempts=10)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 0, "p_directed": 0.1, "p_bidirected": 0.1, "cycles": 0},
        {"n": 3, "p_directed": 1.5, "p_bidirected": 0.1, "cycles": 0},
        {"n": 3, "p_directed": 0.1, "p_bidirected": -0.1, "cycles": 0},
        {"n": 3, "p_directed": 0.1, "p_bidirected": 0.1, "cycles": -1},
        {"n": 3, "p_directed": 0.1, "p_bidirected": 0.1, "cycles": 0,
         "max_attempts": 0},
    ],
)
def test_er_generator_rejects_bad_parameters(kwargs):
    with pytest.raises(GraphError):
        gen_erdos_renyi(**kwargs)
