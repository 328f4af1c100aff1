"""Reference solvers: prescribed-path Hamilton search, exhaustive
decompositions, densest even-regular subgraphs, chromatic index."""

import pytest

from bipham.errors import PreconditionViolated
from bipham.generators import babai_instance, generate, two_cliques_instance
from bipham.graphs import Graph, LabelledPartition, PathSystem, complete_bipartite
from bipham.solvers import (
    SolverBudget,
    approx_decomposition,
    bip_hamilton_with_prescribed,
    check_approx_preconditions,
    chromatic_index_regular,
    exhaustive_hamilton_decomposition,
    reg_even,
)
from bipham.validate import (
    check_cycle,
    check_decomposition,
    check_matching,
    cycle_edges,
)

from conftest import complete_graph


def test_prescribed_hamilton_basaic():
    res = bip_hamilton_with_prescribed(complete_bipartite((4, 4)), None, None)
    assert res.cycle is not None and not check_cycle(8, res.cycle)

    two_squares = Graph(8, [(0, 4), (0, 5), (1, 4), (1, 5),
                            (2, 6), (2, 7), (3, 6), (3, 7)])
    res = bip_hamilton_with_prescribed(two_squares, None, None)
    assert res.cycle is None and res.proven_infeasible


def test_prescribed_hamilton_with_contracted_path():
    g = complete_bipartite((6, 6))
    q = PathSystem(12, [(0, 6), (6, 1), (1, 7)])
    res = bip_hamilton_with_prescribed(g.minus_edges(q.edges), None, q)
    assert res.cycle is not None
    assert set(q.edges) <= cycle_edges(res.cycle)


def test_exhaustive_decomposition_families():
    cycle = Graph(7, [(i, (i + 1) % 7) for i in range(7)])
    res = exhaustive_hamilton_decomposition(cycle)
    assert res.matching is None and len(res.cycles) == 1

    res4 = exhaustive_hamilton_decomposition(complete_graph(4))
    assert len(res4.cycles) == 1 and len(res4.matching) == 2
    assert not check_matching(4, res4.matching)

    k33 = complete_bipartite((3, 3))
    res33 = exhaustive_hamilton_decomposition(k33)
    assert len(res33.cycles) == 1 and len(res33.matching) == 3
    assert not check_decomposition(
        k33, [cycle_edges(res33.cycles[0]), res33.matching]
    )

    two_triangles = Graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    res_tt = exhaustive_hamilton_decomposition(two_triangles)
    assert res_tt.cycles is None and res_tt.proven_infeasible


def test_exhaustive_decomposition_k66():
    g = complete_bipartite((6, 6))
    res = exhaustive_hamilton_decomposition(g, SolverBudget(max_seconds=120))
    assert len(res.cycles) == 3 and res.matching is None
    assert not check_decomposition(g, [cycle_edges(c) for c in res.cycles])


def test_reg_even_families():
    assert reg_even(complete_graph(5))[0] == 4
    babai, _, _ = babai_instance(1)
    d, witness = reg_even(babai)
    assert d == 2 and set(witness.degrees()) == {2}
    two_k2 = Graph(4, [(0, 1), (2, 3)])
    assert reg_even(two_k2)[0] == 0


def test_reg_even_monotone_under_edge_addition(rng):
    from conftest import random_graph

    for _ in range(10):
        g = random_graph(rng, 8, 0.5)
        extra = [(i, j) for i in range(8) for j in range(i + 1, 8)
                 if not g.has_edge(i, j)]
        rng.shuffle(extra)
        g2 = g.with_edges(extra[: len(extra) // 2])
        assert reg_even(g2)[0] >= reg_even(g)[0]


def test_chromatic_index():
    chi, cert = chromatic_index_regular(complete_graph(4))
    assert chi == 3 and len(cert) == 3
    chi, cert = chromatic_index_regular(Graph(4, [(0, 1), (2, 3)]))
    assert chi == 1
    two_triangles = Graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    chi, cert = chromatic_index_regular(two_triangles)
    assert chi == 3
    for m in (2, 3, 4, 5):
        chi, cert = chromatic_index_regular(complete_bipartite((m, m)))
        assert chi == m and len(cert) == m
        assert not check_decomposition(complete_bipartite((m, m)), cert)
    two5, _, _ = two_cliques_instance(10)
    chi, _ = chromatic_index_regular(two5)
    assert chi == 5  # 4-regular but no one-factorization


def test_approx_decomposition_empty_family():
    g = complete_bipartite((4, 4))
    part = LabelledPartition(8, [], range(4), [], range(4, 8),
                             clusters_A=[list(range(4))],
                             clusters_B=[list(range(4, 8))])
    res = approx_decomposition(g, part, [], 0, 0, "1/2")
    assert res.cycles == []


def test_approx_decomposition_with_system():
    # dense instance with one exceptional vertex per side
    f, part0, props, g = generate(
        "eps_bipartite",
        {"n": 14, "D": 6, "eps": "1/7", "hubs": 1, "hub_degree": 4,
         "extra_internal": 0},
        seed=2,
    )
    s1, s2 = list(part0.A), list(part0.B)
    part = LabelledPartition(
        14, [s1[0]], s1[1:], [s2[0]], s2[1:],
        clusters_A=[s1[1:]], clusters_B=[s2[1:]],
    )
    a0, b0 = s1[0], s2[0]
    j_edges = []
    used = set()
    for v, opp in ((a0, part.B), (b0, part.A)):
        nbrs = [w for w in sorted(f.adj[v]) if w in set(opp) and w not in used][:2]
        j_edges += [(v, w) for w in nbrs]
        used.update(nbrs)
    j = PathSystem(14, j_edges)
    res = approx_decomposition(f, part, [j], 0, 0, "1/2", enforce_gates=False)
    assert res.cycles is not None and len(res.cycles) == 1
    assert set(j.edges) <= cycle_edges(res.cycles[0])
    assert not check_cycle(14, res.cycles[0])


def test_approx_gate_reports_degree_window():
    # the +-4/K slack needs K >= 5 before the window can bite; starve one
    # vertex of an entire opposite cluster
    base = complete_bipartite((10, 10))
    g = base.minus_edges([(0, 10), (0, 11)])
    part = LabelledPartition(
        20, [], range(10), [], range(10, 20),
        clusters_A=[[2 * i, 2 * i + 1] for i in range(5)],
        clusters_B=[[10 + 2 * i, 11 + 2 * i] for i in range(5)],
    )
    problems = check_approx_preconditions(g, part, [], 0, 0, "1/2")
    assert any("degree window" in p for p in problems)
    with pytest.raises(PreconditionViolated):
        approx_decomposition(g, part, [], 0, 0, "1/2")
