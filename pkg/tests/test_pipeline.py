"""End-to-end pipelines, reports, determinism, CLI."""

import json

from bipham.cli import main as cli_main
from bipham.generators import generate, regular_spanning_subgraph
from bipham.graphs import Graph, dump_graph, load_graph
from bipham.pipeline import (
    PipelineConstants,
    run_theorem_1factbip,
    run_theorem_NWbip,
)
from bipham.report import emit_report, parse_report, render_report
from bipham.validate import check_decomposition, check_edge_disjoint, cycle_edges

TOY_1FACT = PipelineConstants(
    K1=7, L=1, f=1, g=2, ell_prime=4, gamma=0, gamma1=0,
    r1_override=2, min_interval=3, max_seconds=300.0, max_nodes=20_000_000,
)


def test_nwbip_on_complete_bipartite():
    g, part, props = generate("complete_bipartite", {"m": 4})
    hint = (list(part.A), list(part.B))
    rep = run_theorem_NWbip(g, g, PipelineConstants(), seed=1, hint_split=hint)
    assert rep.ok()
    assert len(rep.cycles) == 2
    assert not check_edge_disjoint([cycle_edges(c) for c in rep.cycles])
    assert all(e["conserved"] for e in rep.accounting)


def test_nwbip_stage_failure_marks_downstream_skipped():
    g, part, props = generate("complete_bipartite", {"m": 3})  # odd degree
    rep = run_theorem_NWbip(g, g, PipelineConstants(), seed=0,
                            hint_split=(list(part.A), list(part.B)))
    assert not rep.ok()
    assert rep.stages[0].status == "failed"
    assert rep.stages[-1].status == "skipped"
    assert rep.cycles == []


def test_reports_deterministic_and_round_trip(tmp_path):
    g, part, props = generate("complete_bipartite", {"m": 5})
    sub = regular_spanning_subgraph(g, 4, seed=3)
    hint = (list(part.A), list(part.B))
    rep1 = run_theorem_NWbip(g, sub, PipelineConstants(), seed=9, hint_split=hint)
    rep2 = run_theorem_NWbip(g, sub, PipelineConstants(), seed=9, hint_split=hint)
    assert render_report(rep1) == render_report(rep2)
    rep3 = run_theorem_NWbip(g, sub, PipelineConstants(), seed=10, hint_split=hint)
    assert rep3.ok()  # different seed still succeeds
    path = tmp_path / "r.json"
    emit_report(rep1, str(path))
    doc = parse_report(str(path))
    assert doc == rep1.as_json()  # emit/parse round trip is lossless
    assert doc["seed"] == 9
    assert doc["decomposition"]["cycles"] == [list(c) for c in rep1.cycles]
    assert all(st["paper_ref"] for st in doc["stages"])


def test_onefact_full_run():
    g, part, props = generate("complete_bipartite", {"m": 28})
    hint = (list(part.A), list(part.B))
    rep = run_theorem_1factbip(g, TOY_1FACT, seed=1, hint_split=hint)
    assert rep.ok()
    assert len(rep.cycles) == 14
    assert not check_decomposition(g, [cycle_edges(c) for c in rep.cycles])


def test_onefact_rejects_odd_degree():
    g, part, props = generate("complete_bipartite", {"m": 5})
    rep = run_theorem_1factbip(g, TOY_1FACT, seed=0,
                               hint_split=(list(part.A), list(part.B)))
    assert not rep.ok()
    assert rep.stages[0].status == "failed"


def test_repartition_exceptional_maximizes_cut():
    from bipham.graphs import LabelledPartition
    from bipham.pipeline import _repartition_exceptional

    # two exceptional vertices: 8 sends 3 edges to the B side, 9 sends 3 to
    # the A side; the optimal split puts 8 with A and 9 with B
    edges = [(8, i) for i in (4, 5, 6)] + [(9, i) for i in (0, 1, 2)]
    g = Graph(10, edges)
    part = LabelledPartition(10, [9], [0, 1, 2, 3], [8], [4, 5, 6, 7])
    a0, b0 = _repartition_exceptional(g, part)
    assert a0 == [8] and b0 == [9]


def test_uniform_refinement_handles_digraphs():
    from bipham.graphs import Digraph, LabelledPartition
    from bipham.partitioning import uniform_refinement

    arcs = [(i, 4 + j) for i in range(4) for j in range(4)]
    arcs += [(4 + j, i) for i in range(4) for j in range(4) if (i + j) % 2]
    d = Digraph(8, arcs)
    part = LabelledPartition(8, [], range(4), [], range(4, 8),
                             clusters_A=[[0, 1, 2, 3]],
                             clusters_B=[[4, 5, 6, 7]])
    cert = uniform_refinement(d, part, 2, "3/4", seed=0)
    assert cert.child.L == 2


def test_cli_generate_verify_oracle_decompose(tmp_path):
    out = tmp_path / "inst.json"
    rc = cli_main([
        "generate", "--kind", "babai", "--params", '{"k": 1}',
        "--seed", "0", "-o", str(out),
    ])
    assert rc == 0 and out.exists()
    g, part = load_graph(str(out))
    assert g.n == 10 and part is not None

    rc = cli_main(["oracle", "--op", "regeven", str(out)])
    assert rc == 0

    rep_path = tmp_path / "report.json"
    rc = cli_main([
        "decompose", "--theorem", "nwbip", "--D", "2", "--seed", "1",
        str(out), "-o", str(rep_path),
    ])
    assert rc == 0
    doc = parse_report(str(rep_path))
    assert len(doc["decomposition"]["cycles"]) == 1

    # verify subcommand on a clean framework instance
    k66 = tmp_path / "k66.json"
    cli_main(["generate", "--kind", "complete_bipartite",
              "--params", '{"m": 6}', "-o", str(k66)])
    rc = cli_main(["verify", "--level", "framework", "--K", "2", str(k66)])
    assert rc == 0

    # remaining oracle operations
    k4 = tmp_path / "k4.json"
    dump_graph(str(k4), Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]))
    assert cli_main(["oracle", "--op", "chi", str(k4)]) == 0
    assert cli_main(["oracle", "--op", "hamdecomp", str(k4)]) == 0

    # balanced-system verification of a path-system file
    bes = tmp_path / "bes.json"
    from bipham.graphs import LabelledPartition, graph_to_json
    import json as _json

    part = LabelledPartition(4, [0], [1], [], [2, 3])
    doc = graph_to_json(Graph(4, [(0, 1), (0, 2)]), part)
    bes.write_text(_json.dumps(doc))
    assert cli_main(["verify", "--level", "bes", str(bes)]) == 0


def test_cli_onefact(tmp_path):
    inst = tmp_path / "k88.json"
    cli_main(["generate", "--kind", "complete_bipartite",
              "--params", '{"m": 8}', "-o", str(inst)])
    consts = tmp_path / "c.json"
    consts.write_text(json.dumps({
        "K1": 2, "L": 1, "f": 1, "g": 2, "ell_prime": 4,
        "gamma": "0", "gamma1": "0", "r1_override": 1, "min_interval": 3,
    }))
    rep_path = tmp_path / "rep.json"
    rc = cli_main([
        "decompose", "--theorem", "onefact", "--constants", str(consts),
        "--seed", "2", str(inst), "-o", str(rep_path),
    ])
    doc = parse_report(str(rep_path))
    # K1=2 cannot host the seven switcher intervals: the run must fail
    # honestly with a recorded stage error, or succeed if parameters allow
    assert rc in (0, 1)
    assert doc["stages"]
