import json

import pytest
from hypothesis import given, settings, strategies as st

from cti2graph.entities import Triple
from cti2graph.frames import Frame
from cti2graph.graph import (
    Edge, GraphFormatError, Node, ProvGraph, build_from_triples, build_graph, from_dot,
    from_json, invert_graph, parse, read_audit_csv, serialize, to_dot, to_json,
)
from cti2graph.lexicon import CANONICAL_VERBS, Direction, default_lexicon
from cti2graph.pipeline import extract
from cti2graph.see import WILDCARD, Entity, Kind
from strategies import generated_report, report_text

LX = default_lexicon()


def test_wildcard_agent_edge():
    g = build_graph([Frame("The malware", "unlink", "the regex.exe")], LX)
    assert [(n.name, n.kind) for n in g.nodes] == [("*", Kind.PROCESS), ("regex.exe", Kind.FILE)]
    assert [(e.src, e.dst, e.syscall, e.seq) for e in g.edges] == [(0, 1, "unlink", 1)]


def test_receive_flows_object_to_subject():
    g = build_graph([Frame("proc.exe", "receive", "IP:.*")], LX)
    names = {n.id: n.name for n in g.nodes}
    (e,) = g.edges
    assert (names[e.src], names[e.dst]) == ("IP:.*", "proc.exe")


def test_empty_frames_empty_graph():
    g = build_graph([], LX)
    assert g.nodes == [] and g.edges == []


def test_nodes_merge_by_name_and_kind():
    fs = [Frame("a.exe", "write", "x.dat"), Frame("A.EXE", "unlink", "x.dat")]
    g = build_graph(fs, LX)
    assert len(g.nodes) == 2 and len(g.edges) == 2


def test_wildcard_agents_merge_per_run():
    fs = [Frame("It", "write", "a.dat", sentence=0), Frame("it", "write", "b.dat", sentence=1),
          Frame("loader.exe", "exec", "c.exe", sentence=2), Frame("It", "unlink", "d.dat", sentence=3)]
    g = build_graph(fs, LX)
    stars = [n for n in g.nodes if n.name == WILDCARD and n.kind is Kind.PROCESS]
    assert len(stars) == 2
    assert g.edges[0].src == g.edges[1].src != g.edges[3].src


def test_seq_is_emission_order():
    fs = [Frame("a.exe", "write", f"f{i}.dat", sentence=i) for i in range(4)]
    assert [e.seq for e in build_graph(fs, LX).edges] == [1, 2, 3, 4]


def test_invert_examples():
    g = ProvGraph("s", [Node(0, "*", Kind.PROCESS), Node(1, "HKCU\\Run", Kind.REGISTRY),
                        Node(2, "10.13.13.1", Kind.SOCKET)],
                  [Edge(0, 1, "unlink", 1), Edge(0, 2, "connect", 2)])
    inv = invert_graph(g, LX.antonyms)
    assert [e.syscall for e in inv.edges] == ["write", "connect"]
    assert inv.nodes == g.nodes
    twice = invert_graph(inv, LX.antonyms)
    assert [e.syscall for e in twice.edges] == ["unlink", "connect"]


def test_antonym_table():
    a = LX.antonyms
    assert a["unlink"] == "write" and a["write"] == "unlink"
    assert a["exec"] == "exit" and a["fork"] == "exit"
    assert a["connect"] == "connect" and a["read"] == "read"


def test_json_one_node():
    g = ProvGraph("x", [Node(0, "a.exe", Kind.PROCESS)], [])
    doc = json.loads(to_json(g))
    assert doc == {"version": 1, "source": "x",
                   "nodes": [{"id": 0, "name": "a.exe", "kind": "process"}], "edges": []}


def test_dot_shapes():
    g = ProvGraph("x", [Node(0, "a", Kind.FILE), Node(1, "b", Kind.PROCESS),
                        Node(2, "c", Kind.REGISTRY), Node(3, "d", Kind.SOCKET)],
                  [Edge(1, 0, "write", 1, 3)])
    dot = to_dot(g)
    for shape in ("box", "oval", "pentagon", "diamond"):
        assert f"shape={shape}" in dot
    assert 'n1 -> n0 [label="1: write", sentence=3];' in dot


def test_conditional_edge_is_dashed():
    t = Triple(Entity("a.exe", Kind.PROCESS), "unlink", Entity("b.dat", Kind.FILE), 0, True)
    g = build_from_triples([t], LX)
    assert "style=dashed" in to_dot(g)
    assert from_dot(to_dot(g)).edges[0].conditional


def test_schema_version_checked():
    with pytest.raises(GraphFormatError, match="version 2"):
        from_json('{"version": 2, "nodes": [], "edges": []}')
    with pytest.raises(GraphFormatError):
        from_json("not json")
    with pytest.raises(GraphFormatError):
        from_dot("graph {}")


def test_validation():
    bad = ProvGraph("", [Node(0, "a", Kind.FILE)], [Edge(0, 5, "write", 1)])
    with pytest.raises(GraphFormatError):
        bad.validate()
    bad = ProvGraph("", [Node(0, "a", Kind.FILE)], [Edge(0, 0, "frob", 1)])
    with pytest.raises(GraphFormatError):
        bad.validate()
    bad = ProvGraph("", [Node(0, "a", Kind.FILE)], [Edge(0, 0, "write", 2), Edge(0, 0, "read", 1)])
    with pytest.raises(GraphFormatError):
        bad.validate()


def test_audit_csv():
    text = ("subject,action,object,kind_s,kind_o,seq\n"
            "a.exe,execute,b.exe,process,process,1\n"
            "b.exe,download,x.dat,process,file,2\n")
    g = read_audit_csv(text, LX, "log")
    names = {n.id: n.name for n in g.nodes}
    assert [(names[e.src], e.syscall, names[e.dst]) for e in g.edges] == [
        ("a.exe", "exec", "b.exe"), ("x.dat", "read", "b.exe")]
    with pytest.raises(GraphFormatError):
        read_audit_csv("a,frob,b,process,file,1\n", LX)


texts = st.one_of(report_text, generated_report)


@settings(max_examples=150, deadline=None)
@given(texts)
def test_graph_invariants(text):
    res = extract(text, LX)
    g = res.graph
    g.validate()
    named = [(n.name.casefold(), n.kind) for n in g.nodes if n.name != WILDCARD]
    assert len(named) == len(set(named))
    assert all(e.syscall in CANONICAL_VERBS for e in g.edges)
    assert len(g.nodes) <= 2 * len(g.edges)
    kept = {(f.sentence, f.action) for f in res.frames}
    for f in res.frames:
        assert not (f.negated and not f.conditional)
    assert {(e.sentence, e.syscall) for e in g.edges} <= kept


@settings(max_examples=150, deadline=None)
@given(texts)
def test_direction_agrees_with_map(text):
    res = extract(text, LX)
    from cti2graph.entities import resolve_frames
    triples = resolve_frames(res.frames, LX)
    assert len(triples) == len(res.graph.edges)
    kinds = {n.id: n for n in res.graph.nodes}
    for t, e in zip(triples, res.graph.edges):
        src, dst = kinds[e.src], kinds[e.dst]
        a, p = (src, dst) if LX.direction(e.syscall) is Direction.SUBJECT_TO_OBJECT else (dst, src)
        assert a.kind is t.agent.kind and p.kind is t.patient.kind
        assert a.name.casefold() == t.agent.name.casefold()


@settings(max_examples=150, deadline=None)
@given(texts)
def test_serialization_deterministic_and_round_trips(text):
    g1 = extract(text, LX, source="r.txt").graph
    g2 = extract(text, LX, source="r.txt").graph
    for fmt in ("json", "dot"):
        out = serialize(g1, fmt)
        assert out == serialize(g2, fmt)
        assert serialize(parse(out, fmt), fmt) == out


names = st.text(alphabet=st.sampled_from(list('ab"\\ *.:%é\n')), min_size=1, max_size=8)


@given(st.lists(st.tuples(names, st.sampled_from(list(Kind))), max_size=5),
       st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.sampled_from(CANONICAL_VERBS),
                          st.integers(0, 9), st.booleans()), max_size=6))
def test_round_trip_arbitrary_names(nodes, edges):
    ns = [Node(i, n, k) for i, (n, k) in enumerate(nodes)]
    es = [Edge(a, b, c, i + 1, s, cond) for i, (a, b, c, s, cond) in enumerate(edges)
          if a < len(ns) and b < len(ns)]
    es = [Edge(e.src, e.dst, e.syscall, i + 1, e.sentence, e.conditional) for i, e in enumerate(es)]
    g = ProvGraph('src "x"', ns, es)
    back = from_dot(to_dot(g))
    assert back.nodes == g.nodes and back.edges == g.edges and back.source == g.source
    j = from_json(to_json(g))
    assert j.nodes == g.nodes
    assert [(e.src, e.dst, e.syscall, e.seq, e.sentence) for e in j.edges] == \
        [(e.src, e.dst, e.syscall, e.seq, e.sentence) for e in g.edges]
