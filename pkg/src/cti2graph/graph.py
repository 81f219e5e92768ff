"""Provenance graphs: building from frames, inversion, JSON and DOT I/O."""

from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .entities import Triple, resolve_frames
from .frames import Frame
from .lexicon import CANONICAL_VERBS, Direction, Lexicon
from .see import WILDCARD, Kind

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SHAPES = {Kind.FILE: "box", Kind.PROCESS: "oval", Kind.REGISTRY: "pentagon", Kind.SOCKET: "diamond"}
_KIND_OF_SHAPE = {v: k for k, v in SHAPES.items()}


class GraphFormatError(ValueError):
    """Raised for unreadable or schema-incompatible graph files."""


@dataclass(frozen=True)
class Node:
    id: int
    name: str
    kind: Kind


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    syscall: str
    seq: int
    sentence: int = 0
    conditional: bool = False


@dataclass
class ProvGraph:
    source: str = ""
    nodes: list[Node] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def node(self, node_id: int) -> Node:
        return self.nodes[self._index()[node_id]]

    def _index(self) -> dict[int, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    def validate(self) -> None:
        ids = {n.id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise GraphFormatError("duplicate node id")
        last = 0
        for e in self.edges:
            if e.src not in ids or e.dst not in ids:
                raise GraphFormatError(f"edge {e.seq} references a missing node")
            if e.syscall not in CANONICAL_VERBS:
                raise GraphFormatError(f"edge {e.seq}: unknown system call {e.syscall!r}")
            if e.seq <= last:
                raise GraphFormatError("edge seq must be strictly increasing")
            last = e.seq

    def names(self) -> set[str]:
        return {n.name for n in self.nodes}


class _Builder:
    def __init__(self, source: str):
        self.g = ProvGraph(source)
        self.keys: dict[tuple[str, Kind], int] = {}
        self.run_wildcard: int | None = None

    def add(self, name: str, kind: Kind) -> int:
        nid = len(self.g.nodes)
        self.g.nodes.append(Node(nid, name, kind))
        return nid

    def named(self, name: str, kind: Kind) -> int:
        key = (name.casefold(), kind)
        if key not in self.keys:
            self.keys[key] = self.add(name, kind)
        return self.keys[key]


def build_from_triples(triples: Iterable[Triple], lexicon: Lexicon, source: str = "") -> ProvGraph:
    b = _Builder(source)
    seq = 0
    for t in triples:
        if t.action not in CANONICAL_VERBS:
            log.debug("sentence %d: dropping triple with action %r", t.sentence, t.action)
            continue
        if t.agent.name == WILDCARD:
            # consecutive frames with an unresolved agent share one '*' node
            if b.run_wildcard is None:
                b.run_wildcard = b.add(WILDCARD, t.agent.kind)
            a = b.run_wildcard
        else:
            b.run_wildcard = None
            a = b.named(t.agent.name, t.agent.kind)
        if t.patient.name == WILDCARD:
            p = b.add(WILDCARD, t.patient.kind)
        else:
            p = b.named(t.patient.name, t.patient.kind)
        src, dst = (a, p) if lexicon.direction(t.action) is Direction.SUBJECT_TO_OBJECT else (p, a)
        seq += 1
        b.g.edges.append(Edge(src, dst, t.action, seq, t.sentence, t.conditional))
    return b.g


def build_graph(frames: list[Frame], lexicon: Lexicon, source: str = "") -> ProvGraph:
    """One edge per well-formed frame (and per extra location of a qualified patient)."""
    return build_from_triples(resolve_frames(frames, lexicon), lexicon, source)


def invert_graph(g: ProvGraph, antonyms: Mapping[str, str]) -> ProvGraph:
    """Swap each edge's system call for its antonym; unknown calls pass through."""
    edges = [replace(e, syscall=antonyms.get(e.syscall, e.syscall)) for e in g.edges]
    return ProvGraph(g.source, list(g.nodes), edges)


# -- JSON ------------------------------------------------------------------

def to_json(g: ProvGraph) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "source": g.source,
        "nodes": [{"id": n.id, "name": n.name, "kind": n.kind.value}
                  for n in sorted(g.nodes, key=lambda n: n.id)],
        "edges": [{"src": e.src, "dst": e.dst, "syscall": e.syscall, "seq": e.seq,
                   "sentence": e.sentence} for e in sorted(g.edges, key=lambda e: e.seq)],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def from_json(text: str) -> ProvGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GraphFormatError("graph JSON must be an object")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise GraphFormatError(f"unsupported graph schema version {version!r} (expected {SCHEMA_VERSION})")
    try:
        nodes = [Node(int(n["id"]), str(n["name"]), Kind(n["kind"])) for n in doc["nodes"]]
        edges = [Edge(int(e["src"]), int(e["dst"]), str(e["syscall"]), int(e["seq"]),
                      int(e.get("sentence", 0))) for e in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph JSON: {exc}") from None
    g = ProvGraph(str(doc.get("source", "")), nodes, edges)
    g.validate()
    return g


# -- DOT -------------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"n": "\n", "r": "\r"}


def _q(text: str) -> str:
    return '"' + "".join(_ESCAPES.get(c, c) for c in text) + '"'


def _unq(text: str) -> str:
    return re.sub(r"\\(.)", lambda m: _UNESCAPES.get(m.group(1), m.group(1)), text[1:-1])


def to_dot(g: ProvGraph) -> str:
    lines = [f"digraph {_q(g.source or 'provenance')} {{"]
    for n in sorted(g.nodes, key=lambda n: n.id):
        lines.append(f"  n{n.id} [label={_q(n.name)}, shape={SHAPES[n.kind]}];")
    for e in sorted(g.edges, key=lambda e: e.seq):
        style = ", style=dashed" if e.conditional else ""
        lines.append(f"  n{e.src} -> n{e.dst} [label={_q(f'{e.seq}: {e.syscall}')}, "
                     f"sentence={e.sentence}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


_STR = r'"(?:[^"\\]|\\.)*"'
_DOT_HEAD = re.compile(rf"^digraph ({_STR}) \{{$")
_DOT_NODE = re.compile(rf"^n(\d+) \[label=({_STR}), shape=(\w+)\];$")
_DOT_EDGE = re.compile(rf"^n(\d+) -> n(\d+) \[label=({_STR}), sentence=(\d+)(, style=dashed)?\];$")


def from_dot(text: str) -> ProvGraph:
    """Parse the DOT dialect written by :func:`to_dot`."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or not _DOT_HEAD.match(lines[0]) or lines[-1] != "}":
        raise GraphFormatError("not a provenance DOT graph")
    source = _unq(_DOT_HEAD.match(lines[0]).group(1))
    g = ProvGraph("" if source == "provenance" else source)
    for ln in lines[1:-1]:
        m = _DOT_NODE.match(ln)
        if m:
            g.nodes.append(Node(int(m.group(1)), _unq(m.group(2)), _KIND_OF_SHAPE[m.group(3)]))
            continue
        m = _DOT_EDGE.match(ln)
        if not m:
            raise GraphFormatError(f"unrecognized DOT line: {ln}")
        seq, call = _unq(m.group(3)).split(": ", 1)
        g.edges.append(Edge(int(m.group(1)), int(m.group(2)), call, int(seq),
                            int(m.group(4)), bool(m.group(5))))
    g.validate()
    return g


def serialize(g: ProvGraph, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(g)
    if fmt == "dot":
        return to_dot(g)
    raise ValueError(f"unknown graph format {fmt!r}")


def parse(text: str, fmt: str = "json") -> ProvGraph:
    if fmt == "json":
        return from_json(text)
    if fmt == "dot":
        return from_dot(text)
    raise ValueError(f"unknown graph format {fmt!r}")


# -- audit-log CSV ---------------------------------------------------------

AUDIT_COLUMNS = ("subject", "action", "object", "kind_s", "kind_o", "seq")


def read_audit_csv(text: str, lexicon: Lexicon, source: str = "") -> ProvGraph:
    """Target graph from ``subject,action,object,kind_s,kind_o,seq`` rows.

    Actions are mapped to system calls and oriented with the direction map.
    A header row is optional.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if rows and [c.strip().lower() for c in rows[0]] == list(AUDIT_COLUMNS):
        rows = rows[1:]
    b = _Builder(source)
    parsed = []
    for lineno, row in enumerate(rows, 1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 6:
            raise GraphFormatError(f"audit CSV row {lineno}: expected 6 columns, got {len(row)}")
        subj, action, obj, ks, ko, seq = (c.strip() for c in row)
        call = lexicon.canonical_verb(action)
        if call is None:
            raise GraphFormatError(f"audit CSV row {lineno}: unknown action {action!r}")
        try:
            parsed.append((int(seq), subj, call, obj, Kind(ks.lower()), Kind(ko.lower())))
        except ValueError:
            raise GraphFormatError(f"audit CSV row {lineno}: bad kind or seq") from None
    parsed.sort(key=lambda r: r[0])
    last = 0
    for seq, subj, call, obj, ks, ko in parsed:
        a, o = b.named(subj, ks), b.named(obj, ko)
        src, dst = (a, o) if lexicon.direction(call) is Direction.SUBJECT_TO_OBJECT else (o, a)
        seq = max(seq, last + 1)
        last = seq
        b.g.edges.append(Edge(src, dst, call, seq, 0))
    return b.g
