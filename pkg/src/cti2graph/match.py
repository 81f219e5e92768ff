"""Graph similarity (maximum common edge subgraph) and threat-hunt alignment."""

from __future__ import annotations

import fnmatch
import ipaddress
import re
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import lru_cache

from .graph import Edge, Node, ProvGraph
from .see import WILDCARD

DEFAULT_THRESHOLD = 0.3
DEFAULT_PATH_CAP = 3
DEFAULT_HUNT_BUDGET = 200_000


def _is_ip(text: str) -> bool:
    host = text
    if re.fullmatch(r"[\d.]+:\d+", text):
        host = text.rsplit(":", 1)[0]
    try:
        ipaddress.ip_address(host)
    except ValueError:
        return False
    return True


@lru_cache(maxsize=4096)
def _one_way(pattern: str, name: str) -> bool:
    if pattern == WILDCARD:
        return True
    if pattern.startswith("IP:"):
        if not _is_ip(name):
            return False
        try:
            return re.fullmatch(pattern[3:], name) is not None
        except re.error:
            return False
    if "*" in pattern:
        return fnmatch.fnmatchcase(name.casefold(), pattern.casefold())
    return False


def names_match(a: str, b: str) -> bool:
    """Case-insensitive equality, '*' wildcards, glob names and 'IP:<regex>' patterns."""
    return a.casefold() == b.casefold() or _one_way(a, b) or _one_way(b, a)


def compatible(a: Node, b: Node) -> bool:
    return a.kind == b.kind and names_match(a.name, b.name)


def _label_counts(g: ProvGraph) -> dict[tuple[int, int], Counter]:
    out: dict[tuple[int, int], Counter] = defaultdict(Counter)
    for e in g.edges:
        out[(e.src, e.dst)][e.syscall] += 1
    return out


def _common(c1: Counter | None, c2: Counter | None) -> int:
    if not c1 or not c2:
        return 0
    return sum(min(n, c2[k]) for k, n in c1.items() if k in c2)


def mapped_edge_count(g1: ProvGraph, g2: ProvGraph, mapping: dict[int, int]) -> int:
    """Edges of g1 preserved (same call, consistent endpoints) under a node mapping."""
    l1, l2 = _label_counts(g1), _label_counts(g2)
    total = 0
    for (u, v), c in l1.items():
        if u in mapping and v in mapping:
            total += _common(c, l2.get((mapping[u], mapping[v])))
    return total


def max_common_edges(g1: ProvGraph, g2: ProvGraph) -> tuple[int, dict[int, int]]:
    """Exact maximum common edge subgraph size by branch and bound.

    Searches partial injective node mappings from g1 into g2 restricted to
    compatible pairs.  The bound counts, per system call, the edges that
    could still be matched on both sides.
    """
    l1, l2 = _label_counts(g1), _label_counts(g2)
    cap = min(len(g1.edges), len(g2.edges))
    if cap == 0:
        return 0, {}
    deg: Counter = Counter()
    for e in g1.edges:
        deg[e.src] += 1
        deg[e.dst] += 1
    cands = {n.id: [m.id for m in g2.nodes if compatible(n, m)] for n in g1.nodes}
    order = [n.id for n in sorted(g1.nodes, key=lambda n: (-deg[n.id], len(cands[n.id]), n.id))
             if deg[n.id] and cands[n.id]]
    pos = {u: i for i, u in enumerate(order)}
    # edges of g1 by the later-ordered endpoint; they become decidable there
    closing: dict[int, list[tuple[int, int]]] = defaultdict(list)
    rem1: Counter = Counter()
    for (u, v), c in l1.items():
        if u in pos and v in pos:
            closing[order[max(pos[u], pos[v])]].append((u, v))
            rem1.update(c)
    total2: Counter = Counter(e.syscall for e in g2.edges)

    best = [0, {}]
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def bound(k: int, cur: int, left1: Counter) -> int:
        return cur + sum(min(n, total2[lab]) for lab, n in left1.items())

    def rec(k: int, cur: int, left1: Counter) -> bool:
        if cur > best[0]:
            best[0], best[1] = cur, dict(mapping)
            if cur == cap:
                return True
        if k == len(order) or bound(k, cur, left1) <= best[0]:
            return False
        u = order[k]
        closed = closing.get(u, ())
        left = left1.copy()
        for pair in closed:
            left.subtract(l1[pair])
        left = +left
        for w in cands[u]:
            if w in used:
                continue
            mapping[u] = w
            used.add(w)
            gain = 0
            for a, b in closed:
                # the other endpoint may have been left unmapped earlier
                if a in mapping and b in mapping:
                    gain += _common(l1[(a, b)], l2.get((mapping[a], mapping[b])))
            if rec(k + 1, cur + gain, left):
                return True
            used.discard(w)
            del mapping[u]
        return rec(k + 1, cur, left)

    rec(0, 0, rem1)
    return best[0], best[1]


def mcs_score(g1: ProvGraph, g2: ProvGraph) -> float:
    """Common edges over the smaller edge count; 1 for two empty graphs."""
    e1, e2 = len(g1.edges), len(g2.edges)
    if e1 == 0 and e2 == 0:
        return 1.0
    if e1 == 0 or e2 == 0:
        return 0.0
    # search from the smaller side; the score is symmetric
    if (e1, len(g1.nodes)) > (e2, len(g2.nodes)):
        g1, g2 = g2, g1
    n, _ = max_common_edges(g1, g2)
    return n / min(e1, e2)


# -- hunting ---------------------------------------------------------------

@dataclass
class AlignmentResult:
    score: float
    threshold: float
    detected: bool
    alignments: dict[int, list[int] | None] = field(default_factory=dict)
    mapping: dict[int, int] = field(default_factory=dict)
    exact: bool = True


class _Reach:
    """Directed paths of bounded length whose first hop carries a given call."""

    def __init__(self, g: ProvGraph, cap: int):
        self.cap = cap
        self.out: dict[int, list[Edge]] = defaultdict(list)
        for e in g.edges:
            self.out[e.src].append(e)
        self._cache: dict[tuple[int, str], dict[int, list[int]]] = {}

    def paths(self, a: int, call: str) -> dict[int, list[int]]:
        key = (a, call)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        found: dict[int, list[int]] = {}
        queue = deque()
        seen = set()
        for e in self.out[a]:
            if e.syscall == call and e.dst not in seen:
                seen.add(e.dst)
                queue.append((e.dst, [a, e.dst]))
        while queue:
            node, path = queue.popleft()
            found.setdefault(node, path)
            if len(path) - 1 >= self.cap:
                continue
            for e in self.out[node]:
                if e.dst not in seen:
                    seen.add(e.dst)
                    queue.append((e.dst, path + [e.dst]))
        self._cache[key] = found
        return found


def hunt(query: ProvGraph, target: ProvGraph, threshold: float = DEFAULT_THRESHOLD,
         path_cap: int = DEFAULT_PATH_CAP, budget: int = DEFAULT_HUNT_BUDGET) -> AlignmentResult:
    """Align query edges to short causal paths in the target.

    A greedy pass seeds the best mapping, then branch and bound refines it
    until the search is exhausted or ``budget`` nodes have been expanded.
    """
    if not query.edges:
        raise ValueError("query graph has no edges; the hunt score is undefined")
    reach = _Reach(target, path_cap)
    cands = {n.id: [m.id for m in target.nodes if compatible(n, m)] for n in query.nodes}
    qedges = list(query.edges)
    deg: Counter = Counter()
    for e in qedges:
        deg[e.src] += 1
        deg[e.dst] += 1
    order = [n.id for n in sorted(query.nodes, key=lambda n: (len(cands[n.id]), -deg[n.id], n.id))
             if deg[n.id] and cands[n.id]]
    pos = {u: i for i, u in enumerate(order)}
    closing: dict[int, list[Edge]] = defaultdict(list)
    live = 0
    for e in qedges:
        if e.src in pos and e.dst in pos:
            closing[order[max(pos[e.src], pos[e.dst])]].append(e)
            live += 1

    def aligned(e: Edge, m: dict[int, int]) -> bool:
        if e.src not in m or e.dst not in m:
            return False
        return m[e.dst] in reach.paths(m[e.src], e.syscall)

    def gain_of(u: int, m: dict[int, int]) -> int:
        return sum(1 for e in closing.get(u, ()) if aligned(e, m))

    # greedy seed
    greedy: dict[int, int] = {}
    used: set[int] = set()
    gscore = 0
    for u in order:
        best_w, best_g = None, -1
        for w in cands[u]:
            if w in used:
                continue
            greedy[u] = w
            g = gain_of(u, greedy)
            del greedy[u]
            if g > best_g:
                best_w, best_g = w, g
        if best_w is not None:
            greedy[u] = best_w
            used.add(best_w)
            gscore += best_g
    best = [gscore, dict(greedy)]
    expanded = [0]
    exhausted = [True]
    mapping: dict[int, int] = {}
    used = set()
    suffix = [0] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + len(closing.get(order[k], ()))

    def rec(k: int, cur: int) -> bool:
        if cur > best[0]:
            best[0], best[1] = cur, dict(mapping)
        if best[0] == live:
            return True
        if k == len(order) or cur + suffix[k] <= best[0]:
            return False
        expanded[0] += 1
        if expanded[0] > budget:
            exhausted[0] = False
            return True
        u = order[k]
        for w in cands[u]:
            if w in used:
                continue
            mapping[u] = w
            used.add(w)
            stop = rec(k + 1, cur + gain_of(u, mapping))
            used.discard(w)
            del mapping[u]
            if stop:
                return True
        return rec(k + 1, cur)

    if best[0] < live:
        rec(0, 0)
    m = best[1]
    alignments: dict[int, list[int] | None] = {}
    for e in qedges:
        path = None
        if e.src in m and e.dst in m:
            path = reach.paths(m[e.src], e.syscall).get(m[e.dst])
        alignments[e.seq] = path
    score = sum(1 for p in alignments.values() if p is not None) / len(qedges)
    return AlignmentResult(score, threshold, score > threshold, alignments, m, exhausted[0])
