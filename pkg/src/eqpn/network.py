"""Enhanced QPNs and binary Bayesian networks, with structural validation."""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from eqpn.signs import EnhancedSign

NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


class CycleError(ValueError):
    def __init__(self, node: str):
        super().__init__(f"cycle through node {node!r}")
        self.node = node


@dataclass(frozen=True)
class Diagnostic:
    """One violated structural invariant."""

    kind: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.subject}: {self.message}"


@dataclass(frozen=True)
class QpnArc:
    src: str
    dst: str
    sign: EnhancedSign
    reverse_sign: Optional[EnhancedSign] = None


@dataclass(frozen=True)
class SynergyEntry:
    """Product synergy of ``pair`` on ``child`` given ``child = child_value``."""

    pair: tuple[str, str]
    child: str
    child_value: bool
    sign: EnhancedSign

    @property
    def key(self) -> tuple[frozenset, str, bool]:
        return frozenset(self.pair), self.child, self.child_value


@dataclass(frozen=True)
class Qpn:
    nodes: tuple[str, ...]
    arcs: tuple[QpnArc, ...] = ()
    synergies: tuple[SynergyEntry, ...] = ()
    delta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "synergies", tuple(self.synergies))

    def parents(self, node: str) -> list[str]:
        return [a.src for a in self.arcs if a.dst == node]

    def arc(self, src: str, dst: str) -> Optional[QpnArc]:
        for a in self.arcs:
            if a.src == src and a.dst == dst:
                return a
        return None

    def edges(self) -> list[tuple[str, str]]:
        return [(a.src, a.dst) for a in self.arcs]


@dataclass(frozen=True)
class Bn:
    """Binary Bayesian network.

    ``cpt[node]`` maps a tuple of parent values (in ``parents[node]`` order) to
    Pr(node = true | parents).
    """

    nodes: tuple[str, ...]
    parents: Mapping[str, tuple[str, ...]]
    cpt: Mapping[str, Mapping[tuple[bool, ...], float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "parents", {n: tuple(ps) for n, ps in self.parents.items()})
        object.__setattr__(self, "cpt", {n: dict(rows) for n, rows in self.cpt.items()})

    def edges(self) -> list[tuple[str, str]]:
        return [(p, n) for n in self.nodes for p in self.parents.get(n, ())]

    def children(self, node: str) -> list[str]:
        return [n for n in self.nodes if node in self.parents.get(n, ())]

    def prob(self, node: str, assignment: Mapping[str, bool]) -> float:
        """Pr(node = assignment[node] | parent values taken from ``assignment``)."""
        key = tuple(assignment[p] for p in self.parents[node])
        p = self.cpt[node][key]
        return p if assignment[node] else 1.0 - p

    def prob_true(self, node: str, assignment: Mapping[str, bool]) -> float:
        return self.cpt[node][tuple(assignment[p] for p in self.parents[node])]


def parent_rows(k: int) -> list[tuple[bool, ...]]:
    """All assignments to ``k`` parents, true before false, first parent most significant."""
    return list(itertools.product((True, False), repeat=k))


def topological_order(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str]:
    """Kahn's algorithm with lexicographic tie-breaking.

    Raises CycleError naming a node that lies on a cycle.
    """
    nodes = list(dict.fromkeys(nodes))
    edges = list(edges)
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    indeg = {n: 0 for n in nodes}
    for s, d in edges:
        succ[s].append(d)
        indeg[d] += 1
    heap = [n for n in nodes if indeg[n] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for d in succ[n]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, d)
    if len(order) < len(nodes):
        raise CycleError(_node_on_cycle(edges, set(nodes) - set(order)))
    return order


def _node_on_cycle(edges, remaining: set[str]) -> str:
    # each leftover node keeps a leftover predecessor, so walking
    # predecessors must revisit a node, and that node lies on a cycle
    pred = {n: sorted(s for s, d in edges if d == n and s in remaining) for n in remaining}
    node = min(remaining)
    seen = set()
    while node not in seen:
        seen.add(node)
        node = pred[node][0]
    return node


def _cycle_diagnostics(nodes, edges) -> list[Diagnostic]:
    try:
        topological_order(nodes, edges)
    except CycleError as exc:
        return [Diagnostic("cycle", exc.node, "digraph contains a directed cycle through this node")]
    return []


def _name_diagnostics(nodes: Sequence[str]) -> list[Diagnostic]:
    out = []
    seen = set()
    for n in nodes:
        if not NAME_RE.match(n):
            out.append(Diagnostic("bad-name", n, "node names use letters, digits and underscore"))
        if n in seen:
            out.append(Diagnostic("duplicate-node", n, "node declared more than once"))
        seen.add(n)
    return out


def _index_ok(sign: EnhancedSign) -> bool:
    return not sign.kind.indexed or sign.index == 1


def validate_qpn(q: Qpn) -> list[Diagnostic]:
    diags = _name_diagnostics(q.nodes)
    known = set(q.nodes)
    if q.delta is not None and not 0.0 < q.delta <= 1.0:
        diags.append(Diagnostic("delta-range", str(q.delta), "cut-off must lie in (0, 1]"))
    seen_arcs = set()
    good_edges = []
    for a in q.arcs:
        label = f"{a.src}->{a.dst}"
        missing = [n for n in (a.src, a.dst) if n not in known]
        if missing:
            diags.append(Diagnostic("unknown-node", label, f"undeclared node {missing[0]!r}"))
            continue
        if (a.src, a.dst) in seen_arcs:
            diags.append(Diagnostic("duplicate-arc", label, "more than one arc for this ordered pair"))
        seen_arcs.add((a.src, a.dst))
        good_edges.append((a.src, a.dst))
        if a.src == a.dst:
            diags.append(Diagnostic("self-loop", label, "arc from a node to itself"))
        if not _index_ok(a.sign):
            diags.append(Diagnostic("arc-index", label, f"arc sign {a.sign} must have index 1"))
        if a.reverse_sign is not None and not _index_ok(a.reverse_sign):
            diags.append(Diagnostic("arc-index", label, f"reverse sign {a.reverse_sign} must have index 1"))
    if not any(d.kind == "self-loop" for d in diags):
        diags.extend(_cycle_diagnostics([n for n in q.nodes if n in known], good_edges))
    seen_syn = set()
    for s in q.synergies:
        label = f"{{{s.pair[0]},{s.pair[1]}}}|{s.child}={'true' if s.child_value else 'false'}"
        if s.pair[0] == s.pair[1]:
            diags.append(Diagnostic("synergy-pair", label, "synergy pair must name two distinct nodes"))
        for n in s.pair:
            if (n, s.child) not in seen_arcs:
                diags.append(Diagnostic("non-parent", label, f"{n} is not a parent of {s.child}"))
        if s.key in seen_syn:
            diags.append(Diagnostic("duplicate-synergy", label, "more than one entry for this pair, child and value"))
        seen_syn.add(s.key)
        if not _index_ok(s.sign):
            diags.append(Diagnostic("synergy-index", label, f"synergy sign {s.sign} must have index 1"))
    return diags


def validate_bn(b: Bn) -> list[Diagnostic]:
    diags = _name_diagnostics(b.nodes)
    known = set(b.nodes)
    edges = []
    for n in b.nodes:
        ps = b.parents.get(n, ())
        for p in ps:
            if p not in known:
                diags.append(Diagnostic("unknown-node", n, f"undeclared parent {p!r}"))
            else:
                edges.append((p, n))
        if len(set(ps)) != len(ps):
            diags.append(Diagnostic("duplicate-parent", n, "parent listed more than once"))
        rows = b.cpt.get(n, {})
        expected = set(parent_rows(len(ps)))
        if set(rows) != expected or len(rows) != len(expected):
            diags.append(
                Diagnostic("incomplete-cpt", n, f"CPT has {len(rows)} rows, expected {len(expected)} distinct parent assignments")
            )
        for key, p in rows.items():
            if not (0.0 <= p <= 1.0):
                diags.append(Diagnostic("probability-range", n, f"Pr = {p!r} for row {key} is outside [0, 1]"))
    diags.extend(_cycle_diagnostics(b.nodes, edges))
    return diags


def joint_probability(b: Bn, assignment: Mapping[str, bool]) -> float:
    """Chain-rule product of CPT entries for a total assignment."""
    if set(assignment) != set(b.nodes):
        raise ValueError("assignment must cover exactly the network's nodes")
    p = 1.0
    for n in b.nodes:
        p *= b.prob(n, assignment)
    return p
