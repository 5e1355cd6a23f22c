"""Sign propagation over enhanced (or regular) QPNs.

Depth-first message passing: on receipt a node adds the message to its sign;
it then offers ``sign (x) linksign`` to every unobserved neighbour whose sign
the message would change, except back over the link the message arrived on.

An unobserved common child blocks the trail between its parents, so what a
node learned from its parents must not flow back up to its other parents.
Each node therefore keeps two sums: its sign (everything received), which is
sent to children and intercausal partners, and an upward sum (only what came
from children, intercausal partners or the observation itself), which is sent
to parents. Observed common children induce intercausal links between their
parents, carrying the product-synergy sign for the observed value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence, Union

from eqpn.network import Qpn
from eqpn.signs import (
    NEG_AMBIGUOUS,
    POS_AMBIGUOUS,
    UNKNOWN,
    ZERO,
    EnhancedSign,
    RegularSign,
    neg_strong,
    plus_enhanced,
    plus_regular,
    pos_strong,
    strip,
    times_enhanced,
    times_regular,
)

Sign = Union[EnhancedSign, RegularSign]

FORWARD = "forward-arc"
REVERSE = "reverse-arc"
INTERCAUSAL = "intercausal"
OBSERVATION = "observation"
_KIND_ORDER = {FORWARD: 0, REVERSE: 1, INTERCAUSAL: 2}
_COUNTERPART = {FORWARD: REVERSE, REVERSE: FORWARD, INTERCAUSAL: INTERCAUSAL}


class PropagationError(ValueError):
    pass


class Mode(str, enum.Enum):
    ENHANCED = "enhanced"
    REGULAR = "regular"


@dataclass(frozen=True)
class Observation:
    node: str
    value: bool

    @classmethod
    def parse(cls, text: str) -> Observation:
        """``NODE=true`` or ``NODE=false``."""
        name, sep, value = text.partition("=")
        if not sep or not name or value not in ("true", "false"):
            raise ValueError(f"expected NODE=true|false, got {text!r}")
        return cls(name, value == "true")

    def __str__(self) -> str:
        return f"{self.node}={'true' if self.value else 'false'}"


@dataclass(frozen=True)
class Link:
    """Directed half of an influence in the effective graph."""

    source: str
    target: str
    sign: EnhancedSign
    kind: str


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    sign: Sign
    link_kind: str


@dataclass(frozen=True)
class TraceEntry:
    message: Message
    old: Sign
    new: Sign

    def __str__(self) -> str:
        m = self.message
        return f"{m.receiver}: {self.old} -> {self.new}  (message {m.sign} from {m.sender} via {m.link_kind})"


@dataclass
class PropagationState:
    mode: Mode
    observation: Observation
    signs: dict[str, Sign]
    observed: frozenset[str]
    trace: list[TraceEntry] = field(default_factory=list)
    updates_used: dict[str, int] = field(default_factory=dict)
    exhausted: set[str] = field(default_factory=set)

    def sign_lines(self) -> list[str]:
        return [f"{n} {self.signs[n]}" for n in sorted(self.signs)]

    def trace_lines(self) -> list[str]:
        return [str(t) for t in self.trace]


def reverse_weaken(s: EnhancedSign) -> EnhancedSign:
    """Sign assumed for an arc traversed against its direction."""
    if s.direction == 1:
        return POS_AMBIGUOUS
    if s.direction == -1:
        return NEG_AMBIGUOUS
    return s


def effective_links(q: Qpn, observed: Mapping[str, bool]) -> list[Link]:
    """Forward, reverse, and (for observed common children) intercausal links."""
    links = []
    for arc in q.arcs:
        links.append(Link(arc.src, arc.dst, arc.sign, FORWARD))
        back = arc.reverse_sign if arc.reverse_sign is not None else reverse_weaken(arc.sign)
        links.append(Link(arc.dst, arc.src, back, REVERSE))
    for syn in q.synergies:
        if syn.child in observed and observed[syn.child] == syn.child_value:
            x, y = syn.pair
            links.append(Link(x, y, syn.sign, INTERCAUSAL))
            links.append(Link(y, x, syn.sign, INTERCAUSAL))
    return links


@dataclass(frozen=True)
class _Algebra:
    zero: Sign
    unknown: Sign
    times: Callable[[Sign, Sign], Sign]
    plus: Callable[[Sign, Sign], Sign]
    lift: Callable[[EnhancedSign], Sign]
    seed: Callable[[bool], Sign]


def _identity(s):
    return s


_ENHANCED = _Algebra(
    ZERO,
    UNKNOWN,
    times_enhanced,
    plus_enhanced,
    _identity,
    lambda value: pos_strong(0) if value else neg_strong(0),
)
_REGULAR = _Algebra(
    RegularSign.ZERO,
    RegularSign.UNKNOWN,
    times_regular,
    plus_regular,
    strip,
    lambda value: RegularSign.PLUS if value else RegularSign.MINUS,
)


def _cap(s: Sign, limit: int) -> Sign:
    # a weak bound only loosens when its index shrinks; a strong bound would
    # tighten, so an over-long strong sign drops to ambiguous magnitude
    if not isinstance(s, EnhancedSign) or not s.kind.indexed or s.index <= limit:
        return s
    if s.is_weak:
        return s.with_index(limit)
    return reverse_weaken(s)


@dataclass
class _Frame:
    sender: str
    node: str
    kind: str
    links: Iterator[Link]


def propagate(
    q: Qpn,
    prior_observed: Sequence[Observation],
    new_obs: Observation,
    mode: Union[Mode, str] = Mode.ENHANCED,
) -> PropagationState:
    """Signs occasioned by ``new_obs`` given the earlier observations."""
    mode = Mode(mode)
    alg = _ENHANCED if mode is Mode.ENHANCED else _REGULAR
    known = set(q.nodes)
    observed: dict[str, bool] = {}
    for obs in [*prior_observed, new_obs]:
        if obs.node not in known:
            raise PropagationError(f"unknown node {obs.node!r}")
        if obs.node in observed:
            raise PropagationError(f"node {obs.node!r} observed more than once")
        observed[obs.node] = obs.value

    n = len(q.nodes)
    budget = 2 * n + 2
    index_cap = 2 * n
    adjacency: dict[str, list[Link]] = {v: [] for v in q.nodes}
    for link in effective_links(q, observed):
        adjacency[link.source].append(Link(link.source, link.target, alg.lift(link.sign), link.kind))
    for links in adjacency.values():
        links.sort(key=lambda l: (l.target, _KIND_ORDER[l.kind]))

    state = PropagationState(
        mode=mode,
        observation=new_obs,
        signs={v: alg.zero for v in q.nodes},
        observed=frozenset(observed),
        updates_used={v: 0 for v in q.nodes},
    )
    signs = state.signs
    upward = {v: alg.zero for v in q.nodes}
    up_changes = {v: 0 for v in q.nodes}
    stack: list[_Frame] = []

    def receive(sender: str, receiver: str, message: Sign, kind: str) -> None:
        old = signs[receiver]
        new = alg.plus(old, message)
        if new != old:
            state.updates_used[receiver] += 1
        if kind != FORWARD:
            new_up = alg.plus(upward[receiver], message)
            if new_up != upward[receiver]:
                up_changes[receiver] += 1
                upward[receiver] = new_up
        if state.updates_used[receiver] > budget or up_changes[receiver] > budget:
            new = upward[receiver] = alg.unknown
            state.exhausted.add(receiver)
        signs[receiver] = new
        state.trace.append(TraceEntry(Message(sender, receiver, message, kind), old, new))
        stack.append(_Frame(sender, receiver, kind, iter(adjacency[receiver])))

    def changes(target: str, message: Sign, kind: str) -> bool:
        if alg.plus(signs[target], message) != signs[target]:
            return True
        return kind != FORWARD and alg.plus(upward[target], message) != upward[target]

    receive(new_obs.node, new_obs.node, alg.seed(new_obs.value), OBSERVATION)
    while stack:
        frame = stack[-1]
        link = next(frame.links, None)
        if link is None:
            stack.pop()
            continue
        target = link.target
        if target in observed:
            continue
        if target == frame.sender and link.kind == _COUNTERPART.get(frame.kind):
            # never echo straight back over the link the message came in on;
            # other links to the sender stay open, or trails through it are lost
            continue
        source_sign = upward[frame.node] if link.kind == REVERSE else signs[frame.node]
        message = _cap(alg.times(source_sign, link.sign), index_cap)
        if changes(target, message, link.kind):
            receive(frame.node, target, message, link.kind)
    return state


def propagate_sequence(
    q: Qpn,
    observations: Sequence[Observation],
    mode: Union[Mode, str] = Mode.ENHANCED,
) -> list[PropagationState]:
    nodes = [o.node for o in observations]
    if len(set(nodes)) != len(nodes):
        raise PropagationError("each node may be observed at most once")
    return [propagate(q, observations[:k], obs, mode) for k, obs in enumerate(observations)]

