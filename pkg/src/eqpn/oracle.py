"""Exact inference by enumeration, random networks, and soundness checks.

Everything here is deliberately brute force: the joint distribution is
tabulated over all 2**n assignments, so the checks do not share any code path
with the qualitative machinery they validate.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from eqpn.abstraction import AbstractionConfig, abstract_network, classify_influence, influence_differences
from eqpn.network import Bn, Qpn, QpnArc, parent_rows, topological_order
from eqpn.propagation import Mode, Observation, propagate
from eqpn.signs import EnhancedSign, RegularSign, negate, plus_enhanced, strip, times_enhanced

MAX_NODES = 20
TOLERANCE = 1e-9


class ZeroProbabilityEvidence(ValueError):
    pass


class JointTable:
    """All 2**n joint assignments of a Bn with their probabilities."""

    def __init__(self, b: Bn):
        n = len(b.nodes)
        if n > MAX_NODES:
            raise ValueError(f"enumeration is limited to {MAX_NODES} nodes, got {n}")
        self.nodes = list(b.nodes)
        self.column = {v: i for i, v in enumerate(self.nodes)}
        self.values = np.array(list(itertools.product((True, False), repeat=n)), dtype=bool).reshape(-1, n)
        probs = np.ones(len(self.values))
        for v in self.nodes:
            ps = b.parents[v]
            row = np.zeros(len(self.values), dtype=np.int64)
            for p in ps:
                # parent_rows lists true first, so a false parent adds weight
                row = row * 2 + (~self.values[:, self.column[p]]).astype(np.int64)
            table = np.array([b.cpt[v][key] for key in parent_rows(len(ps))])
            p_true = table[row]
            probs *= np.where(self.values[:, self.column[v]], p_true, 1.0 - p_true)
        self.probs = probs

    def mask(self, evidence: Mapping[str, bool]) -> np.ndarray:
        m = np.ones(len(self.probs), dtype=bool)
        for v, val in evidence.items():
            m &= self.values[:, self.column[v]] == val
        return m

    def evidence_probability(self, evidence: Mapping[str, bool]) -> float:
        return float(self.probs[self.mask(evidence)].sum())

    def marginals(self, evidence: Mapping[str, bool] = {}) -> dict[str, float]:
        """Pr(v = true | evidence) for every node."""
        m = self.mask(evidence)
        pe = self.probs[m].sum()
        if pe <= 0.0:
            raise ZeroProbabilityEvidence(f"evidence {dict(evidence)} has probability 0")
        weighted = self.probs[m] @ self.values[m]
        return {v: float(weighted[i] / pe) for i, v in enumerate(self.nodes)}

    def marginal(self, target: str, evidence: Mapping[str, bool] = {}) -> float:
        m = self.mask(evidence)
        pe = self.probs[m].sum()
        if pe <= 0.0:
            raise ZeroProbabilityEvidence(f"evidence {dict(evidence)} has probability 0")
        return float(self.probs[m & self.values[:, self.column[target]]].sum() / pe)


def marginal(b: Bn, target: str, evidence: Optional[Mapping[str, bool]] = None) -> float:
    """Pr(target = true | evidence) by summing the joint over all completions."""
    evidence = dict(evidence or {})
    for v in [target, *evidence]:
        if v not in b.parents:
            raise ValueError(f"unknown node {v!r}")
    return JointTable(b).marginal(target, evidence)


# -- direction soundness ------------------------------------------------------


@dataclass(frozen=True)
class Contradiction:
    network: str
    delta: float
    mode: str
    observation: str
    node: str
    predicted: str
    prior: float
    posterior: float

    def __str__(self) -> str:
        return (
            f"network {self.network} delta {self.delta:g} {self.mode} observe {self.observation}: "
            f"{self.node} predicted {self.predicted} but Pr moved {self.prior:.12g} -> {self.posterior:.12g}"
        )


def direction_holds(sign: Union[EnhancedSign, RegularSign], shift: float, tol: float = TOLERANCE) -> bool:
    regular = strip(sign) if isinstance(sign, EnhancedSign) else sign
    if regular is RegularSign.PLUS:
        return shift >= -tol
    if regular is RegularSign.MINUS:
        return shift <= tol
    if regular is RegularSign.ZERO:
        return abs(shift) <= tol
    return True


def check_direction_soundness(
    b: Bn,
    cfg: AbstractionConfig,
    obs: Observation,
    qpn: Optional[Qpn] = None,
    mode: Union[Mode, str] = Mode.ENHANCED,
    table: Optional[JointTable] = None,
    label: str = "",
) -> list[Contradiction]:
    """Compare predicted directions of change with exact posterior shifts.

    ``qpn`` overrides the abstraction of ``b`` (used to plant wrong signs).
    Raises ZeroProbabilityEvidence when the observation is impossible.
    """
    table = table or JointTable(b)
    qpn = qpn or abstract_network(b, cfg)
    prior = table.marginals()
    posterior = table.marginals({obs.node: obs.value})
    state = propagate(qpn, [], obs, mode)
    out = []
    for v in b.nodes:
        if v == obs.node:
            continue
        sign = state.signs[v]
        if not direction_holds(sign, posterior[v] - prior[v]):
            out.append(Contradiction(label, cfg.delta, Mode(mode).value, str(obs), v, str(sign), prior[v], posterior[v]))
    return out


# -- strength bounds at the CPT-expression level ------------------------------


def bound_holds(sign: EnhancedSign, diff: float, delta: float, eps: float = TOLERANCE) -> bool:
    """Whether ``diff`` is consistent with ``sign`` at cut-off ``delta``.

    Strong with index i: |diff| >= delta**i; weak: |diff| <= delta**i; all
    signed variants also fix the direction.
    """
    d = sign.direction
    if d is None:
        return True
    if d == 0:
        return abs(diff) <= eps
    x = d * diff
    if x < -eps:
        return False
    if sign.is_strong:
        return x >= delta**sign.index - eps
    if sign.is_weak:
        return x <= delta**sign.index + eps
    return True


@dataclass(frozen=True)
class BoundCheck:
    """One measured conditional difference against the sign predicted for it."""

    kind: str
    nodes: tuple[str, ...]
    context: tuple[tuple[str, bool], ...]
    predicted: EnhancedSign
    value: float
    lower: Optional[float]
    upper: Optional[float]

    @property
    def ok(self) -> bool:
        return (self.lower is None or self.value >= self.lower) and (self.upper is None or self.value <= self.upper)

    def __str__(self) -> str:
        ctx = " ".join(f"{k}={'true' if v else 'false'}" for k, v in self.context) or "-"
        return f"{self.kind} {'->'.join(self.nodes)} [{ctx}] predicted {self.predicted}: diff {self.value:.12g} outside [{self.lower}, {self.upper}]"


def _descendants(b: Bn, node: str) -> set[str]:
    out: set[str] = set()
    frontier = [node]
    while frontier:
        for c in b.children(frontier.pop()):
            if c not in out:
                out.add(c)
                frontier.append(c)
    return out


def _interval(sign: EnhancedSign, delta: float, eps: float) -> tuple[Optional[float], Optional[float]]:
    d = sign.direction
    if d is None:
        return None, None
    if d == 0:
        return -eps, eps
    if sign.is_strong:
        lo, hi = delta**sign.index - eps, None
    elif sign.is_weak:
        lo, hi = -eps, delta**sign.index + eps
    else:
        lo, hi = -eps, None
    if d == 1:
        return lo, hi
    return (None if hi is None else -hi), -lo


def _conditional_differences(table: JointTable, driver: str, target: str, context_nodes: Sequence[str]):
    """Pr(target | driver, ctx) - Pr(target | not driver, ctx) for each positive-probability ctx."""
    for values in itertools.product((True, False), repeat=len(context_nodes)):
        ctx = dict(zip(context_nodes, values))
        hi = {**ctx, driver: True}
        lo = {**ctx, driver: False}
        if table.evidence_probability(hi) <= 0.0 or table.evidence_probability(lo) <= 0.0:
            continue
        yield ctx, table.marginal(target, hi) - table.marginal(target, lo)


def _arc_signs(b: Bn, cfg: AbstractionConfig) -> dict[tuple[str, str], EnhancedSign]:
    return {
        (p, c): classify_influence([d for _, d in influence_differences(b, p, c)], cfg)
        for c in b.nodes
        for p in b.parents[c]
    }


def chain_measurements(b: Bn, cfg: AbstractionConfig, table: Optional[JointTable] = None) -> list[BoundCheck]:
    """Measure every eligible chain A -> B -> C against the product of its arc signs.

    Eligible: A is not a parent of C and no other parent of C descends from B,
    so the A-to-C difference factors into the two arc differences.
    """
    table = table or JointTable(b)
    signs = _arc_signs(b, cfg)
    out = []
    for bnode in b.nodes:
        desc = _descendants(b, bnode)
        for a in b.parents[bnode]:
            for c in b.children(bnode):
                if a in b.parents[c]:
                    continue
                y = [p for p in b.parents[c] if p != bnode]
                if any(p in desc for p in y):
                    continue
                x = [p for p in b.parents[bnode] if p != a]
                context = list(dict.fromkeys(x + y))
                predicted = times_enhanced(signs[(a, bnode)], signs[(bnode, c)])
                lo, hi = _interval(predicted, cfg.delta, cfg.epsilon)
                for ctx, diff in _conditional_differences(table, a, c, context):
                    out.append(BoundCheck("chain", (a, bnode, c), tuple(ctx.items()), predicted, diff, lo, hi))
    return out


def check_chain_strength(b: Bn, cfg: AbstractionConfig) -> list[BoundCheck]:
    """Chains whose measured difference breaks the bound implied by their sign product."""
    return [m for m in chain_measurements(b, cfg) if not m.ok]


TRIANGLE_ALL_WEAK = "all-weak"
TRIANGLE_TRADE_OFF = "strong-vs-weak-chain"


def composition_measurements(b: Bn, cfg: AbstractionConfig, table: Optional[JointTable] = None) -> list[BoundCheck]:
    """Measure every eligible triangle A -> B -> C, A -> C.

    Each context yields a check of the combined sign
    ``sign(A,C) (+) (sign(A,B) (x) sign(B,C))`` and, for the two configurations
    with a closed-form bound, a check of that bound as well.
    """
    table = table or JointTable(b)
    signs = _arc_signs(b, cfg)
    delta, eps = cfg.delta, cfg.epsilon
    out = []
    for bnode in b.nodes:
        desc = _descendants(b, bnode)
        for a in b.parents[bnode]:
            for c in b.children(bnode):
                if a not in b.parents[c]:
                    continue
                y = [p for p in b.parents[c] if p not in (a, bnode)]
                if any(p in desc for p in y):
                    continue
                x = [p for p in b.parents[bnode] if p != a]
                context = list(dict.fromkeys(x + y))
                s_ab, s_bc, s_ac = signs[(a, bnode)], signs[(bnode, c)], signs[(a, c)]
                predicted = plus_enhanced(s_ac, times_enhanced(s_ab, s_bc))
                extra = []
                # swapping the values of A, B or C maps every agreeing all-weak
                # triangle onto the all-positive one
                chain = times_enhanced(s_ab, s_bc)
                if all(s.is_weak and s.index == 1 for s in (s_ab, s_bc, s_ac)) and chain.direction == s_ac.direction:
                    hi = delta + delta**2 + eps
                    extra.append((TRIANGLE_ALL_WEAK, -eps, hi) if s_ac.direction == 1 else (TRIANGLE_ALL_WEAK, -hi, eps))
                # likewise for a strong direct influence opposed by a weak-weak chain
                if s_ac.is_strong and s_ac.index == 1 and s_ab.is_weak and s_bc.is_weak and chain.direction == -s_ac.direction:
                    lo = delta - delta**2 - eps
                    extra.append((TRIANGLE_TRADE_OFF, lo, None) if s_ac.direction == 1 else (TRIANGLE_TRADE_OFF, None, -lo))
                lo, hi = _interval(predicted, delta, eps)
                for ctx, diff in _conditional_differences(table, a, c, context):
                    key = tuple(ctx.items())
                    out.append(BoundCheck("composition", (a, bnode, c), key, predicted, diff, lo, hi))
                    for kind, elo, ehi in extra:
                        out.append(BoundCheck(kind, (a, bnode, c), key, predicted, diff, elo, ehi))
    return out


def check_composition_bounds(b: Bn, cfg: AbstractionConfig) -> list[BoundCheck]:
    return [m for m in composition_measurements(b, cfg) if not m.ok]


# -- random networks ------------------------------------------------------------


@dataclass(frozen=True)
class RandomBnSpec:
    node_count: int
    max_parents: int = 3
    arc_density: float = 0.4
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.node_count <= MAX_NODES:
            raise ValueError(f"node_count must lie in 1..{MAX_NODES}, got {self.node_count}")
        if self.max_parents < 0:
            raise ValueError("max_parents must be non-negative")
        if not 0.0 <= self.arc_density <= 1.0:
            raise ValueError("arc_density must be a probability")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _quantize(p: float) -> float:
    # 9 significant digits, so that files written with format_probability
    # read back to the very same floats
    return float(format(p, ".9g"))


def node_names(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"N{i:0{width}d}" for i in range(n)]


def random_bn(spec: RandomBnSpec) -> Bn:
    rng = random.Random(spec.seed)
    names = node_names(spec.node_count)
    parents: dict[str, tuple[str, ...]] = {}
    cpt: dict[str, dict[tuple[bool, ...], float]] = {}
    for i, v in enumerate(names):
        candidates = names[:i]
        rng.shuffle(candidates)
        chosen = [c for c in candidates if rng.random() < spec.arc_density][: spec.max_parents]
        ps = tuple(sorted(chosen))
        parents[v] = ps
        cpt[v] = {key: _quantize(rng.random()) for key in parent_rows(len(ps))}
    return Bn(tuple(names), parents, cpt)


def sample_classified_bn(
    parents: Mapping[str, Sequence[str]],
    targets: Mapping[tuple[str, str], EnhancedSign],
    cfg: AbstractionConfig,
    rng: random.Random,
    max_tries: int = 100_000,
) -> Bn:
    """Rejection-sample CPTs until every arc in ``targets`` classifies as asked.

    Each node's table is drawn independently, so rejection happens per node.
    """
    nodes = tuple(parents)
    topological_order(nodes, [(p, c) for c in nodes for p in parents[c]])
    cpt: dict[str, dict[tuple[bool, ...], float]] = {}
    for v in nodes:
        ps = tuple(parents[v])
        wanted = [(p, targets[(p, v)]) for p in ps if (p, v) in targets]
        for _ in range(max_tries):
            rows = {key: rng.random() for key in parent_rows(len(ps))}
            trial = Bn((v, *ps), {v: ps, **{p: () for p in ps}}, {v: rows, **{p: {(): 0.5} for p in ps}})
            if all(classify_influence([d for _, d in influence_differences(trial, p, v)], cfg) == s for p, s in wanted):
                cpt[v] = rows
                break
        else:
            raise RuntimeError(f"no CPT for {v} met {wanted} within {max_tries} draws")
    return Bn(nodes, {v: tuple(parents[v]) for v in nodes}, cpt)


# -- campaigns ------------------------------------------------------------------


@dataclass
class ValidationReport:
    networks: int = 0
    trials: int = 0
    skipped: list[str] = field(default_factory=list)
    contradictions: list[Contradiction] = field(default_factory=list)
    resolved_tradeoffs: int = 0
    runtime: float = 0.0
    records: list[dict] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.contradictions

    def format_text(self) -> str:
        lines = [
            f"networks: {self.networks}",
            f"trials: {self.trials}",
            f"skipped: {len(self.skipped)}",
            f"contradictions: {len(self.contradictions)}",
            f"resolved_tradeoffs: {self.resolved_tradeoffs}",
            f"runtime: {self.runtime:.2f} s",
        ]
        lines += [f"  skipped {s}" for s in self.skipped]
        lines += [f"  contradiction {c}" for c in self.contradictions]
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


Plant = Callable[[Qpn], Qpn]


def flip_arc(src: str, dst: str) -> Plant:
    """A plant that negates the sign of arc ``src -> dst``."""

    def plant(q: Qpn) -> Qpn:
        if q.arc(src, dst) is None:
            raise ValueError(f"no arc {src} -> {dst} to flip")
        arcs = [QpnArc(a.src, a.dst, negate(a.sign), a.reverse_sign) if (a.src, a.dst) == (src, dst) else a for a in q.arcs]
        return Qpn(q.nodes, arcs, q.synergies, q.delta)

    return plant


def validate_networks(
    networks: Iterable[tuple[str, Bn]],
    deltas: Sequence[float],
    plant: Optional[Plant] = None,
) -> ValidationReport:
    """Abstract, propagate in both modes, and compare with exact inference.

    Every node and value is tried as the sole observation.
    """
    start = time.perf_counter()
    report = ValidationReport()
    for label, b in networks:
        report.networks += 1
        table = JointTable(b)
        prior = table.marginals()
        qpns = {}
        for delta in deltas:
            q = abstract_network(b, AbstractionConfig(delta))
            qpns[delta] = plant(q) if plant else q
        for delta in deltas:
            for v in b.nodes:
                for value in (True, False):
                    obs = Observation(v, value)
                    report.trials += 1
                    record = {"network": label, "delta": delta, "observation": str(obs)}
                    try:
                        posterior = table.marginals({v: value})
                    except ZeroProbabilityEvidence:
                        report.skipped.append(f"network {label} delta {delta:g} observe {obs}: zero-probability evidence")
                        record["skipped"] = True
                        report.records.append(record)
                        continue
                    states = {m: propagate(qpns[delta], [], obs, m) for m in Mode}
                    nodes = {}
                    for u in b.nodes:
                        shift = posterior[u] - prior[u]
                        enh, reg = states[Mode.ENHANCED].signs[u], states[Mode.REGULAR].signs[u]
                        nodes[u] = {"enhanced": str(enh), "regular": str(reg), "prior": prior[u], "posterior": posterior[u]}
                        if u == v:
                            continue
                        if reg is RegularSign.UNKNOWN and strip(enh) in (RegularSign.PLUS, RegularSign.MINUS):
                            report.resolved_tradeoffs += 1
                        for mode, sign in ((Mode.ENHANCED, enh), (Mode.REGULAR, reg)):
                            if not direction_holds(sign, shift):
                                report.contradictions.append(
                                    Contradiction(label, delta, mode.value, str(obs), u, str(sign), prior[u], posterior[u])
                                )
                    record["skipped"] = False
                    record["nodes"] = nodes
                    report.records.append(record)
    report.runtime = time.perf_counter() - start
    return report


def run_campaign(
    specs: Sequence[RandomBnSpec],
    deltas: Sequence[float],
    plant: Optional[Plant] = None,
) -> ValidationReport:
    return validate_networks(((str(s.seed), random_bn(s)) for s in specs), deltas, plant)


def campaign_specs(count: int, node_count: int, arc_density: float, max_parents: int, seed: int) -> list[RandomBnSpec]:
    """``count`` network specs whose seeds derive deterministically from ``seed``."""
    rng = random.Random(seed)
    return [RandomBnSpec(node_count, max_parents, arc_density, rng.getrandbits(64)) for _ in range(count)]
