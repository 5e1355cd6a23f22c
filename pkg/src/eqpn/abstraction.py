"""Derive an enhanced QPN from a binary Bayesian network and a cut-off delta."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from eqpn.network import Bn, Qpn, QpnArc, SynergyEntry, validate_bn
from eqpn.signs import (
    NEG_AMBIGUOUS,
    POS_AMBIGUOUS,
    UNKNOWN,
    ZERO,
    EnhancedSign,
    neg_strong,
    neg_weak,
    pos_strong,
    pos_weak,
)


class AbstractionError(ValueError):
    pass


@dataclass(frozen=True)
class AbstractionConfig:
    delta: float
    epsilon: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if not 0.0 < self.epsilon < self.delta / 10:
            raise ValueError(f"epsilon must be positive and much smaller than delta, got {self.epsilon}")


def _contexts(b: Bn, node: str, exclude: Sequence[str]):
    others = [p for p in b.parents[node] if p not in exclude]
    for values in itertools.product((True, False), repeat=len(others)):
        yield dict(zip(others, values))


def _require_parent(b: Bn, parent: str, child: str):
    if child not in b.parents:
        raise AbstractionError(f"unknown node {child!r}")
    if parent not in b.parents[child]:
        raise AbstractionError(f"{parent!r} is not a parent of {child!r}")


def influence_differences(b: Bn, src: str, dst: str) -> list[tuple[dict[str, bool], float]]:
    """Pr(dst | src, x) - Pr(dst | not src, x) for every context x of dst's other parents."""
    _require_parent(b, src, dst)
    out = []
    for ctx in _contexts(b, dst, [src]):
        hi = b.prob_true(dst, {**ctx, src: True})
        lo = b.prob_true(dst, {**ctx, src: False})
        out.append((ctx, hi - lo))
    return out


def classify_influence(diffs: Sequence[float], cfg: AbstractionConfig) -> EnhancedSign:
    if not diffs:
        raise ValueError("no context differences to classify")
    eps, delta = cfg.epsilon, cfg.delta
    if all(-eps <= d <= eps for d in diffs):
        return ZERO
    if all(d >= -eps for d in diffs):
        if all(d >= delta - eps for d in diffs):
            return pos_strong(1)
        if all(d <= delta + eps for d in diffs):
            return pos_weak(1)
        return POS_AMBIGUOUS
    if all(d <= eps for d in diffs):
        if all(d <= -delta + eps for d in diffs):
            return neg_strong(1)
        if all(d >= -delta - eps for d in diffs):
            return neg_weak(1)
        return NEG_AMBIGUOUS
    return UNKNOWN


def synergy_values(b: Bn, a: str, b2: str, child: str, child_value: bool) -> list[tuple[dict[str, bool], float]]:
    """Product-synergy expression for every context of the child's remaining parents."""
    _require_parent(b, a, child)
    _require_parent(b, b2, child)
    if a == b2:
        raise AbstractionError("synergy needs two distinct parents")

    def pr(va, vb, ctx):
        p = b.prob_true(child, {**ctx, a: va, b2: vb})
        return p if child_value else 1.0 - p

    out = []
    for ctx in _contexts(b, child, [a, b2]):
        s = pr(True, True, ctx) * pr(False, False, ctx) - pr(False, True, ctx) * pr(True, False, ctx)
        out.append((ctx, s))
    return out


def synergy_sign(b: Bn, a: str, b2: str, child: str, child_value: bool, cfg: AbstractionConfig) -> EnhancedSign:
    values = [s for _, s in synergy_values(b, a, b2, child, child_value)]
    eps = cfg.epsilon
    if all(-eps <= s <= eps for s in values):
        return ZERO
    if all(s <= eps for s in values):
        return NEG_AMBIGUOUS
    if all(s >= -eps for s in values):
        return POS_AMBIGUOUS
    return UNKNOWN


def abstract_network(b: Bn, cfg: AbstractionConfig) -> Qpn:
    diags = validate_bn(b)
    if diags:
        raise AbstractionError("invalid network: " + "; ".join(map(str, diags)))
    arcs = []
    synergies = []
    for child in b.nodes:
        parents = b.parents[child]
        for p in parents:
            diffs = [d for _, d in influence_differences(b, p, child)]
            arcs.append(QpnArc(p, child, classify_influence(diffs, cfg)))
        for x, y in itertools.combinations(parents, 2):
            for value in (True, False):
                synergies.append(SynergyEntry((x, y), child, value, synergy_sign(b, x, y, child, value, cfg)))
    arcs.sort(key=lambda a: (a.src, a.dst))
    return Qpn(b.nodes, arcs, synergies, cfg.delta)
