import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqpn.abstraction import AbstractionConfig, abstract_network
from eqpn.network import Qpn, QpnArc
from eqpn.oracle import RandomBnSpec, marginal, random_bn
from eqpn.propagation import (
    FORWARD,
    INTERCAUSAL,
    REVERSE,
    Mode,
    Observation,
    PropagationError,
    effective_links,
    propagate,
    propagate_sequence,
    reverse_weaken,
)
from eqpn.signs import (
    NEG_AMBIGUOUS,
    POS_AMBIGUOUS,
    UNKNOWN,
    ZERO,
    EnhancedSign,
    RegularSign,
    neg_strong,
    neg_weak,
    pos_strong,
    pos_weak,
    strip,
)

from helpers import antibiotics_bn, antibiotics_qpn

A_TRUE = Observation("A", True)


def test_observation_parse():
    assert Observation.parse("A=true") == A_TRUE
    assert Observation.parse("X_1=false") == Observation("X_1", False)
    assert str(Observation("D", False)) == "D=false"
    for bad in ("A", "A=1", "=true", "A=True"):
        with pytest.raises(ValueError):
            Observation.parse(bad)


def test_reverse_weaken():
    assert reverse_weaken(pos_strong(1)) == POS_AMBIGUOUS
    assert reverse_weaken(pos_weak(1)) == POS_AMBIGUOUS
    assert reverse_weaken(neg_weak(1)) == NEG_AMBIGUOUS
    assert reverse_weaken(neg_strong(1)) == NEG_AMBIGUOUS
    for s in (ZERO, UNKNOWN, POS_AMBIGUOUS, NEG_AMBIGUOUS):
        assert reverse_weaken(s) == s


def test_effective_links_unobserved():
    links = effective_links(antibiotics_qpn(), {})
    assert sum(l.kind == FORWARD for l in links) == 4
    assert sum(l.kind == REVERSE for l in links) == 4
    assert not any(l.kind == INTERCAUSAL for l in links)
    rev = {(l.source, l.target): l.sign for l in links if l.kind == REVERSE}
    assert rev[("T", "A")] == NEG_AMBIGUOUS
    assert rev[("D", "F")] == POS_AMBIGUOUS


@pytest.mark.parametrize("value", [True, False])
def test_effective_links_with_observed_child(value):
    links = effective_links(antibiotics_qpn(), {"D": value})
    inter = {(l.source, l.target): l.sign for l in links if l.kind == INTERCAUSAL}
    assert inter == {("T", "F"): NEG_AMBIGUOUS, ("F", "T"): NEG_AMBIGUOUS}


def test_intercausal_needs_matching_value():
    q = antibiotics_qpn()
    syn = [s for s in q.synergies if s.child_value]
    q = Qpn(q.nodes, q.arcs, syn, q.delta)
    assert any(l.kind == INTERCAUSAL for l in effective_links(q, {"D": True}))
    assert not any(l.kind == INTERCAUSAL for l in effective_links(q, {"D": False}))


def test_explicit_reverse_sign_used():
    q = Qpn(("A", "B"), [QpnArc("A", "B", pos_strong(1), pos_weak(1))])
    rev = [l for l in effective_links(q, {}) if l.kind == REVERSE]
    assert rev[0].sign == pos_weak(1)
    state = propagate(q, [], Observation("B", True))
    assert state.signs["A"] == pos_weak(1)


def test_antibiotics_enhanced():
    state = propagate(antibiotics_qpn(), [], A_TRUE, Mode.ENHANCED)
    assert state.signs == {"A": pos_strong(0), "T": neg_strong(1), "F": pos_weak(1), "D": NEG_AMBIGUOUS}
    assert state.sign_lines() == ["A ++^0", "D -?", "F +", "T --"]


def test_antibiotics_regular():
    state = propagate(antibiotics_qpn(), [], A_TRUE, Mode.REGULAR)
    P, M, U = RegularSign.PLUS, RegularSign.MINUS, RegularSign.UNKNOWN
    assert state.signs == {"A": P, "T": M, "F": P, "D": U}
    assert state.sign_lines() == ["A +", "D ?", "F +", "T -"]


def test_antibiotics_trace():
    state = propagate(antibiotics_qpn(), [], A_TRUE)
    steps = [(t.message.sender, t.message.receiver, t.message.sign, t.old, t.new) for t in state.trace]
    assert steps == [
        ("A", "A", pos_strong(0), ZERO, pos_strong(0)),
        ("A", "F", pos_weak(1), ZERO, pos_weak(1)),
        ("F", "D", pos_weak(2), ZERO, pos_weak(2)),
        ("A", "T", neg_strong(1), ZERO, neg_strong(1)),
        ("T", "D", neg_strong(2), pos_weak(2), NEG_AMBIGUOUS),
    ]
    assert state.trace_lines()[-1] == "D: +^2 -> -?  (message --^2 from T via forward-arc)"
    assert state.trace_lines()[1] == "F: 0 -> +  (message + from A via forward-arc)"


def test_trace_chains_in_order():
    # each chain T then D, F then D appears in message order
    lines = propagate(antibiotics_qpn(), [], A_TRUE).trace_lines()
    idx = {line.split(":")[0] + line.split("from ")[1].split(" ")[0]: k for k, line in enumerate(lines)}
    assert idx["TA"] < idx["DT"]
    assert idx["FA"] < idx["DF"]


def test_collider_blocks_parent_to_parent():
    # D is an unobserved common child, so news about T never reaches F through D
    state = propagate(antibiotics_qpn(), [], Observation("T", True))
    assert state.signs["A"] == NEG_AMBIGUOUS
    assert state.signs["F"] == neg_weak(1)
    assert not any(t.message.sender == "D" and t.message.receiver == "F" for t in state.trace)


def test_zero_arcs_keep_zero():
    q = Qpn(("A", "B", "C"), [QpnArc("A", "B", ZERO), QpnArc("B", "C", ZERO)])
    state = propagate(q, [], Observation("B", True))
    assert state.signs == {"A": ZERO, "B": pos_strong(0), "C": ZERO}


def test_single_arc_gives_index_one():
    q = Qpn(("A", "B"), [QpnArc("A", "B", neg_weak(1))])
    assert propagate(q, [], Observation("A", False)).signs["B"] == pos_weak(1)


def test_unknown_or_repeated_observation():
    q = antibiotics_qpn()
    with pytest.raises(PropagationError):
        propagate(q, [], Observation("Z", True))
    with pytest.raises(PropagationError):
        propagate(q, [A_TRUE], A_TRUE)
    with pytest.raises(PropagationError):
        propagate_sequence(q, [A_TRUE, Observation("A", False)])


def test_sequence():
    q = antibiotics_qpn()
    assert propagate_sequence(q, []) == []
    [only] = propagate_sequence(q, [A_TRUE])
    assert only.signs["D"] == NEG_AMBIGUOUS
    first, second = propagate_sequence(q, [Observation("D", True), A_TRUE])
    assert second.observed == {"A", "D"}
    assert second.signs["D"] == ZERO
    assert any(t.message.link_kind == INTERCAUSAL for t in second.trace)
    # F rises with A directly; T falls, which through the negative synergy lifts F
    assert second.signs["T"] == neg_strong(1)
    assert strip(second.signs["F"]) is RegularSign.PLUS
    b = antibiotics_bn()
    for node in ("F", "T"):
        shift = marginal(b, node, {"D": True, "A": True}) - marginal(b, node, {"D": True})
        assert strip(second.signs[node]).value == ("+" if shift > 0 else "-")


def test_observed_nodes_never_modified():
    state = propagate(antibiotics_qpn(), [Observation("D", True)], A_TRUE)
    assert not any(t.message.receiver == "D" for t in state.trace)


def test_determinism():
    q = antibiotics_qpn()
    assert propagate(q, [], A_TRUE).trace == propagate(q, [], A_TRUE).trace


def _coherent(enh, reg):
    s = strip(enh)
    return s == reg or (reg is RegularSign.UNKNOWN and s in (RegularSign.PLUS, RegularSign.MINUS))


specs = st.builds(RandomBnSpec, st.integers(2, 8), st.integers(1, 3), st.floats(0.2, 0.8), st.integers(0, 2**64 - 1))


@given(specs, st.sampled_from([0.1, 0.3, 0.5]), st.data())
@settings(max_examples=150, deadline=None)
def test_mode_coherence_and_budget(spec, delta, data):
    b = random_bn(spec)
    q = abstract_network(b, AbstractionConfig(delta))
    node = data.draw(st.sampled_from(b.nodes))
    obs = Observation(node, data.draw(st.booleans()))
    enh = propagate(q, [], obs, Mode.ENHANCED)
    reg = propagate(q, [], obs, Mode.REGULAR)
    for v in b.nodes:
        assert _coherent(enh.signs[v], reg.signs[v]), (v, enh.signs[v], reg.signs[v])
    n = len(b.nodes)
    assert all(c <= 2 * n + 2 for c in enh.updates_used.values())
    assert not enh.exhausted
    for s in enh.signs.values():
        assert not s.kind.indexed or s.index <= 2 * n


@given(specs, st.data())
@settings(max_examples=60, deadline=None)
def test_sequence_with_prior_observations_coherent(spec, data):
    b = random_bn(spec)
    q = abstract_network(b, AbstractionConfig(0.3))
    nodes = data.draw(st.permutations(b.nodes))[: data.draw(st.integers(1, min(3, len(b.nodes))))]
    obs = [Observation(v, data.draw(st.booleans())) for v in nodes]
    enh = propagate_sequence(q, obs, Mode.ENHANCED)
    reg = propagate_sequence(q, obs, Mode.REGULAR)
    for se, sr in zip(enh, reg):
        for v in b.nodes:
            assert _coherent(se.signs[v], sr.signs[v])
        for t in se.trace[1:]:
            assert t.message.receiver not in se.observed
