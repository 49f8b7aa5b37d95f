"""LDBA validation, stepping, acceptance, and the text format."""

import itertools

import pytest

from conftest import asset_text
from ltlq.errors import ParseError, ValidationError
from ltlq.ltl import eval_propositional
from ltlq.ldba import (
    StateLasso,
    buchi_accepts,
    index_label,
    label_index,
    ldba_step,
    parse_ldba,
    render_ldba,
)


def test_shipped_automaton_shape(fg_ldba):
    a = fg_ldba
    assert a.n_states == 4
    assert a.initial == 0
    assert a.accepting == {1, 2}
    assert a.initial_component == {0}
    assert a.accepting_component == {1, 2, 3}
    assert a.eps_moves == ((0, 1), (0, 2))
    assert a.eps_targets(0) == (1, 2)
    assert a.eps_targets(1) == ()


def test_step_examples(fg_ldba):
    a = fg_ldba
    assert ldba_step(a, 1, {"a"}) == 1
    assert ldba_step(a, 1, set()) == 3
    assert ldba_step(a, 1, {"a", "b"}) == 1
    assert ldba_step(a, 2, {"a"}) == 3
    assert ldba_step(a, 3, {"a", "b"}) == 3
    # the initial state loops on every label
    for label in ({"a"}, {"b"}, {"a", "b"}, set()):
        assert ldba_step(a, 0, label) == 0


def test_determinism_exhaustive(fg_ldba, safe_ldba):
    # every (state, label set) has exactly one enabled non-eps edge
    for a in (fg_ldba, safe_ldba):
        for q in range(a.n_states):
            for idx in range(a.n_labels):
                label = index_label(idx, a.ap)
                enabled = [
                    dst
                    for src, dst, guard in a.edges
                    if src == q and eval_propositional(guard, label)
                ]
                assert len(enabled) == 1
                assert a.step(q, label) == enabled[0]


def test_label_index_round_trip():
    ap = ("a", "b", "c")
    for combo in itertools.chain.from_iterable(
        itertools.combinations(ap, k) for k in range(4)
    ):
        label = frozenset(combo)
        assert index_label(label_index(label, ap), ap) == label
    assert label_index({"a"}, ap) == 1
    assert label_index({"b"}, ap) == 2
    assert label_index({"a", "c"}, ap) == 5


def test_buchi_accepts(fg_ldba):
    assert buchi_accepts(fg_ldba, StateLasso(prefix=(0,), cycle=(1,)))
    assert buchi_accepts(fg_ldba, StateLasso(prefix=(0, 0), cycle=(2,)))
    assert not buchi_accepts(fg_ldba, StateLasso(prefix=(0, 1), cycle=(3,)))
    assert not buchi_accepts(fg_ldba, StateLasso(prefix=(), cycle=(0,)))
    with pytest.raises(ValidationError):
        StateLasso(prefix=(0,), cycle=())


def test_eps_from_accepting_component_rejected():
    text = asset_text("fg_a_or_fg_b.ldba") + "1 -> 2 : eps\n"
    with pytest.raises(ValidationError, match="accepting component"):
        parse_ldba(text)


def test_totality_violation_rejected():
    lines = [
        line
        for line in asset_text("fg_a_or_fg_b.ldba").splitlines()
        if not line.startswith("1 -> 3")
    ]
    # state 1 now has no move on labels without a
    with pytest.raises(ValidationError, match="0 enabled"):
        parse_ldba("\n".join(lines))


def test_determinism_violation_rejected():
    text = asset_text("fg_a_or_fg_b.ldba") + "0 -> 3 : a\n"
    with pytest.raises(ValidationError, match="2 enabled"):
        parse_ldba(text)


def test_accepting_component_must_be_closed():
    text = (
        "ap: a\n"
        "states: 2\n"
        "initial: 0\n"
        "accepting: 1\n"
        "initial_component: 0\n"
        "0 -> 0 : true\n"
        "1 -> 0 : true\n"  # escapes back into the initial component
        "0 -> 1 : eps\n"
    )
    with pytest.raises(ValidationError, match="not closed"):
        parse_ldba(text)


def test_accepting_state_outside_accepting_component():
    text = (
        "ap: a\n"
        "states: 2\n"
        "initial: 0\n"
        "accepting: 0\n"
        "initial_component: 0\n"
        "0 -> 0 : true\n"
        "1 -> 1 : true\n"
        "0 -> 1 : eps\n"
    )
    with pytest.raises(ValidationError, match="accepting states"):
        parse_ldba(text)


@pytest.mark.parametrize(
    "text,match",
    [
        ("states: 1\n", "missing header"),
        ("ap: a\nstates: x\n", "integer"),
        ("ap: a\nstates: 1\ninitial: 0\naccepting:\ninitial_component:\n0 -> 0 : F a\n", "guard"),
        ("ap: a\nno colons here\n", "malformed"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(ParseError, match=match):
        parse_ldba(text)


def test_render_parse_round_trip(fg_ldba, safe_ldba):
    for a in (fg_ldba, safe_ldba):
        again = parse_ldba(render_ldba(a))
        assert again == a
        assert render_ldba(again) == render_ldba(a)
