"""Limit-deterministic Buchi automata: data model, file format, validation.

An LDBA here has guard-labeled non-epsilon edges (guards are propositional
formulas over AP, e.g. ``!a`` or ``true``) plus epsilon moves. Validation
expands guards over all label sets and checks:

* determinism/totality: every (state, label set) enables exactly one
  non-epsilon edge;
* bipartition: the state set splits into an initial and an accepting
  component, epsilon moves only leave the initial component, the accepting
  component is closed under non-epsilon edges, and all accepting states lie
  in the accepting component.

File format (UTF-8 text, ``#`` comments)::

    ap: a b
    states: 4
    initial: 0
    accepting: 1 2
    initial_component: 0
    0 -> 0 : true
    0 -> 1 : eps
    1 -> 1 : a
    ...
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ltl
from .errors import ParseError, ValidationError

__all__ = ["Ldba", "parse_ldba", "render_ldba", "ldba_step", "buchi_accepts", "StateLasso"]


def label_index(label, ap) -> int:
    """Bitmask index of a label set: bit i set iff ap[i] in label."""
    idx = 0
    for i, name in enumerate(ap):
        if name in label:
            idx |= 1 << i
    return idx


def index_label(idx: int, ap) -> frozenset[str]:
    return frozenset(name for i, name in enumerate(ap) if idx >> i & 1)


@dataclass(frozen=True)
class Ldba:
    """Validated limit-deterministic Buchi automaton.

    ``edges`` are the non-epsilon transitions ``(src, dst, guard)``;
    ``eps_moves`` keeps declaration order, which fixes the numbering of the
    derived epsilon actions in a product.
    """

    ap: tuple[str, ...]
    n_states: int
    initial: int
    accepting: frozenset[int]
    initial_component: frozenset[int]
    edges: tuple[tuple[int, int, ltl.Formula], ...]
    eps_moves: tuple[tuple[int, int], ...]
    # dense successor table (n_states, 2^|ap|), filled during validation
    _delta: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_delta", _validate(self))
        self._delta.setflags(write=False)

    @property
    def n_labels(self) -> int:
        return 1 << len(self.ap)

    @property
    def accepting_component(self) -> frozenset[int]:
        return frozenset(range(self.n_states)) - self.initial_component

    def eps_targets(self, q: int) -> tuple[int, ...]:
        return tuple(dst for src, dst in self.eps_moves if src == q)

    def step(self, q: int, label) -> int:
        return int(self._delta[q, label_index(label, self.ap)])

    def step_index(self, q: int, label_idx: int) -> int:
        return int(self._delta[q, label_idx])


def _validate(a: Ldba) -> np.ndarray:
    states = range(a.n_states)
    if not (0 <= a.initial < a.n_states):
        raise ValidationError(f"initial state {a.initial} out of range")
    for q in a.accepting | a.initial_component:
        if not (0 <= q < a.n_states):
            raise ValidationError(f"state {q} out of range")
    for src, dst, _ in a.edges:
        if not (0 <= src < a.n_states and 0 <= dst < a.n_states):
            raise ValidationError(f"edge {src} -> {dst} out of range")
    for src, dst in a.eps_moves:
        if not (0 <= src < a.n_states and 0 <= dst < a.n_states):
            raise ValidationError(f"eps move {src} -> {dst} out of range")

    n_labels = 1 << len(a.ap)
    delta = np.full((a.n_states, n_labels), -1, dtype=np.int64)
    by_src: dict[int, list[tuple[int, ltl.Formula]]] = {q: [] for q in states}
    for src, dst, guard in a.edges:
        by_src[src].append((dst, guard))
    for q in states:
        for idx in range(n_labels):
            label = index_label(idx, a.ap)
            enabled = [dst for dst, guard in by_src[q] if ltl.eval_propositional(guard, label)]
            if len(enabled) != 1:
                raise ValidationError(
                    f"state {q} has {len(enabled)} enabled transitions on label "
                    f"{{{' '.join(sorted(label)) or ''}}}; exactly one required"
                )
            delta[q, idx] = enabled[0]

    acc_comp = frozenset(states) - a.initial_component
    for src, dst in a.eps_moves:
        if src in acc_comp:
            raise ValidationError(f"eps move from state {src} inside the accepting component")
    for q in acc_comp:
        bad = set(int(d) for d in delta[q]) - acc_comp
        if bad:
            raise ValidationError(
                f"accepting component not closed: state {q} reaches {sorted(bad)}"
            )
    if not a.accepting <= acc_comp:
        raise ValidationError("accepting states must lie in the accepting component")
    return delta


def ldba_step(a: Ldba, q: int, label) -> int:
    """The unique non-epsilon successor of ``q`` on the label set."""
    return a.step(q, label)


@dataclass(frozen=True)
class StateLasso:
    """Ultimately periodic run of an automaton, prefix plus repeated cycle."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValidationError("lasso cycle must be nonempty")


def buchi_accepts(a: Ldba, run: StateLasso) -> bool:
    """True iff the states visited infinitely often intersect the accepting set."""
    return any(q in a.accepting for q in run.cycle)


# --- file format ---------------------------------------------------------


def parse_ldba(text: str) -> Ldba:
    """Parse and validate the LDBA text format."""
    ap = None
    n_states = None
    initial = None
    accepting = None
    initial_component = None
    edges = []
    eps_moves = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"malformed line {raw!r}", line=lineno)
        head, _, tail = line.partition(":")
        head = head.strip()
        tail = tail.strip()
        if head == "ap":
            ap = tuple(tail.split())
        elif head == "states":
            n_states = _parse_int(tail, lineno)
        elif head == "initial":
            initial = _parse_int(tail, lineno)
        elif head == "accepting":
            accepting = frozenset(_parse_int(tok, lineno) for tok in tail.split())
        elif head == "initial_component":
            initial_component = frozenset(_parse_int(tok, lineno) for tok in tail.split())
        elif "->" in head:
            src_txt, _, dst_txt = head.partition("->")
            src = _parse_int(src_txt.strip(), lineno)
            dst = _parse_int(dst_txt.strip(), lineno)
            if tail == "eps":
                eps_moves.append((src, dst))
            else:
                if ap is None:
                    raise ParseError("edge before 'ap:' header", line=lineno)
                try:
                    guard = ltl.parse_propositional(tail, ap)
                except ParseError as exc:
                    raise ParseError(f"bad guard {tail!r}: {exc}", line=lineno) from exc
                edges.append((src, dst, guard))
        else:
            raise ParseError(f"unknown header {head!r}", line=lineno)

    missing = [
        name
        for name, val in [
            ("ap", ap),
            ("states", n_states),
            ("initial", initial),
            ("accepting", accepting),
            ("initial_component", initial_component),
        ]
        if val is None
    ]
    if missing:
        raise ParseError(f"missing header(s): {', '.join(missing)}")
    return Ldba(
        ap=ap,
        n_states=n_states,
        initial=initial,
        accepting=accepting,
        initial_component=initial_component,
        edges=tuple(edges),
        eps_moves=tuple(eps_moves),
    )


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, found {tok!r}", line=lineno) from None


def render_ldba(a: Ldba) -> str:
    """Render to the text format; ``parse_ldba`` inverts this."""
    lines = [
        "ap: " + " ".join(a.ap),
        f"states: {a.n_states}",
        f"initial: {a.initial}",
        "accepting: " + " ".join(str(q) for q in sorted(a.accepting)),
        "initial_component: " + " ".join(str(q) for q in sorted(a.initial_component)),
    ]
    for src, dst, guard in a.edges:
        lines.append(f"{src} -> {dst} : {ltl.to_str(guard)}")
    for src, dst in a.eps_moves:
        lines.append(f"{src} -> {dst} : eps")
    return "\n".join(lines) + "\n"
