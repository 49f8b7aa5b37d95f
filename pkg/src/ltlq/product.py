"""Product of a labeled MDP and an LDBA, plus policy projection.

Product state ``<s, q>`` has index ``s * |Q| + q``. Actions are the base MDP
actions followed by one epsilon action per distinct epsilon-move target, in
declaration order of the automaton's epsilon moves (named ``eps1``,
``eps2``, ...). Taking a base action moves the MDP and advances the
automaton on the label of the *current* MDP state; an epsilon action moves
only the automaton component, with probability 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EpsilonCycleError, ValidationError
from .ldba import Ldba, label_index
from .mdp import LabeledMdp, MemorylessPolicy, MarkovChain

__all__ = ["ProductMdp", "build_product", "project_policy", "LdbaController", "FlatProduct"]


@dataclass(frozen=True)
class FlatProduct:
    """CSR-style array view of a product, consumed by the numeric kernels.

    Row ``r`` of the transition arrays corresponds to the r-th available
    (state, action) slot; ``avail_ptr[s]:avail_ptr[s+1]`` are the slots of
    state ``s`` and ``avail_act`` holds their action ids. ``tr_cum`` carries
    the running cumulative probabilities within each row, for sampling.
    """

    avail_ptr: np.ndarray
    avail_act: np.ndarray
    tr_ptr: np.ndarray
    tr_col: np.ndarray
    tr_prob: np.ndarray
    tr_cum: np.ndarray
    accepting: np.ndarray

    @property
    def n_states(self) -> int:
        return self.avail_ptr.shape[0] - 1

    @property
    def n_slots(self) -> int:
        return self.avail_act.shape[0]

    def slot(self, s: int, a: int) -> int:
        lo, hi = self.avail_ptr[s], self.avail_ptr[s + 1]
        for r in range(lo, hi):
            if self.avail_act[r] == a:
                return int(r)
        raise ValidationError(f"action {a} unavailable at product state {s}")


@dataclass(frozen=True)
class ProductMdp:
    """Synchronized composition of an MDP and an LDBA with epsilon actions."""

    mdp: LabeledMdp
    automaton: Ldba
    action_names: tuple[str, ...]
    # epsilon action id -> automaton target state, in declaration order
    eps_targets: tuple[int, ...]
    available: tuple[tuple[int, ...], ...]
    trans: tuple[dict[int, tuple[tuple[int, float], ...]], ...]
    accepting: frozenset[int]
    initial: int
    _flat: FlatProduct = field(repr=False, compare=False, default=None)

    @property
    def n_states(self) -> int:
        return self.mdp.n_states * self.automaton.n_states

    @property
    def n_base_actions(self) -> int:
        return len(self.mdp.action_names)

    def split(self, x: int) -> tuple[int, int]:
        return divmod(x, self.automaton.n_states)

    def join(self, s: int, q: int) -> int:
        return s * self.automaton.n_states + q

    def is_eps(self, a: int) -> bool:
        return a >= self.n_base_actions

    def eps_target(self, a: int) -> int:
        return self.eps_targets[a - self.n_base_actions]

    def name_of(self, x: int) -> str:
        s, q = self.split(x)
        return f"<{self.mdp.name_of(s)},q{q}>"

    def flat(self) -> FlatProduct:
        if self._flat is None:
            object.__setattr__(self, "_flat", _flatten(self))
        return self._flat

    def dump(self) -> str:
        """Edge-list dump: one line per transition, accepting states marked."""
        lines = []
        for x in range(self.n_states):
            mark = " *" if x in self.accepting else ""
            lines.append(f"state {x} {self.name_of(x)}{mark}")
            for a in self.available[x]:
                for t, p in self.trans[x][a]:
                    lines.append(f"  {self.action_names[a]} -> {t} {p:.12g}")
        return "\n".join(lines) + "\n"


def build_product(m: LabeledMdp, a: Ldba) -> ProductMdp:
    """Compose ``m`` with ``a``; requires the automaton alphabet to be 2^AP of ``m``."""
    if tuple(a.ap) != tuple(m.ap):
        raise ValidationError(
            f"alphabet mismatch: MDP has AP {m.ap}, automaton has {a.ap}"
        )
    nq = a.n_states
    n_base = len(m.action_names)

    # one epsilon action per distinct target, numbered in declaration order
    eps_targets: list[int] = []
    for _, dst in a.eps_moves:
        if dst not in eps_targets:
            eps_targets.append(dst)
    eps_names = tuple(f"eps{i + 1}" for i in range(len(eps_targets)))
    eps_id = {dst: n_base + i for i, dst in enumerate(eps_targets)}

    label_idx = [label_index(m.labels[s], m.ap) for s in range(m.n_states)]
    available = []
    trans = []
    for s in range(m.n_states):
        for q in range(nq):
            acts = list(m.available[s])
            row: dict[int, tuple[tuple[int, float], ...]] = {}
            q_next = a.step_index(q, label_idx[s])
            for act in m.available[s]:
                row[act] = tuple(
                    (t * nq + q_next, p) for t, p in m.trans[s][act]
                )
            for q2 in a.eps_targets(q):
                acts.append(eps_id[q2])
                row[eps_id[q2]] = ((s * nq + q2, 1.0),)
            available.append(tuple(acts))
            trans.append(row)

    accepting = frozenset(
        s * nq + q for s in range(m.n_states) for q in a.accepting
    )
    return ProductMdp(
        mdp=m,
        automaton=a,
        action_names=tuple(m.action_names) + eps_names,
        eps_targets=tuple(eps_targets),
        available=tuple(available),
        trans=tuple(trans),
        accepting=accepting,
        initial=m.initial * nq + a.initial,
    )


def _flatten(p: ProductMdp) -> FlatProduct:
    n = p.n_states
    avail_ptr = np.zeros(n + 1, dtype=np.int64)
    acts = []
    for x in range(n):
        acts.extend(p.available[x])
        avail_ptr[x + 1] = len(acts)
    avail_act = np.asarray(acts, dtype=np.int64)

    tr_ptr = np.zeros(len(acts) + 1, dtype=np.int64)
    cols, probs = [], []
    r = 0
    for x in range(n):
        for a in p.available[x]:
            for t, pr in p.trans[x][a]:
                cols.append(t)
                probs.append(pr)
            r += 1
            tr_ptr[r] = len(cols)
    tr_col = np.asarray(cols, dtype=np.int64)
    tr_prob = np.asarray(probs, dtype=np.float64)
    tr_cum = np.empty_like(tr_prob)
    for r in range(len(acts)):
        lo, hi = tr_ptr[r], tr_ptr[r + 1]
        tr_cum[lo:hi] = np.cumsum(tr_prob[lo:hi])
    accepting = np.zeros(n, dtype=np.uint8)
    for x in p.accepting:
        accepting[x] = 1
    for arr in (avail_ptr, avail_act, tr_ptr, tr_col, tr_prob, tr_cum, accepting):
        arr.setflags(write=False)
    return FlatProduct(avail_ptr, avail_act, tr_ptr, tr_col, tr_prob, tr_cum, accepting)


def induce_product_chain(p: ProductMdp, policy: MemorylessPolicy) -> MarkovChain:
    """Chain over product states induced by a memoryless product policy."""
    rows = []
    for x in range(p.n_states):
        a = policy[x]
        if a not in p.available[x]:
            raise ValidationError(
                f"policy selects unavailable action {a} at product state {p.name_of(x)}"
            )
        rows.append(p.trans[x][a])
    return MarkovChain(n_states=p.n_states, rows=tuple(rows), initial=p.initial)


class LdbaController:
    """Finite-memory controller executing a product policy on the base MDP.

    Holds the automaton state; on every MDP transition ``s -> s'`` the
    automaton advances on ``L(s)``. Action selection chases epsilon choices
    to a fixed point (advancing the automaton) before emitting an MDP
    action; a revisited automaton state during the chase raises
    :class:`EpsilonCycleError`.
    """

    def __init__(self, policy: MemorylessPolicy, product: ProductMdp):
        self.policy = policy
        self.product = product
        self.q = product.automaton.initial

    def reset(self) -> None:
        self.q = self.product.automaton.initial

    def act(self, s: int) -> int:
        p = self.product
        seen = {self.q}
        a = self.policy[p.join(s, self.q)]
        while p.is_eps(a):
            self.q = p.eps_target(a)
            if self.q in seen:
                raise EpsilonCycleError(
                    f"epsilon-chasing cycle at MDP state {p.mdp.name_of(s)}"
                )
            seen.add(self.q)
            a = self.policy[p.join(s, self.q)]
        if a not in p.mdp.available[s]:
            raise ValidationError(
                f"policy emits unavailable action at {p.mdp.name_of(s)}"
            )
        return a

    def observe(self, s: int, s_next: int) -> None:
        self.q = self.product.automaton.step(self.q, self.product.mdp.labels[s])


def project_policy(policy: MemorylessPolicy, product: ProductMdp) -> LdbaController:
    """Build the executable finite-memory controller for a product policy.

    Epsilon-chasing cycles are detected eagerly for every product state so a
    malformed policy fails here rather than mid-rollout.
    """
    p = product
    for x in range(p.n_states):
        s, q = p.split(x)
        seen = {q}
        a = policy[x]
        while p.is_eps(a):
            q = p.eps_target(a)
            if q in seen:
                raise EpsilonCycleError(
                    f"epsilon-chasing cycle starting at {p.name_of(x)}"
                )
            seen.add(q)
            a = policy[p.join(s, q)]
    return LdbaController(policy, product)
