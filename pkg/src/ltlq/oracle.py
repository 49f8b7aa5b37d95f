"""Exact ground truth for repeated-reachability objectives on a product MDP.

Computes maximal satisfaction probabilities of "visit accepting states
infinitely often" via maximal-end-component decomposition plus max
reachability (graph-based 0/1 precomputation, then value iteration), exact
per-policy satisfaction probabilities on the induced chain, and discounted
state values under the accepting-state reward/discount scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import ValidationError
from .mdp import MemorylessPolicy, bsccs
from .product import ProductMdp, induce_product_chain
from .reward import RewardScheme

__all__ = [
    "Mec",
    "mec_decomposition",
    "max_buchi_probability",
    "policy_buchi_probability",
    "policy_discounted_value",
    "optimal_discounted_values",
]

REACH_TOL = 1e-10
VALUE_TOL = 1e-12


@dataclass(frozen=True)
class Mec:
    """Maximal end component: closed, strongly connected sub-MDP."""

    states: frozenset[int]
    actions: dict[int, tuple[int, ...]]  # retained actions per member state
    accepting: bool


def _successors(p: ProductMdp, s: int, a: int):
    return [t for t, pr in p.trans[s][a] if pr > 0]


def mec_decomposition(p: ProductMdp) -> list[Mec]:
    """Maximal end components by iterated SCC pruning.

    Repeatedly drop state-action pairs whose successors leave the pair's
    SCC (or hit a dead state), until stable; the surviving SCCs whose states
    all retain an action are the MECs.
    """
    n = p.n_states
    retained = [list(p.available[s]) for s in range(n)]
    alive = np.ones(n, dtype=bool)

    while True:
        src, dst = [], []
        for s in range(n):
            if not alive[s]:
                continue
            for a in retained[s]:
                for t in _successors(p, s, a):
                    src.append(s)
                    dst.append(t)
        graph = csr_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
        _, comp = connected_components(graph, directed=True, connection="strong")

        changed = False
        for s in range(n):
            if not alive[s]:
                continue
            keep = []
            for a in retained[s]:
                succs = _successors(p, s, a)
                if all(alive[t] and comp[t] == comp[s] for t in succs):
                    keep.append(a)
                else:
                    changed = True
            retained[s] = keep
            if not keep:
                alive[s] = False
                changed = True
        if not changed:
            break

    groups: dict[int, list[int]] = {}
    # recompute components once more on the stable retained graph
    src, dst = [], []
    for s in range(n):
        if alive[s]:
            for a in retained[s]:
                for t in _successors(p, s, a):
                    src.append(s)
                    dst.append(t)
    graph = csr_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    _, comp = connected_components(graph, directed=True, connection="strong")
    for s in range(n):
        if alive[s]:
            groups.setdefault(int(comp[s]), []).append(s)

    mecs = []
    for states in groups.values():
        state_set = frozenset(states)
        mecs.append(
            Mec(
                states=state_set,
                actions={s: tuple(retained[s]) for s in states},
                accepting=any(s in p.accepting for s in state_set),
            )
        )
    return mecs


def _prob1e(p: ProductMdp, target: np.ndarray) -> np.ndarray:
    """States from which the target is reachable almost surely under some
    policy (the standard double fixpoint over state-action pairs)."""
    n = p.n_states
    u = np.ones(n, dtype=bool)
    while True:
        v = target.copy()
        while True:
            grown = v.copy()
            for s in range(n):
                if grown[s]:
                    continue
                for a in p.available[s]:
                    succs = _successors(p, s, a)
                    if all(u[t] for t in succs) and any(v[t] for t in succs):
                        grown[s] = True
                        break
            if (grown == v).all():
                break
            v = grown
        if (v == u).all():
            return u
        u = v


def _reach_max(p: ProductMdp, target: np.ndarray) -> np.ndarray:
    """Max reachability probability of ``target`` from every state."""
    n = p.n_states
    # qualitative 0 states: target unreachable in the graph
    can_reach = target.copy()
    while True:
        grown = can_reach.copy()
        for s in range(n):
            if not grown[s]:
                for a in p.available[s]:
                    if any(can_reach[t] for t in _successors(p, s, a)):
                        grown[s] = True
                        break
        if (grown == can_reach).all():
            break
        can_reach = grown
    ones = _prob1e(p, target)

    flat = p.flat()
    v = np.zeros(n)
    v[ones] = 1.0
    v_new = np.empty(n)
    rew = np.zeros(n)
    disc = np.ones(n)
    while True:
        kernels.bellman_max_sweep(
            v, v_new, flat.avail_ptr, flat.tr_ptr, flat.tr_col, flat.tr_prob, rew, disc
        )
        v_new[ones] = 1.0
        v_new[~can_reach] = 0.0
        delta = float(np.max(np.abs(v_new - v)))
        v, v_new = v_new, v
        if delta < REACH_TOL:
            return v.copy()


def max_buchi_probability(p: ProductMdp) -> np.ndarray:
    """Maximal probability of visiting accepting states infinitely often.

    Equals the maximal probability of reaching the union of accepting
    maximal end components.
    """
    target = np.zeros(p.n_states, dtype=bool)
    for mec in mec_decomposition(p):
        if mec.accepting:
            for s in mec.states:
                target[s] = True
    return _reach_max(p, target)


def policy_buchi_probability(p: ProductMdp, policy: MemorylessPolicy) -> np.ndarray:
    """Per-state probability of the repeated-reachability objective under a
    fixed memoryless product policy.

    Reduces to reaching the union of accepting bottom SCCs of the induced
    chain; transient states are solved by a dense linear system.
    """
    chain = induce_product_chain(p, policy)
    n = p.n_states
    value = np.full(n, np.nan)
    in_bscc = np.zeros(n, dtype=bool)
    target = np.zeros(n, dtype=bool)
    for component in bsccs(chain):
        accepting = any(s in p.accepting for s in component)
        for s in component:
            in_bscc[s] = True
            value[s] = 1.0 if accepting else 0.0
            target[s] = accepting

    transient = np.flatnonzero(~in_bscc)
    if transient.size:
        P = chain.matrix()
        idx = {int(s): i for i, s in enumerate(transient)}
        A = np.eye(transient.size) - P[np.ix_(transient, transient)]
        b = P[transient][:, in_bscc] @ value[in_bscc]
        x = np.linalg.solve(A, b)
        residual = float(np.max(np.abs(A @ x - b)))
        if residual > REACH_TOL:
            raise ValidationError(f"reachability solve residual {residual}")
        for s, i in idx.items():
            value[s] = x[i]
    return np.clip(value, 0.0, 1.0)


def _scheme_vectors(p: ProductMdp, scheme: RewardScheme) -> tuple[np.ndarray, np.ndarray]:
    acc = np.array([1.0 if s in p.accepting else 0.0 for s in range(p.n_states)])
    rew = (1.0 - scheme.gamma_b) * acc
    disc = np.where(acc > 0, scheme.gamma_b, scheme.gamma)
    return rew, disc


def policy_discounted_value(
    p: ProductMdp, policy: MemorylessPolicy, scheme: RewardScheme
) -> np.ndarray:
    """Exact fixed point of v = R + D * P_pi v for the accepting-state scheme.

    Solved directly (the operator is a contraction, so the fixed point is
    unique); the residual is checked against 1e-12.
    """
    chain = induce_product_chain(p, policy)
    rew, disc = _scheme_vectors(p, scheme)
    P = chain.matrix()
    A = np.eye(p.n_states) - disc[:, None] * P
    v = np.linalg.solve(A, rew)
    residual = float(np.max(np.abs(rew + disc * (P @ v) - v)))
    if residual > VALUE_TOL:
        raise ValidationError(f"discounted value residual {residual}")
    return v


def optimal_discounted_values(
    p: ProductMdp, scheme: RewardScheme
) -> tuple[np.ndarray, MemorylessPolicy]:
    """Optimal values and greedy policy for the accepting-state scheme.

    Policy iteration with exact evaluation; improvement takes the argmax
    with ties broken to the lowest action index, so iteration terminates at
    the unique optimal value function.
    """
    rew, disc = _scheme_vectors(p, scheme)
    n = p.n_states
    policy = [p.available[s][0] for s in range(n)]
    v = None
    for _ in range(10_000):
        v_new = policy_discounted_value(p, MemorylessPolicy(tuple(policy)), scheme)
        improved = []
        for s in range(n):
            best_a = policy[s]
            best_val = -np.inf
            for a in p.available[s]:
                val = rew[s] + disc[s] * sum(pr * v_new[t] for t, pr in p.trans[s][a])
                if val > best_val + 1e-13:
                    best_val = val
                    best_a = a
            improved.append(best_a)
        if improved == policy and v is not None and np.max(np.abs(v_new - v)) < VALUE_TOL:
            return v_new, MemorylessPolicy(tuple(policy))
        if improved == policy:
            return v_new, MemorylessPolicy(tuple(policy))
        policy = improved
        v = v_new
    raise ValidationError("policy iteration failed to converge")
