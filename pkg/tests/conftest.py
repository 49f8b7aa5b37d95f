"""Shared fixtures: shipped example models and small random-instance helpers."""

import importlib.resources

import numpy as np
import pytest

from ltlq import (
    Ldba,
    build_product,
    parse_ldba,
    parse_mdp,
    parse_grid,
    build_gridworld,
)

ASSETS = importlib.resources.files("ltlq") / "assets"


def asset_text(name: str) -> str:
    return (ASSETS / name).read_text()


def asset_path(name: str):
    return ASSETS / name


@pytest.fixture(scope="session")
def two_state_mdp():
    return parse_mdp(asset_text("two_state.mdp"))


@pytest.fixture(scope="session")
def fg_ldba():
    return parse_ldba(asset_text("fg_a_or_fg_b.ldba"))


@pytest.fixture(scope="session")
def two_state_product(two_state_mdp, fg_ldba):
    return build_product(two_state_mdp, fg_ldba)


@pytest.fixture(scope="session")
def safe_mdp():
    return build_gridworld(parse_grid(asset_text("safe_absorb.grid")))


@pytest.fixture(scope="session")
def safe_ldba():
    return parse_ldba(asset_text("safe_absorb.ldba"))


@pytest.fixture(scope="session")
def safe_product(safe_mdp, safe_ldba):
    return build_product(safe_mdp, safe_ldba)


def gfa_automaton() -> Ldba:
    """Deterministic 2-state automaton for "a holds infinitely often".

    No epsilon moves, so it composes with any MDP over {a} without
    introducing product nondeterminism.
    """
    return parse_ldba(
        "ap: a\n"
        "states: 2\n"
        "initial: 0\n"
        "accepting: 1\n"
        "initial_component:\n"
        "0 -> 1 : a\n"
        "0 -> 0 : !a\n"
        "1 -> 1 : a\n"
        "1 -> 0 : !a\n"
    )


def random_mdp(rng: np.random.Generator, n_states: int, max_actions: int = 2):
    """Random well-mixed labeled MDP over AP {a} for property tests."""
    from ltlq import LabeledMdp

    n_actions = max_actions
    available = []
    trans = []
    for s in range(n_states):
        k = int(rng.integers(1, n_actions + 1))
        acts = tuple(range(k))
        row = {}
        for a in acts:
            n_succ = int(rng.integers(1, min(3, n_states) + 1))
            succs = rng.choice(n_states, size=n_succ, replace=False)
            probs = rng.dirichlet(np.ones(n_succ))
            row[a] = tuple((int(t), float(p)) for t, p in zip(succs, probs))
        available.append(acts)
        trans.append(row)
    labels = tuple(
        frozenset({"a"}) if rng.random() < 0.5 else frozenset() for _ in range(n_states)
    )
    return LabeledMdp(
        n_states=n_states,
        action_names=tuple(f"a{i}" for i in range(n_actions)),
        available=tuple(available),
        trans=tuple(trans),
        initial=0,
        ap=("a",),
        labels=labels,
    )


def random_product(rng: np.random.Generator, n_mdp_states: int, max_actions: int = 2):
    return build_product(random_mdp(rng, n_mdp_states, max_actions), gfa_automaton())


def well_mixed_mdp(rng: np.random.Generator, n_states: int):
    """Random MDP with dense, well-mixed rows and mostly-a labels.

    Every row carries at least 0.7/n mass to every state and labels are "a"
    with probability 0.7, so induced chains revisit accepting product states
    quickly; used where convergence rates matter.
    """
    from ltlq import LabeledMdp

    available, trans = [], []
    for s in range(n_states):
        k = int(rng.integers(1, 3))
        acts = tuple(range(k))
        row = {}
        for a in acts:
            probs = 0.7 / n_states + 0.3 * rng.dirichlet(np.ones(n_states))
            probs = probs / probs.sum()
            row[a] = tuple((t, float(p)) for t, p in enumerate(probs))
        available.append(acts)
        trans.append(row)
    labels = tuple(
        frozenset({"a"}) if (s == 0 or rng.random() < 0.7) else frozenset()
        for s in range(n_states)
    )
    return LabeledMdp(
        n_states=n_states,
        action_names=("a0", "a1"),
        available=tuple(available),
        trans=tuple(trans),
        initial=0,
        ap=("a",),
        labels=labels,
    )


def well_mixed_product(rng: np.random.Generator, n_mdp_states: int):
    return build_product(well_mixed_mdp(rng, n_mdp_states), gfa_automaton())
