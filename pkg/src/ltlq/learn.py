"""Tabular Q-learning with epsilon-greedy exploration on a product MDP.

The learner is model-free: its interface to the environment is limited to
available actions, sampled successors, and the accepting flag of the current
state. Environments backed by a :class:`~ltlq.product.ProductMdp` expose
flat arrays and run through the compiled kernel in :mod:`ltlq.kernels`; any
other object implementing the small sampling protocol (``n_states``,
``actions(s)``, ``accepting(s)``, ``sample(s, a, rng)``,
``start_states(mode)``) runs through an equivalent Python loop.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ValidationError
from .mdp import MemorylessPolicy
from .product import ProductMdp
from .reward import RewardScheme, discount_of, reward_of

__all__ = [
    "QTable",
    "LearnConfig",
    "TrainingLog",
    "ProductEnv",
    "run_learning",
    "greedy_policy",
    "q_update",
    "schedule_array",
]


class ProductEnv:
    """Sampling facade over a product MDP.

    The learner only ever calls the protocol methods; transition
    probabilities stay inside ``sample``.
    """

    def __init__(self, product: ProductMdp):
        self.product = product
        self.flat = product.flat()
        self.n_states = product.n_states

    def actions(self, s: int):
        return self.product.available[s]

    def accepting(self, s: int) -> bool:
        return bool(self.flat.accepting[s])

    def sample(self, s: int, a: int, rng: np.random.Generator) -> int:
        f = self.flat
        slot = f.slot(s, a)
        lo, hi = f.tr_ptr[slot], f.tr_ptr[slot + 1]
        u = rng.random()
        k = lo
        while k < hi - 1 and u >= f.tr_cum[k]:
            k += 1
        return int(f.tr_col[k])

    def start_states(self, mode: str) -> np.ndarray:
        p = self.product
        if mode == "initial":
            return np.array([p.initial], dtype=np.int64)
        if mode == "random":
            # uniformly random MDP state paired with the automaton start state
            q0 = p.automaton.initial
            return np.array(
                [p.join(s, q0) for s in range(p.mdp.n_states)], dtype=np.int64
            )
        raise ValidationError(f"unknown start mode {mode!r}")


@dataclass
class QTable:
    """Action-value estimates over available (state, action) slots."""

    values: np.ndarray
    avail_ptr: np.ndarray
    avail_act: np.ndarray

    @property
    def n_states(self) -> int:
        return self.avail_ptr.shape[0] - 1

    def slot(self, s: int, a: int) -> int:
        lo, hi = self.avail_ptr[s], self.avail_ptr[s + 1]
        for r in range(lo, hi):
            if self.avail_act[r] == a:
                return int(r)
        raise ValidationError(f"action {a} unavailable at state {s}")

    def value(self, s: int, a: int) -> float:
        return float(self.values[self.slot(s, a)])

    def state_values(self) -> np.ndarray:
        """Per-state max over actions; the learned value-estimate vector."""
        return kernels.state_values(self.values, self.avail_ptr)

    def copy(self) -> "QTable":
        return QTable(self.values.copy(), self.avail_ptr, self.avail_act)

    def dump(self, action_names=None) -> str:
        out = io.StringIO()
        for s in range(self.n_states):
            for r in range(self.avail_ptr[s], self.avail_ptr[s + 1]):
                a = int(self.avail_act[r])
                name = action_names[a] if action_names else str(a)
                out.write(f"{s} {name} {float(self.values[r])!r}\n")
        return out.getvalue()

    @staticmethod
    def load(text: str, product: ProductMdp) -> "QTable":
        table = empty_qtable(ProductEnv(product))
        names = {name: i for i, name in enumerate(product.action_names)}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            s_txt, name, val = line.split()
            a = names[name] if name in names else int(name)
            table.values[table.slot(int(s_txt), a)] = float(val)
        return table


def _avail_arrays(env) -> tuple[np.ndarray, np.ndarray]:
    flat = getattr(env, "flat", None)
    if flat is not None:
        return flat.avail_ptr, flat.avail_act
    ptr = np.zeros(env.n_states + 1, dtype=np.int64)
    acts = []
    for s in range(env.n_states):
        acts.extend(env.actions(s))
        ptr[s + 1] = len(acts)
    return ptr, np.asarray(acts, dtype=np.int64)


def empty_qtable(env) -> QTable:
    ptr, acts = _avail_arrays(env)
    return QTable(np.zeros(len(acts)), ptr, acts)


@dataclass(frozen=True)
class LearnConfig:
    """Episode budget, horizon, start mode, schedules, and rng seed.

    The exploration rate and learning rate decay piecewise-linearly from
    ``*_start`` to ``*_mid`` over the first ``mid_frac`` of episodes and
    from ``*_mid`` to ``*_end`` over the remainder.
    """

    episodes: int
    horizon: int
    start: str = "random"
    seed: int = 0
    eps_start: float = 1.0
    eps_mid: float = 0.1
    eps_end: float = 0.001
    alpha_start: float = 1.0
    alpha_mid: float = 0.1
    alpha_end: float = 0.001
    mid_frac: float = 0.5
    snapshots: tuple[int, ...] = ()

    def __post_init__(self):
        if self.episodes < 0:
            raise ValidationError("episode count must be nonnegative")
        if self.horizon < 1:
            raise ValidationError("horizon must be at least 1")
        for v in (
            self.eps_start,
            self.eps_mid,
            self.eps_end,
            self.alpha_start,
            self.alpha_mid,
            self.alpha_end,
        ):
            if not (0.0 < v <= 1.0):
                raise ValidationError(f"schedule values must lie in (0,1], got {v}")
        if not (0.0 < self.mid_frac < 1.0):
            raise ValidationError("mid_frac must lie in (0,1)")
        if any(not (0 < k <= self.episodes) for k in self.snapshots):
            raise ValidationError("snapshots must lie in 1..episodes")


def schedule_array(episodes: int, start: float, mid: float, end: float, mid_frac: float) -> np.ndarray:
    """Per-episode piecewise-linear decay start -> mid -> end."""
    if episodes == 0:
        return np.zeros(0)
    out = np.empty(episodes)
    kb = max(1, int(round(episodes * mid_frac)))
    for k in range(episodes):
        if k < kb:
            out[k] = start + (mid - start) * k / kb
        else:
            denom = max(1, episodes - 1 - kb)
            out[k] = mid + (end - mid) * min(1.0, (k - kb) / denom)
    return out


@dataclass
class TrainingLog:
    """Per-episode statistics and periodic value snapshots."""

    episode_returns: np.ndarray
    accepting_visits: np.ndarray
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)

    def to_csv(self, oracle_values: np.ndarray = None, states=None) -> str:
        """Training-log CSV: episode, discounted return, accepting visits.

        When an oracle vector is given, a second block lists the L2 error of
        each snapshot against it (restricted to ``states`` if given).
        """
        out = io.StringIO()
        out.write("episode,return,accepting_visits\n")
        for i, (r, a) in enumerate(zip(self.episode_returns, self.accepting_visits)):
            out.write(f"{i},{float(r)!r},{int(a)}\n")
        if oracle_values is not None:
            out.write("snapshot_episode,l2_error\n")
            for ep, vals in self.snapshots:
                out.write(f"{ep},{l2_error(vals, oracle_values, states)!r}\n")
        return out.getvalue()


def l2_error(values: np.ndarray, oracle_values: np.ndarray, states=None) -> float:
    """Euclidean distance between a value vector and the oracle vector."""
    diff = np.asarray(values) - np.asarray(oracle_values)
    if states is not None:
        diff = diff[np.asarray(list(states))]
    return float(np.sqrt(np.sum(diff * diff)))


def q_update(
    table: QTable,
    s: int,
    a: int,
    s_next: int,
    scheme: RewardScheme,
    alpha: float,
    accepting_s: bool,
) -> float:
    """Single Q-learning update; reward and discount are taken at ``s``."""
    slot = table.slot(s, a)
    lo, hi = table.avail_ptr[s_next], table.avail_ptr[s_next + 1]
    best_next = float(np.max(table.values[lo:hi]))
    target = reward_of(scheme, accepting_s) + discount_of(scheme, accepting_s) * best_next
    table.values[slot] = (1.0 - alpha) * table.values[slot] + alpha * target
    return float(table.values[slot])


def run_learning(env, scheme: RewardScheme, cfg: LearnConfig) -> tuple[QTable, TrainingLog]:
    """Train for ``cfg.episodes`` episodes of ``cfg.horizon`` steps each.

    Deterministic given the seed. Environments exposing flat product arrays
    run through the compiled kernel; other environments run through a
    step-identical Python loop against the sampling protocol only.
    """
    rng = np.random.default_rng(cfg.seed)
    table = empty_qtable(env)
    eps_arr = schedule_array(cfg.episodes, cfg.eps_start, cfg.eps_mid, cfg.eps_end, cfg.mid_frac)
    alpha_arr = schedule_array(
        cfg.episodes, cfg.alpha_start, cfg.alpha_mid, cfg.alpha_end, cfg.mid_frac
    )
    starts = np.asarray(env.start_states(cfg.start), dtype=np.int64)
    ep_return = np.zeros(cfg.episodes)
    ep_accept = np.zeros(cfg.episodes, dtype=np.int64)
    log = TrainingLog(ep_return, ep_accept)

    flat = getattr(env, "flat", None)
    bounds = sorted(set(cfg.snapshots) | ({cfg.episodes} if cfg.episodes else set()))
    done = 0
    for bound in bounds:
        seg = slice(done, bound)
        if flat is not None:
            kernels.train_episodes(
                table.values,
                flat.avail_ptr,
                flat.avail_act,
                flat.tr_ptr,
                flat.tr_col,
                flat.tr_cum,
                flat.accepting,
                starts,
                cfg.horizon,
                eps_arr[seg],
                alpha_arr[seg],
                scheme.gamma,
                scheme.gamma_b,
                rng,
                ep_return[seg],
                ep_accept[seg],
            )
        else:
            _train_python(
                table,
                env,
                starts,
                cfg.horizon,
                eps_arr[seg],
                alpha_arr[seg],
                scheme,
                rng,
                ep_return[seg],
                ep_accept[seg],
            )
        done = bound
        if bound in cfg.snapshots:
            log.snapshots.append((bound, table.state_values()))
    return table, log


def _train_python(table, env, starts, horizon, eps_arr, alpha_arr, scheme, rng, ep_return, ep_accept):
    # mirror of kernels.train_episodes against the sampling protocol;
    # consumes the rng stream in the same order
    q = table.values
    ptr = table.avail_ptr
    act = table.avail_act
    gamma, gamma_b = scheme.gamma, scheme.gamma_b
    for ep in range(len(eps_arr)):
        s = int(starts[rng.integers(0, len(starts))])
        disc = 1.0
        ret = 0.0
        acc_visits = 0
        for _ in range(horizon):
            lo, hi = int(ptr[s]), int(ptr[s + 1])
            if rng.random() < eps_arr[ep]:
                slot = lo + int(rng.integers(0, hi - lo))
            else:
                slot = lo + int(np.argmax(q[lo:hi]))
            s_next = int(env.sample(s, int(act[slot]), rng))
            if env.accepting(s):
                r, g = 1.0 - gamma_b, gamma_b
                acc_visits += 1
            else:
                r, g = 0.0, gamma
            lo2, hi2 = int(ptr[s_next]), int(ptr[s_next + 1])
            q[slot] = (1.0 - alpha_arr[ep]) * q[slot] + alpha_arr[ep] * (
                r + g * float(np.max(q[lo2:hi2]))
            )
            ret += disc * r
            disc *= g
            s = s_next
        ep_return[ep] = ret
        ep_accept[ep] = acc_visits


def greedy_policy(table: QTable) -> MemorylessPolicy:
    """Argmax policy from a Q table; ties break to the lowest action index."""
    slots = kernels.greedy_slots(table.values, table.avail_ptr)
    return MemorylessPolicy(tuple(int(table.avail_act[r]) for r in slots))
