"""Q-learning: updates, schedules, determinism, and the model-free contract."""

import numpy as np
import pytest

from ltlq.errors import ValidationError
from ltlq.learn import (
    LearnConfig,
    ProductEnv,
    QTable,
    empty_qtable,
    greedy_policy,
    l2_error,
    q_update,
    run_learning,
    schedule_array,
)
from ltlq.reward import RewardScheme

SCHEME = RewardScheme(gamma=0.99999, gamma_b=0.99)


# --- single update arithmetic ------------------------------------------------


def test_q_update_from_zero(two_state_product):
    table = empty_qtable(ProductEnv(two_state_product))
    p = two_state_product
    acc = p.join(1, 2)  # accepting
    # accepting state, zero table: target = (1 - gamma_b), alpha = 0.5
    v = q_update(table, acc, 2, acc, SCHEME, 0.5, accepting_s=True)
    assert v == pytest.approx(0.5 * 0.01)
    # non-accepting state, zero next values: stays at 0
    v = q_update(table, p.join(1, 3), 2, p.join(1, 3), SCHEME, 0.5, accepting_s=False)
    assert v == 0.0


def test_q_update_mixes_old_and_target(two_state_product):
    p = two_state_product
    table = empty_qtable(ProductEnv(p))
    s, s_next = p.join(0, 0), p.join(1, 0)
    table.values[table.slot(s, 1)] = 0.2
    table.values[table.slot(s_next, 2)] = 0.7
    v = q_update(table, s, 1, s_next, SCHEME, 0.5, accepting_s=False)
    # 0.5*0.2 + 0.5*(0 + 0.99999*0.7)
    assert v == pytest.approx(0.1 + 0.5 * 0.99999 * 0.7)
    assert table.value(s, 1) == v


# --- schedules ---------------------------------------------------------------


def test_schedule_array_endpoints():
    arr = schedule_array(100, 1.0, 0.1, 0.001, 0.5)
    assert arr[0] == 1.0
    assert arr[50] == pytest.approx(0.1)
    assert arr[-1] == pytest.approx(0.001)
    assert np.all(np.diff(arr) <= 1e-12)  # monotone decay
    assert schedule_array(0, 1.0, 0.1, 0.001, 0.5).shape == (0,)


def test_learn_config_validation():
    with pytest.raises(ValidationError):
        LearnConfig(episodes=-1, horizon=10)
    with pytest.raises(ValidationError):
        LearnConfig(episodes=10, horizon=0)
    with pytest.raises(ValidationError):
        LearnConfig(episodes=10, horizon=5, eps_start=0.0)
    with pytest.raises(ValidationError):
        LearnConfig(episodes=10, horizon=5, snapshots=(20,))


# --- training runs -----------------------------------------------------------


def test_determinism_bit_identical(two_state_product):
    env = ProductEnv(two_state_product)
    cfg = LearnConfig(episodes=500, horizon=30, start="initial", seed=123)
    t1, log1 = run_learning(env, SCHEME, cfg)
    t2, log2 = run_learning(env, SCHEME, cfg)
    assert np.array_equal(t1.values, t2.values)
    assert np.array_equal(log1.episode_returns, log2.episode_returns)
    assert np.array_equal(log1.accepting_visits, log2.accepting_visits)


def test_different_seeds_differ(two_state_product):
    env = ProductEnv(two_state_product)
    a, _ = run_learning(env, SCHEME, LearnConfig(episodes=500, horizon=30, seed=1, start="initial"))
    b, _ = run_learning(env, SCHEME, LearnConfig(episodes=500, horizon=30, seed=2, start="initial"))
    assert not np.array_equal(a.values, b.values)


def test_values_stay_in_unit_interval(two_state_product):
    env = ProductEnv(two_state_product)
    table, _ = run_learning(
        env, SCHEME, LearnConfig(episodes=2000, horizon=50, start="random", seed=9)
    )
    assert np.all(table.values >= 0.0)
    assert np.all(table.values <= 1.0)


def test_zero_episodes(two_state_product):
    env = ProductEnv(two_state_product)
    table, log = run_learning(env, SCHEME, LearnConfig(episodes=0, horizon=10))
    assert np.all(table.values == 0.0)
    assert log.episode_returns.shape == (0,)
    assert log.snapshots == []


def test_snapshots_recorded(two_state_product):
    env = ProductEnv(two_state_product)
    cfg = LearnConfig(episodes=300, horizon=20, start="initial", seed=4, snapshots=(100, 300))
    table, log = run_learning(env, SCHEME, cfg)
    assert [ep for ep, _ in log.snapshots] == [100, 300]
    assert np.array_equal(log.snapshots[-1][1], table.state_values())
    # snapshotting must not perturb the stream: an unsnapshotted run matches
    plain, _ = run_learning(
        env, SCHEME, LearnConfig(episodes=300, horizon=20, start="initial", seed=4)
    )
    assert np.array_equal(plain.values, table.values)


class _OpaqueEnv:
    """Model-free test double: hides transition probabilities entirely.

    Wraps a product but exposes only the sampling protocol; a learner that
    tried to read probabilities would fail on this object.
    """

    def __init__(self, product):
        self._p = product
        self._env = ProductEnv(product)
        self.n_states = product.n_states

    def actions(self, s):
        return self._p.available[s]

    def accepting(self, s):
        return s in self._p.accepting

    def sample(self, s, a, rng):
        return self._env.sample(s, a, rng)

    def start_states(self, mode):
        return self._env.start_states(mode)


def test_model_free_contract(two_state_product):
    env = _OpaqueEnv(two_state_product)
    cfg = LearnConfig(episodes=400, horizon=30, start="initial", seed=3)
    table, log = run_learning(env, SCHEME, cfg)
    assert np.all((0.0 <= table.values) & (table.values <= 1.0))
    assert np.any(table.values > 0.0)


def test_python_loop_matches_kernel(two_state_product):
    # the duck-typed path must consume the rng identically to the kernel path
    cfg = LearnConfig(episodes=400, horizon=30, start="random", seed=21)
    kernel_table, kernel_log = run_learning(ProductEnv(two_state_product), SCHEME, cfg)
    python_table, python_log = run_learning(_OpaqueEnv(two_state_product), SCHEME, cfg)
    assert np.array_equal(kernel_table.values, python_table.values)
    assert np.array_equal(kernel_log.episode_returns, python_log.episode_returns)
    assert np.array_equal(kernel_log.accepting_visits, python_log.accepting_visits)


def test_start_state_modes(two_state_product):
    env = ProductEnv(two_state_product)
    assert list(env.start_states("initial")) == [two_state_product.initial]
    starts = list(env.start_states("random"))
    assert starts == [two_state_product.join(s, 0) for s in range(2)]
    with pytest.raises(ValidationError):
        env.start_states("everywhere")


# --- policies and tables -----------------------------------------------------


def test_greedy_policy_tie_breaks_low(two_state_product):
    table = empty_qtable(ProductEnv(two_state_product))
    policy = greedy_policy(table)
    for x in range(two_state_product.n_states):
        assert policy[x] == two_state_product.available[x][0]


def test_greedy_policy_prefers_max(two_state_product):
    p = two_state_product
    table = empty_qtable(ProductEnv(p))
    table.values[table.slot(p.join(0, 0), 4)] = 0.5  # eps2
    assert greedy_policy(table)[p.join(0, 0)] == 4


def test_qtable_dump_load_round_trip(two_state_product):
    env = ProductEnv(two_state_product)
    table, _ = run_learning(
        env, SCHEME, LearnConfig(episodes=200, horizon=20, start="initial", seed=8)
    )
    again = QTable.load(table.dump(two_state_product.action_names), two_state_product)
    assert np.array_equal(table.values, again.values)


def test_l2_error():
    assert l2_error(np.array([1.0, 0.0]), np.array([0.0, 0.0])) == 1.0
    assert l2_error(np.array([3.0, 4.0]), np.zeros(2)) == pytest.approx(5.0)
    assert l2_error(np.array([3.0, 4.0]), np.zeros(2), states=[0]) == pytest.approx(3.0)
