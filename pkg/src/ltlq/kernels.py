"""Hot numeric kernels over the flat product arrays.

All functions here are nopython-compatible numpy code compiled with numba
unless ``LTLQ_DISABLE_NUMBA`` is set (see :mod:`ltlq.accel`); the fallback
executes the identical bytecode, so outputs match bit for bit. Random
numbers come from a caller-owned ``numpy.random.Generator``, which numba
supports natively with the same stream as numpy.
"""

import numpy as np

from .accel import maybe_jit


@maybe_jit(cache=True, nogil=True)
def train_episodes(
    q,
    avail_ptr,
    avail_act,
    tr_ptr,
    tr_col,
    tr_cum,
    accepting,
    start_states,
    horizon,
    eps_arr,
    alpha_arr,
    gamma,
    gamma_b,
    rng,
    ep_return,
    ep_accept,
):
    """Run ``len(eps_arr)`` episodes of epsilon-greedy Q-learning in place.

    ``q`` is the flat table over available (state, action) slots. Per step:
    choose a slot epsilon-greedily (ties to the lowest slot), sample the
    successor from the cumulative row, and apply

        q[slot] <- (1 - alpha) * q[slot] + alpha * (R(s) + D(s) * max_a' q(s', a'))

    where R and D are the accepting-state reward/discount. ``ep_return``
    and ``ep_accept`` receive the per-episode discounted return and the
    number of accepting-state visits. Only sampling data is read: the
    transition probabilities enter solely through ``tr_cum`` draws.
    """
    n_episodes = eps_arr.shape[0]
    for ep in range(n_episodes):
        s = start_states[rng.integers(0, start_states.shape[0])]
        eps = eps_arr[ep]
        alpha = alpha_arr[ep]
        disc = 1.0
        ret = 0.0
        acc_visits = 0
        for _ in range(horizon):
            lo = avail_ptr[s]
            hi = avail_ptr[s + 1]
            if rng.random() < eps:
                slot = lo + rng.integers(0, hi - lo)
            else:
                slot = lo
                best = q[lo]
                for j in range(lo + 1, hi):
                    if q[j] > best:
                        best = q[j]
                        slot = j
            r0 = tr_ptr[slot]
            r1 = tr_ptr[slot + 1]
            u = rng.random()
            k = r0
            while k < r1 - 1 and u >= tr_cum[k]:
                k += 1
            s_next = tr_col[k]

            if accepting[s] != 0:
                r = 1.0 - gamma_b
                g = gamma_b
                acc_visits += 1
            else:
                r = 0.0
                g = gamma
            lo2 = avail_ptr[s_next]
            hi2 = avail_ptr[s_next + 1]
            m2 = q[lo2]
            for j in range(lo2 + 1, hi2):
                if q[j] > m2:
                    m2 = q[j]
            q[slot] = (1.0 - alpha) * q[slot] + alpha * (r + g * m2)

            ret += disc * r
            disc *= g
            s = s_next
        ep_return[ep] = ret
        ep_accept[ep] = acc_visits


@maybe_jit(cache=True, nogil=True)
def bellman_max_sweep(v, v_new, avail_ptr, tr_ptr, tr_col, tr_prob, rew, disc):
    """One sweep of ``v_new(s) = max_a rew(s) + disc(s) * sum_t P(s,a,t) v(t)``.

    Returns the max-norm difference between sweeps. With ``rew = 0`` and
    ``disc = 1`` this is the max-reachability operator (fixed states must be
    re-pinned by the caller after each sweep).
    """
    n = avail_ptr.shape[0] - 1
    delta = 0.0
    for s in range(n):
        best = -np.inf
        for slot in range(avail_ptr[s], avail_ptr[s + 1]):
            acc = 0.0
            for k in range(tr_ptr[slot], tr_ptr[slot + 1]):
                acc += tr_prob[k] * v[tr_col[k]]
            val = rew[s] + disc[s] * acc
            if val > best:
                best = val
        v_new[s] = best
        d = abs(best - v[s])
        if d > delta:
            delta = d
    return delta


@maybe_jit(cache=True, nogil=True)
def greedy_slots(q, avail_ptr):
    """Per-state argmax slot into the flat Q table, lowest slot on ties."""
    n = avail_ptr.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    for s in range(n):
        lo = avail_ptr[s]
        hi = avail_ptr[s + 1]
        slot = lo
        best = q[lo]
        for j in range(lo + 1, hi):
            if q[j] > best:
                best = q[j]
                slot = j
        out[s] = slot
    return out


@maybe_jit(cache=True, nogil=True)
def state_values(q, avail_ptr):
    """Per-state max over available actions of the flat Q table."""
    n = avail_ptr.shape[0] - 1
    out = np.empty(n, dtype=np.float64)
    for s in range(n):
        lo = avail_ptr[s]
        hi = avail_ptr[s + 1]
        best = q[lo]
        for j in range(lo + 1, hi):
            if q[j] > best:
                best = q[j]
        out[s] = best
    return out
