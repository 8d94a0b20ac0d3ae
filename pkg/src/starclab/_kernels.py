"""Hot dynamic-programming inner loops.

The kernels are numba-jitted by default; set ``STARCLAB_NO_NUMBA=1`` to force
the pure-numpy fallback (same math, vectorised instead of looped).  The
benchmark in ``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("STARCLAB_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}


def _value_iteration_numpy(expected_reward, transition, discount, tol, max_iters):
    n_states = expected_reward.shape[0]
    v = np.zeros(n_states)
    resid = np.inf
    for it in range(max_iters):
        q = expected_reward + discount * (transition @ v)
        v_new = q.max(axis=1)
        resid = np.abs(v_new - v).max()
        v = v_new
        if resid < tol:
            return v, it + 1, resid
    return v, max_iters, resid


def _value_iteration_loop(expected_reward, transition, discount, tol, max_iters):
    n_states, n_actions = expected_reward.shape
    v = np.zeros(n_states)
    v_new = np.empty(n_states)
    resid = np.inf
    iters = max_iters
    for it in range(max_iters):
        for s in range(n_states):
            best = -np.inf
            for a in range(n_actions):
                acc = 0.0
                for t in range(n_states):
                    acc += transition[s, a, t] * v[t]
                qa = expected_reward[s, a] + discount * acc
                if qa > best:
                    best = qa
            v_new[s] = best
        resid = 0.0
        for s in range(n_states):
            diff = abs(v_new[s] - v[s])
            if diff > resid:
                resid = diff
            v[s] = v_new[s]
        if resid < tol:
            iters = it + 1
            break
    return v, iters, resid


def _soft_value_iteration_numpy(expected_reward, transition, discount, weight, tol, max_iters):
    n_states = expected_reward.shape[0]
    v = np.zeros(n_states)
    resid = np.inf
    for it in range(max_iters):
        q = expected_reward + discount * (transition @ v)
        m = q.max(axis=1)
        v_new = m + weight * np.log(np.exp((q - m[:, None]) / weight).sum(axis=1))
        resid = np.abs(v_new - v).max()
        v = v_new
        if resid < tol:
            return v, it + 1, resid
    return v, max_iters, resid


def _soft_value_iteration_loop(expected_reward, transition, discount, weight, tol, max_iters):
    n_states, n_actions = expected_reward.shape
    v = np.zeros(n_states)
    v_new = np.empty(n_states)
    q_row = np.empty(n_actions)
    resid = np.inf
    iters = max_iters
    for it in range(max_iters):
        for s in range(n_states):
            m = -np.inf
            for a in range(n_actions):
                acc = 0.0
                for t in range(n_states):
                    acc += transition[s, a, t] * v[t]
                q_row[a] = expected_reward[s, a] + discount * acc
                if q_row[a] > m:
                    m = q_row[a]
            acc = 0.0
            for a in range(n_actions):
                acc += np.exp((q_row[a] - m) / weight)
            v_new[s] = m + weight * np.log(acc)
        resid = 0.0
        for s in range(n_states):
            diff = abs(v_new[s] - v[s])
            if diff > resid:
                resid = diff
            v[s] = v_new[s]
        if resid < tol:
            iters = it + 1
            break
    return v, iters, resid


USING_NUMBA = False
if not _FORCE_NUMPY:
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        _value_iteration_loop = njit(cache=True)(_value_iteration_loop)
        _soft_value_iteration_loop = njit(cache=True)(_soft_value_iteration_loop)
        USING_NUMBA = True

if USING_NUMBA:
    _value_iteration_impl = _value_iteration_loop
    _soft_value_iteration_impl = _soft_value_iteration_loop
else:
    _value_iteration_impl = _value_iteration_numpy
    _soft_value_iteration_impl = _soft_value_iteration_numpy


def value_iteration(expected_reward, transition, discount, tol, max_iters):
    """Greedy Bellman fixed point.  Returns (v, q, iterations, residual).

    The returned q is recomputed from the final v so that v and q are
    mutually consistent; the residual is the sup-norm Bellman residual of v.
    """
    v, iters, _ = _value_iteration_impl(expected_reward, transition, discount, tol, max_iters)
    q = expected_reward + discount * (transition @ v)
    resid = np.abs(q.max(axis=1) - v).max()
    return v, q, iters, resid


def soft_value_iteration(expected_reward, transition, discount, weight, tol, max_iters):
    """Entropy-regularised Bellman fixed point.  Returns (v, q, iterations, residual)."""
    v, iters, _ = _soft_value_iteration_impl(
        expected_reward, transition, discount, weight, tol, max_iters
    )
    q = expected_reward + discount * (transition @ v)
    m = q.max(axis=1)
    v_soft = m + weight * np.log(np.exp((q - m[:, None]) / weight).sum(axis=1))
    resid = np.abs(v_soft - v).max()
    return v, q, iters, resid
