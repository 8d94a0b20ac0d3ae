"""The jitted and pure-numpy kernel paths must agree to solver tolerance."""

import numpy as np

from starclab import random_mdp, random_reward
from starclab._kernels import (
    _soft_value_iteration_loop,
    _soft_value_iteration_numpy,
    _value_iteration_loop,
    _value_iteration_numpy,
    soft_value_iteration,
    value_iteration,
)
from starclab.mdp import expected_reward


def _instance(seed):
    mdp = random_mdp(seed, 5, 3)
    er = expected_reward(mdp, random_reward(seed + 1, 5, 3))
    return mdp, er


def test_value_iteration_paths_agree():
    for seed in range(5):
        mdp, er = _instance(seed)
        v_np, _, _ = _value_iteration_numpy(er, mdp.transition, mdp.discount, 1e-10, 100_000)
        v_lp, _, _ = _value_iteration_loop(er, mdp.transition, mdp.discount, 1e-10, 100_000)
        assert np.abs(v_np - v_lp).max() < 1e-8


def test_soft_value_iteration_paths_agree():
    for seed in range(5):
        mdp, er = _instance(seed)
        args = (er, mdp.transition, mdp.discount, 1.0, 1e-10, 100_000)
        v_np, _, _ = _soft_value_iteration_numpy(*args)
        v_lp, _, _ = _soft_value_iteration_loop(*args)
        assert np.abs(v_np - v_lp).max() < 1e-8


def test_wrappers_return_consistent_q_and_residual():
    mdp, er = _instance(9)
    v, q, iters, resid = value_iteration(er, mdp.transition, mdp.discount, 1e-10, 100_000)
    assert resid < 1e-10
    assert iters > 0
    assert np.abs(q - (er + mdp.discount * (mdp.transition @ v))).max() < 1e-12

    v, q, _, resid = soft_value_iteration(er, mdp.transition, mdp.discount, 0.7, 1e-10, 100_000)
    assert resid < 1e-10
    m = q.max(axis=1)
    v_soft = m + 0.7 * np.log(np.exp((q - m[:, None]) / 0.7).sum(axis=1))
    assert np.abs(v_soft - v).max() < 1e-10
