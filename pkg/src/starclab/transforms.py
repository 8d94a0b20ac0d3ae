"""Order-preserving reward transformations and their linear-algebraic structure.

Three transformation families act on reward tensors without changing which
policies are preferred: potential shaping (add ``gamma*phi(s') - phi(s)``),
successor redistribution (move reward across next states while keeping the
conditional mean under the transition kernel fixed), and positive scaling.
Shaping and redistribution together span a linear subspace per environment;
this module builds explicit bases for it, classifies reward pairs by how they
differ, composes transformation chains, and constructs "invisible" rewards —
pure-shaping or pure-redistribution rewards for one environment that remain
meaningful in another.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

import numpy as np

from .mdp import InvalidInstance, TabularMdp, check_reward, expected_reward

SUBSPACE_TOL = 1e-9
MEMBERSHIP_TOL = 1e-8
NONTRIVIAL_TOL = 1e-6
MAX_POTENTIAL_ATTEMPTS = 100


def shaping_tensor(mdp: TabularMdp, phi: np.ndarray, discount: float | None = None) -> np.ndarray:
    """The reward tensor ``gamma*phi(s') - phi(s)``, broadcast over actions."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (mdp.n_states,):
        raise InvalidInstance(f"potential must have shape ({mdp.n_states},), got {phi.shape}")
    if not np.isfinite(phi).all():
        raise InvalidInstance("potential has non-finite entries")
    gamma = mdp.discount if discount is None else discount
    return (
        gamma * phi[None, None, :]
        - phi[:, None, None] * np.ones((mdp.n_states, mdp.n_actions, mdp.n_states))
    )


def apply_potential_shaping(
    mdp: TabularMdp, reward: np.ndarray, phi: np.ndarray, discount: float | None = None
) -> np.ndarray:
    return check_reward(mdp, reward) + shaping_tensor(mdp, phi, discount)


def apply_redistribution_noise(
    mdp: TabularMdp, reward: np.ndarray, seed: int, magnitude: float
) -> np.ndarray:
    """Add a seeded random zero-conditional-mean tensor of the given 2-norm."""
    reward = check_reward(mdp, reward)
    if magnitude < 0:
        raise InvalidInstance("magnitude must be nonnegative")
    basis = invariance_basis(mdp).redistribution_dirs
    if magnitude == 0.0 or basis.shape[0] == 0:
        return reward.copy()
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(basis.shape[0])
    delta = np.tensordot(coeffs, basis, axes=1)
    delta *= magnitude / np.linalg.norm(delta)
    return reward + delta


@dataclass(frozen=True)
class InvarianceBasis:
    """Bases for the shaping and redistribution subspaces of one environment.

    ``shaping_dirs`` has one tensor per state (indicator potentials);
    ``redistribution_dirs`` has S*A*(S-1) tensors; ``combined_orthonormal``
    is an orthonormal basis for the span of their union.  All are stacked
    along axis 0 with reward-shaped slices.
    """

    shaping_dirs: np.ndarray
    redistribution_dirs: np.ndarray
    combined_orthonormal: np.ndarray


@functools.lru_cache(maxsize=None)
def invariance_basis(mdp: TabularMdp) -> InvarianceBasis:
    n_s, n_a = mdp.n_states, mdp.n_actions
    shape = (n_s, n_a, n_s)

    shaping = np.zeros((n_s,) + shape)
    for i in range(n_s):
        phi = np.zeros(n_s)
        phi[i] = 1.0
        shaping[i] = shaping_tensor(mdp, phi)

    # Per (s, a): orthonormal complement of the transition row within R^S.
    redist = np.zeros((n_s * n_a * (n_s - 1),) + shape)
    k = 0
    for s in range(n_s):
        for a in range(n_a):
            row = mdp.transition[s, a]
            # Null space of the 1 x S row via full SVD.
            _, _, vt = np.linalg.svd(row[None, :])
            for j in range(1, n_s):
                redist[k, s, a, :] = vt[j]
                k += 1

    stacked = np.concatenate([shaping, redist], axis=0).reshape(-1, n_s * n_a * n_s)
    if stacked.shape[0]:
        _, svals, vt = np.linalg.svd(stacked, full_matrices=False)
        rank = int((svals > max(stacked.shape) * np.finfo(float).eps * svals[0]).sum())
        combined = vt[:rank].reshape((-1,) + shape)
    else:
        combined = np.zeros((0,) + shape)
    for arr in (shaping, redist, combined):
        arr.setflags(write=False)
    return InvarianceBasis(shaping, redist, combined)


def project_invariant(mdp: TabularMdp, tensor: np.ndarray) -> np.ndarray:
    """Orthogonal projection of a reward-shaped tensor onto the invariance subspace."""
    basis = invariance_basis(mdp).combined_orthonormal
    if basis.shape[0] == 0:
        return np.zeros_like(tensor)
    flat_basis = basis.reshape(basis.shape[0], -1)
    coeffs = flat_basis @ np.asarray(tensor, dtype=float).ravel()
    return (coeffs @ flat_basis).reshape(tensor.shape)


IDENTICAL = "identical"
SHAPING_AND_REDISTRIBUTION = "shaping_and_redistribution"
ALSO_POSITIVE_SCALING = "also_positive_scaling"
NEITHER = "neither"


def differ_by(mdp: TabularMdp, reward_1: np.ndarray, reward_2: np.ndarray) -> str:
    """Classify how two rewards differ with respect to the transformation group."""
    reward_1 = check_reward(mdp, reward_1)
    reward_2 = check_reward(mdp, reward_2)
    diff = reward_1 - reward_2
    diff_norm = np.linalg.norm(diff)
    if diff_norm == 0.0:
        return IDENTICAL
    residual = diff - project_invariant(mdp, diff)
    if np.linalg.norm(residual) < MEMBERSHIP_TOL * max(1.0, diff_norm):
        return SHAPING_AND_REDISTRIBUTION
    c1 = reward_1 - project_invariant(mdp, reward_1)
    c2 = reward_2 - project_invariant(mdp, reward_2)
    n1, n2 = np.linalg.norm(c1), np.linalg.norm(c2)
    if n1 > 0 and n2 > 0:
        scale = max(1.0, n1, n2)
        if np.linalg.norm(c1 / n1 - c2 / n2) < MEMBERSHIP_TOL * scale:
            return ALSO_POSITIVE_SCALING
    return NEITHER


def invisible_reward_discount(
    mdp: TabularMdp, gamma_1: float, gamma_2: float, seed: int = 0
) -> np.ndarray:
    """A pure-shaping reward under ``gamma_1`` that stays non-trivial under ``gamma_2``.

    Any behavioural model that ignores potential shaping at discount
    ``gamma_1`` treats this reward (and all its multiples, including its
    negation) identically, yet under ``gamma_2`` the reward still expresses a
    genuine preference.  Indicator potentials are tried first, then seeded
    random potentials, up to 100 attempts.
    """
    if gamma_1 == gamma_2:
        raise InvalidInstance("the two discounts must differ")
    if not (0.0 < gamma_1 < 1.0 and 0.0 < gamma_2 < 1.0):
        raise InvalidInstance("discounts must lie in (0, 1)")
    row_spread = 0.0
    for s in range(mdp.n_states):
        rows = mdp.transition[s]
        row_spread = max(row_spread, np.abs(rows[:, None, :] - rows[None, :, :]).max())
    if row_spread <= 1e-9:
        raise InvalidInstance(
            "precondition violated: every state's actions share one next-state "
            "distribution, so shaping rewards stay trivial under any discount"
        )
    mdp_2 = mdp.with_discount(gamma_2)
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_POTENTIAL_ATTEMPTS):
        if attempt < mdp.n_states:
            phi = np.zeros(mdp.n_states)
            phi[attempt] = 1.0
        else:
            phi = rng.standard_normal(mdp.n_states)
        candidate = shaping_tensor(mdp, phi, discount=gamma_1)
        canonical = candidate - project_invariant(mdp_2, candidate)
        if np.linalg.norm(canonical) > NONTRIVIAL_TOL:
            return candidate
    raise InvalidInstance(
        f"no potential yielded a non-trivial shaping reward after {MAX_POTENTIAL_ATTEMPTS} attempts"
    )


def invisible_reward_transition(mdp_1: TabularMdp, mdp_2: TabularMdp) -> np.ndarray:
    """A zero-conditional-mean reward under one kernel with unit mean under another.

    The reward is supported on a single (state, action) whose transition rows
    differ; on that row it is the minimum-norm solution of the two mean
    constraints (0 under the first kernel, 1 under the second).  A model that
    ignores redistribution under the first kernel cannot distinguish this
    reward from its negation, but under the second kernel they disagree.
    """
    if mdp_1.transition.shape != mdp_2.transition.shape:
        raise InvalidInstance("the two environments must share state and action sets")
    row_diff = np.abs(mdp_1.transition - mdp_2.transition).max(axis=2)
    s, a = np.unravel_index(row_diff.argmax(), row_diff.shape)
    if row_diff[s, a] <= 1e-9:
        raise InvalidInstance("the two transition kernels are identical")
    system = np.stack([mdp_1.transition[s, a], mdp_2.transition[s, a]])
    row, _, _, _ = np.linalg.lstsq(system, np.array([0.0, 1.0]), rcond=None)
    if np.abs(system @ row - np.array([0.0, 1.0])).max() > 1e-9:
        raise RuntimeError(
            "internal error: mean constraints unsolvable (rows parallel?)"
        )
    reward = np.zeros_like(mdp_1.transition)
    reward[s, a, :] = row
    return reward


@dataclass(frozen=True)
class Shaping:
    phi: np.ndarray


@dataclass(frozen=True)
class Redistribution:
    delta: np.ndarray


@dataclass(frozen=True)
class Scale:
    c: float


@dataclass(frozen=True)
class Nudge:
    delta: np.ndarray


TransformStep = Shaping | Redistribution | Scale | Nudge


@dataclass(frozen=True)
class TransformChain:
    """Ordered sequence of reward transformation steps."""

    steps: tuple[TransformStep, ...]

    def nudge_count(self) -> int:
        return sum(isinstance(step, Nudge) for step in self.steps)

    def to_json(self) -> str:
        tagged = []
        for step in self.steps:
            if isinstance(step, Shaping):
                tagged.append({"kind": "shaping", "phi": np.asarray(step.phi).tolist()})
            elif isinstance(step, Redistribution):
                tagged.append({"kind": "redistribution", "delta": np.asarray(step.delta).tolist()})
            elif isinstance(step, Scale):
                tagged.append({"kind": "scale", "c": step.c})
            else:
                tagged.append({"kind": "nudge", "delta": np.asarray(step.delta).tolist()})
        return json.dumps(tagged)

    @classmethod
    def from_json(cls, text: str) -> "TransformChain":
        steps: list[TransformStep] = []
        for item in json.loads(text):
            kind = item.get("kind")
            if kind == "shaping":
                steps.append(Shaping(np.asarray(item["phi"], dtype=float)))
            elif kind == "redistribution":
                steps.append(Redistribution(np.asarray(item["delta"], dtype=float)))
            elif kind == "scale":
                steps.append(Scale(float(item["c"])))
            elif kind == "nudge":
                steps.append(Nudge(np.asarray(item["delta"], dtype=float)))
            else:
                raise InvalidInstance(f"unknown transform step kind {kind!r}")
        return cls(tuple(steps))


def apply_step(mdp: TabularMdp, reward: np.ndarray, step: TransformStep) -> np.ndarray:
    if isinstance(step, Shaping):
        return apply_potential_shaping(mdp, reward, step.phi)
    if isinstance(step, Redistribution):
        delta = check_reward(mdp, step.delta)
        cond_mean = np.abs(expected_reward(mdp, delta)).max()
        if cond_mean > SUBSPACE_TOL:
            raise InvalidInstance(
                f"redistribution step has conditional mean {cond_mean:g} > {SUBSPACE_TOL:g}"
            )
        return reward + delta
    if isinstance(step, Scale):
        if step.c <= 0:
            raise InvalidInstance("scale factor must be positive")
        return step.c * reward
    if isinstance(step, Nudge):
        return reward + check_reward(mdp, step.delta)
    raise InvalidInstance(f"unknown transform step {step!r}")


def apply_chain(mdp: TabularMdp, reward: np.ndarray, chain: TransformChain) -> np.ndarray:
    reward = check_reward(mdp, reward)
    for step in chain.steps:
        reward = apply_step(mdp, reward, step)
    return reward
