"""Robustness checking and counterexample construction for reward inference.

The central question: if policy data comes from behavioural model ``g`` but
inference assumes model ``f``, how far can the inferred reward be from the
true one?  This module provides:

- a four-condition checker for epsilon-robustness over finite hypothesis
  sets, plus the tightest epsilon it supports;
- verification and constructive decomposition of reward transformation
  chains whose only order-breaking step is a single bounded nudge;
- counterexample certificates showing non-robustness to misspecified
  discounts, misspecified transition kernels, small policy perturbations,
  and exact-optimality assumptions — each certificate re-verifiable from
  its stored inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .mdp import (
    InvalidInstance,
    TabularMdp,
    check_reward,
    occupancy_measure,
    random_reward,
)
from .metric import canonicalize, standardize, starc_distance
from .models import BehavioralModelSpec, ModelTable
from .transforms import (
    Nudge,
    Redistribution,
    Scale,
    Shaping,
    TransformChain,
    apply_chain,
    invariance_basis,
    invisible_reward_discount,
    invisible_reward_transition,
    project_invariant,
    shaping_tensor,
)

DEFAULT_ETA = 1e-6
DIST_TOL = 1e-8
NUDGE_TOL = 1e-9


@dataclass(frozen=True)
class HypothesisSet:
    """Ordered, uniquely-identified finite set of candidate rewards."""

    rewards: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        if not self.rewards:
            raise InvalidInstance("hypothesis set must be nonempty")
        ids = [rid for rid, _ in self.rewards]
        if len(set(ids)) != len(ids):
            raise InvalidInstance("hypothesis ids must be unique")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(rid for rid, _ in self.rewards)

    def reward(self, reward_id: str) -> np.ndarray:
        for rid, r in self.rewards:
            if rid == reward_id:
                return r
        raise KeyError(reward_id)


@dataclass(frozen=True)
class RobustnessVerdict:
    robust: bool
    epsilon_used: float
    eta: float
    violations: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "robust": self.robust,
            "epsilon_used": self.epsilon_used,
            "eta": self.eta,
            "violations": list(self.violations),
        }


@dataclass(frozen=True)
class PolicyMetricSpec:
    """Pseudometric on policy tables: 'l2', 'linf', or 'occupancy_l2'."""

    kind: str = "l2"

    def __post_init__(self):
        if self.kind not in {"l2", "linf", "occupancy_l2"}:
            raise InvalidInstance(f"unknown policy metric {self.kind!r}")

    def distance(self, mdp: TabularMdp, policy_1: np.ndarray, policy_2: np.ndarray) -> float:
        if self.kind == "l2":
            return float(np.linalg.norm(policy_1 - policy_2))
        if self.kind == "linf":
            return float(np.abs(policy_1 - policy_2).max())
        diff = occupancy_measure(mdp, policy_1) - occupancy_measure(mdp, policy_2)
        return float(np.linalg.norm(diff))


def _pair_distances(mdp_eval: TabularMdp, hypotheses: HypothesisSet) -> dict:
    dist = {}
    items = hypotheses.rewards
    for i, (id_1, r_1) in enumerate(items):
        for id_2, r_2 in items[i:]:
            d = starc_distance(mdp_eval, r_1, r_2).distance
            dist[(id_1, id_2)] = d
            dist[(id_2, id_1)] = d
    return dist


def check_epsilon_robust(
    f: ModelTable,
    g: ModelTable,
    hypotheses: HypothesisSet,
    mdp_eval: TabularMdp,
    epsilon: float,
    eta: float = DEFAULT_ETA,
) -> RobustnessVerdict:
    """Check the four robustness conditions of model f against data model g.

    1. f/g policy collisions only between rewards within epsilon;
    2. f/f policy collisions only between rewards within epsilon;
    3. every g-policy is (within eta) some f-policy;
    4. f and g genuinely differ on some hypothesis.

    Policy equality is sup-norm closeness within ``eta``; distances get a
    1e-8 floating-point slack on top of ``epsilon``.
    """
    ids = hypotheses.ids
    if f.ids != ids or g.ids != ids:
        raise InvalidInstance("f, g, and the hypothesis set must share the same reward ids")
    dist = _pair_distances(mdp_eval, hypotheses)
    violations: list[dict] = []

    for id_1 in ids:
        for id_2 in ids:
            gap = np.abs(f.policy(id_1) - g.policy(id_2)).max()
            if gap <= eta and dist[(id_1, id_2)] > epsilon + DIST_TOL:
                violations.append(
                    {"condition": 1, "ids": [id_1, id_2], "distance": dist[(id_1, id_2)]}
                )
    for i, id_1 in enumerate(ids):
        for id_2 in ids[i + 1 :]:
            gap = np.abs(f.policy(id_1) - f.policy(id_2)).max()
            if gap <= eta and dist[(id_1, id_2)] > epsilon + DIST_TOL:
                violations.append(
                    {"condition": 2, "ids": [id_1, id_2], "distance": dist[(id_1, id_2)]}
                )
    for id_g in ids:
        best = min(np.abs(g.policy(id_g) - f.policy(id_f)).max() for id_f in ids)
        if best > eta:
            violations.append({"condition": 3, "ids": [id_g], "policy_gap": float(best)})
    max_fg_gap = max(np.abs(f.policy(rid) - g.policy(rid)).max() for rid in ids)
    if max_fg_gap <= eta:
        violations.append({"condition": 4, "ids": [], "policy_gap": float(max_fg_gap)})

    return RobustnessVerdict(
        robust=not violations,
        epsilon_used=epsilon,
        eta=eta,
        violations=tuple(violations),
    )


def min_robust_epsilon(
    f: ModelTable,
    g: ModelTable,
    hypotheses: HypothesisSet,
    mdp_eval: TabularMdp,
    eta: float = DEFAULT_ETA,
) -> float:
    """Tightest epsilon satisfying conditions 1-2; +inf if 3 or 4 fails."""
    verdict = check_epsilon_robust(f, g, hypotheses, mdp_eval, epsilon=np.inf, eta=eta)
    if any(v["condition"] in (3, 4) for v in verdict.violations):
        return math.inf
    ids = hypotheses.ids
    dist = _pair_distances(mdp_eval, hypotheses)
    worst = 0.0
    for id_1 in ids:
        for id_2 in ids:
            if np.abs(f.policy(id_1) - g.policy(id_2)).max() <= eta:
                worst = max(worst, dist[(id_1, id_2)])
            if np.abs(f.policy(id_1) - f.policy(id_2)).max() <= eta:
                worst = max(worst, dist[(id_1, id_2)])
    return worst


def nudge_bound(epsilon: float) -> float:
    """Allowed nudge-to-canonical-norm ratio for a chain at distance epsilon."""
    return math.sin(2.0 * math.asin(min(1.0, epsilon) / 2.0))


def verify_transformation_bound(
    mdp: TabularMdp,
    chain: TransformChain,
    probes: list[np.ndarray],
    epsilon: float,
) -> tuple[bool, list[dict]]:
    """Check that a chain's single nudge is small enough for distance epsilon.

    For each probe the nudge step must have norm at most
    ``|canonical(before)| * sin(2*arcsin(epsilon/2))`` (plus 1e-9), and the
    end-to-end distance between probe and transformed probe must be at most
    ``epsilon`` (plus 1e-8).
    """
    if chain.nudge_count() > 1:
        raise InvalidInstance("chain has more than one nudge step")
    reports = []
    all_ok = True
    for i, probe in enumerate(probes):
        probe = check_reward(mdp, probe)
        current = probe
        nudge_norm = 0.0
        norm_before = None
        for step in chain.steps:
            if isinstance(step, Nudge):
                norm_before = canonicalize(mdp, current).norm
                nudge_norm = float(np.linalg.norm(step.delta))
            current = _apply_step_checked(mdp, current, step)
        if norm_before is None:
            norm_before = canonicalize(mdp, probe).norm
        bound = norm_before * nudge_bound(epsilon) + NUDGE_TOL
        distance = starc_distance(mdp, probe, current).distance
        nudge_ok = nudge_norm <= bound
        dist_ok = distance <= epsilon + DIST_TOL
        reports.append(
            {
                "probe": i,
                "nudge_norm": nudge_norm,
                "nudge_bound": bound,
                "nudge_ok": nudge_ok,
                "distance": distance,
                "distance_ok": dist_ok,
            }
        )
        all_ok = all_ok and nudge_ok and dist_ok
    return all_ok, reports


def _apply_step_checked(mdp, reward, step):
    from .transforms import apply_step

    return apply_step(mdp, reward, step)


def _split_invariant(mdp: TabularMdp, tensor: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Write an invariance-subspace tensor as shaping(phi) + redistribution delta."""
    basis = invariance_basis(mdp)
    shaping_flat = basis.shaping_dirs.reshape(basis.shaping_dirs.shape[0], -1)
    redist_flat = basis.redistribution_dirs.reshape(basis.redistribution_dirs.shape[0], -1)
    generators = np.concatenate([shaping_flat, redist_flat], axis=0)
    coeffs, _, _, _ = np.linalg.lstsq(generators.T, tensor.ravel(), rcond=None)
    phi = coeffs[: mdp.n_states]
    delta = (coeffs[mdp.n_states :] @ redist_flat).reshape(tensor.shape)
    return phi, delta


def decompose_transformation(
    mdp: TabularMdp, reward: np.ndarray, reward_target: np.ndarray
) -> TransformChain:
    """Express the map from one reward to another as an explicit chain.

    The chain strips the source down to its unit canonical form via shaping,
    redistribution, and scaling, applies one nudge to rotate onto the
    target's canonical ray (the nudge lands at the foot of the perpendicular
    when the canonical directions are not too far apart, which minimizes the
    nudge norm), rescales, and re-adds the target's order-irrelevant part.
    """
    reward = check_reward(mdp, reward)
    reward_target = check_reward(mdp, reward_target)
    canon_1 = canonicalize(mdp, reward)
    canon_2 = canonicalize(mdp, reward_target)
    unit_1 = standardize(mdp, reward)
    unit_2 = standardize(mdp, reward_target)
    trivial_1 = not unit_1.any()
    trivial_2 = not unit_2.any()
    if trivial_2 and not trivial_1:
        raise InvalidInstance(
            "target reward is trivial while the source is not: the standardized "
            "target is the zero tensor, so no positive rescaling can reach it"
        )

    phi_1, delta_1 = _split_invariant(mdp, reward - canon_1.canonical)
    phi_2, delta_2 = _split_invariant(mdp, reward_target - canon_2.canonical)

    steps: list = [Shaping(-phi_1), Redistribution(-delta_1)]
    if trivial_1 and trivial_2:
        pass  # both canonical parts are zero; nothing to rotate
    elif trivial_1:
        steps.append(Nudge(unit_2.copy()))
        steps.append(Scale(canon_2.norm))
    else:
        steps.append(Scale(1.0 / canon_1.norm))
        cos_theta = float((unit_1 * unit_2).sum())
        if cos_theta >= 0.1:
            # Right-triangle landing: nudge perpendicular to the target ray,
            # arriving at cos(theta) * unit_2; ratio of nudge norm to the
            # canonical norm before the nudge is sin(theta), the minimum.
            steps.append(Nudge(cos_theta * unit_2 - unit_1))
            steps.append(Scale(canon_2.norm / cos_theta))
        else:
            steps.append(Nudge(unit_2 - unit_1))
            steps.append(Scale(canon_2.norm))
    steps.append(Shaping(phi_2))
    steps.append(Redistribution(delta_2))
    chain = TransformChain(tuple(steps))

    recomposed = apply_chain(mdp, reward, chain)
    err = np.linalg.norm(recomposed - reward_target)
    if err > 1e-8 * max(1.0, np.linalg.norm(reward_target)):
        raise RuntimeError(f"internal error: chain recomposition error {err:g}")
    return chain


@dataclass(frozen=True)
class CounterexampleCertificate:
    """Self-contained, re-verifiable witness of a non-robustness scenario.

    ``scenario`` is one of 'discount', 'transition', 'perturbation',
    'optimality'.  The certificate stores the environments, the constructed
    reward pair, the behavioural model used to generate policies, the policy
    gap measured under the generating environment, and the reward distance
    measured under the evaluation environment.
    """

    scenario: str
    mdp_gen: TabularMdp
    mdp_eval: TabularMdp
    reward_1: np.ndarray
    reward_2: np.ndarray
    model: dict
    policy_metric: str
    policy_gap: float
    distance: float
    params: dict = field(default_factory=dict)

    def _model_spec(self) -> BehavioralModelSpec:
        return BehavioralModelSpec.from_dict(self.model, self.mdp_gen)

    def verify(self, tol: float = DIST_TOL) -> bool:
        """Recompute both measured quantities from the stored inputs."""
        spec = self._model_spec()
        metric = PolicyMetricSpec(self.policy_metric)
        gap = metric.distance(self.mdp_gen, spec(self.reward_1), spec(self.reward_2))
        dist = starc_distance(self.mdp_eval, self.reward_1, self.reward_2).distance
        return abs(gap - self.policy_gap) <= tol and abs(dist - self.distance) <= tol

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "mdp_gen": self.mdp_gen.to_dict(),
            "mdp_eval": self.mdp_eval.to_dict(),
            "reward_1": self.reward_1.tolist(),
            "reward_2": self.reward_2.tolist(),
            "model": self.model,
            "policy_metric": self.policy_metric,
            "policy_gap": self.policy_gap,
            "distance": self.distance,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CounterexampleCertificate":
        return cls(
            scenario=data["scenario"],
            mdp_gen=TabularMdp.from_dict(data["mdp_gen"]),
            mdp_eval=TabularMdp.from_dict(data["mdp_eval"]),
            reward_1=np.asarray(data["reward_1"], dtype=float),
            reward_2=np.asarray(data["reward_2"], dtype=float),
            model=data["model"],
            policy_metric=data["policy_metric"],
            policy_gap=float(data["policy_gap"]),
            distance=float(data["distance"]),
            params=data.get("params", {}),
        )


def _model_dict(model_kind: str, beta: float | None, alpha: float | None) -> dict:
    if model_kind == "boltzmann":
        return {"kind": "boltzmann", "beta": beta if beta is not None else 1.0}
    if model_kind == "mce":
        return {"kind": "mce", "alpha": alpha if alpha is not None else 1.0}
    if model_kind == "optimal_uniform":
        return {"kind": "optimal_uniform"}
    raise InvalidInstance(f"unknown model kind {model_kind!r}")


def discount_counterexample(
    mdp: TabularMdp,
    gamma_1: float,
    gamma_2: float,
    model_kind: str = "boltzmann",
    beta: float | None = None,
    alpha: float | None = None,
    seed: int = 0,
) -> CounterexampleCertificate:
    """Reward pair a gamma_1 model cannot tell apart but gamma_2 maximally separates.

    The pair is a pure-shaping reward (at discount gamma_1) and its negation:
    both give constant-per-state optimal Q-values, so any shaping-invariant
    model maps them to the same policy, yet under gamma_2 they induce exactly
    opposite policy orderings (distance 1).
    """
    r_dagger = invisible_reward_discount(mdp, gamma_1, gamma_2, seed=seed)
    mdp_gen = mdp.with_discount(gamma_1)
    mdp_eval = mdp.with_discount(gamma_2)
    model = _model_dict(model_kind, beta, alpha)
    spec = BehavioralModelSpec.from_dict(model, mdp_gen)
    metric = PolicyMetricSpec("linf")
    gap = metric.distance(mdp_gen, spec(r_dagger), spec(-r_dagger))
    dist = starc_distance(mdp_eval, r_dagger, -r_dagger).distance
    return CounterexampleCertificate(
        scenario="discount",
        mdp_gen=mdp_gen,
        mdp_eval=mdp_eval,
        reward_1=r_dagger,
        reward_2=-r_dagger,
        model=model,
        policy_metric="linf",
        policy_gap=gap,
        distance=dist,
        params={"gamma_1": gamma_1, "gamma_2": gamma_2, "seed": seed},
    )


def transition_counterexample(
    mdp_1: TabularMdp,
    mdp_2: TabularMdp,
    model_kind: str = "boltzmann",
    beta: float | None = None,
    alpha: float | None = None,
    reward_pair: tuple[np.ndarray, np.ndarray] | None = None,
) -> CounterexampleCertificate:
    """Reward pair one transition kernel cannot tell apart but another separates.

    By default the pair is a zero-kernel-1-conditional-mean reward and its
    negation; a custom pair with the same property may be supplied.
    """
    if reward_pair is None:
        r_dagger = invisible_reward_transition(mdp_1, mdp_2)
        reward_1, reward_2 = r_dagger, -r_dagger
    else:
        reward_1, reward_2 = reward_pair
    model = _model_dict(model_kind, beta, alpha)
    spec = BehavioralModelSpec.from_dict(model, mdp_1)
    metric = PolicyMetricSpec("linf")
    gap = metric.distance(mdp_1, spec(reward_1), spec(reward_2))
    dist = starc_distance(mdp_2, reward_1, reward_2).distance
    return CounterexampleCertificate(
        scenario="transition",
        mdp_gen=mdp_1,
        mdp_eval=mdp_2,
        reward_1=reward_1,
        reward_2=reward_2,
        model=model,
        policy_metric="linf",
        policy_gap=gap,
        distance=dist,
        params={"gamma": mdp_1.discount},
    )


def perturbation_counterexample(
    mdp: TabularMdp,
    model_kind: str = "boltzmann",
    beta: float | None = None,
    alpha: float | None = None,
    c: float = 1.0,
    delta: float = 1e-2,
    policy_metric: PolicyMetricSpec | None = None,
    seed: int = 0,
) -> CounterexampleCertificate:
    """Equal-norm reward pair at distance 1 whose policies differ by less than delta.

    The pair is ``eps*R + S`` and ``-eps*R + S`` where R is canonical with
    unit norm, S is a shaping reward (orthogonal to R by construction) sized
    so both rewards have norm c, and eps is found by bisection so the policy
    gap under a continuous behavioural model lands in [delta/2, delta].
    """
    if model_kind not in {"boltzmann", "mce"}:
        raise InvalidInstance("perturbation counterexamples need a continuous model (boltzmann or mce)")
    if c <= 0:
        raise InvalidInstance("c must be positive")
    if delta <= 0:
        raise InvalidInstance("delta must be positive")
    metric = policy_metric or PolicyMetricSpec("l2")
    model = _model_dict(model_kind, beta, alpha)
    spec = BehavioralModelSpec.from_dict(model, mdp)

    unit = None
    for attempt in range(20):
        candidate = standardize(mdp, random_reward(seed + attempt, mdp.n_states, mdp.n_actions))
        if candidate.any():
            unit = candidate
            break
    if unit is None:
        raise InvalidInstance("could not find a non-trivial canonical direction")
    shaping_dir = shaping_tensor(mdp, np.ones(mdp.n_states))
    shaping_unit = shaping_dir / np.linalg.norm(shaping_dir)

    def build(eps: float) -> tuple[np.ndarray, np.ndarray]:
        s_part = math.sqrt(max(c * c - eps * eps, 0.0)) * shaping_unit
        return eps * unit + s_part, -eps * unit + s_part

    def gap(eps: float) -> float:
        r_1, r_2 = build(eps)
        return metric.distance(mdp, spec(r_1), spec(r_2))

    hi = c * (1.0 - 1e-12)
    eps = hi
    g = gap(eps)
    while g > delta:
        eps /= 2.0
        if eps < 1e-300:
            raise InvalidInstance(
                f"delta = {delta:g} requires eps below 1e-300; cannot represent"
            )
        g = gap(eps)
    # eps now gives gap <= delta; bisect upward so the gap lands in [delta/2, delta].
    lo, hi_b = eps, min(2.0 * eps, hi)
    for _ in range(200):
        if g >= delta / 2.0:
            break
        mid = 0.5 * (lo + hi_b)
        g_mid = gap(mid)
        if g_mid <= delta:
            lo, g = mid, g_mid
        else:
            hi_b = mid
    eps = lo
    reward_1, reward_2 = build(eps)
    dist = starc_distance(mdp, reward_1, reward_2).distance
    return CounterexampleCertificate(
        scenario="perturbation",
        mdp_gen=mdp,
        mdp_eval=mdp,
        reward_1=reward_1,
        reward_2=reward_2,
        model=model,
        policy_metric=metric.kind,
        policy_gap=g,
        distance=dist,
        params={"c": c, "delta": delta, "eps": eps, "seed": seed},
    )


def separation_witness_search(
    model: BehavioralModelSpec,
    mdp: TabularMdp,
    policy_metric: PolicyMetricSpec,
    epsilon: float,
    delta: float,
    seed: int = 0,
    budget: int = 1000,
) -> tuple[np.ndarray, np.ndarray] | None:
    """Search for rewards farther than epsilon whose policies are delta-close.

    A witness refutes the claim that the model separates distant rewards into
    distant policies; ``None`` is inconclusive, not a proof of separation.
    """
    if budget < 1:
        raise InvalidInstance("budget must be at least 1")
    if epsilon >= 1.0:
        return None  # distances never exceed 1
    if delta > 0 and model.kind in {"boltzmann", "mce"}:
        try:
            cert = perturbation_counterexample(
                mdp,
                model_kind=model.kind,
                beta=model.beta,
                alpha=model.alpha,
                delta=delta,
                policy_metric=policy_metric,
                seed=seed,
            )
        except InvalidInstance:
            pass
        else:
            if cert.distance > epsilon and cert.policy_gap <= delta:
                return cert.reward_1, cert.reward_2
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        r_1 = rng.standard_normal((mdp.n_states, mdp.n_actions, mdp.n_states))
        r_2 = rng.standard_normal((mdp.n_states, mdp.n_actions, mdp.n_states))
        if starc_distance(mdp, r_1, r_2).distance > epsilon:
            if policy_metric.distance(mdp, model(r_1), model(r_2)) <= delta:
                return r_1, r_2
    return None


def optimality_nonrobustness_witness(
    mdp: TabularMdp, seed: int = 0, max_samples: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Two rewards with identical uniform-over-optimal policies but positive distance.

    Shows that assuming exactly optimal behaviour collapses genuinely
    different rewards onto the same policy.  Impossible (by a counting
    argument) only when |S| = 1 and |A| = 2, or when |A| = 1.
    """
    from .models import optimal_policy_uniform

    if mdp.n_states == 1 and mdp.n_actions == 2:
        raise InvalidInstance(
            "with one state and two actions every pair of rewards with the same "
            "strict optimum orders policies identically; no witness exists"
        )
    if mdp.n_actions == 1:
        raise InvalidInstance(
            "with a single action all rewards are order-equivalent; no witness exists"
        )
    rng = np.random.default_rng(seed)
    eta = DEFAULT_ETA
    for _ in range(max_samples):
        reward_1 = rng.standard_normal((mdp.n_states, mdp.n_actions, mdp.n_states))
        policy_1 = optimal_policy_uniform(mdp, reward_1)
        # Lower one non-greedy action's reward: the greedy policy is
        # unchanged, but the ordering among suboptimal policies moves.
        reward_2 = reward_1.copy()
        nongreedy = np.argwhere(policy_1 < 1e-12)
        if nongreedy.size == 0:
            continue
        s, a = nongreedy[rng.integers(len(nongreedy))]
        reward_2[s, a, :] -= 1.0 + rng.random()
        policy_2 = optimal_policy_uniform(mdp, reward_2)
        if np.abs(policy_1 - policy_2).max() < eta:
            if starc_distance(mdp, reward_1, reward_2).distance > 1e-3:
                return reward_1, reward_2
    raise RuntimeError(f"no witness found within {max_samples} samples")


def two_epsilon_lemma_check(
    f: ModelTable,
    g: ModelTable,
    hypotheses: HypothesisSet,
    mdp_eval: TabularMdp,
    epsilon: float,
    eta: float = DEFAULT_ETA,
) -> bool:
    """On a robust pair, verify g-policy collisions only join rewards within 2*epsilon."""
    verdict = check_epsilon_robust(f, g, hypotheses, mdp_eval, epsilon, eta)
    if not verdict.robust:
        raise InvalidInstance("precondition unmet: the model pair is not epsilon-robust")
    ids = hypotheses.ids
    dist = _pair_distances(mdp_eval, hypotheses)
    for i, id_1 in enumerate(ids):
        for id_2 in ids[i + 1 :]:
            if np.abs(g.policy(id_1) - g.policy(id_2)).max() <= eta:
                if dist[(id_1, id_2)] > 2.0 * epsilon + DIST_TOL:
                    return False
    return True


def torus_gridworld(n: int, gamma: float = 0.9, slippery: bool = False) -> TabularMdp:
    """N x N torus with four movement actions (up, down, left, right).

    In the slippery variant each action moves to the intended cell or to one
    of its two diagonal neighbours, each with probability 1/3 (an 'up' move
    lands up-left, up, or up-right).
    """
    if n < 2:
        raise InvalidInstance("grid must be at least 2 x 2")
    n_states = n * n
    moves = {0: (-1, 0), 1: (1, 0), 2: (0, -1), 3: (0, 1)}  # up, down, left, right
    transition = np.zeros((n_states, 4, n_states))
    for r in range(n):
        for col in range(n):
            s = r * n + col
            for a, (dr, dc) in moves.items():
                targets = [(dr, dc)]
                if slippery:
                    if dr != 0:  # vertical move slips sideways
                        targets = [(dr, -1), (dr, 0), (dr, 1)]
                    else:  # horizontal move slips vertically
                        targets = [(-1, dc), (0, dc), (1, dc)]
                p = 1.0 / len(targets)
                for tdr, tdc in targets:
                    t = ((r + tdr) % n) * n + ((col + tdc) % n)
                    transition[s, a, t] += p
    initial = np.full(n_states, 1.0 / n_states)
    return TabularMdp(transition=transition, initial_dist=initial, discount=gamma)


def _movement_schema_reward(n: int) -> np.ndarray:
    """Reward by displacement: rightward moves +1, leftward -1, vertical 0."""
    schema = {
        (-1, 0): 0.0, (-1, 1): 1.0, (0, 1): 1.0, (1, 1): 1.0,
        (1, 0): 0.0, (1, -1): -1.0, (0, -1): -1.0, (-1, -1): -1.0,
    }
    n_states = n * n
    reward = np.zeros((n_states, 4, n_states))
    for r in range(n):
        for col in range(n):
            s = r * n + col
            for (dr, dc), value in schema.items():
                t = ((r + dr) % n) * n + ((col + dc) % n)
                reward[s, :, t] = value
    return reward


def gridworld_demo(
    n: int = 3, gamma: float = 0.9, alpha: float = 1.0
) -> CounterexampleCertificate:
    """Torus-gridworld transition counterexample with a movement-schema reward.

    Reward 1 prefers rightward movement.  Reward 2 agrees with reward 1 in
    conditional mean under the slippery kernel (so maximal-causal-entropy
    policies there are identical) but negates it on every deterministic-kernel
    outcome, making the two rewards order policies oppositely under the
    deterministic kernel.
    """
    mdp_det = torus_gridworld(n, gamma, slippery=False)
    mdp_slip = torus_gridworld(n, gamma, slippery=True)
    reward_1 = _movement_schema_reward(n)

    # Per (s, a): negate the deterministic outcome's entry, then spread the
    # correction over the two slip outcomes so the slippery-kernel mean of
    # reward 2 equals that of reward 1 exactly (minimum-norm split).
    reward_2 = np.zeros_like(reward_1)
    n_states = n * n
    for s in range(n_states):
        for a in range(4):
            det_target = int(np.argmax(mdp_det.transition[s, a]))
            support = np.flatnonzero(mdp_slip.transition[s, a] > 0)
            mean_1 = mdp_slip.transition[s, a] @ reward_1[s, a]
            reward_2[s, a, det_target] = -reward_1[s, a, det_target]
            others = [t for t in support if t != det_target]
            residual = mean_1 - mdp_slip.transition[s, a, det_target] * reward_2[s, a, det_target]
            if others:
                weights = mdp_slip.transition[s, a, others]
                # Minimum-norm row completion of the single mean constraint.
                reward_2[s, a, others] = residual * weights / (weights @ weights)

    cert = transition_counterexample(
        mdp_slip, mdp_det, model_kind="mce", alpha=alpha, reward_pair=(reward_1, reward_2)
    )
    return CounterexampleCertificate(
        scenario="transition",
        mdp_gen=cert.mdp_gen,
        mdp_eval=cert.mdp_eval,
        reward_1=cert.reward_1,
        reward_2=cert.reward_2,
        model=cert.model,
        policy_metric=cert.policy_metric,
        policy_gap=cert.policy_gap,
        distance=cert.distance,
        params={"n": n, "gamma": gamma, "alpha": alpha, "demo": "torus-gridworld"},
    )
