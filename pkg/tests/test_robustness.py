import math

import numpy as np
import pytest

from starclab import (
    BehavioralModelSpec,
    canonicalize,
    CounterexampleCertificate,
    HypothesisSet,
    InvalidInstance,
    PolicyMetricSpec,
    check_epsilon_robust,
    decompose_transformation,
    discount_counterexample,
    gridworld_demo,
    materialize_model,
    min_robust_epsilon,
    optimality_nonrobustness_witness,
    optimal_policy_uniform,
    perturbation_counterexample,
    random_mdp,
    random_reward,
    separation_witness_search,
    standardize,
    starc_distance,
    torus_gridworld,
    three_state_chain,
    transition_counterexample,
    two_epsilon_lemma_check,
    verify_transformation_bound,
)
from starclab.mdp import expected_reward
from starclab.models import ModelTable
from starclab.robustness import nudge_bound
from starclab.transforms import (
    Nudge,
    Scale,
    Shaping,
    TransformChain,
    apply_potential_shaping,
)
from starclab import robustness as robustness_module


def _swap_tables(mdp, seed=50):
    """f over {X, 2(X+shaping)}, and g permuting f's outputs: robust at eps 0."""
    x = random_reward(seed, mdp.n_states, mdp.n_actions)
    x_2 = 2.0 * apply_potential_shaping(mdp, x, np.arange(float(mdp.n_states)))
    hyp = HypothesisSet((("x", x), ("x2", x_2)))
    spec = BehavioralModelSpec("boltzmann", mdp, beta=1.0)
    f = materialize_model(spec, list(hyp.rewards))
    g = ModelTable((("x", f.policy("x2")), ("x2", f.policy("x"))))
    return hyp, f, g


class TestChecker:
    def test_f_equals_g_fails_condition_4_only(self, mdp_4x3):
        hyp, f, _ = _swap_tables(mdp_4x3)
        verdict = check_epsilon_robust(f, f, hyp, mdp_4x3, epsilon=1.0)
        assert not verdict.robust
        assert [v["condition"] for v in verdict.violations] == [4]

    def test_order_preserving_relabeling_robust_at_zero(self, mdp_4x3):
        hyp, f, g = _swap_tables(mdp_4x3)
        verdict = check_epsilon_robust(f, g, hyp, mdp_4x3, epsilon=0.0)
        assert verdict.robust

    def test_distant_collision_flagged_condition_2(self, mdp_4x3):
        r_1 = random_reward(60, 4, 3)
        r_2 = -r_1
        hyp = HypothesisSet((("a", r_1), ("b", r_2)))
        same = np.full((4, 3), 1 / 3)
        other = np.zeros((4, 3))
        other[:, 0] = 1.0
        f = ModelTable((("a", same), ("b", same)))
        g = ModelTable((("a", other), ("b", other)))
        verdict = check_epsilon_robust(f, g, hyp, mdp_4x3, epsilon=0.5)
        assert any(v["condition"] == 2 for v in verdict.violations)

    def test_mismatched_ids_rejected(self, mdp_4x3):
        hyp, f, g = _swap_tables(mdp_4x3)
        other_hyp = HypothesisSet((("p", hyp.reward("x")), ("q", hyp.reward("x2"))))
        with pytest.raises(InvalidInstance, match="same reward ids"):
            check_epsilon_robust(f, g, other_hyp, mdp_4x3, epsilon=0.1)

    def test_verdict_serializes(self, mdp_4x3):
        hyp, f, g = _swap_tables(mdp_4x3)
        verdict = check_epsilon_robust(f, g, hyp, mdp_4x3, epsilon=0.0)
        data = verdict.to_dict()
        assert data["robust"] is True and data["violations"] == []


class TestMinRobustEpsilon:
    def test_g_equals_f_infinite(self, mdp_4x3):
        hyp, f, _ = _swap_tables(mdp_4x3)
        assert min_robust_epsilon(f, f, hyp, mdp_4x3) == math.inf

    def test_relabeling_gives_zero(self, mdp_4x3):
        hyp, f, g = _swap_tables(mdp_4x3)
        assert min_robust_epsilon(f, g, hyp, mdp_4x3) <= 1e-8

    def test_bounded_nudge_gives_measured_distance(self, mdp_4x3):
        x = random_reward(61, 4, 3)
        y = x + 0.2 * random_reward(62, 4, 3)
        d0 = starc_distance(mdp_4x3, x, y).distance
        hyp = HypothesisSet((("x", x), ("y", y)))
        spec = BehavioralModelSpec("boltzmann", mdp_4x3, beta=1.0)
        f = materialize_model(spec, list(hyp.rewards))
        g = ModelTable((("x", f.policy("y")), ("y", f.policy("x"))))
        eps_star = min_robust_epsilon(f, g, hyp, mdp_4x3)
        assert eps_star <= d0 + 1e-8


class TestTwoEpsilonLemma:
    def test_holds_on_robust_relabeling(self, mdp_4x3):
        hyp, f, g = _swap_tables(mdp_4x3)
        assert two_epsilon_lemma_check(f, g, hyp, mdp_4x3, epsilon=0.0)

    def test_precondition_enforced(self, mdp_4x3):
        hyp, f, _ = _swap_tables(mdp_4x3)
        with pytest.raises(InvalidInstance, match="precondition"):
            two_epsilon_lemma_check(f, f, hyp, mdp_4x3, epsilon=0.0)

    def test_detects_synthetic_violation(self, mdp_4x3, monkeypatch):
        # A genuine metric can never produce a robust verdict whose g-collisions
        # exceed 2*eps (triangle inequality), so break the metric on purpose to
        # confirm the check would notice.
        hyp, f, _ = _swap_tables(mdp_4x3)
        g_colliding = ModelTable((("x", f.policy("x")), ("x2", f.policy("x"))))
        zeros = {("x", "x"): 0.0, ("x2", "x2"): 0.0, ("x", "x2"): 0.0, ("x2", "x"): 0.0}
        inflated = {**zeros, ("x", "x2"): 0.7, ("x2", "x"): 0.7}
        # The checker (first lookup) sees zero distances, so the verdict is
        # robust; the lemma's own lookup then sees 0.7 > 2 * 0.3 on the g-g
        # collision between x and x2 and must return False.
        tables = iter([zeros, inflated])
        monkeypatch.setattr(robustness_module, "_pair_distances", lambda *_: next(tables))
        assert not two_epsilon_lemma_check(f, g_colliding, hyp, mdp_4x3, epsilon=0.3)


class TestTransformationBound:
    def test_invariant_chain_true_at_zero(self, mdp_4x3, reward_4x3):
        chain = TransformChain((Shaping(np.arange(4.0)), Scale(2.0)))
        ok, reports = verify_transformation_bound(mdp_4x3, chain, [reward_4x3], epsilon=0.0)
        assert ok
        assert reports[0]["distance"] < 1e-10

    def test_nudge_at_bound_keeps_distance_within_epsilon(self, mdp_4x3, reward_4x3):
        eps = 0.1
        unit = standardize(mdp_4x3, reward_4x3)
        canon = canonicalize(mdp_4x3, reward_4x3)
        perp = standardize(mdp_4x3, random_reward(70, 4, 3))
        perp = perp - (perp * unit).sum() * unit
        perp /= np.linalg.norm(perp)
        delta = canon.norm * nudge_bound(eps) * perp
        chain = TransformChain((Nudge(delta),))
        ok, reports = verify_transformation_bound(mdp_4x3, chain, [reward_4x3], epsilon=eps)
        assert ok
        assert reports[0]["distance"] <= eps + 1e-8

    def test_oversized_nudge_breaks_distance_somewhere(self, mdp_4x3, reward_4x3):
        eps = 0.1
        canon = canonicalize(mdp_4x3, reward_4x3)
        unit = canon.canonical / canon.norm
        perp = standardize(mdp_4x3, random_reward(70, 4, 3))
        perp = perp - (perp * unit).sum() * unit
        perp /= np.linalg.norm(perp)
        radius = 2.0 * canon.norm * nudge_bound(eps)
        worst = 0.0
        for phi in np.linspace(0, 2 * math.pi, 64, endpoint=False):
            delta = radius * (math.cos(phi) * unit + math.sin(phi) * perp)
            worst = max(
                worst, starc_distance(mdp_4x3, reward_4x3, reward_4x3 + delta).distance
            )
        assert worst > eps

    def test_multiple_nudges_rejected(self, mdp_4x3, reward_4x3):
        chain = TransformChain((Nudge(np.zeros((4, 3, 4))), Nudge(np.zeros((4, 3, 4)))))
        with pytest.raises(InvalidInstance, match="more than one nudge"):
            verify_transformation_bound(mdp_4x3, chain, [reward_4x3], epsilon=0.1)


class TestDecompose:
    def test_identity_target_zero_nudge(self, mdp_4x3, reward_4x3):
        chain = decompose_transformation(mdp_4x3, reward_4x3, reward_4x3)
        nudges = [s for s in chain.steps if isinstance(s, Nudge)]
        assert all(np.linalg.norm(s.delta) < 1e-9 for s in nudges)

    def test_order_equivalent_target_zero_nudge(self, mdp_4x3, reward_4x3):
        target = 2.0 * apply_potential_shaping(mdp_4x3, reward_4x3, np.arange(4.0))
        chain = decompose_transformation(mdp_4x3, reward_4x3, target)
        nudges = [s for s in chain.steps if isinstance(s, Nudge)]
        assert all(np.linalg.norm(s.delta) < 1e-7 for s in nudges)
        assert starc_distance(mdp_4x3, reward_4x3, target).distance < 1e-8

    def test_random_pair_recomposes(self):
        from starclab.transforms import apply_chain

        for i in range(10):
            mdp = random_mdp(80 + i, 4, 2)
            r_1 = random_reward(90 + i, 4, 2)
            r_2 = random_reward(95 + i, 4, 2)
            chain = decompose_transformation(mdp, r_1, r_2)
            out = apply_chain(mdp, r_1, chain)
            assert np.linalg.norm(out - r_2) < 1e-8 * max(1.0, np.linalg.norm(r_2))

    def test_trivial_target_rejected_for_nontrivial_source(self, mdp_4x3, reward_4x3):
        with pytest.raises(InvalidInstance, match="trivial"):
            decompose_transformation(mdp_4x3, reward_4x3, np.full((4, 3, 4), 1.0))


class TestDiscountCounterexample:
    def test_chain_certificate(self):
        cert = discount_counterexample(three_state_chain(), 0.9, 0.95)
        assert cert.policy_gap < 1e-6
        assert cert.distance == pytest.approx(1.0, abs=1e-6)
        assert cert.verify()

    def test_swapped_discounts_also_valid(self):
        cert = discount_counterexample(three_state_chain(), 0.95, 0.9)
        assert cert.policy_gap < 1e-6
        assert cert.distance == pytest.approx(1.0, abs=1e-6)

    def test_equal_discounts_rejected(self):
        with pytest.raises(InvalidInstance):
            discount_counterexample(three_state_chain(), 0.9, 0.9)

    def test_json_round_trip_preserves_verification(self):
        cert = discount_counterexample(three_state_chain(), 0.5, 0.9)
        again = CounterexampleCertificate.from_dict(cert.to_dict())
        assert again.verify()


class TestTransitionCounterexample:
    def test_gridworld_demo_certificate(self):
        cert = gridworld_demo(n=3)
        assert cert.policy_gap < 1e-6
        assert cert.distance >= 0.99
        assert cert.verify()

    def test_gridworld_conditional_means_match(self):
        cert = gridworld_demo(n=3)
        gap = np.abs(expected_reward(cert.mdp_gen, cert.reward_1 - cert.reward_2)).max()
        assert gap < 1e-9

    def test_identical_kernels_rejected(self, mdp_4x3):
        with pytest.raises(InvalidInstance):
            transition_counterexample(mdp_4x3, mdp_4x3)

    def test_torus_rows_stochastic(self):
        mdp = torus_gridworld(4, slippery=True)
        assert np.abs(mdp.transition.sum(axis=2) - 1.0).max() < 1e-12


class TestPerturbationCounterexample:
    def test_equal_norms_and_distance_one(self, mdp_4x3):
        cert = perturbation_counterexample(mdp_4x3, delta=1e-2, c=1.0)
        assert np.linalg.norm(cert.reward_1) == pytest.approx(1.0, abs=1e-9)
        assert np.linalg.norm(cert.reward_2) == pytest.approx(1.0, abs=1e-9)
        assert cert.distance == pytest.approx(1.0, abs=1e-6)
        assert cert.policy_gap < 1e-2
        assert cert.verify()

    def test_gap_lands_in_band(self, mdp_4x3):
        cert = perturbation_counterexample(mdp_4x3, delta=1e-3)
        assert cert.policy_gap <= 1e-3

    def test_discrete_model_rejected(self, mdp_4x3):
        with pytest.raises(InvalidInstance, match="continuous"):
            perturbation_counterexample(mdp_4x3, model_kind="optimal_uniform")


class TestSeparationWitness:
    def test_witness_found_for_modest_epsilon(self):
        mdp = random_mdp(55, 4, 3)
        model = BehavioralModelSpec("boltzmann", mdp, beta=1.0)
        witness = separation_witness_search(
            model, mdp, PolicyMetricSpec("l2"), epsilon=0.9, delta=1e-2, budget=1000
        )
        assert witness is not None
        r_1, r_2 = witness
        assert starc_distance(mdp, r_1, r_2).distance > 0.9
        assert PolicyMetricSpec("l2").distance(mdp, model(r_1), model(r_2)) <= 1e-2

    def test_epsilon_above_one_inconclusive(self, mdp_4x3):
        model = BehavioralModelSpec("boltzmann", mdp_4x3, beta=1.0)
        assert (
            separation_witness_search(
                model, mdp_4x3, PolicyMetricSpec("l2"), epsilon=1.1, delta=0.1, budget=10
            )
            is None
        )

    def test_exact_delta_zero_inconclusive(self, mdp_4x3):
        model = BehavioralModelSpec("boltzmann", mdp_4x3, beta=1.0)
        assert (
            separation_witness_search(
                model, mdp_4x3, PolicyMetricSpec("l2"), epsilon=0.5, delta=0.0, budget=20
            )
            is None
        )


class TestOptimalityWitness:
    def test_hand_example_one_state_three_actions(self, one_state_mdp):
        mdp = one_state_mdp(3)
        r_1 = np.array([[[1.0], [0.0], [0.0]]])
        r_2 = np.array([[[1.0], [0.5], [0.0]]])
        assert np.array_equal(
            optimal_policy_uniform(mdp, r_1), optimal_policy_uniform(mdp, r_2)
        )
        assert starc_distance(mdp, r_1, r_2).distance > 0

    def test_witness_on_one_state_three_actions(self, one_state_mdp):
        mdp = one_state_mdp(3)
        r_1, r_2 = optimality_nonrobustness_witness(mdp)
        gap = np.abs(optimal_policy_uniform(mdp, r_1) - optimal_policy_uniform(mdp, r_2)).max()
        assert gap < 1e-6
        assert starc_distance(mdp, r_1, r_2).distance > 1e-3

    def test_witness_on_three_state_mdp(self):
        mdp = random_mdp(77, 3, 2)
        r_1, r_2 = optimality_nonrobustness_witness(mdp, max_samples=100)
        assert starc_distance(mdp, r_1, r_2).distance > 1e-3

    def test_excluded_size_rejected(self, one_state_mdp):
        with pytest.raises(InvalidInstance, match="no witness exists"):
            optimality_nonrobustness_witness(one_state_mdp(2))
