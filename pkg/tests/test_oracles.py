import numpy as np
import pytest

from starclab import (
    apply_potential_shaping,
    enumerate_deterministic_policies,
    monte_carlo_return,
    policy_return,
    random_mdp,
    random_reward,
    regret_witness_search,
    same_order_oracle,
    starc_distance,
)
from starclab.oracles import EnumerationCapExceeded


class TestEnumeration:
    def test_counts(self):
        assert len(enumerate_deterministic_policies(random_mdp(0, 2, 2))) == 4
        assert len(enumerate_deterministic_policies(random_mdp(0, 3, 4))) == 64

    def test_cap_exceeded(self):
        with pytest.raises(EnumerationCapExceeded, match="sampled"):
            enumerate_deterministic_policies(random_mdp(0, 10, 5))

    def test_policies_are_deterministic_and_exhaustive(self):
        policies = enumerate_deterministic_policies(random_mdp(0, 2, 3))
        seen = {tuple(p.argmax(axis=1)) for p in policies}
        assert len(seen) == 9
        for p in policies:
            assert set(np.unique(p)) <= {0.0, 1.0}


class TestSameOrder:
    def test_order_equivalent_pair(self):
        mdp = random_mdp(1, 3, 2)
        reward = random_reward(2, 3, 2)
        other = 2.0 * apply_potential_shaping(mdp, reward, np.arange(3.0))
        assert same_order_oracle(mdp, reward, other)

    def test_negation_pair(self):
        mdp = random_mdp(3, 3, 2)
        reward = random_reward(4, 3, 2)
        assert not same_order_oracle(mdp, reward, -reward)

    def test_agreement_with_distance(self):
        for i in range(20):
            mdp = random_mdp(100 + i, 3, 2)
            r_1 = random_reward(200 + i, 3, 2)
            r_2 = (
                3.0 * apply_potential_shaping(mdp, r_1, np.ones(3))
                if i % 2
                else random_reward(300 + i, 3, 2)
            )
            d = starc_distance(mdp, r_1, r_2).distance
            assert (d < 1e-8) == same_order_oracle(mdp, r_1, r_2, seed=i)


class TestMonteCarlo:
    def test_zero_reward(self, mdp_4x3):
        policy = np.full((4, 3), 1 / 3)
        assert monte_carlo_return(mdp_4x3, np.zeros((4, 3, 4)), policy, 50, 100, 0) == (0.0, 0.0)

    def test_deterministic_chain(self, one_state_mdp):
        mdp = one_state_mdp(1, discount=0.5)
        estimate, stderr = monte_carlo_return(
            mdp, np.ones((1, 1, 1)), np.ones((1, 1)), horizon=60, n_rollouts=100, seed=0
        )
        assert estimate == pytest.approx(2.0, abs=1e-9)
        assert stderr == pytest.approx(0.0, abs=1e-12)

    def test_statistical_agreement(self):
        mdp = random_mdp(5, 4, 2, discount=0.8)
        reward = random_reward(6, 4, 2)
        policy = np.full((4, 2), 0.5)
        horizon = int(np.ceil(np.log(1e-8) / np.log(mdp.discount)))
        estimate, stderr = monte_carlo_return(mdp, reward, policy, horizon, 50_000, seed=1)
        assert abs(estimate - policy_return(mdp, reward, policy)) < 3 * stderr

    def test_seed_determinism(self, mdp_4x3, reward_4x3):
        policy = np.full((4, 3), 1 / 3)
        a = monte_carlo_return(mdp_4x3, reward_4x3, policy, 30, 1000, seed=7)
        b = monte_carlo_return(mdp_4x3, reward_4x3, policy, 30, 1000, seed=7)
        assert a == b


class TestRegretWitness:
    def test_identical_rewards(self):
        mdp = random_mdp(7, 3, 2)
        reward = random_reward(8, 3, 2)
        regret, _ = regret_witness_search(mdp, reward, reward)
        assert regret < 1e-12

    def test_negation_attains_one_with_extreme_witnesses(self):
        mdp = random_mdp(9, 3, 2)
        reward = random_reward(10, 3, 2)
        regret, (pi_1, pi_2) = regret_witness_search(mdp, reward, -reward)
        assert regret == pytest.approx(1.0, abs=1e-8)
        returns = [
            policy_return(mdp, reward, p) for p in enumerate_deterministic_policies(mdp)
        ]
        assert policy_return(mdp, reward, pi_1) == pytest.approx(max(returns), abs=1e-9)
        assert policy_return(mdp, reward, pi_2) == pytest.approx(min(returns), abs=1e-9)

    def test_interpolation_family_endpoints_and_range(self):
        mdp = random_mdp(11, 3, 2)
        reward = random_reward(12, 3, 2)
        values = []
        for t in (0.0, 0.25, 0.5, 0.75, 1.0):
            other = (1 - t) * reward + t * (-reward)
            regret, _ = regret_witness_search(mdp, reward, other)
            values.append(regret)
        assert values[0] < 1e-12
        assert values[-1] == pytest.approx(1.0, abs=1e-8)
        assert all(0.0 <= v <= 1.0 + 1e-12 for v in values)
