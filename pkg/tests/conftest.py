import numpy as np
import pytest

from starclab import TabularMdp, random_mdp, random_reward


@pytest.fixture
def mdp_4x3():
    return random_mdp(0, 4, 3)


@pytest.fixture
def reward_4x3():
    return random_reward(1, 4, 3)


@pytest.fixture
def one_state_mdp():
    def make(n_actions: int, discount: float = 0.9) -> TabularMdp:
        return TabularMdp(
            transition=np.ones((1, n_actions, 1)),
            initial_dist=np.array([1.0]),
            discount=discount,
        )

    return make
