"""The exact-enumeration oracle is the reference for everything else, so
it gets verified first, against hand-solved chains and closed forms that
do not depend on any package code."""

import numpy as np
import pytest

import gbvar
from conftest import random_params


def two_state_stationary(p01: float, p11: float) -> float:
    # pi(1) for a binary chain with P(1|0)=p01, P(1|1)=p11, by hand:
    # pi1 = pi0 p01 + pi1 p11 and pi0 + pi1 = 1
    return p01 / (1.0 - p11 + p01)


class TestStateTable:
    def test_bit_convention(self):
        S = gbvar.state_table(3)
        assert S.shape == (8, 3)
        # state index 5 = binary 101 -> coordinates (1, 0, 1)
        assert S[5].tolist() == [1, 0, 1]
        assert S[0].tolist() == [0, 0, 0]
        assert S[7].tolist() == [1, 1, 1]

    def test_rows_unique(self):
        S = gbvar.state_table(4)
        assert len({tuple(r) for r in S}) == 16


class TestTransitionMatrix:
    def test_scalar_positive_coefficient(self):
        # alpha=0.5, beta=0.5, mu=0.5: P(1|0) = 0.5*0 + 0.5*0.5 = 0.25
        params = gbvar.validate_params([np.array([[0.5]])],
                                       np.array([0.5]), np.array([0.5]))
        chain = gbvar.exact_transition_matrix(params)
        assert chain.transition[0, 1] == pytest.approx(0.25, abs=1e-14)
        assert chain.transition[1, 1] == pytest.approx(0.75, abs=1e-14)
        assert chain.stationary[1] == pytest.approx(
            two_state_stationary(0.25, 0.75), abs=1e-12)

    def test_scalar_negative_coefficient(self):
        # alpha=-0.5 flips the lag: P(1|0) = 0.5*1 + 0.25 = 0.75
        params = gbvar.validate_params([np.array([[-0.5]])],
                                       np.array([0.5]), np.array([0.5]))
        chain = gbvar.exact_transition_matrix(params)
        assert chain.transition[0, 1] == pytest.approx(0.75, abs=1e-14)
        assert chain.transition[1, 1] == pytest.approx(0.25, abs=1e-14)
        assert chain.stationary[1] == pytest.approx(0.5, abs=1e-12)
        assert gbvar.stationary_mean(params)[0] == pytest.approx(0.5, abs=1e-12)

    def test_no_dependence_rows_equal(self, rng):
        d = 3
        mu_e = np.array([0.3, 0.5, 0.7])
        params = gbvar.validate_params([np.zeros((d, d))], np.ones(d), mu_e)
        chain = gbvar.exact_transition_matrix(params)
        assert np.allclose(chain.transition, chain.transition[0], atol=1e-14)

    def test_rows_stochastic_random(self, rng):
        for _ in range(25):
            d = int(rng.integers(1, 5))
            chain = gbvar.exact_transition_matrix(random_params(rng, d))
            sums = chain.transition.sum(axis=1)
            assert np.abs(sums - 1.0).max() < 1e-12
            assert chain.transition.min() >= 0.0

    def test_stationary_fixed_point(self, rng):
        for _ in range(10):
            chain = gbvar.exact_transition_matrix(random_params(rng, 3))
            pi = chain.stationary
            assert pi.min() >= 0
            assert pi.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.abs(pi @ chain.transition - pi).max() < 1e-12

    def test_dimension_guard(self):
        d = 13
        params = gbvar.validate_params([np.zeros((d, d))], np.ones(d),
                                       0.5 * np.ones(d))
        with pytest.raises(gbvar.DimensionTooLarge):
            gbvar.exact_transition_matrix(params)


class TestExactMoments:
    def test_iid_case(self):
        d = 3
        params = gbvar.validate_params([np.zeros((d, d))], np.ones(d),
                                       0.5 * np.ones(d))
        chain = gbvar.exact_transition_matrix(params)
        mom = gbvar.exact_stationary_moments(chain)
        assert np.allclose(mom.mu, 0.5, atol=1e-12)
        assert np.allclose(mom.sigma0, 0.25 * np.eye(d), atol=1e-12)
        assert np.allclose(mom.sigma1, 0.0, atol=1e-12)

    def test_scalar_closed_form(self):
        params = gbvar.validate_params([np.array([[0.5]])],
                                       np.array([0.5]), np.array([0.5]))
        mom = gbvar.exact_stationary_moments(gbvar.exact_transition_matrix(params))
        assert mom.mu[0] == pytest.approx(0.5, abs=1e-12)
        assert mom.sigma0[0, 0] == pytest.approx(0.25, abs=1e-12)
        assert mom.sigma1[0, 0] == pytest.approx(0.125, abs=1e-12)

    def test_moment_identity_example1(self, example1):
        mom = gbvar.exact_stationary_moments(
            gbvar.exact_transition_matrix(example1))
        A = example1.coef[0]
        assert np.abs(mom.sigma1 - A @ mom.sigma0).max() < 1e-10

    def test_moment_identity_random(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 5))
            params = random_params(rng, d)
            mom = gbvar.exact_stationary_moments(
                gbvar.exact_transition_matrix(params))
            assert np.abs(mom.sigma1 - params.coef[0] @ mom.sigma0).max() < 1e-10

    def test_mean_matches_linear_solve(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 5))
            params = random_params(rng, d)
            chain = gbvar.exact_transition_matrix(params)
            mom = gbvar.exact_stationary_moments(chain)
            assert np.abs(mom.mu - gbvar.stationary_mean(params)).max() < 1e-10

    def test_degenerate_chain_rejected(self):
        # validated parameters always mix (beta > 0, mu_e interior), so
        # exercise the guard on a hand-built absorbing chain
        chain = gbvar.ExactChain(
            d=1, states=gbvar.state_table(1),
            cond=np.array([[0.0], [1.0]]),
            transition=np.eye(2),
            stationary=np.array([0.5, 0.5]))
        with pytest.raises(gbvar.NotIrreducible):
            gbvar.exact_stationary_moments(chain)


class TestConditionalMeans:
    def test_matches_transition(self, rng):
        # P(X_k = 1 | x) read off the transition matrix must equal the
        # direct conditional-mean formula
        params = random_params(rng, 3)
        chain = gbvar.exact_transition_matrix(params)
        cond = gbvar.conditional_means(params)
        S = gbvar.state_table(3)
        implied = chain.transition @ S
        assert np.abs(implied - cond).max() < 1e-12
