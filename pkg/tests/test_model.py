import numpy as np
import pytest
import scipy.special

from conftest import make_toy_model, make_vocabulary
from sensevec.huffman import build_huffman
from sensevec.model import (
    beta_parameters,
    expected_log_pi,
    init_model,
    prior_sense_probs,
    prior_sense_probs_all,
    sense_count,
)


def fresh_model(freqs, n_senses, alpha, dim=4, seed=0, dtype=np.float64):
    vocab = make_vocabulary(freqs)
    codes = build_huffman(vocab.freq)
    return init_model(vocab, codes, dim=dim, n_senses=n_senses, alpha=alpha,
                      seed=seed, dtype=dtype)


class TestInitModel:
    def test_counts_start_on_first_sense(self):
        m = fresh_model([50, 20, 10], n_senses=4, alpha=0.5)
        np.testing.assert_array_equal(m.counts[:, 0], [50, 20, 10])
        assert (m.counts[:, 1:] == 0).all()
        np.testing.assert_array_equal(m.counts.sum(axis=1), m.vocab.freq)

    def test_uniform_bounds(self):
        m = fresh_model([9, 5, 3], n_senses=2, alpha=0.2, dim=300)
        assert (m.in_vecs > -1.0 / 600).all()
        assert (m.in_vecs < 1.0 / 600).all()

    def test_out_vectors_zero(self):
        m = fresh_model([9, 5], n_senses=2, alpha=0.2)
        assert (m.out_vecs == 0).all()

    def test_seed_determinism(self):
        a = fresh_model([9, 5, 3], n_senses=3, alpha=0.2, seed=42)
        b = fresh_model([9, 5, 3], n_senses=3, alpha=0.2, seed=42)
        assert np.array_equal(a.in_vecs, b.in_vecs)
        c = fresh_model([9, 5, 3], n_senses=3, alpha=0.2, seed=43)
        assert not np.array_equal(a.in_vecs, c.in_vecs)

    def test_dtype_option(self):
        assert fresh_model([5, 4], 2, 0.1, dtype=np.float32).in_vecs.dtype == np.float32
        assert fresh_model([5, 4], 2, 0.1, dtype=np.float64).in_vecs.dtype == np.float64

    def test_validation(self):
        vocab = make_vocabulary([5, 4])
        codes = build_huffman(vocab.freq)
        with pytest.raises(ValueError):
            init_model(vocab, codes, dim=0, n_senses=1, alpha=0.1)
        with pytest.raises(ValueError):
            init_model(vocab, codes, dim=2, n_senses=1, alpha=0.0)


class TestBetaParameters:
    def test_tail_sums(self):
        a, b = beta_parameters(np.array([3.0, 2.0, 1.0]), alpha=0.5)
        np.testing.assert_allclose(a, [4.0, 3.0, 2.0])
        np.testing.assert_allclose(b, [3.5, 1.5, 0.5])

    def test_single_sense(self):
        a, b = beta_parameters(np.array([7.0]), alpha=0.25)
        assert a.tolist() == [8.0]
        assert b.tolist() == [0.25]


class TestExpectedLogPi:
    def test_single_sense_is_zero(self):
        m = fresh_model([10, 5], n_senses=1, alpha=1.0)
        np.testing.assert_array_equal(expected_log_pi(m, 0), [0.0])

    def test_digamma_closed_form(self):
        """Counts (10, 0), alpha=1: [psi(11)-psi(12), psi(1)-psi(12)]."""
        m = fresh_model([10, 4], n_senses=2, alpha=1.0)
        psi = scipy.special.digamma
        expected = [psi(11) - psi(12), psi(1) - psi(12)]
        np.testing.assert_allclose(expected_log_pi(m, 0), expected, atol=1e-12)

    def test_monte_carlo_cross_check(self, rng):
        """E[log beta] estimated from Beta(11, 1) samples."""
        m = fresh_model([10, 4], n_senses=2, alpha=1.0)
        draws = rng.beta(11.0, 1.0, size=400_000)
        mc = np.log(draws).mean()
        se = np.log(draws).std() / np.sqrt(draws.size)
        assert abs(expected_log_pi(m, 0)[0] - mc) < 5 * se

    def test_jensen_exp_sums_below_one(self, rng):
        for _ in range(20):
            m = make_toy_model(n_senses=5, seed=int(rng.integers(1e6)))
            total = np.exp(expected_log_pi(m, 0)).sum()
            assert total <= 1.0 + 1e-9

    def test_jensen_entrywise_vs_prior(self, rng):
        for _ in range(20):
            m = make_toy_model(n_senses=4, seed=int(rng.integers(1e6)))
            elp = expected_log_pi(m, 1)
            prior = prior_sense_probs(m, 1)
            assert (elp <= np.log(prior) + 1e-12).all()


class TestPriorSenseProbs:
    def test_single_sense(self):
        m = fresh_model([10, 5], n_senses=1, alpha=1.0)
        np.testing.assert_array_equal(prior_sense_probs(m, 0), [1.0])

    def test_fresh_init_closed_form(self):
        """freq 100, alpha 0.1, T=2: [101/101.1, 1 - 101/101.1]."""
        m = fresh_model([100, 7], n_senses=2, alpha=0.1)
        p = prior_sense_probs(m, 0)
        assert p[0] == pytest.approx(101.0 / 101.1, abs=1e-12)
        assert p[1] == pytest.approx(1.0 - 101.0 / 101.1, abs=1e-12)

    def test_monte_carlo_integration(self, rng):
        """Stick-breaking prior by simulation: 1e6 Beta draws per entry."""
        counts = np.array([40.0, 10.0, 3.0, 0.0])
        alpha = 0.3
        m = fresh_model([53, 7], n_senses=4, alpha=alpha)
        m.counts[0] = counts
        a, b = beta_parameters(counts, alpha)
        n = 1_000_000
        sticks = rng.beta(a, b, size=(n, 4))
        sticks[:, -1] = 1.0
        probs = sticks.copy()
        probs[:, 1:] *= np.cumprod(1.0 - sticks[:, :-1], axis=1)
        np.testing.assert_allclose(
            prior_sense_probs(m, 0), probs.mean(axis=0), atol=3e-3
        )

    def test_sums_to_one(self, rng):
        for _ in range(25):
            m = make_toy_model(n_senses=6, seed=int(rng.integers(1e6)))
            for w in range(m.n_words):
                assert prior_sense_probs(m, w).sum() == pytest.approx(1.0, abs=1e-12)

    def test_monotone_in_own_count(self):
        m = make_toy_model(n_senses=4, seed=3)
        w, k = 2, 1
        before = prior_sense_probs(m, w)[k]
        m.counts[w, k] += 5.0
        assert prior_sense_probs(m, w)[k] > before

    def test_vectorized_matches_per_word(self):
        m = make_toy_model(n_words=7, n_senses=5, seed=9)
        allp = prior_sense_probs_all(m)
        for w in range(m.n_words):
            np.testing.assert_allclose(allp[w], prior_sense_probs(m, w), atol=1e-15)


class TestSenseCount:
    def test_zero_epsilon_counts_all(self):
        m = make_toy_model(n_senses=5, seed=1)
        assert sense_count(m, 0, 0.0) == 5

    def test_fresh_init_single_sense(self):
        m = fresh_model([100, 7], n_senses=2, alpha=0.1)
        assert sense_count(m, 0, 1e-3) == 1

    def test_epsilon_one_counts_none(self):
        m = make_toy_model(n_senses=5, seed=1)
        assert sense_count(m, 0, 1.0) == 0

    def test_rejects_negative_epsilon(self):
        m = make_toy_model(seed=1)
        with pytest.raises(ValueError):
            sense_count(m, 0, -0.1)
