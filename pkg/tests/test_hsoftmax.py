import numpy as np
import pytest

from conftest import make_toy_model
from sensevec.hsoftmax import grad_log_p_word, log_p_word


def brute_force_distribution(model, word, sense):
    return np.array(
        [np.exp(log_p_word(model, v, word, sense)) for v in range(model.n_words)]
    )


class TestLogPWord:
    def test_zero_vectors_give_half_per_node(self):
        m = make_toy_model(randomize=False, dtype=np.float64)
        for v in range(m.n_words):
            path_len = len(m.codes.nodes[v])
            assert log_p_word(m, v, 0, 0) == pytest.approx(
                path_len * np.log(0.5), abs=1e-12
            )

    def test_normalizes_over_vocabulary(self, rng):
        """Brute-force enumeration: sum_v p(v | w, k) = 1."""
        for seed in range(5):
            m = make_toy_model(n_words=4, n_senses=2, dim=6, seed=seed)
            for w in range(4):
                total = brute_force_distribution(m, w, seed % 2).sum()
                assert total == pytest.approx(1.0, abs=1e-9)

    def test_single_node_path_is_one_sigmoid(self):
        m = make_toy_model(n_words=2, n_senses=1, dim=5, seed=4)
        v = 0
        assert len(m.codes.nodes[v]) == 1
        s = float(m.in_vecs[1, 0] @ m.out_vecs[m.codes.nodes[v][0]])
        sign = m.codes.signs[v][0]
        expected = np.log(1.0 / (1.0 + np.exp(-sign * s)))
        assert log_p_word(m, v, 1, 0) == pytest.approx(expected, abs=1e-12)

    def test_never_minus_infinity(self):
        m = make_toy_model(n_words=4, dim=4, seed=2, scale=300.0)
        vals = [log_p_word(m, v, 0, 0) for v in range(4)]
        assert np.isfinite(vals).all()


class TestGradLogPWord:
    def test_zero_model_gradients(self):
        """sigma(0) = 0.5: grad_in vanishes (zero outputs), grad_out is
        0.5 * sign * prototype."""
        m = make_toy_model(randomize=False, dtype=np.float64)
        v, w, k = 1, 0, 0
        grad_in, grad_out = grad_log_p_word(m, v, w, k)
        np.testing.assert_array_equal(grad_in, np.zeros(m.dim))
        for (node, vec), sign in zip(grad_out, m.codes.signs[v]):
            np.testing.assert_allclose(vec, 0.5 * sign * m.in_vecs[w, k], atol=1e-15)

    def test_matches_finite_differences(self, rng):
        """Central-difference oracle, float64, h = 1e-6."""
        h = 1e-6
        checked = 0
        for seed in range(8):
            m = make_toy_model(n_words=6, n_senses=3, dim=5, seed=seed)
            for _ in range(16):
                v = int(rng.integers(m.n_words))
                w = int(rng.integers(m.n_words))
                k = int(rng.integers(m.n_senses))
                grad_in, grad_out = grad_log_p_word(m, v, w, k)
                fd_in = np.empty(m.dim)
                for d in range(m.dim):
                    orig = m.in_vecs[w, k, d]
                    m.in_vecs[w, k, d] = orig + h
                    up = log_p_word(m, v, w, k)
                    m.in_vecs[w, k, d] = orig - h
                    down = log_p_word(m, v, w, k)
                    m.in_vecs[w, k, d] = orig
                    fd_in[d] = (up - down) / (2 * h)
                np.testing.assert_allclose(grad_in, fd_in, rtol=1e-6, atol=1e-9)
                for node, vec in grad_out:
                    fd_node = np.empty(m.dim)
                    for d in range(m.dim):
                        orig = m.out_vecs[node, d]
                        m.out_vecs[node, d] = orig + h
                        up = log_p_word(m, v, w, k)
                        m.out_vecs[node, d] = orig - h
                        down = log_p_word(m, v, w, k)
                        m.out_vecs[node, d] = orig
                        fd_node[d] = (up - down) / (2 * h)
                    np.testing.assert_allclose(vec, fd_node, rtol=1e-6, atol=1e-9)
                checked += 1
        assert checked >= 100

    def test_gradient_of_total_probability_vanishes(self, rng):
        """d/dtheta sum_v p(v) = 0: differentiating a constant."""
        m = make_toy_model(n_words=16, n_senses=2, dim=6, seed=11)
        w, k = 3, 1
        total_in = np.zeros(m.dim)
        total_out = np.zeros_like(m.out_vecs)
        for v in range(m.n_words):
            p = np.exp(log_p_word(m, v, w, k))
            grad_in, grad_out = grad_log_p_word(m, v, w, k)
            total_in += p * grad_in  # d p(v) = p(v) * d log p(v)
            for node, vec in grad_out:
                total_out[node] += p * vec
        np.testing.assert_allclose(total_in, 0.0, atol=1e-8)
        np.testing.assert_allclose(total_out, 0.0, atol=1e-8)

    def test_directional_descent(self, rng):
        """Moving the prototype against its gradient lowers log_p_word."""
        m = make_toy_model(n_words=8, n_senses=2, dim=6, seed=5)
        for _ in range(10):
            v = int(rng.integers(8))
            w = int(rng.integers(8))
            grad_in, _ = grad_log_p_word(m, v, w, 0)
            if np.linalg.norm(grad_in) < 1e-9:
                continue
            before = log_p_word(m, v, w, 0)
            m.in_vecs[w, 0] -= 1e-4 * grad_in
            after = log_p_word(m, v, w, 0)
            m.in_vecs[w, 0] += 1e-4 * grad_in
            assert after < before
