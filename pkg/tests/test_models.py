#!/usr/bin/env python

"""
F-LSTM and F-TF model tests.
"""

import os
import tempfile
import unittest

import numpy as np

from mfusion.exceptions import ConfigError, LengthError, ValidationError
from mfusion.dataset import SynthConfig, generate_synthetic
from mfusion.models import FLstmConfig, FTfConfig, build, config_for, \
    count_parameters, decide, flstm_forward, ftf_forward, init_params, \
    layout, load_checkpoint, predict, save_checkpoint, zero_params

SMALL_FLSTM = FLstmConfig(gaze_hidden=3, lane_hidden=2, object_hidden=3,
                          mlp_hidden=6, seq_len=6)
SMALL_FTF = FTfConfig(gaze_latent=4, object_latent=2, lane_latent=2,
                      n_heads=2, head_hidden=6, ff_hidden=5, seq_len=6)


def random_input(seq_len, batch=None, seed=0):
    shape = (seq_len, 32) if batch is None else (batch, seq_len, 32)
    return np.random.default_rng(seed).normal(size=shape)


class TestConfig(unittest.TestCase):

    def test_parameter_counts(self):
        self.assertEqual(count_parameters(FLstmConfig()), 377825)
        self.assertEqual(count_parameters(FTfConfig()), 2494853)
        self.assertEqual(init_params(FLstmConfig()).num_params, 377825)

    def test_flatten_widths(self):
        self.assertEqual(FLstmConfig().flatten_width, 3750)
        self.assertEqual(FTfConfig().flatten_width, 9600)
        self.assertEqual(FTfConfig().token_dim, 64)

    def test_heads_divide_tokens(self):
        with self.assertRaises(ValidationError):
            FTfConfig(n_heads=5)

    def test_from_dict(self):
        self.assertEqual(config_for('ftf', {'n_heads': 8}).n_heads, 8)
        with self.assertRaises(ConfigError):
            config_for('flstm', {'heads': 2})
        with self.assertRaises(ConfigError):
            config_for('gru')
        self.assertEqual(FLstmConfig.from_dict(FLstmConfig().to_dict()),
                         FLstmConfig())


class TestForward(unittest.TestCase):

    def test_zero_params_uniform(self):
        seq = generate_synthetic(SynthConfig(n_sequences=1, seed=3)) \
            .sequences[0]
        for config, forward in ((FLstmConfig(), flstm_forward),
                                (FTfConfig(), ftf_forward)):
            probs = forward(seq, zero_params(config))
            np.testing.assert_allclose(probs, np.full(5, 0.2), atol=1e-12)

    def test_flstm_underflow_falls_back_to_uniform(self):
        params = zero_params(SMALL_FLSTM)
        params.store['mlp.fc2.b'] = np.full(5, -1000.0)
        model = build(params)
        X = random_input(6, batch=2)
        np.testing.assert_array_equal(model.probs(X), np.full((2, 5), 0.2))
        loss = model.loss_and_grad(X, np.array([0, 3]))
        self.assertAlmostEqual(loss, np.log(5))
        for path in model.store:
            self.assertTrue(np.all(np.isfinite(model.store.grad(path))),
                            path)

    def test_simplex(self):
        for config in (SMALL_FLSTM, SMALL_FTF):
            model = build(init_params(config, seed=4))
            for seed in range(5):
                probs = model.probs(random_input(6, seed=seed))
                self.assertEqual(probs.shape, (5,))
                self.assertTrue(np.all(probs > 0) and np.all(probs < 1))
                self.assertAlmostEqual(probs.sum(), 1.0, places=12)

    def test_batch_matches_single(self):
        for config in (SMALL_FLSTM, SMALL_FTF):
            model = build(init_params(config, seed=5))
            X = random_input(6, batch=3, seed=1)
            batch = model.probs(X)
            for i in range(3):
                np.testing.assert_allclose(batch[i], model.probs(X[i]),
                                           atol=1e-12)

    def test_wrong_frame_count(self):
        model = build(init_params(SMALL_FLSTM))
        with self.assertRaises(LengthError):
            model.probs(np.zeros((7, 32)))
        with self.assertRaises(LengthError):
            model.probs(np.zeros((6, 31)))

    def test_wrong_architecture(self):
        with self.assertRaises(ConfigError):
            ftf_forward(np.zeros((6, 32)), init_params(SMALL_FLSTM))

    def test_flstm_causal(self):
        model = build(init_params(SMALL_FLSTM, seed=6))
        X = random_input(6, seed=2)
        before = model.encode(X)
        X[4:] += 1.0
        after = model.encode(X)
        np.testing.assert_array_equal(after[:4], before[:4])
        self.assertFalse(np.allclose(after[4:], before[4:]))

    def test_ftf_permutation_equivariance(self):
        perm = np.array([3, 0, 5, 1, 4, 2])
        X = random_input(6, seed=3)
        plain = build(init_params(SMALL_FTF.replace(
            positional_encoding=False), seed=7))
        np.testing.assert_allclose(plain.encode(X[perm]),
                                   plain.encode(X)[perm], atol=1e-12)
        positional = build(init_params(SMALL_FTF, seed=7))
        self.assertFalse(np.allclose(positional.encode(X[perm]),
                                     positional.encode(X)[perm]))

    def test_attention_weights(self):
        model = build(init_params(SMALL_FTF, seed=8))
        weights = model.attention(random_input(6, seed=4))
        self.assertEqual(weights.shape, (1, 2, 6, 6))
        np.testing.assert_allclose(weights.sum(axis=-1), 1.0, atol=1e-12)


class TestDecide(unittest.TestCase):

    def test_tie_goes_to_lowest(self):
        self.assertEqual(decide([0.1, 0.3, 0.1, 0.3, 0.2]), 1)
        self.assertEqual(decide(np.full(5, 0.2)), 0)

    def test_batch(self):
        np.testing.assert_array_equal(
            decide(np.array([[0.1, 0.6, 0.1, 0.1, 0.1],
                             [0.1, 0.1, 0.1, 0.1, 0.6]])), [1, 4])

    def test_predict(self):
        params = init_params(SMALL_FTF, seed=9)
        idx, probs = predict(params, random_input(6, seed=5))
        self.assertIsInstance(idx, int)
        self.assertEqual(idx, int(np.argmax(probs)))


class TestParams(unittest.TestCase):

    def test_init_deterministic(self):
        self.assertTrue(init_params(SMALL_FTF, 3).equals(
            init_params(SMALL_FTF, 3)))
        self.assertFalse(init_params(SMALL_FTF, 3).equals(
            init_params(SMALL_FTF, 4)))

    def test_init_values(self):
        config = FTfConfig()
        store = init_params(config, 1).store
        for path, shape, kind in layout(config):
            value = store[path]
            if kind == 'bias':
                np.testing.assert_array_equal(value, 0.0)
            elif kind == 'gamma':
                np.testing.assert_array_equal(value, 1.0)
            else:
                self.assertLessEqual(np.max(np.abs(value)),
                                     1.0 / np.sqrt(shape[1]))

    def test_copy_is_independent(self):
        params = init_params(SMALL_FLSTM, 1)
        other = params.copy()
        other.store['mlp.fc2.b'][:] = 1.0
        self.assertFalse(params.equals(other))

    def test_checkpoint_round_trip(self):
        params = init_params(SMALL_FTF.replace(extra_projection=True), 2)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'model.mfw')
            save_checkpoint(path, params, {'epochs_run': 3})
            again = load_checkpoint(path)
        self.assertTrue(again.equals(params))
        self.assertEqual(again.config, params.config)
        self.assertEqual(again.seed, 2)
        X = random_input(6, seed=6)
        np.testing.assert_array_equal(build(again).probs(X),
                                      build(params).probs(X))


if __name__ == '__main__':
    unittest.main()
