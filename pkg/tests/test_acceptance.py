#!/usr/bin/env python

"""
Long end-to-end checks on synthetic data. Set MF_SLOW_TESTS=1 to run them.
"""

import os
import unittest

from mfusion.dataset import SynthConfig, generate_synthetic
from mfusion.evaluation import TrainConfig, evaluate, run_ablation, \
    run_benchmark, train
from mfusion.models import FLstmConfig, FTfConfig

SLOW = os.environ.get('MF_SLOW_TESTS')


@unittest.skipUnless(SLOW, "set MF_SLOW_TESTS=1 for acceptance runs")
class TestOverfit(unittest.TestCase):

    def test_both_models_memorize(self):
        data = generate_synthetic(SynthConfig(n_sequences=20, seed=1))
        config = TrainConfig(epochs=500, early_stop_patience=0,
                             validation_fraction=0.0)
        for model_config in (FLstmConfig(), FTfConfig()):
            params, _ = train(data, model_config, config)
            self.assertEqual(evaluate(params, data).accuracy, 1.0,
                             model_config.arch)


@unittest.skipUnless(SLOW, "set MF_SLOW_TESTS=1 for acceptance runs")
class TestSyntheticBenchmarks(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.data = generate_synthetic(SynthConfig(
            n_sequences=500, seed=1, exterior_signal_strength=0.8))

    def test_exterior_features_help(self):
        table = run_ablation(self.data, k=5, seed=1)
        acc = {name: overall for name, _, overall in table.rows()}
        self.assertGreaterEqual(acc['F-LSTM'] - acc['F-LSTM-A'], 0.10)
        self.assertGreaterEqual(acc['F-TF'] - acc['F-TF-A'], 0.10)

    def test_profile_rises_toward_maneuver(self):
        report = run_benchmark(self.data, FTfConfig(), 'varying', k=5,
                               seed=1)
        accuracies = [acc for _, acc in report.checkpoint.rows()]
        for earlier, later in zip(accuracies, accuracies[1:]):
            self.assertGreaterEqual(later, earlier - 0.02)
        self.assertGreater(report.mean_tum, 0.0)


if __name__ == '__main__':
    unittest.main()
