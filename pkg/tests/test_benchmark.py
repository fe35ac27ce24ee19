#!/usr/bin/env python

"""
Benchmark protocol, ablation and report writer tests on a tiny model.
"""

import csv
import os
import tempfile
import unittest

from mfusion.exceptions import ArgumentError
from mfusion.dataset import SynthConfig, generate_synthetic
from mfusion.evaluation import TrainConfig, run_ablation, run_benchmark
from mfusion.evaluation.report import format_ablation, format_report, \
    to_json, write_checkpoint_csv, write_profile_svg
from mfusion.evaluation.tum import CheckpointAccuracy
from mfusion.models import FLstmConfig, FTfConfig

TINY_FLSTM = FLstmConfig(gaze_hidden=3, lane_hidden=2, object_hidden=3,
                         mlp_hidden=6)
TINY_FTF = FTfConfig(gaze_latent=4, object_latent=2, lane_latent=2,
                     n_heads=2, head_hidden=6, ff_hidden=5)
FAST = TrainConfig(epochs=2, batch_size=8, learning_rate=1e-2,
                   early_stop_patience=0)


def small_manifest(per_class=2):
    """per_class sequences of each maneuver from one synthetic run."""
    data = generate_synthetic(SynthConfig(n_sequences=80, seed=1))
    ids = []
    for label in range(5):
        ids += [s.id for s in data if s.label == label][:per_class]
    return data.subset(ids)


class TestBenchmark(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.data = small_manifest()

    def run_small(self, protocol='zero', **kwargs):
        kwargs.setdefault('jobs', 1)
        return run_benchmark(self.data, TINY_FLSTM, protocol, k=2, seed=1,
                             train_config=FAST, chance_draws=50, **kwargs)

    def test_zero_time(self):
        report = self.run_small()
        self.assertEqual(len(report.folds), 2)
        self.assertEqual([f.n_test for f in report.folds], [5, 5])
        self.assertEqual(report.metrics.confusion.sum(), 10)
        self.assertIsNone(report.checkpoint)
        self.assertAlmostEqual(report.prior, 0.2)
        d = report.to_dict()
        self.assertEqual(d['protocol'], 'zero')
        self.assertEqual(d['mask'], 'all')
        self.assertNotIn('mean_tum', d)

    def test_repeatable(self):
        a, b = self.run_small(), self.run_small()
        self.assertEqual(a.to_dict(), b.to_dict())

    def test_worker_pool_matches_serial(self):
        self.assertEqual(self.run_small(jobs=2).to_dict(),
                         self.run_small(jobs=1).to_dict())

    def test_varying_time(self):
        report = self.run_small('varying', modality_mask='interior')
        rows = report.checkpoint.rows()
        self.assertEqual([s for s, _ in rows], [5, 4, 3, 2, 1])
        self.assertTrue(0.0 <= report.mean_tum <= 5.0)
        # the full-length evaluation is the 1 s checkpoint
        self.assertAlmostEqual(report.accuracy, rows[-1][1])
        self.assertEqual(report.to_dict()['mask'], 'interior')

    def test_both(self):
        report = self.run_small('both')
        one_second = report.checkpoint.rows()[-1][1]
        self.assertAlmostEqual(report.accuracy_drop,
                               report.accuracy - one_second)
        self.assertIn('varying_accuracy', report.extra)
        text = format_report(report)
        self.assertIn('mean TUM (stable)', text)
        self.assertIn('drop', text)

    def test_bad_arguments(self):
        with self.assertRaises(ArgumentError):
            self.run_small('sometimes')
        with self.assertRaises(ArgumentError):
            self.run_small(modality_mask='exterior')
        with self.assertRaises(ArgumentError):
            self.run_small(tum_rule='eventually')
        with self.assertRaises(ArgumentError):
            run_benchmark(self.data, TINY_FLSTM, k=3, train_config=FAST)

    def test_ablation(self):
        table = run_ablation(self.data, k=2, seed=1, train_config=FAST,
                             flstm_config=TINY_FLSTM, ftf_config=TINY_FTF,
                             jobs=1)
        self.assertEqual([name for name, _, _ in table.rows()],
                         ['F-LSTM-A', 'F-LSTM', 'F-TF-A', 'F-TF'])
        self.assertEqual(table.reports['F-TF-A'].mask, (True, False, False))
        self.assertIn('F-LSTM-A', format_ablation(table))
        self.assertEqual(len(table.to_dict()['rows']), 4)
        self.assertIn('"classes"', to_json(table))

    def test_ablation_subset(self):
        table = run_ablation(self.data, k=2, train_config=FAST,
                             flstm_config=TINY_FLSTM, jobs=1,
                             models=('flstm',))
        self.assertEqual(list(table.reports), ['F-LSTM-A', 'F-LSTM'])


class TestProfileFiles(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.checkpoint = CheckpointAccuracy(
            {30: 0.5, 60: 0.625, 90: 0.75, 120: 0.8, 150: 0.875})

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_csv(self):
        write_checkpoint_csv(self.path('p.csv'), self.checkpoint)
        with open(self.path('p.csv')) as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ['seconds_before', 'accuracy'])
        self.assertEqual(rows[1:], [['5', '0.5'], ['4', '0.625'],
                                    ['3', '0.75'], ['2', '0.8'],
                                    ['1', '0.875']])

    def test_svg_deterministic(self):
        write_profile_svg(self.path('a.svg'), self.checkpoint, 'F-TF')
        write_profile_svg(self.path('b.svg'), self.checkpoint, 'F-TF')
        with open(self.path('a.svg'), 'rb') as a, \
                open(self.path('b.svg'), 'rb') as b:
            first, second = a.read(), b.read()
        self.assertTrue(first.startswith(b'<?xml'))
        self.assertEqual(first, second)


if __name__ == '__main__':
    unittest.main()
