#!/usr/bin/env python

"""
Dataset tests: synthetic generation, manifests, real-data ingest and
stratified folds.
"""

import json
import os
import tempfile
import unittest
from collections import Counter

import numpy as np

from mfusion.exceptions import ArgumentError, ConfigError, DatasetError, \
    DatasetIOError, EmptyDatasetError, ValidationError
from mfusion.dataset import DatasetManifest, REFERENCE_CLASS_COUNTS, \
    SynthConfig, generate_synthetic, ingest_real, load_layout, \
    occupancy_stump_accuracy, stratified_kfold
from mfusion.dataset.manifest import meta_path
from mfusion.features import FRAME_WIDTH, LabeledSequence, SEQ_LEN
from mfusion.geometry import GazeVector, write_gaze


def blank_manifest(counts):
    """Zero-frame sequences with the given per-class counts."""
    seqs = [LabeledSequence("s%04d" % i, np.zeros((SEQ_LEN, FRAME_WIDTH)),
                            label)
            for i, label in enumerate(label for label, n in enumerate(counts)
                                      for _ in range(n))]
    return DatasetManifest(seqs)


class TestSynthetic(unittest.TestCase):

    def test_deterministic(self):
        a = generate_synthetic(SynthConfig(n_sequences=20, seed=1))
        b = generate_synthetic(SynthConfig(n_sequences=20, seed=1))
        self.assertEqual(a.ids, b.ids)
        for x, y in zip(a, b):
            self.assertTrue(x.equals(y))

    def test_seed_changes_data(self):
        a = generate_synthetic(SynthConfig(n_sequences=5, seed=1))
        b = generate_synthetic(SynthConfig(n_sequences=5, seed=2))
        self.assertFalse(all(x.equals(y) for x, y in zip(a, b)))

    def test_ids_and_meta(self):
        manifest = generate_synthetic(SynthConfig(n_sequences=3, seed=4))
        self.assertEqual(manifest.ids, ['synth-00000', 'synth-00001',
                                        'synth-00002'])
        meta = manifest.meta()
        self.assertEqual(meta['source'], 'synthetic')
        self.assertEqual(meta['provenance']['config']['seed'], 4)
        self.assertEqual(sum(meta['class_counts']), 3)

    def test_reference_distribution(self):
        config = SynthConfig.from_counts(REFERENCE_CLASS_COUNTS,
                                         n_sequences=594, seed=3)
        counts = np.array(generate_synthetic(config).class_counts)
        expected = np.array(REFERENCE_CLASS_COUNTS)
        p = expected / expected.sum()
        # five binomial standard deviations
        bound = 5 * np.sqrt(594 * p * (1 - p))
        self.assertTrue(np.all(np.abs(counts - expected) <= bound))

    def test_config_validation(self):
        with self.assertRaises(ValidationError):
            SynthConfig(class_distribution=[0.5, 0.5, 0.5, 0.0, 0.0])
        with self.assertRaises(ValidationError):
            SynthConfig(class_distribution=[0.25] * 4)
        with self.assertRaises(ValidationError):
            SynthConfig(gaze_signal_strength=1.5)
        with self.assertRaises(ValidationError):
            SynthConfig(noise_sigma=-0.1)

    def test_planted_exterior_signal(self):
        manifest = generate_synthetic(SynthConfig(n_sequences=200, seed=1))
        self.assertGreater(occupancy_stump_accuracy(manifest), 0.2)

    def test_exterior_strength_zero_is_uninformative(self):
        flat, planted = (generate_synthetic(SynthConfig(
            n_sequences=2000, seed=5, exterior_signal_strength=strength))
            for strength in (0.0, 0.8))
        self.assertLess(occupancy_stump_accuracy(flat), 0.25)
        self.assertGreater(occupancy_stump_accuracy(planted),
                           occupancy_stump_accuracy(flat) + 0.03)

        def leftmost_share(manifest):
            # share of sequences in lane 1, per maneuver
            pos = np.array([s.lanes[0, 0] for s in manifest])
            labels = np.array([s.label for s in manifest])
            return np.array([np.mean(pos[labels == c] == 1)
                             for c in range(5)])

        self.assertLess(np.ptp(leftmost_share(flat)), 0.15)
        self.assertGreater(np.ptp(leftmost_share(planted)), 0.3)

    def test_from_dict(self):
        config = SynthConfig.from_dict({'n_sequences': 4, 'seed': 9})
        self.assertEqual((config.n_sequences, config.seed), (4, 9))
        with self.assertRaises(ConfigError):
            SynthConfig.from_dict({'n': 5})

    def test_empty(self):
        manifest = generate_synthetic(SynthConfig(n_sequences=0))
        self.assertEqual(len(manifest), 0)
        with self.assertRaises(EmptyDatasetError):
            manifest.require_nonempty()


class TestManifest(unittest.TestCase):

    def setUp(self):
        self.manifest = generate_synthetic(SynthConfig(n_sequences=6, seed=2))
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'data.jsonl')

    def tearDown(self):
        self.tmp.cleanup()

    def test_save_load(self):
        self.manifest.save(self.path)
        again = DatasetManifest.load(self.path)
        self.assertEqual(again.ids, self.manifest.ids)
        self.assertEqual(again.source, 'synthetic')
        self.assertEqual(again.class_counts, self.manifest.class_counts)

    def test_sidecar_mismatch(self):
        self.manifest.save(self.path)
        with open(meta_path(self.path)) as f:
            meta = json.load(f)
        meta['class_counts'] = [6, 0, 0, 0, 0]
        with open(meta_path(self.path), 'w') as f:
            json.dump(meta, f)
        with self.assertRaises(DatasetError):
            DatasetManifest.load(self.path)

    def test_subset(self):
        ids = self.manifest.ids[3:0:-1]
        self.assertEqual(self.manifest.subset(ids).ids, ids)
        with self.assertRaises(DatasetError):
            self.manifest.subset(['nope'])

    def test_duplicate_ids(self):
        seq = self.manifest.sequences[0]
        with self.assertRaises(DatasetError):
            DatasetManifest([seq, seq])

    def test_unknown_source(self):
        with self.assertRaises(DatasetError):
            DatasetManifest([], 'scraped')


class TestIngest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def video(self, folder, name, n_frames=SEQ_LEN):
        path = os.path.join(self.root, folder, name)
        os.makedirs(path)
        write_gaze(os.path.join(path, 'gaze.jsonl'),
                   [(i, GazeVector(0.01 * i, 0.0, -0.02, 0.1))
                    for i in range(n_frames)])
        with open(os.path.join(path, 'detections.jsonl'), 'w') as f:
            for i in range(n_frames):
                f.write(json.dumps({'frame': i, 'boxes': [
                    [0.5, 0.5, 0.2, 0.1, 0], [0.9, 0.95, 0.1, 0.04, 5]]})
                    + "\n")
        with open(os.path.join(path, 'lanes.json'), 'w') as f:
            json.dump({'lane_position': 2, 'num_lanes': 3,
                       'near_intersection': 0}, f)

    def test_ingest(self):
        self.video('lchange', 'v1')
        self.video('rturn', 'v2')
        self.video('rturn', 'v3', n_frames=149)
        manifest = ingest_real(self.root)
        self.assertEqual(manifest.ids, ['lchange/v1', 'rturn/v2'])
        self.assertEqual([s.label for s in manifest], [1, 4])
        self.assertEqual(manifest.source, 'real-adapter')
        self.assertEqual(manifest.provenance['skipped'], 1)
        seq = manifest.get('lchange/v1')
        np.testing.assert_allclose(seq.gaze[3], [0.03, 0.0, -0.02, 0.1])
        np.testing.assert_array_equal(seq.lanes[0], [2.0, 3.0, 0.0])
        # the timestamp box never reaches the encoder
        self.assertEqual(seq.frame(0).objects[4], 0.0)
        self.assertEqual(seq.frame(0).objects[9], -1.0)

    def test_empty_root(self):
        with self.assertRaises(EmptyDatasetError):
            ingest_real(self.root)

    def test_missing_root(self):
        with self.assertRaises(DatasetIOError):
            ingest_real(os.path.join(self.root, 'absent'))

    def test_layout_override(self):
        path = os.path.join(self.root, 'layout.json')
        with open(path, 'w') as f:
            json.dump({'folders': {'left': 1}}, f)
        layout = load_layout(path)
        self.assertEqual(layout['folders'], {'left': 1})
        self.assertEqual(layout['gaze'], '{video}/gaze.jsonl')
        self.video('left', 'a')
        self.assertEqual(ingest_real(self.root, layout).ids, ['left/a'])

    def test_bad_layout(self):
        path = os.path.join(self.root, 'layout.json')
        with open(path, 'w') as f:
            json.dump({'folders': {'left': 7}}, f)
        with self.assertRaises(DatasetError):
            load_layout(path)


class TestFolds(unittest.TestCase):

    def assertPartition(self, manifest, split):
        tested = [sid for _, test in split for sid in test]
        self.assertEqual(sorted(tested), sorted(manifest.ids))
        for train, test in split:
            self.assertFalse(set(train) & set(test))
            self.assertEqual(len(train) + len(test), len(manifest))

    def test_forced_stratification(self):
        manifest = blank_manifest([2] * 5)
        split = stratified_kfold(manifest, 2, seed=0)
        self.assertPartition(manifest, split)
        for _, test in split:
            labels = sorted(manifest.get(sid).label for sid in test)
            self.assertEqual(labels, [0, 1, 2, 3, 4])

    def test_reference_counts(self):
        manifest = blank_manifest(REFERENCE_CLASS_COUNTS)
        split = stratified_kfold(manifest, 10, seed=1)
        self.assertPartition(manifest, split)
        sizes = {len(test) for _, test in split}
        self.assertEqual(sizes, {59, 60})
        for label in range(5):
            per_fold = [Counter(manifest.get(sid).label for sid in test)
                        [label] for _, test in split]
            self.assertLessEqual(max(per_fold) - min(per_fold), 1)

    def test_seeded(self):
        manifest = blank_manifest([6, 5, 4, 5, 6])
        self.assertEqual(stratified_kfold(manifest, 3, seed=5),
                         stratified_kfold(manifest, 3, seed=5))
        self.assertNotEqual(stratified_kfold(manifest, 3, seed=5),
                            stratified_kfold(manifest, 3, seed=6))

    def test_k_too_large(self):
        with self.assertRaises(ArgumentError):
            stratified_kfold(blank_manifest([2] * 5), 3)
        with self.assertRaises(ArgumentError):
            stratified_kfold(blank_manifest([2] * 5), 1)


if __name__ == '__main__':
    unittest.main()
