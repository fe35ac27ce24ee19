#!/usr/bin/env python

"""
Feature encoder and sequence tests.
"""

import os
import tempfile
import unittest

import numpy as np

from mfusion.exceptions import ArgumentError, LengthError, ValidationError
from mfusion.features import EMPTY_SLOT, FRAME_WIDTH, KEEP_FRAMES, SEQ_LEN, \
    Detection, FrameFeatures, LabeledSequence, LaneInfo, assemble_sequence, \
    encode_lanes, encode_objects, read_sequences, seconds_before, \
    slot_areas, truncate_and_pad, write_sequences
from mfusion.dataset import SynthConfig, generate_synthetic
from mfusion.geometry import GazeVector


def empty_streams():
    return ([np.zeros(4)] * SEQ_LEN, [[] for _ in range(SEQ_LEN)],
            [LaneInfo(1, 1, 0)] * SEQ_LEN)


class TestEncodeObjects(unittest.TestCase):

    def test_empty_scene(self):
        np.testing.assert_array_equal(encode_objects([]),
                                      np.tile(EMPTY_SLOT, 5))

    def test_area_order(self):
        small = Detection(0.5, 0.5, 0.2, 0.1, 0)
        large = Detection(0.3, 0.4, 0.4, 0.3, 2)
        out = encode_objects([small, large])
        np.testing.assert_allclose(out[:5], [0.3, 0.4, 0.3, 0.4, 2])
        np.testing.assert_allclose(out[5:10], [0.5, 0.5, 0.1, 0.2, 0])
        np.testing.assert_array_equal(out[10:], np.tile(EMPTY_SLOT, 3))

    def test_keeps_five_largest(self):
        rng = np.random.default_rng(3)
        dets = [Detection(float(rng.uniform()), float(rng.uniform()),
                          float(rng.uniform(0.05, 0.5)),
                          float(rng.uniform(0.05, 0.5)),
                          int(rng.integers(0, 5))) for _ in range(7)]
        out = encode_objects(dets)
        expected = sorted((d.area for d in dets), reverse=True)[:5]
        np.testing.assert_allclose(slot_areas(out), expected)
        self.assertTrue(np.all(np.diff(slot_areas(out)) <= 0))

    def test_ties_by_center(self):
        a = Detection(0.6, 0.2, 0.1, 0.1, 1)
        b = Detection(0.2, 0.9, 0.1, 0.1, 3)
        c = Detection(0.2, 0.1, 0.1, 0.1, 4)
        out = encode_objects([a, b, c])
        self.assertEqual(list(out[4:15:5]), [4.0, 3.0, 1.0])

    def test_class_validation(self):
        with self.assertRaises(ValidationError):
            Detection(0.5, 0.5, 0.1, 0.1, 5)
        with self.assertRaises(ValidationError):
            Detection(0.5, 1.5, 0.1, 0.1, 0)
        with self.assertRaises(ValidationError):
            Detection(0.5, 0.5, 0.0, 0.1, 0)

    def test_date_dropped(self):
        self.assertIsNone(Detection.from_detector(0.5, 0.5, 0.1, 0.1, 5))
        self.assertEqual(Detection.from_detector(0.5, 0.5, 0.1, 0.1, 4),
                         Detection(0.5, 0.5, 0.1, 0.1, 4))


class TestEncodeLanes(unittest.TestCase):

    def test_direct(self):
        np.testing.assert_array_equal(encode_lanes(LaneInfo(1, 1, 0)),
                                      [1.0, 1.0, 0.0])
        np.testing.assert_array_equal(encode_lanes(LaneInfo(2, 3, 1)),
                                      [2.0, 3.0, 1.0])

    def test_position_beyond_lanes(self):
        with self.assertRaises(ValidationError):
            LaneInfo(4, 3, 0)


class TestSequences(unittest.TestCase):

    def setUp(self):
        self.seq = generate_synthetic(
            SynthConfig(n_sequences=3, seed=1)).sequences[0]

    def test_all_zero_streams(self):
        seq = assemble_sequence(*empty_streams(), label=0)
        self.assertEqual(seq.frames.shape, (SEQ_LEN, FRAME_WIDTH))
        self.assertEqual(seq.valid_frames, SEQ_LEN)
        for t in (0, 75, 149):
            frame = seq.frame(t)
            np.testing.assert_array_equal(frame.gaze, 0.0)
            np.testing.assert_array_equal(frame.objects,
                                          np.tile(EMPTY_SLOT, 5))
            np.testing.assert_array_equal(frame.lanes, [1.0, 1.0, 0.0])

    def test_gaze_vectors_accepted(self):
        gaze, objects, lanes = empty_streams()
        gaze = [GazeVector(0.1, 0.2, 0.3, 0.4)] * SEQ_LEN
        seq = assemble_sequence(gaze, objects, lanes, 2, 'x')
        np.testing.assert_array_equal(seq.gaze[10], [0.1, 0.2, 0.3, 0.4])
        self.assertEqual(seq.maneuver, 'left-turn')

    def test_short_stream(self):
        gaze, objects, lanes = empty_streams()
        with self.assertRaises(LengthError):
            assemble_sequence(gaze[:149], objects, lanes, 0)

    def test_frame_width(self):
        vec = self.seq.frame(3).as_vector()
        self.assertEqual(vec.shape, (FRAME_WIDTH,))
        np.testing.assert_array_equal(
            FrameFeatures.from_vector(vec).as_vector(), vec)

    def test_truncate_identity(self):
        self.assertTrue(truncate_and_pad(self.seq, 150).equals(self.seq))

    def test_truncate_zero_pads(self):
        cut = truncate_and_pad(self.seq, 30)
        np.testing.assert_array_equal(cut.frames[:30], self.seq.frames[:30])
        np.testing.assert_array_equal(cut.frames[30:], 0.0)
        self.assertEqual(cut.valid_frames, 30)

    def test_truncate_nests(self):
        self.assertTrue(truncate_and_pad(truncate_and_pad(self.seq, 60), 30)
                        .equals(truncate_and_pad(self.seq, 30)))

    def test_truncate_bad_keep(self):
        with self.assertRaises(ArgumentError):
            truncate_and_pad(self.seq, 45)

    def test_seconds_before(self):
        self.assertEqual([seconds_before(k) for k in KEEP_FRAMES],
                         [5, 4, 3, 2, 1])

    def test_nonzero_padding_rejected(self):
        frames = self.seq.frames.copy()
        with self.assertRaises(ValidationError):
            LabeledSequence('bad', frames, 0, valid_frames=100)

    def test_non_finite_rejected(self):
        frames = self.seq.frames.copy()
        frames[7, 2] = np.inf
        with self.assertRaises(ValidationError):
            LabeledSequence('bad', frames, 0)
        record = self.seq.to_dict()
        record['frames'][0][0] = float('nan')
        with self.assertRaises(ValidationError):
            LabeledSequence.from_dict(record)

    def test_file_round_trip(self):
        seqs = generate_synthetic(SynthConfig(n_sequences=4, seed=1)) \
            .sequences
        seqs.append(truncate_and_pad(seqs[0], 60))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'seqs.jsonl')
            write_sequences(path, seqs)
            again = read_sequences(path)
        self.assertEqual(len(again), len(seqs))
        for a, b in zip(seqs, again):
            self.assertTrue(a.equals(b))

    def test_bad_record_names_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'seqs.jsonl')
            write_sequences(path, [self.seq])
            with open(path, 'a') as f:
                f.write('{"id": "short", "label": 0, "frames": [[0]]}\n')
            with self.assertRaises(ValidationError) as ctx:
                read_sequences(path)
        self.assertIn("line 2", str(ctx.exception))


if __name__ == '__main__':
    unittest.main()
