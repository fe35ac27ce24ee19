"""
Time until maneuver.

A varying-time model is evaluated on each sequence truncated to 30, 60, 90,
120 and 150 frames, i.e. 5, 4, 3, 2 and 1 seconds before the maneuver.
Under the default "stable" rule a sequence's TUM is the seconds-before of
the earliest checkpoint from which every later checkpoint is correct, and 0
when the last one is wrong. "first-correct" takes the earliest correct
checkpoint; "last-switch" takes the start of the last run of correct
checkpoints.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ArgumentError
from ..features import KEEP_FRAMES, seconds_before, truncate_and_pad
from .metrics import predict_all

SECONDS = tuple(seconds_before(k) for k in KEEP_FRAMES)
TUM_RULES = ('stable', 'first-correct', 'last-switch')


def tum_from_correctness(correct, rule='stable'):
    """TUM in seconds for one sequence's checkpoint correctness, ordered
    from 5 s to 1 s before the maneuver."""
    correct = [bool(c) for c in correct]
    if len(correct) != len(SECONDS):
        raise ArgumentError("need %d checkpoints, got %d"
                            % (len(SECONDS), len(correct)))
    if rule == 'stable':
        i = len(correct)
        while i > 0 and correct[i - 1]:
            i -= 1
        return SECONDS[i] if i < len(correct) else 0
    if rule == 'first-correct':
        return next((s for s, c in zip(SECONDS, correct) if c), 0)
    if rule == 'last-switch':
        start = None
        for i, c in enumerate(correct):
            if c and (i == 0 or not correct[i - 1]):
                start = i
        return SECONDS[start] if start is not None else 0
    raise ArgumentError("unknown TUM rule %r, expected one of %s"
                        % (rule, "|".join(TUM_RULES)))


@dataclass
class CheckpointAccuracy:
    # keep_frames -> accuracy
    by_keep: dict

    @property
    def by_seconds(self):
        return {seconds_before(k): v for k, v in self.by_keep.items()}

    def rows(self):
        """(seconds_before, accuracy) from 5 s down to 1 s."""
        return [(seconds_before(k), self.by_keep[k]) for k in KEEP_FRAMES]

    def to_dict(self):
        return {str(s): acc for s, acc in self.rows()}


@dataclass
class TumResult:
    mean_tum: float
    checkpoint: CheckpointAccuracy
    per_sequence: list
    # (n_sequences, 5) correctness, 5 s first
    correct: np.ndarray

    def to_dict(self):
        return {'mean_tum': self.mean_tum,
                'checkpoint_accuracy': self.checkpoint.to_dict()}


def checkpoint_correctness(model, sequences, mask=(True, True, True)):
    sequences = list(sequences)
    labels = np.array([s.label for s in sequences], dtype=np.int64)
    correct = np.zeros((len(sequences), len(KEEP_FRAMES)), dtype=bool)
    for j, keep in enumerate(KEEP_FRAMES):
        cut = [truncate_and_pad(s, keep) for s in sequences]
        correct[:, j] = predict_all(model, cut, mask) == labels
    return correct


def tum_from_matrix(correct, rule='stable'):
    correct = np.asarray(correct, dtype=bool)
    per_seq = [tum_from_correctness(row, rule) for row in correct]
    accuracy = {k: float(correct[:, j].mean()) if len(correct) else 0.0
                for j, k in enumerate(KEEP_FRAMES)}
    return TumResult(float(np.mean(per_seq)) if per_seq else 0.0,
                     CheckpointAccuracy(accuracy), per_seq, correct)


def compute_tum(model, sequences, rule='stable', mask=(True, True, True)):
    """Mean TUM and per-checkpoint accuracy of a varying-time model."""
    return tum_from_matrix(checkpoint_correctness(model, sequences, mask),
                           rule)
