"""
Deterministic synthetic driving scenarios with a plantable signal.

Interior channels (head and gaze) reveal the side of an upcoming maneuver:
from an onset frame the gaze drifts toward that side, with saccade-like
jumps, and the head follows at a fraction of the amplitude. Lane changes
and turns drift by overlapping amounts, so gaze alone separates sides but
hardly separates a lane change from a turn. Mirror-check glances appear in
every class.

Exterior channels carry the rest. With probability exterior_signal_strength
a sequence is "informative": a left lane change starts away from the
leftmost lane and a right one away from the rightmost, a left turn starts
in the leftmost lane and a right turn in the rightmost, turns approach an
intersection before the onset, and an adjacent-lane car is never present on
the side of a lane change. Uninformative sequences draw all of that
independently of the label, so at strength 0 the exterior channels carry no
label information.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigError, ValidationError
from ..features import Detection, LaneInfo, MANEUVERS, OBJECTS, SEQ_LEN, \
    assemble_sequence
from ..features.encode import OBJECT_SLOTS, SLOT_WIDTH
from .manifest import DatasetManifest

log = logging.getLogger(__name__)

STRAIGHT, LEFT_CHANGE, LEFT_TURN, RIGHT_CHANGE, RIGHT_TURN = range(5)
SIDE = {LEFT_CHANGE: -1, LEFT_TURN: -1, RIGHT_CHANGE: 1, RIGHT_TURN: 1}
TURNS = (LEFT_TURN, RIGHT_TURN)

ONSET_RANGE = (30, 120)
MAX_LANES = 4
ADJACENT_PRIOR = 0.4
INTERSECTION_PRIOR = 0.3
INFORMATIVE_INTERSECTION = 0.1
LEAD_CAR_PRIOR = 0.5
HEAD_FOLLOW = 0.4
# adjacent-lane cars sit left or right of these image x positions
LEFT_ADJACENT_X = 0.35
RIGHT_ADJACENT_X = 0.65
CAR = 0
DATE = 5


@dataclass
class SynthConfig:
    n_sequences: int = 200
    class_distribution: list = field(
        default_factory=lambda: [0.2, 0.2, 0.2, 0.2, 0.2])
    gaze_signal_strength: float = 0.8
    exterior_signal_strength: float = 0.8
    noise_sigma: float = 0.05
    seed: int = 1

    def __post_init__(self):
        dist = np.asarray(self.class_distribution, dtype=np.float64)
        if dist.shape != (len(MANEUVERS),) or np.any(dist < 0) or \
                abs(dist.sum() - 1.0) > 1e-9:
            raise ValidationError("class_distribution must be 5 "
                                  "non-negative values summing to 1, got %s"
                                  % (list(self.class_distribution),))
        for name in ('gaze_signal_strength', 'exterior_signal_strength'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError("%s must be in [0, 1], got %r"
                                      % (name, value))
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")
        if self.n_sequences < 0:
            raise ValidationError("n_sequences must be >= 0")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        d = dict(d or {})
        unknown = set(d) - known
        if unknown:
            raise ConfigError("synth: unknown settings %s"
                              % ", ".join(sorted(unknown)))
        return cls(**d)

    @classmethod
    def from_counts(cls, counts, **kwargs):
        counts = np.asarray(counts, dtype=np.float64)
        return cls(class_distribution=list(counts / counts.sum()), **kwargs)

    def to_dict(self):
        return {'n_sequences': self.n_sequences,
                'class_distribution': list(self.class_distribution),
                'gaze_signal_strength': self.gaze_signal_strength,
                'exterior_signal_strength': self.exterior_signal_strength,
                'noise_sigma': self.noise_sigma, 'seed': self.seed}


def _lanes(label, informative, rng):
    if informative and label in (LEFT_CHANGE, RIGHT_CHANGE):
        num = int(rng.integers(2, MAX_LANES + 1))
        pos = int(rng.integers(2, num + 1)) if label == LEFT_CHANGE else \
            int(rng.integers(1, num))
    elif informative and label in TURNS:
        num = int(rng.integers(1, MAX_LANES + 1))
        pos = 1 if label == LEFT_TURN else num
    else:
        num = int(rng.integers(1, MAX_LANES + 1))
        pos = int(rng.integers(1, num + 1))
    return pos, num


def _intersection(label, informative, onset, rng):
    """Per-frame near_intersection flags."""
    flags = np.zeros(SEQ_LEN, dtype=np.int64)
    if informative:
        if label in TURNS:
            flags[int(rng.integers(0, onset + 1)):] = 1
        elif rng.random() < INFORMATIVE_INTERSECTION:
            flags[int(rng.integers(0, SEQ_LEN)):] = 1
    elif rng.random() < INTERSECTION_PRIOR:
        flags[int(rng.integers(0, SEQ_LEN)):] = 1
    return flags


def _gaze(label, onset, config, rng):
    t = np.arange(SEQ_LEN)
    base = 0.05 * np.sin(t / rng.uniform(8.0, 20.0) + rng.uniform(0, 6.3))
    gaze_x = base.copy()
    gaze_y = 0.03 * np.sin(t / rng.uniform(10.0, 25.0))
    head_x = 0.5 * base
    head_y = np.zeros(SEQ_LEN)

    # mirror checks: left mirror, right mirror, rear-view mirror
    for _ in range(int(rng.integers(0, 3))):
        start = int(rng.integers(0, SEQ_LEN - 10))
        length = int(rng.integers(6, 16))
        target = [(-0.6, 0.0), (0.6, 0.0), (0.0, -0.3)][rng.integers(0, 3)]
        sl = slice(start, start + length)
        gaze_x[sl] += target[0]
        gaze_y[sl] += target[1]
        head_x[sl] += HEAD_FOLLOW * target[0]

    if label in SIDE and rng.random() < config.gaze_signal_strength:
        side = SIDE[label]
        amplitude = rng.uniform(0.4, 0.8) if label in TURNS else \
            rng.uniform(0.3, 0.7)
        ramp = rng.uniform(15.0, 45.0)
        phase = np.clip((t - onset) / ramp, 0.0, 1.0)
        drift = side * amplitude * phase
        for _ in range(int(rng.integers(1, 4))):
            start = int(rng.integers(onset, SEQ_LEN))
            drift[start:start + int(rng.integers(4, 9))] += \
                0.5 * side * amplitude
        gaze_x += drift
        head_x += HEAD_FOLLOW * drift

    gaze = np.stack([head_x, head_y, gaze_x, gaze_y], axis=1)
    return gaze + rng.normal(0.0, config.noise_sigma, gaze.shape)


def _track(cx, cy, w, h, cls, rng, sigma):
    """Per-frame raw boxes for one object drifting slightly."""
    t = np.arange(SEQ_LEN)
    wobble = 0.01 * np.sin(t / rng.uniform(10.0, 30.0) + rng.uniform(0, 6.3))
    boxes = np.empty((SEQ_LEN, 4))
    boxes[:, 0] = cx + wobble
    boxes[:, 1] = cy
    boxes[:, 2] = w
    boxes[:, 3] = h
    boxes += rng.normal(0.0, sigma, boxes.shape)
    boxes[:, :2] = np.clip(boxes[:, :2], 0.0, 1.0)
    boxes[:, 2:] = np.maximum(boxes[:, 2:], 0.005)
    return [(b[0], b[1], b[2], b[3], cls) for b in boxes]


def _objects(label, informative, lanes, config, rng):
    pos, num = lanes
    tracks = []
    for side, exists, x in ((-1, pos > 1, 0.2), (1, pos < num, 0.8)):
        occupied = exists and rng.random() < ADJACENT_PRIOR
        if informative and SIDE.get(label) == side and \
                label not in TURNS:
            occupied = False
        if occupied:
            tracks.append(_track(x, 0.55, 0.18, 0.14, CAR, rng,
                                 config.noise_sigma))
    if rng.random() < LEAD_CAR_PRIOR:
        tracks.append(_track(0.5, 0.55, 0.15, 0.12, CAR, rng,
                             config.noise_sigma))
    for _ in range(int(rng.integers(0, 4))):
        tracks.append(_track(rng.uniform(0.05, 0.95), rng.uniform(0.4, 0.7),
                             rng.uniform(0.02, 0.08), rng.uniform(0.02, 0.08),
                             int(rng.integers(1, 5)), rng,
                             config.noise_sigma))
    # the dashcam timestamp overlay, which the detector reports as Date
    tracks.append([(0.9, 0.95, 0.15, 0.04, DATE)] * SEQ_LEN)

    frames = []
    for t in range(SEQ_LEN):
        dets = (Detection.from_detector(*track[t]) for track in tracks)
        frames.append([d for d in dets if d is not None])
    return frames


def synthesize_sequence(seq_id, label, config, rng):
    onset = int(rng.integers(ONSET_RANGE[0], ONSET_RANGE[1] + 1))
    informative = bool(rng.random() < config.exterior_signal_strength)
    pos, num = _lanes(label, informative, rng)
    flags = _intersection(label, informative, onset, rng)
    gaze = _gaze(label, onset, config, rng)
    objects = _objects(label, informative, (pos, num), config, rng)
    lanes = [LaneInfo(pos, num, int(f)) for f in flags]
    return assemble_sequence(gaze, objects, lanes, label, seq_id)


def generate_synthetic(config):
    """Pure function of config: same config, bit-identical manifest."""
    master = np.random.default_rng(config.seed)
    labels = master.choice(len(MANEUVERS), size=config.n_sequences,
                           p=np.asarray(config.class_distribution))
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_sequences)
    sequences = [
        synthesize_sequence("synth-%05d" % i, int(label), config,
                            np.random.default_rng(s))
        for i, (label, s) in enumerate(zip(labels, seeds))]
    manifest = DatasetManifest(sequences, 'synthetic',
                               {'generator': 'mfusion.synthetic',
                                'config': config.to_dict()})
    log.info("generated %d synthetic sequences, class counts %s",
             len(manifest), manifest.class_counts)
    return manifest


def adjacent_occupancy(seq):
    """(left, right) flags: a car box sits in that adjacent lane for at
    least half of the valid frames."""
    n = max(seq.valid_frames, 1)
    slots = seq.frames[:n, OBJECTS].reshape(n, OBJECT_SLOTS, SLOT_WIDTH)
    car = slots[:, :, 4] == CAR
    # class 0 with zero size is padding, not a car
    car &= slots[:, :, 3] > 0
    left = np.any(car & (slots[:, :, 0] < LEFT_ADJACENT_X), axis=1)
    right = np.any(car & (slots[:, :, 0] > RIGHT_ADJACENT_X), axis=1)
    return bool(left.mean() >= 0.5), bool(right.mean() >= 0.5)


def occupancy_stump_accuracy(manifest):
    """Accuracy of the best one-split rule on the occupancy code.

    The code (left + 2 * right) has four values; each predicts its
    majority class. Chance on balanced data is 20%.
    """
    if not len(manifest):
        return 0.0
    table = np.zeros((4, len(MANEUVERS)), dtype=np.int64)
    for seq in manifest:
        left, right = adjacent_occupancy(seq)
        table[int(left) + 2 * int(right), seq.label] += 1
    return float(table.max(axis=1).sum() / table.sum())
