"""
Fixed-length labeled sequences and their JSON Lines interchange format.

One sequence per line:

    {"id": str, "label": int, "valid_frames": int,
     "frames": [[32 floats] x 150]}
"""

import json
import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import ArgumentError, DatasetIOError, LengthError, \
    ValidationError
from ..numeric import as_tensor
from ..util import atomic_write
from .encode import FRAME_WIDTH, GAZE, GAZE_WIDTH, LANES, MANEUVERS, \
    OBJECTS, FrameFeatures, LaneInfo, encode_lanes, encode_objects

log = logging.getLogger(__name__)

SEQ_LEN = 150
FPS = 30
KEEP_FRAMES = (30, 60, 90, 120, 150)


def seconds_before(keep):
    """Seconds before the maneuver at which a keep-frame truncation ends."""
    return (SEQ_LEN - keep) // FPS + 1


@dataclass
class LabeledSequence:
    id: str
    frames: np.ndarray
    label: int
    valid_frames: int = SEQ_LEN

    def __post_init__(self):
        self.frames = as_tensor(self.frames, "sequence %s frames" % self.id)
        if self.frames.shape != (SEQ_LEN, FRAME_WIDTH):
            raise LengthError("sequence %s: expected %d x %d frames, got %s"
                              % (self.id, SEQ_LEN, FRAME_WIDTH,
                                 self.frames.shape))
        if self.label not in range(len(MANEUVERS)):
            raise ValidationError("sequence %s: label %r not in 0..4"
                                  % (self.id, self.label))
        self.label = int(self.label)
        if not 0 <= self.valid_frames <= SEQ_LEN:
            raise ValidationError("sequence %s: valid_frames %r"
                                  % (self.id, self.valid_frames))
        if np.any(self.frames[self.valid_frames:]):
            raise ValidationError("sequence %s: frames past valid_frames "
                                  "must be zero" % self.id)

    @property
    def gaze(self):
        return self.frames[:, GAZE]

    @property
    def objects(self):
        return self.frames[:, OBJECTS]

    @property
    def lanes(self):
        return self.frames[:, LANES]

    @property
    def maneuver(self):
        return MANEUVERS[self.label]

    def frame(self, i):
        return FrameFeatures.from_vector(self.frames[i])

    def equals(self, other):
        return (self.id == other.id and self.label == other.label and
                self.valid_frames == other.valid_frames and
                np.array_equal(self.frames, other.frames))

    def to_dict(self):
        return {'id': self.id, 'label': self.label,
                'valid_frames': self.valid_frames,
                'frames': self.frames.tolist()}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(str(d['id']), d['frames'], int(d['label']),
                       int(d.get('valid_frames', SEQ_LEN)))
        except (KeyError, TypeError, ValueError) as ex:
            raise ValidationError("malformed sequence record: %s" % ex)


def _gaze_row(g):
    if hasattr(g, 'as_array'):
        return g.as_array()
    return np.asarray(g, dtype=np.float64).reshape(GAZE_WIDTH)


def _lane_row(info):
    if isinstance(info, LaneInfo):
        return encode_lanes(info)
    return np.asarray(info, dtype=np.float64).reshape(3)


def assemble_sequence(gaze, objects, lanes, label, seq_id=''):
    """Build a full-length sequence from three per-frame streams.

    gaze holds 4-vectors or GazeVectors, objects holds per-frame lists of
    Detection, lanes holds LaneInfo or raw 3-vectors.
    """
    for name, stream in (('gaze', gaze), ('objects', objects),
                         ('lanes', lanes)):
        if len(stream) != SEQ_LEN:
            raise LengthError("%s stream has %d frames, expected %d"
                              % (name, len(stream), SEQ_LEN))
    frames = np.empty((SEQ_LEN, FRAME_WIDTH))
    for t in range(SEQ_LEN):
        frames[t, GAZE] = _gaze_row(gaze[t])
        frames[t, OBJECTS] = encode_objects(objects[t])
        frames[t, LANES] = _lane_row(lanes[t])
    return LabeledSequence(seq_id, frames, label, SEQ_LEN)


def truncate_and_pad(seq, keep_frames):
    """Keep the first keep_frames frames and zero the rest, sentinels
    included."""
    if keep_frames not in KEEP_FRAMES:
        raise ArgumentError("keep_frames must be one of %s, got %r"
                            % (KEEP_FRAMES, keep_frames))
    frames = seq.frames.copy()
    frames[keep_frames:] = 0.0
    return LabeledSequence(seq.id, frames, seq.label,
                           min(keep_frames, seq.valid_frames))


def stack_frames(sequences):
    """(N, 150, 32) feature block and (N,) labels."""
    X = np.stack([s.frames for s in sequences]) if sequences else \
        np.zeros((0, SEQ_LEN, FRAME_WIDTH))
    y = np.array([s.label for s in sequences], dtype=np.int64)
    return X, y


def write_sequences(path, sequences):
    with atomic_write(path) as f:
        for seq in sequences:
            f.write(json.dumps(seq.to_dict()) + "\n")
    log.debug("wrote %d sequences to %s", len(sequences), path)


def read_sequences(path):
    sequences = []
    try:
        f = open(path)
    except IOError as ex:
        raise DatasetIOError("cannot read %s: %s" % (path, ex))
    with f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                sequences.append(LabeledSequence.from_dict(json.loads(line)))
            except ValueError as ex:
                raise ValidationError("%s line %d: %s" % (path, lineno, ex))
            except ValidationError as ex:
                raise ValidationError("%s line %d: %s"
                                      % (path, lineno, ex.info))
    return sequences
