"""
Per-frame feature encoders.

A frame is 32 floats: gaze (head_x, head_y, gaze_x, gaze_y), five object
slots of (cx, cy, h, w, class_id), and the lane triple (lane_position,
num_lanes, near_intersection).
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidationError

log = logging.getLogger(__name__)

GAZE_WIDTH = 4
OBJECT_SLOTS = 5
SLOT_WIDTH = 5
OBJECT_WIDTH = OBJECT_SLOTS * SLOT_WIDTH
LANE_WIDTH = 3
FRAME_WIDTH = GAZE_WIDTH + OBJECT_WIDTH + LANE_WIDTH

GAZE = slice(0, GAZE_WIDTH)
OBJECTS = slice(GAZE_WIDTH, GAZE_WIDTH + OBJECT_WIDTH)
LANES = slice(GAZE_WIDTH + OBJECT_WIDTH, FRAME_WIDTH)

EMPTY_SLOT = (0.0, 0.0, 0.0, 0.0, -1.0)

# Detector classes; Date (5) is dropped before encoding.
OBJECT_CLASSES = ('car', 'bicycle', 'person', 'traffic-sign', 'traffic-light')
DATE_CLASS = 5

MANEUVERS = ('straight', 'left-lane-change', 'left-turn',
             'right-lane-change', 'right-turn')


@dataclass(frozen=True)
class Detection:
    cx: float
    cy: float
    w: float
    h: float
    class_id: int

    def __post_init__(self):
        if self.class_id not in range(len(OBJECT_CLASSES)) or \
                isinstance(self.class_id, bool):
            raise ValidationError("class_id must be 0..4, got %r"
                                  % (self.class_id,))
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValidationError("box center (%g, %g) outside [0, 1]"
                                  % (self.cx, self.cy))
        if not (self.w > 0 and self.h > 0):
            raise ValidationError("box size must be positive, got %gx%g"
                                  % (self.w, self.h))

    @property
    def area(self):
        return self.w * self.h

    @classmethod
    def from_detector(cls, cx, cy, w, h, class_id):
        """Detection for a raw detector class 0..5; None for Date."""
        if int(class_id) == DATE_CLASS:
            return None
        return cls(float(cx), float(cy), float(w), float(h), int(class_id))


@dataclass(frozen=True)
class LaneInfo:
    lane_position: int
    num_lanes: int
    near_intersection: int = 0

    def __post_init__(self):
        if self.num_lanes < 1 or self.lane_position < 1:
            raise ValidationError("lane_position and num_lanes must be >= 1")
        if self.lane_position > self.num_lanes:
            raise ValidationError("lane_position %d beyond %d lanes"
                                  % (self.lane_position, self.num_lanes))
        if self.near_intersection not in (0, 1):
            raise ValidationError("near_intersection must be 0 or 1")


def encode_objects(detections):
    """Top five boxes by area as 25 floats, empty slots as sentinels."""
    for d in detections:
        if not isinstance(d, Detection):
            raise ValidationError("expected Detection, got %r" % (d,))
    ranked = sorted(detections, key=lambda d: (-d.area, d.cx, d.cy))
    out = np.tile(np.array(EMPTY_SLOT), OBJECT_SLOTS)
    for i, d in enumerate(ranked[:OBJECT_SLOTS]):
        out[i * SLOT_WIDTH:(i + 1) * SLOT_WIDTH] = (d.cx, d.cy, d.h, d.w,
                                                    d.class_id)
    return out


def encode_lanes(info):
    if info.lane_position > info.num_lanes:
        raise ValidationError("lane_position %d beyond %d lanes"
                              % (info.lane_position, info.num_lanes))
    return np.array([info.lane_position, info.num_lanes,
                     info.near_intersection], dtype=np.float64)


def slot_areas(objects):
    """Area h*w of each object slot of a 25-float vector."""
    slots = np.asarray(objects).reshape(OBJECT_SLOTS, SLOT_WIDTH)
    return slots[:, 2] * slots[:, 3]


@dataclass
class FrameFeatures:
    gaze: np.ndarray
    objects: np.ndarray
    lanes: np.ndarray

    def as_vector(self):
        return np.concatenate([self.gaze, self.objects, self.lanes])

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (FRAME_WIDTH,):
            raise ValidationError("frame must have %d features, got %s"
                                  % (FRAME_WIDTH, vec.shape))
        return cls(vec[GAZE].copy(), vec[OBJECTS].copy(), vec[LANES].copy())
