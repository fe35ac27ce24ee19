"""
Generic 3D face model.
"""

import json
import logging
from dataclasses import dataclass, field
from os.path import dirname, realpath
from os.path import join as pathjoin

import numpy as np

from ..exceptions import ConfigError, DegenerateConfigurationError

log = logging.getLogger(__name__)

BUNDLED_MODEL = pathjoin(dirname(dirname(realpath(__file__))), 'data',
                         'face_model.json')
EYES = ('left', 'right')
# The face looks along -z of its own frame
FORWARD = np.array([0.0, 0.0, -1.0])


@dataclass
class ModelFace:
    names: list
    points3d: np.ndarray
    eye_centers: dict = field(default_factory=dict)
    eyeball_radius: float = 0.12

    def __post_init__(self):
        self.points3d = np.asarray(self.points3d, dtype=np.float64)
        self.eye_centers = {k: np.asarray(v, dtype=np.float64)
                            for k, v in self.eye_centers.items()}
        if self.points3d.shape != (len(self.names), 3):
            raise ConfigError("face model: %d names for %s points"
                              % (len(self.names), self.points3d.shape))
        if len(self.names) < 6:
            raise DegenerateConfigurationError(
                "face model needs at least 6 landmarks, got %d"
                % len(self.names))
        centred = self.points3d - self.points3d.mean(axis=0)
        if np.linalg.matrix_rank(centred, tol=1e-9) < 3:
            raise DegenerateConfigurationError("face model is coplanar")
        missing = [e for e in EYES if e not in self.eye_centers]
        if missing:
            raise ConfigError("face model lacks eye centers: %s"
                              % ", ".join(missing))

    def __len__(self):
        return len(self.names)

    @property
    def eye_midpoint(self):
        return (self.eye_centers['left'] + self.eye_centers['right']) / 2.0

    def subset(self, names):
        index = {n: i for i, n in enumerate(self.names)}
        return self.points3d[[index[n] for n in names]]

    @classmethod
    def from_dict(cls, d):
        try:
            landmarks = d['landmarks']
            eyes = d['eyes']
            return cls(list(landmarks),
                       [landmarks[n] for n in landmarks],
                       {'left': eyes['left_center'],
                        'right': eyes['right_center']},
                       float(d.get('eyeball_radius', 0.12)))
        except (KeyError, TypeError, ValueError) as ex:
            raise ConfigError("malformed face model: %s" % ex)

    @classmethod
    def load(cls, path=None):
        path = path or BUNDLED_MODEL
        log.debug("loading face model from %s", path)
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except (IOError, ValueError) as ex:
            raise ConfigError("cannot read face model %s: %s" % (path, ex))
