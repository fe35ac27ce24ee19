"""
Landmark JSON Lines files.

A landmark file starts with a header line

    {"width": 1280, "height": 720,
     "intrinsics": {"fx": ..., "fy": ..., "cx": ..., "cy": ...}}

followed by one frame per line:

    {"frame": 0, "landmarks": {"nose_tip": [u, v, z], ...},
     "eyes": {"left_center": [u, v, z], "left_pupil": [u, v, z],
              "right_center": ..., "right_pupil": ...}}

(u, v) are pixels. The optional third element is the landmark source's
depth estimate along the optical axis, in face model units, or null.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import LandmarkFormatError, ValidationError
from ..util import atomic_write
from .camera import CameraIntrinsics

log = logging.getLogger(__name__)

EYE_KEYS = ('left_center', 'left_pupil', 'right_center', 'right_pupil')


@dataclass(frozen=True)
class LandmarkHeader:
    width: int
    height: int
    intrinsics: CameraIntrinsics

    def to_dict(self):
        return {'width': self.width, 'height': self.height,
                'intrinsics': self.intrinsics.to_dict()}


@dataclass
class Landmark2D:
    frame: int
    # name -> (u, v, z or None)
    landmarks: dict = field(default_factory=dict)
    # EYE_KEYS -> (u, v, z or None), or None when the source had nothing
    eyes: dict = field(default_factory=dict)

    def uv(self, names):
        return np.array([self.landmarks[n][:2] for n in names],
                        dtype=np.float64)

    def to_dict(self):
        return {'frame': self.frame,
                'landmarks': {n: list(p) for n, p in self.landmarks.items()},
                'eyes': {k: (list(v) if v is not None else None)
                         for k, v in self.eyes.items()}}


def _point(value, what):
    if not isinstance(value, (list, tuple)) or len(value) not in (2, 3):
        raise ValidationError("%s must be [u, v] or [u, v, z]" % what)
    try:
        u, v = float(value[0]), float(value[1])
        z = value[2] if len(value) == 3 else None
        z = float(z) if z is not None else None
    except (TypeError, ValueError):
        raise ValidationError("%s has a non-numeric coordinate" % what)
    if not all(np.isfinite(c) for c in (u, v) + ((z,) if z is not None
                                                  else ())):
        raise ValidationError("%s is not finite" % what)
    return (u, v, z)


def _in_bounds(point, header):
    return 0.0 <= point[0] <= header.width and \
        0.0 <= point[1] <= header.height


def parse_header(obj):
    try:
        header = LandmarkHeader(int(obj['width']), int(obj['height']),
                                CameraIntrinsics.from_dict(obj['intrinsics']))
    except (KeyError, TypeError, ValueError) as ex:
        raise ValidationError("bad landmark header: %s" % ex)
    if header.width <= 0 or header.height <= 0:
        raise ValidationError("image size must be positive")
    return header


def parse_frame(obj, header):
    """Validate one decoded frame record.

    Raises ValidationError when the record is malformed or a coordinate
    falls outside the image.
    """
    if not isinstance(obj, dict) or not isinstance(obj.get('landmarks'),
                                                   dict):
        raise ValidationError("frame record needs a landmarks object")
    try:
        frame = int(obj['frame'])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("frame record needs an integer frame number")
    landmarks = {}
    for name, value in obj['landmarks'].items():
        landmarks[name] = _point(value, name)
    eyes = {}
    raw_eyes = obj.get('eyes') or {}
    if not isinstance(raw_eyes, dict):
        raise ValidationError("eyes must be an object")
    for key in EYE_KEYS:
        value = raw_eyes.get(key)
        eyes[key] = _point(value, key) if value is not None else None
    for name, p in list(landmarks.items()) + [
            (k, v) for k, v in eyes.items() if v is not None]:
        if not _in_bounds(p, header):
            raise ValidationError("%s (%g, %g) outside the %dx%d image"
                                  % (name, p[0], p[1], header.width,
                                     header.height))
    return Landmark2D(frame, landmarks, eyes)


def read_landmarks(path):
    """Read a landmark file.

    Returns (header, frames, skipped). A line that is not JSON raises
    LandmarkFormatError with its line number; a frame that decodes but
    fails validation is logged and skipped.
    """
    header = None
    frames = []
    skipped = 0
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError as ex:
                raise LandmarkFormatError("invalid JSON: %s" % ex, lineno)
            if header is None:
                if not isinstance(obj, dict) or 'intrinsics' not in obj:
                    raise LandmarkFormatError(
                        "first line must be the header with intrinsics",
                        lineno)
                try:
                    header = parse_header(obj)
                except ValidationError as ex:
                    raise LandmarkFormatError(ex.info, lineno)
                continue
            try:
                frames.append(parse_frame(obj, header))
            except ValidationError as ex:
                log.warning("%s line %d: skipping frame: %s",
                            path, lineno, ex.info)
                skipped += 1
    if header is None:
        raise LandmarkFormatError("no frames: file is empty")
    if not frames:
        raise LandmarkFormatError("no frames in %s" % path)
    return header, frames, skipped


def write_landmarks(path, header, frames):
    with atomic_write(path) as f:
        f.write(json.dumps(header.to_dict(), sort_keys=True) + "\n")
        for frame in frames:
            f.write(json.dumps(frame.to_dict(), sort_keys=True) + "\n")

