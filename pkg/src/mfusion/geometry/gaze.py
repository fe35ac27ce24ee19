"""
Head and eye gaze points on the virtual windshield.

The head ray leaves the midpoint between the model's eye centers along the
face's forward axis, carried into the camera frame by the PnP pose. Each
gaze ray runs from an eye center through its pupil. Both eye and pupil
come from the landmark source's rough 3D estimates, which are mapped onto
the generic face with a least-squares affine fit and then placed by the
same pose. Rays are cut with the plane z = plane_z of the camera frame;
the two eyes' plane points are averaged. Plane coordinates are divided
by plane_scale.
"""

import json
import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import FusionError, GeometryError, LandmarkFormatError, \
    ParallelRayError, ValidationError
from ..util import atomic_write
from .affine import apply_affine, fit_affine3d
from .camera import Pose
from .face import EYES, FORWARD
from .pnp import solve_pnp

log = logging.getLogger(__name__)

PARALLEL_TOL = 1e-12
DEFAULT_PLANE_SCALE = 5.0
DEFAULT_NOMINAL_DEPTH = 5.0


@dataclass(frozen=True)
class GazeVector:
    head_x: float = 0.0
    head_y: float = 0.0
    gaze_x: float = 0.0
    gaze_y: float = 0.0
    valid: bool = True

    @classmethod
    def sentinel(cls):
        return cls(0.0, 0.0, 0.0, 0.0, False)

    def as_array(self):
        return np.array([self.head_x, self.head_y, self.gaze_x, self.gaze_y])

    def to_dict(self):
        return {'head_x': self.head_x, 'head_y': self.head_y,
                'gaze_x': self.gaze_x, 'gaze_y': self.gaze_y,
                'valid': self.valid}

    @classmethod
    def from_dict(cls, d):
        out = cls(float(d['head_x']), float(d['head_y']),
                  float(d['gaze_x']), float(d['gaze_y']),
                  bool(d.get('valid', True)))
        if not np.all(np.isfinite(out.as_array())):
            raise ValidationError("gaze record is not finite")
        return out


def ray_plane(origin, through, plane_z=0.0):
    """(x, y) where the line through both points meets z = plane_z."""
    origin = np.asarray(origin, dtype=np.float64)
    d = np.asarray(through, dtype=np.float64) - origin
    if abs(d[2]) < PARALLEL_TOL:
        raise ParallelRayError("ray is parallel to the plane z=%g" % plane_z)
    s = (plane_z - origin[2]) / d[2]
    return (float(origin[0] + s * d[0]), float(origin[1] + s * d[1]))


def backproject(u, v, z, intrinsics):
    """Camera-frame point at depth z seen at pixel (u, v)."""
    return np.array([(u - intrinsics.cx) * z / intrinsics.fx,
                     (v - intrinsics.cy) * z / intrinsics.fy,
                     z])


def _with_depth(entry, what):
    if entry is None or entry[2] is None:
        raise GeometryError("%s has no depth estimate" % what)
    return entry


def solve_frame(frame, model, intrinsics, plane_z=0.0,
                plane_scale=DEFAULT_PLANE_SCALE, init=None, settings=None):
    """Returns (GazeVector, Pose); raises on any geometric failure."""
    names = [n for n in model.names if n in frame.landmarks]
    if len(names) < 6:
        raise GeometryError("frame %d names only %d model landmarks"
                            % (frame.frame, len(names)))
    pose = solve_pnp(model.subset(names), frame.uv(names), intrinsics,
                     init, settings)

    with_z = [n for n in names if frame.landmarks[n][2] is not None]
    src = [backproject(*frame.landmarks[n], intrinsics) for n in with_z]
    A = fit_affine3d(src, model.subset(with_z))

    gaze_points = []
    for eye in EYES:
        center = _with_depth(frame.eyes.get(eye + '_center'),
                             eye + '_center')
        pupil = _with_depth(frame.eyes.get(eye + '_pupil'), eye + '_pupil')
        cam = pose.apply(apply_affine(A, [backproject(*center, intrinsics),
                                          backproject(*pupil, intrinsics)]))
        gaze_points.append(ray_plane(cam[0], cam[1], plane_z))
    gaze = np.mean(gaze_points, axis=0)

    origin = pose.apply(model.eye_midpoint)
    head = ray_plane(origin, origin + pose.R @ FORWARD, plane_z)

    vec = GazeVector(head[0] / plane_scale, head[1] / plane_scale,
                     float(gaze[0]) / plane_scale,
                     float(gaze[1]) / plane_scale)
    if not np.all(np.isfinite(vec.as_array())):
        raise GeometryError("non-finite plane point")
    return vec, pose


def extract_gaze_vector(frame, model, intrinsics, plane_z=0.0,
                        plane_scale=DEFAULT_PLANE_SCALE, init=None,
                        settings=None):
    """GazeVector for one frame, or the sentinel when the frame fails."""
    if init is None:
        init = Pose(t=(0.0, 0.0, DEFAULT_NOMINAL_DEPTH))
    try:
        return solve_frame(frame, model, intrinsics, plane_z, plane_scale,
                           init, settings)[0]
    except (FusionError, KeyError, np.linalg.LinAlgError) as ex:
        log.warning("frame %s: gaze solve failed: %s", frame.frame, ex)
        return GazeVector.sentinel()


def extract_gaze_sequence(frames, model, intrinsics, plane_z=0.0,
                          plane_scale=DEFAULT_PLANE_SCALE,
                          nominal_depth=DEFAULT_NOMINAL_DEPTH, settings=None):
    """GazeVectors for consecutive frames.

    Each solve starts from the last valid pose; failed frames leave that
    pose untouched and yield the sentinel.
    """
    start = Pose(t=(0.0, 0.0, nominal_depth))
    last = start
    out = []
    for frame in frames:
        try:
            vec, last = solve_frame(frame, model, intrinsics, plane_z,
                                    plane_scale, last, settings)
        except (FusionError, KeyError, np.linalg.LinAlgError) as ex:
            log.warning("frame %s: gaze solve failed: %s", frame.frame, ex)
            vec = GazeVector.sentinel()
        out.append(vec)
    failed = sum(not v.valid for v in out)
    if failed:
        log.info("%d of %d frames fell back to the sentinel",
                 failed, len(out))
    return out


def write_gaze(path, records):
    """Write (frame number, GazeVector) pairs as JSON Lines."""
    with atomic_write(path) as f:
        for frame, gaze in records:
            rec = dict(gaze.to_dict(), frame=frame)
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def read_gaze(path):
    out = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out.append((int(rec['frame']), GazeVector.from_dict(rec)))
            except (ValueError, KeyError, TypeError) as ex:
                raise LandmarkFormatError("bad gaze record: %s" % ex, lineno)
    return out
