"""
Pinhole camera, rigid pose and projection.

Camera frame: x to the image right, y down, z along the optical axis.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from ..exceptions import BehindCameraError, DimensionError, ValidationError

ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValidationError("focal lengths must be positive, got "
                                  "fx=%r fy=%r" % (self.fx, self.fy))

    @property
    def matrix(self):
        return np.array([[self.fx, 0.0, self.cx],
                         [0.0, self.fy, self.cy],
                         [0.0, 0.0, 1.0]])

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(float(d['fx']), float(d['fy']),
                       float(d['cx']), float(d['cy']))
        except (KeyError, TypeError, ValueError) as ex:
            raise ValidationError("bad intrinsics %r: %s" % (d, ex))

    def to_dict(self):
        return {'fx': self.fx, 'fy': self.fy, 'cx': self.cx, 'cy': self.cy}


@dataclass
class Pose:
    """Rotation R (3x3) and translation t mapping model points into the
    camera frame: X = R p + t."""
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.R = np.array(self.R, dtype=np.float64)
        self.t = np.array(self.t, dtype=np.float64).reshape(3)
        if self.R.shape != (3, 3):
            raise DimensionError("rotation", (3, 3), self.R.shape)

    @classmethod
    def from_rotvec(cls, rotvec, t):
        return cls(Rotation.from_rotvec(rotvec).as_matrix(), t)

    @property
    def rotvec(self):
        return Rotation.from_matrix(self.R).as_rotvec()

    def is_rotation(self, tol=ORTHO_TOL):
        return (np.allclose(self.R.T @ self.R, np.eye(3), atol=tol, rtol=0)
                and abs(np.linalg.det(self.R) - 1.0) <= tol)

    def apply(self, points):
        """Transform model points (..., 3) into the camera frame."""
        return np.asarray(points, dtype=np.float64) @ self.R.T + self.t

    def copy(self):
        return Pose(self.R.copy(), self.t.copy())


def orthonormalize(R):
    """Nearest rotation matrix to R in the Frobenius sense."""
    U, _, Vt = np.linalg.svd(R)
    out = U @ Vt
    if np.linalg.det(out) < 0:
        U[:, -1] *= -1
        out = U @ Vt
    return out


def rotation_error(R1, R2):
    """Geodesic angle in radians between two rotations."""
    cos = (np.trace(np.asarray(R1).T @ np.asarray(R2)) - 1.0) / 2.0
    return float(np.arccos(np.clip(cos, -1.0, 1.0)))


def _points3d(points3d):
    pts = np.asarray(points3d, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise DimensionError("3d points", (None, 3), pts.shape)
    return pts


def project(points3d, pose, intrinsics):
    """Pinhole projection; returns an (N, 2) array of (u, v) pixels."""
    X = pose.apply(_points3d(points3d))
    bad = np.nonzero(X[:, 2] <= 0)[0]
    if bad.size:
        raise BehindCameraError(int(bad[0]), float(X[bad[0], 2]))
    u = intrinsics.fx * X[:, 0] / X[:, 2] + intrinsics.cx
    v = intrinsics.fy * X[:, 1] / X[:, 2] + intrinsics.cy
    return np.stack([u, v], axis=1)
