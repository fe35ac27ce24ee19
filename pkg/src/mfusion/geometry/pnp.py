"""
Perspective-n-point by Levenberg-Marquardt.

The pose is parameterised as a rotation perturbation applied on the left,
R <- exp([d]x) R, plus a translation update t <- t + dt. The Jacobian is
analytic: du/dX from the pinhole model, dX/dd = -[R p]x and dX/dt = I.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from ..exceptions import BehindCameraError, NonConvergenceError, \
    ValidationError
from .camera import Pose, orthonormalize, project

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LMSettings:
    damping: float = 1e-3
    max_iter: int = 100
    step_tol: float = 1e-10
    max_rejections: int = 10

    @classmethod
    def from_config(cls, conf):
        return cls(float(conf.get('lm_damping', cls.damping)),
                   int(conf.get('lm_max_iter', cls.max_iter)),
                   float(conf.get('lm_step_tol', cls.step_tol)),
                   int(conf.get('lm_max_rejections', cls.max_rejections)))


def _skew(v):
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


def _residual(points3d, observed, pose, intrinsics):
    return (project(points3d, pose, intrinsics) - observed).ravel()


def _jacobian(points3d, pose, intrinsics):
    X = pose.apply(points3d)
    RP = points3d @ pose.R.T
    J = np.empty((2 * len(points3d), 6))
    for i, ((x, y, z), rp) in enumerate(zip(X, RP)):
        dproj = np.array([[intrinsics.fx / z, 0.0,
                           -intrinsics.fx * x / (z * z)],
                          [0.0, intrinsics.fy / z,
                           -intrinsics.fy * y / (z * z)]])
        J[2 * i:2 * i + 2, :3] = dproj @ -_skew(rp)
        J[2 * i:2 * i + 2, 3:] = dproj
    return J


def _perturb(pose, step):
    R = Rotation.from_rotvec(step[:3]).as_matrix() @ pose.R
    return Pose(orthonormalize(R), pose.t + step[3:])


def reprojection_error(model_points, observed, pose, intrinsics):
    """Mean squared reprojection error in pixels squared."""
    r = _residual(np.asarray(model_points, dtype=np.float64),
                  np.asarray(observed, dtype=np.float64), pose, intrinsics)
    return float(np.mean(r * r) * 2.0)


def solve_pnp(model, observed, intrinsics, init=None, settings=None):
    """Refine a pose so that `model` projects onto `observed`.

    `model` is a ModelFace or an (N, 3) array; `observed` is (N, 2).
    Returns the pose with the least mean squared reprojection error found.
    Raises NonConvergenceError after too many consecutive rejected steps.
    """
    settings = settings or LMSettings()
    points = np.asarray(getattr(model, 'points3d', model), dtype=np.float64)
    observed = np.asarray(observed, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValidationError("model points must be (N, 3)")
    if observed.shape != (len(points), 2):
        raise ValidationError("expected %d observations of (u, v), got %s"
                              % (len(points), observed.shape))
    if len(points) < 6:
        raise ValidationError("solve_pnp needs at least 6 correspondences, "
                              "got %d" % len(points))

    pose = (init or Pose(t=(0.0, 0.0, 5.0))).copy()
    r = _residual(points, observed, pose, intrinsics)
    cost = float(r @ r)
    lam = settings.damping
    rejections = 0

    for it in range(settings.max_iter):
        J = _jacobian(points, pose, intrinsics)
        A = J.T @ J
        g = J.T @ r
        try:
            step = np.linalg.solve(A + lam * np.diag(np.diag(A)), -g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(A + lam * np.eye(6), -g, rcond=None)[0]
        if np.linalg.norm(step) < settings.step_tol:
            log.debug("pnp converged after %d iterations", it)
            break

        candidate = _perturb(pose, step)
        try:
            r_new = _residual(points, observed, candidate, intrinsics)
            new_cost = float(r_new @ r_new)
        except BehindCameraError:
            new_cost = np.inf

        if new_cost <= cost:
            pose, r, cost = candidate, r_new, new_cost
            lam /= 10.0
            rejections = 0
            continue

        # no representable progress left
        if abs(new_cost - cost) <= 1e-14 * max(cost, 1e-300):
            break
        lam *= 10.0
        rejections += 1
        if rejections >= settings.max_rejections:
            raise NonConvergenceError(
                "pnp rejected %d consecutive steps" % rejections,
                pose, cost / len(r) * 2.0)

    return pose
