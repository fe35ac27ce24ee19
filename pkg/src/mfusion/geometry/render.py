"""
Synthetic landmark frames rendered from a known head pose and eye rotation.
"""

import numpy as np
from scipy.spatial.transform import Rotation

from .camera import project
from .face import EYES, FORWARD
from .landmarks import Landmark2D


def render_landmark_frame(model, pose, intrinsics, frame=0, gaze_rotvec=None,
                          pixel_noise=0.0, rng=None):
    """Project `model` under `pose` into a Landmark2D record.

    gaze_rotvec rotates both eyeballs relative to the head (axis-angle in
    the face frame); a positive rotation about y turns the gaze toward -x.
    Every entry carries its true camera-frame depth as the third element.
    Optional Gaussian pixel noise is drawn from `rng`.
    """
    direction = FORWARD if gaze_rotvec is None else \
        Rotation.from_rotvec(gaze_rotvec).apply(FORWARD)

    def render(points):
        uv = project(points, pose, intrinsics)
        if pixel_noise:
            uv = uv + rng.normal(0.0, pixel_noise, uv.shape)
        depth = pose.apply(points)[:, 2]
        return [(float(u), float(v), float(z))
                for (u, v), z in zip(uv, depth)]

    landmarks = dict(zip(model.names, render(model.points3d)))
    eyes = {}
    for eye in EYES:
        center = model.eye_centers[eye]
        pupil = center + model.eyeball_radius * direction
        eyes[eye + '_center'], eyes[eye + '_pupil'] = render(
            np.stack([center, pupil]))
    return Landmark2D(frame, landmarks, eyes)
