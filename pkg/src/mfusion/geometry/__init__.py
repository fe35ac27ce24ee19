from .camera import CameraIntrinsics, Pose, project, rotation_error, \
    orthonormalize
from .pnp import LMSettings, solve_pnp, reprojection_error
from .affine import fit_affine3d, apply_affine
from .face import ModelFace
from .landmarks import Landmark2D, LandmarkHeader, read_landmarks, \
    write_landmarks
from .gaze import GazeVector, ray_plane, extract_gaze_vector, \
    extract_gaze_sequence, read_gaze, write_gaze
from .render import render_landmark_frame

__all__ = [
    'CameraIntrinsics', 'Pose', 'project', 'rotation_error',
    'orthonormalize', 'LMSettings', 'solve_pnp', 'reprojection_error',
    'fit_affine3d', 'apply_affine', 'ModelFace', 'Landmark2D',
    'LandmarkHeader', 'read_landmarks', 'write_landmarks', 'GazeVector',
    'ray_plane', 'extract_gaze_vector', 'extract_gaze_sequence', 'read_gaze',
    'write_gaze', 'render_landmark_frame',
]
