import numpy as np

from ..exceptions import DegenerateConfigurationError, ValidationError

RANK_TOL = 1e-10


def fit_affine3d(src, dst):
    """Least-squares 3x4 affine A with A [p; 1] ~ q for every pair (p, q).

    Raises DegenerateConfigurationError for coplanar sources.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.ndim != 2 or src.shape[1] != 3 or dst.shape != src.shape:
        raise ValidationError("fit_affine3d needs matching (N, 3) point "
                              "sets, got %s and %s" % (src.shape, dst.shape))
    if len(src) < 4:
        raise DegenerateConfigurationError(
            "affine fit needs at least 4 points, got %d" % len(src))
    H = np.hstack([src, np.ones((len(src), 1))])
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[-1] <= RANK_TOL * sv[0]:
        raise DegenerateConfigurationError(
            "source points are coplanar or collinear")
    X, _, _, _ = np.linalg.lstsq(H, dst, rcond=None)
    return X.T


def apply_affine(A, points):
    points = np.asarray(points, dtype=np.float64)
    return points @ A[:, :3].T + A[:, 3]
