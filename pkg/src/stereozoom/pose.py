"""Pose estimation: fit (yaw, translation) of a known-size box to a cloud.

Each cloud row pairs an observed camera-frame point with a part location.
Decoding the part location with an identity pose gives the matching
object-frame point, so the rows are explicit correspondences and the pose is
a closed-form rigid alignment restricted to rotation about the vertical
axis, the only rotational degree of freedom in the box parameterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, FitFailureError, InsufficientPointsError
from .parts import Box3D, decode_part_targets, yaw_matrix
from .pointcloud import InstancePointCloud


@dataclass(frozen=True)
class PoseFitResult:
    """Fitted box (dims passed through), RMS residual in meters, size of the
    point set the fit used, and an optional separately-reported isotropic
    scale (1.0 unless scale refinement was requested)."""

    box: Box3D
    residual: float
    inlier_count: int
    converged: bool
    scale: float = 1.0


def _yaw_translation(xyz: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Closed-form minimizer of sum ||x_i - (R_yaw q_i + t)||^2.

    Translation drops out after centering; yaw maximizes the planar dot
    product between centered observations and rotated centered targets.
    """
    x_mean = xyz.mean(axis=0)
    q_mean = targets.mean(axis=0)
    xc = xyz - x_mean
    qc = targets - q_mean
    a = float(np.sum(xc[:, 0] * qc[:, 0] + xc[:, 2] * qc[:, 2]))
    b = float(np.sum(xc[:, 0] * qc[:, 2] - xc[:, 2] * qc[:, 0]))
    scale = math.sqrt(
        float(np.sum(xc[:, 0] ** 2 + xc[:, 2] ** 2))
        * float(np.sum(qc[:, 0] ** 2 + qc[:, 2] ** 2))
    )
    if scale == 0.0:
        raise DegenerateGeometryError(
            "points or part locations have no horizontal spread; yaw is unobservable"
        )
    yaw = math.atan2(b, a)
    t = x_mean - yaw_matrix(yaw) @ q_mean
    return yaw, t


def _alignment_errors(
    xyz: np.ndarray, targets: np.ndarray, yaw: float, t: np.ndarray
) -> np.ndarray:
    """Per-point distance between observation and posed target."""
    posed = targets @ yaw_matrix(yaw).T + t
    return np.linalg.norm(xyz - posed, axis=1)


def fit_pose(
    pc: InstancePointCloud,
    dims: tuple[float, float, float],
    refine_scale: bool = False,
) -> PoseFitResult:
    """Least-squares (yaw, t) of a box with known dims over all cloud rows.

    With ``refine_scale`` a 1-D least squares additionally reports the
    isotropic scale relating targets to observations; the box dims are
    passed through unchanged either way.
    """
    if len(pc) < 3:
        raise InsufficientPointsError(f"pose fit needs >= 3 points, got {len(pc)}")
    xyz = pc.xyz
    targets = decode_part_targets(pc.parts, dims)
    yaw, t = _yaw_translation(xyz, targets)
    scale = 1.0
    if refine_scale:
        qc = targets - targets.mean(axis=0)
        rotated = qc @ yaw_matrix(yaw).T
        denom = float(np.sum(qc * qc))
        if denom == 0.0:
            raise DegenerateGeometryError("all part locations identical; scale is unobservable")
        scale = float(np.sum((xyz - xyz.mean(axis=0)) * rotated)) / denom
    errors = _alignment_errors(xyz, targets, yaw, t)
    residual = float(np.sqrt(np.mean(errors**2)))
    return PoseFitResult(
        box=Box3D(dims=tuple(dims), yaw=yaw, t=tuple(t)),
        residual=residual,
        inlier_count=len(pc),
        converged=True,
        scale=scale,
    )


def fit_pose_ransac(
    pc: InstancePointCloud,
    dims: tuple[float, float, float],
    iterations: int = 200,
    inlier_threshold: float = 0.1,
    seed=None,
) -> PoseFitResult:
    """Outlier-robust pose fit: minimal 3-point hypotheses, consensus, refit.

    The best hypothesis is chosen by (most inliers, lowest inlier RMS,
    lowest hypothesis index), which makes the result independent of how
    hypothesis evaluation is scheduled, then refined by a full
    least-squares fit on its inlier set. Deterministic given ``seed``.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if not (inlier_threshold > 0.0):
        raise ValueError(f"inlier threshold must be positive, got {inlier_threshold}")
    n = len(pc)
    if n < 3:
        raise InsufficientPointsError(f"pose fit needs >= 3 points, got {n}")
    xyz = pc.xyz
    targets = decode_part_targets(pc.parts, dims)
    rng = np.random.default_rng(seed)

    best_key = None
    best_inliers = None
    for index in range(iterations):
        sample = rng.choice(n, size=3, replace=False)
        try:
            yaw, t = _yaw_translation(xyz[sample], targets[sample])
        except DegenerateGeometryError:
            continue
        errors = _alignment_errors(xyz, targets, yaw, t)
        inliers = errors <= inlier_threshold
        count = int(np.count_nonzero(inliers))
        if count < 3:
            continue
        rms = float(np.sqrt(np.mean(errors[inliers] ** 2)))
        key = (-count, rms, index)
        if best_key is None or key < best_key:
            best_key = key
            best_inliers = inliers
    if best_inliers is None:
        raise FitFailureError(
            f"no hypothesis reached 3 inliers at threshold {inlier_threshold} m "
            f"in {iterations} iterations"
        )
    yaw, t = _yaw_translation(xyz[best_inliers], targets[best_inliers])
    errors = _alignment_errors(xyz[best_inliers], targets[best_inliers], yaw, t)
    return PoseFitResult(
        box=Box3D(dims=tuple(dims), yaw=yaw, t=tuple(t)),
        residual=float(np.sqrt(np.mean(errors**2))),
        inlier_count=int(np.count_nonzero(best_inliers)),
        converged=True,
    )
