"""Rectified stereo camera model, KITTI calibration files, and zoomed intrinsics.

The left camera is the reference camera (KITTI ``P2``); ``b_x`` is a camera's
horizontal offset in meters from the rectification reference, so the stereo
baseline is ``right.b_x - left.b_x`` when both focal lengths agree.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CalibFormatError, InvalidCalibrationError

LEFT_KEY = "P2"
RIGHT_KEY = "P3"


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters of one rectified camera.

    Together they define the 3x4 projection matrix
    ``[[f_u, 0, c_u, -f_u*b_x], [0, f_v, c_v, 0], [0, 0, 1, 0]]``.
    """

    f_u: float
    f_v: float
    c_u: float
    c_v: float
    b_x: float = 0.0

    def __post_init__(self):
        for name in ("f_u", "f_v", "c_u", "c_v", "b_x"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidCalibrationError(f"{name} must be finite")
        if self.f_u <= 0.0 or self.f_v <= 0.0:
            raise InvalidCalibrationError(
                f"focal lengths must be positive, got f_u={self.f_u}, f_v={self.f_v}"
            )

    def projection_matrix(self) -> np.ndarray:
        """3x4 projection matrix mapping reference-frame points to pixels."""
        return np.array(
            [
                [self.f_u, 0.0, self.c_u, -self.f_u * self.b_x],
                [0.0, self.f_v, self.c_v, 0.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        )

    def project(self, points: np.ndarray) -> np.ndarray:
        """Project (..., 3) reference-frame points to (..., 2) pixel coords."""
        pts = np.asarray(points, dtype=float)
        z = pts[..., 2]
        u = self.f_u * (pts[..., 0] - self.b_x) / z + self.c_u
        v = self.f_v * pts[..., 1] / z + self.c_v
        return np.stack([u, v], axis=-1)


@dataclass(frozen=True)
class StereoRig:
    """A rectified stereo pair; ``left`` is the reference camera."""

    left: CameraIntrinsics
    right: CameraIntrinsics

    def __post_init__(self):
        if self.left.f_u != self.right.f_u:
            warnings.warn(
                "left/right horizontal focal lengths differ "
                f"({self.left.f_u} vs {self.right.f_u}); rig may not be rectified",
                stacklevel=2,
            )
        if self.baseline <= 0.0:
            raise InvalidCalibrationError(
                f"stereo baseline must be positive, got {self.baseline}"
            )

    @property
    def baseline(self) -> float:
        """Baseline in meters: ``(-f_u_l*b_x_l + f_u_r*b_x_r) / f_u_l``."""
        return (
            -self.left.f_u * self.left.b_x + self.right.f_u * self.right.b_x
        ) / self.left.f_u


def zoom_intrinsics(cam: CameraIntrinsics, k: float, m: float) -> CameraIntrinsics:
    """Rescale intrinsics for a raster zoomed by ``k`` horizontally, ``m`` vertically.

    Focal lengths and principal point scale with the raster; the baseline
    offset ``b_x`` is untouched because it enters the projection matrix as
    ``-k*f_u*b_x`` with both factors already scaled by ``k``.
    """
    if not (k > 0.0 and m > 0.0) or not (math.isfinite(k) and math.isfinite(m)):
        raise ValueError(f"zoom factors must be positive and finite, got k={k}, m={m}")
    return CameraIntrinsics(
        f_u=k * cam.f_u,
        f_v=m * cam.f_v,
        c_u=k * cam.c_u,
        c_v=m * cam.c_v,
        b_x=cam.b_x,
    )


def zoomed_baseline(rig: StereoRig, k: float) -> float:
    """Baseline of the rig after zooming by ``k``: identical to the unzoomed one.

    The zoom factor cancels algebraically,
    ``(-k*f_u_l*b_x_l + k*f_u_r*b_x_r) / (k*f_u_l)``, so this evaluates the
    unzoomed formula and is bit-exact for every ``k``.
    """
    if not (k > 0.0) or not math.isfinite(k):
        raise ValueError(f"zoom factor must be positive and finite, got {k}")
    return rig.baseline


def _parse_matrix_line(key: str, value: str) -> np.ndarray:
    fields = value.split()
    if len(fields) != 12:
        raise CalibFormatError(f"{key} line must have 12 values, got {len(fields)}")
    try:
        return np.array([float(x) for x in fields]).reshape(3, 4)
    except ValueError as exc:
        raise CalibFormatError(f"{key} line has a non-numeric field: {exc}") from exc


def _intrinsics_from_matrix(key: str, mat: np.ndarray) -> CameraIntrinsics:
    f_u, f_v = mat[0, 0], mat[1, 1]
    if f_u == 0.0:
        raise InvalidCalibrationError(f"{key} has zero horizontal focal length")
    unexpected = {
        "skew P[0][1]": mat[0, 1],
        "P[1][0]": mat[1, 0],
        "P[1][3]": mat[1, 3],
        "P[2][0]": mat[2, 0],
        "P[2][1]": mat[2, 1],
        "P[2][3]": mat[2, 3],
        "P[2][2]-1": mat[2, 2] - 1.0,
    }
    nonzero = [name for name, v in unexpected.items() if v != 0.0]
    if nonzero:
        warnings.warn(
            f"{key}: ignoring unexpected nonzero entries: {', '.join(nonzero)}",
            stacklevel=3,
        )
    return CameraIntrinsics(
        f_u=f_u,
        f_v=f_v,
        c_u=mat[0, 2],
        c_v=mat[1, 2],
        b_x=-mat[0, 3] / f_u,
    )


def parse_kitti_calib(text: str) -> StereoRig:
    """Parse KITTI calibration text into a :class:`StereoRig`.

    Only the ``P2``/``P3`` lines are consumed; other lines are skipped here
    and preserved by :func:`serialize_kitti_calib` when a template is given.
    """
    matrices = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or ":" not in line:
            continue
        key, value = line.split(":", 1)
        key = key.strip()
        if key in (LEFT_KEY, RIGHT_KEY):
            matrices[key] = _parse_matrix_line(key, value)
    for key in (LEFT_KEY, RIGHT_KEY):
        if key not in matrices:
            raise CalibFormatError(f"calibration text is missing a {key} line")
    return StereoRig(
        left=_intrinsics_from_matrix(LEFT_KEY, matrices[LEFT_KEY]),
        right=_intrinsics_from_matrix(RIGHT_KEY, matrices[RIGHT_KEY]),
    )


def _matrix_line(key: str, cam: CameraIntrinsics) -> str:
    values = cam.projection_matrix().reshape(-1)
    return f"{key}: " + " ".join(repr(float(v)) for v in values)


def serialize_kitti_calib(rig: StereoRig, template_text: str | None = None) -> str:
    """Render a rig back to KITTI calibration text.

    With ``template_text``, every line other than ``P2``/``P3`` is kept
    verbatim and in place; otherwise only the two projection lines are
    emitted. Float fields use ``repr`` so parse -> serialize -> parse is a
    fixed point.
    """
    lines = {LEFT_KEY: _matrix_line(LEFT_KEY, rig.left),
             RIGHT_KEY: _matrix_line(RIGHT_KEY, rig.right)}
    if template_text is None:
        return lines[LEFT_KEY] + "\n" + lines[RIGHT_KEY] + "\n"
    out = []
    for line in template_text.splitlines():
        key = line.split(":", 1)[0].strip() if ":" in line else None
        out.append(lines[key] if key in lines else line)
    return "\n".join(out) + "\n"
