"""Part locations: normalized object-frame coordinates of box surface points.

A part location (p_x, p_y, p_z) places a point inside an oriented 3D box:
each component lies in [0, 1] for points inside the box, with (0.5, 0, 0.5)
at the bottom-face center. The object frame follows the KITTI label
convention: origin at the bottom-face center, x along length, y pointing
down (the camera's y), z along width, yaw rotating about the y axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]. In-range values pass through unchanged,
    so wrapping is idempotent and bit-exact on already-wrapped angles."""
    if -math.pi < theta <= math.pi:
        return float(theta)
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def yaw_matrix(yaw: float) -> np.ndarray:
    """Rotation about the vertical (y) axis, camera-frame convention."""
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class PartLocation:
    """Normalized object-frame coordinates, each in [0,1] inside the box."""

    p_x: float
    p_y: float
    p_z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p_x, self.p_y, self.p_z])


@dataclass(frozen=True)
class Box3D:
    """Oriented 3D box: dims (height, width, length) in meters, yaw about the
    vertical axis, and t = bottom-center position in the camera frame."""

    dims: tuple[float, float, float]
    yaw: float
    t: tuple[float, float, float]

    def __post_init__(self):
        h, w, l = self.dims
        if not (h > 0.0 and w > 0.0 and l > 0.0):
            raise ValueError(f"box dimensions must be positive, got {self.dims}")
        if not all(math.isfinite(v) for v in (*self.dims, self.yaw, *self.t)):
            raise ValueError("box parameters must be finite")
        object.__setattr__(self, "dims", tuple(float(v) for v in self.dims))
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))
        object.__setattr__(self, "t", tuple(float(v) for v in self.t))

    @property
    def height(self) -> float:
        return self.dims[0]

    @property
    def width(self) -> float:
        return self.dims[1]

    @property
    def length(self) -> float:
        return self.dims[2]

    def volume(self) -> float:
        h, w, l = self.dims
        return h * w * l

    def bev_corners(self) -> np.ndarray:
        """4x2 ground-plane corners (x, z), counterclockwise in the x-z plane."""
        h, w, l = self.dims
        local = np.array(
            [[l / 2, w / 2], [-l / 2, w / 2], [-l / 2, -w / 2], [l / 2, -w / 2]]
        )
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        rot = np.array([[c, s], [-s, c]])
        return local @ rot.T + np.array([self.t[0], self.t[2]])

    def corners_3d(self) -> np.ndarray:
        """8x3 camera-frame corners, bottom face first (y grows downward)."""
        bev = self.bev_corners()
        bottom = np.column_stack([bev[:, 0], np.full(4, self.t[1]), bev[:, 1]])
        top = bottom.copy()
        top[:, 1] -= self.height
        return np.vstack([bottom, top])


def to_object_frame(points_cam: np.ndarray, box: Box3D) -> np.ndarray:
    """Map camera-frame points (..., 3) into the box's object frame."""
    pts = np.asarray(points_cam, dtype=float)
    return (pts - np.asarray(box.t)) @ yaw_matrix(box.yaw)


def from_object_frame(points_obj: np.ndarray, box: Box3D) -> np.ndarray:
    """Map object-frame points (..., 3) back to the camera frame."""
    pts = np.asarray(points_obj, dtype=float)
    return pts @ yaw_matrix(box.yaw).T + np.asarray(box.t)


def encode_part_array(points_cam: np.ndarray, box: Box3D) -> np.ndarray:
    """Part locations for camera-frame points (..., 3); same leading shape.

    Points inside the box map into [0,1]^3; outside points fall outside
    that range and are not clamped.
    """
    q = to_object_frame(points_cam, box)
    h, w, l = box.dims
    out = np.empty_like(q)
    out[..., 0] = q[..., 0] / l + 0.5
    out[..., 1] = -q[..., 1] / h
    out[..., 2] = q[..., 2] / w + 0.5
    return out


def decode_part_array(parts: np.ndarray, box: Box3D) -> np.ndarray:
    """Camera-frame points for part locations (..., 3); exact inverse of
    :func:`encode_part_array`."""
    p = np.asarray(parts, dtype=float)
    h, w, l = box.dims
    q = np.empty_like(p)
    q[..., 0] = (p[..., 0] - 0.5) * l
    q[..., 1] = -p[..., 1] * h
    q[..., 2] = (p[..., 2] - 0.5) * w
    return from_object_frame(q, box)


def decode_part_targets(parts: np.ndarray, dims: tuple[float, float, float]) -> np.ndarray:
    """Object-frame points for part locations (..., 3), given dims only.

    This is the decode step with an identity pose: the targets a pose
    estimator aligns against the observed camera-frame points.
    """
    p = np.asarray(parts, dtype=float)
    h, w, l = dims
    q = np.empty_like(p)
    q[..., 0] = (p[..., 0] - 0.5) * l
    q[..., 1] = -p[..., 1] * h
    q[..., 2] = (p[..., 2] - 0.5) * w
    return q


def encode_part_location(point_cam, box: Box3D) -> PartLocation:
    """Part location of a single camera-frame point."""
    p = encode_part_array(np.asarray(point_cam, dtype=float), box)
    return PartLocation(float(p[0]), float(p[1]), float(p[2]))


def decode_part_location(p: PartLocation, box: Box3D) -> np.ndarray:
    """Camera-frame point of a single part location."""
    return decode_part_array(p.as_array(), box)


def part_location_image(parts: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Render a part-location raster (H, W, 3) as an RGB uint8 image.

    Channels map (p_x, p_y, p_z) -> (R, G, B) scaled to 0..255 with values
    clipped to [0,1]; background pixels (mask False) are black.
    """
    parts = np.asarray(parts, dtype=float)
    if parts.ndim != 3 or parts.shape[2] != 3:
        raise ValueError(f"part raster must have shape (H, W, 3), got {parts.shape}")
    rgb = np.clip(parts, 0.0, 1.0)
    if mask is not None:
        rgb = np.where(np.asarray(mask, dtype=bool)[:, :, None], rgb, 0.0)
    return np.round(rgb * 255.0).astype(np.uint8)


def save_part_visualization(
    path, parts: np.ndarray, mask: np.ndarray | None = None
) -> None:
    """Write the RGB rendering of a part-location raster as a PNG."""
    Image.fromarray(part_location_image(parts, mask), mode="RGB").save(path, format="PNG")
