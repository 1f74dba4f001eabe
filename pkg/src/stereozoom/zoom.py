"""Adaptive zooming of stereo RoIs.

A stereo RoI is a pair of horizontally aligned crops, one per camera, that
share the vertical extent. Zooming resizes the crop to a fixed raster while
scaling the intrinsics by the same factors, so the triangulation geometry is
preserved; the per-pixel disparity inside the crop is then measured relative
to the offset ``o_hat`` between the two crop starts.

Rasters are numpy arrays indexed ``[row, col]``, i.e. shape (height, width);
pixel centers sit at integer coordinates with no half-pixel offset.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .calib import CameraIntrinsics, StereoRig, zoom_intrinsics
from .errors import EmptyCropError, NegativeDisparityOffsetError

DEFAULT_TARGET = (256, 128)


@dataclass(frozen=True)
class StereoRoI:
    """Matched stereo crops: left box starts at ``x``, right box at ``x_bar``.

    Both boxes share ``y``, ``w``, ``h``. Coordinates are continuous; integer
    starts are not required. For an object at positive depth ``x >= x_bar``.
    """

    x: float
    x_bar: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0.0 and self.h > 0.0):
            raise EmptyCropError(f"RoI must have positive size, got w={self.w}, h={self.h}")


@dataclass(frozen=True)
class ZoomedView:
    """A stereo RoI resized to a fixed raster with matching scaled intrinsics.

    ``k`` and ``m`` are the horizontal and vertical zoom factors, ``o_hat``
    the disparity offset between the two crops measured in zoomed pixels, and
    ``origin`` the unzoomed (x, y) start of the left crop.
    """

    k: float
    m: float
    o_hat: float
    left_cam: CameraIntrinsics
    right_cam: CameraIntrinsics
    width: int
    height: int
    origin: tuple[float, float]


def make_zoomed_view(
    roi: StereoRoI, rig: StereoRig, target: tuple[int, int] = DEFAULT_TARGET
) -> ZoomedView:
    """Zoom a stereo RoI to ``target`` = (width, height) pixels.

    Zoom factors are k = width/roi.w and m = height/roi.h, applied to both
    cameras' intrinsics; the disparity offset becomes o_hat = k*(x - x_bar).
    """
    width, height = target
    if not (width > 0 and height > 0):
        raise ValueError(f"target size must be positive, got {target}")
    if roi.x < roi.x_bar:
        raise NegativeDisparityOffsetError(
            f"right crop starts at {roi.x_bar}, past the left crop at {roi.x}; "
            "disparity offset would be negative"
        )
    k = width / roi.w
    m = height / roi.h
    return ZoomedView(
        k=k,
        m=m,
        o_hat=k * (roi.x - roi.x_bar),
        left_cam=zoom_intrinsics(rig.left, k, m),
        right_cam=zoom_intrinsics(rig.right, k, m),
        width=int(width),
        height=int(height),
        origin=(roi.x, roi.y),
    )


def depth_error(z, delta_d, k: float, rig: StereoRig):
    """First-order depth error from a disparity error of ``delta_d`` pixels.

    From z = k*f_u*b_l/d, a disparity perturbation delta_d maps to
    delta_z = z**2 * delta_d / (k * f_u * b_l). Zooming in (k > 1) shrinks
    the error by 1/k. Accepts scalars or arrays for ``z`` and ``delta_d``.
    """
    if not (k > 0.0) or not math.isfinite(k):
        raise ValueError(f"zoom factor must be positive and finite, got {k}")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise ValueError("depth must be positive")
    out = z * z * np.asarray(delta_d, dtype=float) / (k * rig.left.f_u * rig.baseline)
    return float(out) if out.ndim == 0 else out


def zoom_raster(
    src: np.ndarray,
    roi: StereoRoI,
    target: tuple[int, int] = DEFAULT_TARGET,
    interpolation: str = "bilinear",
) -> np.ndarray:
    """Resample the RoI crop of ``src`` to a (height, width) raster.

    Output pixel (u, v) samples the source at (roi.x + u/k, roi.y + v/m)
    with k = width/roi.w, m = height/roi.h. ``interpolation`` is "bilinear"
    for continuous maps or "nearest" for categorical ones (masks). An RoI
    reaching past the source is clamped to the edge and reported with a
    warning; an RoI entirely outside the source is an error.
    """
    if interpolation not in ("bilinear", "nearest"):
        raise ValueError(f"unknown interpolation {interpolation!r}")
    src = np.asarray(src)
    if src.ndim not in (2, 3):
        raise ValueError(f"source raster must be 2-D or 3-D, got shape {src.shape}")
    src_h, src_w = src.shape[:2]
    if roi.x >= src_w or roi.x + roi.w <= 0 or roi.y >= src_h or roi.y + roi.h <= 0:
        raise EmptyCropError(
            f"RoI ({roi.x}, {roi.y}, {roi.w}x{roi.h}) does not intersect "
            f"a {src_w}x{src_h} source"
        )
    if roi.x < 0 or roi.y < 0 or roi.x + roi.w > src_w or roi.y + roi.h > src_h:
        warnings.warn(
            f"RoI ({roi.x}, {roi.y}, {roi.w}x{roi.h}) truncated to the "
            f"{src_w}x{src_h} source; edge values extended",
            stacklevel=2,
        )
    width, height = target
    if not (width > 0 and height > 0):
        raise ValueError(f"target size must be positive, got {target}")
    k = width / roi.w
    m = height / roi.h
    cols = roi.x + np.arange(width) / k
    rows = roi.y + np.arange(height) / m
    coords = np.broadcast_arrays(rows[:, None], cols[None, :])
    order = 1 if interpolation == "bilinear" else 0

    def resample(plane: np.ndarray) -> np.ndarray:
        if plane.dtype == bool:
            return map_coordinates(
                plane.astype(np.uint8), coords, order=order, mode="nearest"
            ).astype(bool)
        return map_coordinates(
            plane.astype(float), coords, order=order, mode="nearest"
        )

    if src.ndim == 2:
        return resample(src)
    channels = [resample(src[:, :, c]) for c in range(src.shape[2])]
    return np.stack(channels, axis=-1)
