"""Instance point clouds: back-projection of zoomed-view pixels plus IO.

A cloud row is (x, y, z, p_x, p_y, p_z): a camera-frame point and the part
location predicted (or rendered) at the pixel it came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .calib import StereoRig
from .errors import EmptyCloudError, NonPositiveDisparityError
from .zoom import ZoomedView

DEFAULT_SAMPLE_COUNT = 500

_PLY_FIELDS = ("x", "y", "z", "px", "py", "pz")


@dataclass
class InstanceMaps:
    """Per-pixel maps of one instance crop, all shaped (H, W[, 3]).

    ``disparity`` is in zoomed-view pixels (offset already removed),
    ``parts`` holds part-location triples, ``mask`` is True on foreground.
    """

    disparity: np.ndarray
    parts: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.disparity = np.asarray(self.disparity, dtype=float)
        self.parts = np.asarray(self.parts, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.disparity.ndim != 2:
            raise ValueError(f"disparity must be 2-D, got shape {self.disparity.shape}")
        if self.parts.shape != self.disparity.shape + (3,):
            raise ValueError(
                f"parts shape {self.parts.shape} does not match disparity "
                f"{self.disparity.shape}"
            )
        if self.mask.shape != self.disparity.shape:
            raise ValueError(
                f"mask shape {self.mask.shape} does not match disparity "
                f"{self.disparity.shape}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.disparity.shape


@dataclass
class CloudDiagnostics:
    """Bookkeeping from cloud construction: emitted = foreground - dropped."""

    foreground_count: int
    dropped_count: int


@dataclass
class InstancePointCloud:
    """N x 6 array of (x, y, z, p_x, p_y, p_z) records; z > 0 for all rows.

    ``pixels`` optionally keeps the (row, col) provenance of each record in
    the raster it was built from, so callers can pair records against other
    per-pixel data.
    """

    points: np.ndarray
    diagnostics: CloudDiagnostics | None = field(default=None, compare=False)
    pixels: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 6)
        if self.pixels is not None:
            self.pixels = np.asarray(self.pixels).reshape(-1, 2)
            if self.pixels.shape[0] != self.points.shape[0]:
                raise ValueError(
                    f"{self.pixels.shape[0]} pixel records for "
                    f"{self.points.shape[0]} points"
                )

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]

    @property
    def parts(self) -> np.ndarray:
        return self.points[:, 3:]


def backproject_pixels(
    u, v, d, view: ZoomedView, rig: StereoRig
) -> np.ndarray:
    """Back-project zoomed-view pixels to camera-frame points, vectorized.

    z = k*f_u*b_l / (d + o_hat)
    x = (u + k*(roi_x - c_u)) * z / (k*f_u) + b_x
    y = (v + m*(roi_y - c_v)) * z / (m*f_v)

    with f_u, f_v, c_u, c_v, b_x from the unzoomed left camera. Returns an
    array shaped like the broadcast inputs plus a trailing 3-axis. Callers
    must guarantee d + o_hat > 0.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d = np.asarray(d, dtype=float)
    cam = rig.left
    k, m = view.k, view.m
    roi_x, roi_y = view.origin
    z = k * cam.f_u * rig.baseline / (d + view.o_hat)
    x = (u + k * roi_x - k * cam.c_u) * z / (k * cam.f_u) + cam.b_x
    y = (v + m * roi_y - m * cam.c_v) * z / (m * cam.f_v)
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def backproject_pixel(
    u: float, v: float, d: float, view: ZoomedView, rig: StereoRig
) -> np.ndarray:
    """Back-project one zoomed-view pixel; raises if d + o_hat <= 0."""
    if d + view.o_hat <= 0.0:
        raise NonPositiveDisparityError(
            f"disparity {d} + offset {view.o_hat} is not positive"
        )
    return backproject_pixels(u, v, d, view, rig).reshape(3)


def build_instance_cloud(
    maps: InstanceMaps, view: ZoomedView, rig: StereoRig
) -> InstancePointCloud:
    """Back-project every usable foreground pixel of an instance crop.

    Rows follow row-major pixel order, so output is identical however the
    work is scheduled. Foreground pixels whose disparity is non-finite or
    fails d + o_hat > 0 are dropped and counted in the diagnostics.
    """
    height, width = maps.shape
    if (view.height, view.width) != (height, width):
        raise ValueError(
            f"maps are {width}x{height} but the view is {view.width}x{view.height}"
        )
    usable = maps.mask & np.isfinite(maps.disparity) & (maps.disparity + view.o_hat > 0.0)
    rows, cols = np.nonzero(usable)
    xyz = backproject_pixels(cols, rows, maps.disparity[rows, cols], view, rig)
    points = np.hstack([xyz.reshape(-1, 3), maps.parts[rows, cols].reshape(-1, 3)])
    foreground = int(np.count_nonzero(maps.mask))
    return InstancePointCloud(
        points,
        diagnostics=CloudDiagnostics(
            foreground_count=foreground,
            dropped_count=foreground - points.shape[0],
        ),
        pixels=np.column_stack([rows, cols]),
    )


def sample_indices(n: int, count: int, seed=None) -> np.ndarray:
    """Indices of a random fixed-size sample from ``n`` records.

    Draws without replacement when n >= count, with replacement otherwise,
    and returns the picks in ascending order so sampling all records is the
    identity. ``seed`` may be an int, None, or a numpy Generator.
    """
    if count <= 0:
        raise ValueError(f"sample count must be positive, got {count}")
    if n == 0:
        raise EmptyCloudError("cannot sample from an empty point cloud")
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=count, replace=n < count)
    idx.sort()
    return idx


def sample_points(
    pc: InstancePointCloud, count: int = DEFAULT_SAMPLE_COUNT, seed=None
) -> InstancePointCloud:
    """Random fixed-size subsample of a cloud via :func:`sample_indices`;
    pixel provenance, when present, is subsampled alongside the points."""
    idx = sample_indices(len(pc), count, seed)
    return InstancePointCloud(
        pc.points[idx],
        diagnostics=pc.diagnostics,
        pixels=None if pc.pixels is None else pc.pixels[idx],
    )


def save_ply(path, pc: InstancePointCloud) -> None:
    """Write a cloud as ascii PLY with properties x y z px py pz."""
    lines = ["ply", "format ascii 1.0", f"element vertex {len(pc)}"]
    lines += [f"property double {name}" for name in _PLY_FIELDS]
    lines.append("end_header")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
        for row in pc.points:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_ply(path) -> InstancePointCloud:
    """Read a cloud written by :func:`save_ply`."""
    with open(path) as fh:
        if fh.readline().strip() != "ply":
            raise ValueError(f"{path} is not a PLY file")
        count = None
        names = []
        for line in fh:
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "element" and fields[1] == "vertex":
                count = int(fields[2])
            elif fields[0] == "property":
                names.append(fields[2])
            elif fields[0] == "end_header":
                break
            elif fields[0] == "format" and fields[1] != "ascii":
                raise ValueError(f"{path}: only ascii PLY is supported")
        if count is None or tuple(names) != _PLY_FIELDS:
            raise ValueError(f"{path}: unexpected PLY layout {names}")
        data = np.loadtxt(fh, dtype=float, max_rows=count) if count else np.empty((0, 6))
    return InstancePointCloud(data.reshape(count, 6))


def save_cloud_binary(path, pc: InstancePointCloud) -> None:
    """Write a cloud as flat little-endian float64 records of 6 values."""
    pc.points.astype("<f8").tofile(path)


def load_cloud_binary(path) -> InstancePointCloud:
    """Read a cloud written by :func:`save_cloud_binary`."""
    data = np.fromfile(path, dtype="<f8")
    if data.size % 6 != 0:
        raise ValueError(f"{path}: byte length is not a multiple of 6 float64s")
    return InstancePointCloud(data.reshape(-1, 6))


def save_disparity_png(path, disparity: np.ndarray) -> None:
    """Write a disparity raster as 16-bit PNG with value = disparity * 256.

    Values are rounded to the nearest 1/256 px and clipped to the
    representable range [0, 65535/256]; zero conventionally marks invalid
    pixels.
    """
    disparity = np.asarray(disparity, dtype=float)
    encoded = np.round(np.clip(disparity, 0.0, 65535.0 / 256.0) * 256.0)
    Image.fromarray(encoded.astype(np.uint16)).save(path, format="PNG")


def load_disparity_png(path) -> np.ndarray:
    """Read a 16-bit PNG disparity raster back to float pixels."""
    arr = np.asarray(Image.open(path))
    if arr.dtype not in (np.uint16, np.int32, np.uint8):
        raise ValueError(f"{path}: expected an integer grayscale PNG, got {arr.dtype}")
    return arr.astype(float) / 256.0
