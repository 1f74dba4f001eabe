"""Synthetic scene oracle: exact instance maps rendered from placed boxes.

Scenes are lists of oriented boxes in front of a stereo rig. Rendering
ray-casts an object's surface through the zoomed-view pixel grid and emits
the ground-truth disparity, part-location, and mask rasters the rest of the
pipeline consumes, so every stage can be tested end to end without trained
networks or real data. All math is vectorized over the pixel grid; results
do not depend on scheduling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .calib import CameraIntrinsics, StereoRig
from .errors import NotVisibleError
from .parts import Box3D, encode_part_array, yaw_matrix
from .pointcloud import InstanceMaps
from .zoom import DEFAULT_TARGET, StereoRoI, ZoomedView, make_zoomed_view

SURFACE_BOX_SHELL = "box-shell"
SURFACE_ELLIPSOID = "ellipsoid"
SURFACES = (SURFACE_BOX_SHELL, SURFACE_ELLIPSOID)


@dataclass(frozen=True)
class SceneObject:
    """One placed object: a box, its category, and its surface model.

    ``box-shell`` ray-casts the box's top and four side faces (no bottom);
    ``ellipsoid`` casts the inscribed ellipsoid, approximating curved
    bodies. Both are analytic, so hits are exact.
    """

    box: Box3D
    category: str = "Car"
    surface: str = SURFACE_BOX_SHELL

    def __post_init__(self):
        if self.surface not in SURFACES:
            raise ValueError(f"surface must be one of {SURFACES}, got {self.surface!r}")


@dataclass(frozen=True)
class SyntheticScene:
    """A stereo rig, an image extent in pixels, and the placed objects."""

    rig: StereoRig
    objects: tuple[SceneObject, ...]
    image_size: tuple[int, int] = (1242, 375)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        for i, obj in enumerate(self.objects):
            if obj.box.t[2] <= 0.0:
                raise ValueError(f"object {i} sits at non-positive depth {obj.box.t[2]}")
        width, height = self.image_size
        if not (width > 0 and height > 0):
            raise ValueError(f"image size must be positive, got {self.image_size}")


def _ray_hits_box_shell(origin, dirs, box: Box3D) -> np.ndarray:
    """Depth of the nearest hit on the box's top or side faces, inf on miss.

    Rays are expressed in the object frame where the interior is
    x in [-l/2, l/2], y in [-h, 0], z in [-w/2, w/2]; the bottom face
    (y = 0) is not part of the shell.
    """
    rot = yaw_matrix(box.yaw)
    o = (origin - np.asarray(box.t)) @ rot
    d = dirs @ rot
    h, w, l = box.dims
    faces = (
        (1, -h, 0, -l / 2, l / 2, 2, -w / 2, w / 2),
        (0, l / 2, 1, -h, 0.0, 2, -w / 2, w / 2),
        (0, -l / 2, 1, -h, 0.0, 2, -w / 2, w / 2),
        (2, w / 2, 1, -h, 0.0, 0, -l / 2, l / 2),
        (2, -w / 2, 1, -h, 0.0, 0, -l / 2, l / 2),
    )
    best = np.full(dirs.shape[:-1], np.inf)
    for axis, value, ax_a, lo_a, hi_a, ax_b, lo_b, hi_b in faces:
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (value - o[axis]) / d[..., axis]
        hit_a = o[ax_a] + t * d[..., ax_a]
        hit_b = o[ax_b] + t * d[..., ax_b]
        valid = (
            (t > 0.0)
            & np.isfinite(t)
            & (hit_a >= lo_a)
            & (hit_a <= hi_a)
            & (hit_b >= lo_b)
            & (hit_b <= hi_b)
        )
        best = np.where(valid & (t < best), t, best)
    return best


def _ray_hits_ellipsoid(origin, dirs, box: Box3D) -> np.ndarray:
    """Depth of the nearest hit on the box's inscribed ellipsoid, inf on miss."""
    rot = yaw_matrix(box.yaw)
    h, w, l = box.dims
    center = np.array([0.0, -h / 2.0, 0.0])
    semi = np.array([l / 2.0, h / 2.0, w / 2.0])
    o = ((origin - np.asarray(box.t)) @ rot - center) / semi
    d = (dirs @ rot) / semi
    a = np.sum(d * d, axis=-1)
    b = 2.0 * np.sum(o * d, axis=-1)
    c = float(np.dot(o, o)) - 1.0
    disc = b * b - 4.0 * a * c
    hit = disc >= 0.0
    sqrt_disc = np.sqrt(np.where(hit, disc, 0.0))
    near = (-b - sqrt_disc) / (2.0 * a)
    far = (-b + sqrt_disc) / (2.0 * a)
    t = np.where(near > 0.0, near, far)
    return np.where(hit & (t > 0.0), t, np.inf)


_RAY_CASTERS = {
    SURFACE_BOX_SHELL: _ray_hits_box_shell,
    SURFACE_ELLIPSOID: _ray_hits_ellipsoid,
}


def instance_roi(scene: SyntheticScene, box_index: int) -> StereoRoI:
    """Stereo RoI of one object: the projected-corner bounding boxes in the
    left and right images, clipped to the image extent."""
    box = scene.objects[box_index].box
    corners = box.corners_3d()
    if np.any(corners[:, 2] <= 0.0):
        raise NotVisibleError(f"object {box_index} extends behind the camera")
    uv_left = scene.rig.left.project(corners)
    uv_right = scene.rig.right.project(corners)
    width, height = scene.image_size
    x0 = max(0.0, float(uv_left[:, 0].min()))
    x1 = min(float(width), float(uv_left[:, 0].max()))
    y0 = max(0.0, float(uv_left[:, 1].min()))
    y1 = min(float(height), float(uv_left[:, 1].max()))
    if x1 <= x0 or y1 <= y0:
        raise NotVisibleError(f"object {box_index} projects outside the image")
    x_bar = max(0.0, float(uv_right[:, 0].min()))
    return StereoRoI(x=x0, x_bar=x_bar, y=y0, w=x1 - x0, h=y1 - y0)


def render_instance(
    scene: SyntheticScene, box_index: int, target: tuple[int, int] = DEFAULT_TARGET
) -> tuple[StereoRoI, ZoomedView, InstanceMaps]:
    """Render ground-truth instance maps for one object.

    Rays go through the zoomed pixel grid of the object's RoI; the nearest
    hit over all scene objects wins each pixel (ties to the lower object
    index), so occluders carve their silhouettes out of the instance mask.
    Foreground disparity is d = k*f_u*b_l/z - o_hat, the exact value the
    back-projection inverts; parts encode the hit points against the
    object's box. Background pixels are zero in all maps.
    """
    roi = instance_roi(scene, box_index)
    view = make_zoomed_view(roi, scene.rig, target)
    cam = scene.rig.left
    cols = roi.x + np.arange(view.width) / view.k
    rows = roi.y + np.arange(view.height) / view.m
    dirs = np.empty((view.height, view.width, 3))
    dirs[..., 0] = (cols[None, :] - cam.c_u) / cam.f_u
    dirs[..., 1] = (rows[:, None] - cam.c_v) / cam.f_v
    dirs[..., 2] = 1.0
    origin = np.array([cam.b_x, 0.0, 0.0])

    depth = np.full((view.height, view.width), np.inf)
    winner = np.full((view.height, view.width), -1)
    for index, obj in enumerate(scene.objects):
        t_hit = _RAY_CASTERS[obj.surface](origin, dirs, obj.box)
        closer = t_hit < depth
        depth[closer] = t_hit[closer]
        winner[closer] = index

    mask = winner == box_index
    disparity = np.zeros_like(depth)
    parts = np.zeros((view.height, view.width, 3))
    if mask.any():
        z = depth[mask]
        disparity[mask] = view.k * cam.f_u * scene.rig.baseline / z - view.o_hat
        points = origin + z[:, None] * dirs[mask]
        parts[mask] = encode_part_array(points, scene.objects[box_index].box)
    return roi, view, InstanceMaps(disparity=disparity, parts=parts, mask=mask)


def quantize_disparity(maps: InstanceMaps, step: float) -> InstanceMaps:
    """Round disparity to the nearest multiple of ``step`` pixels, emulating
    finite stereo-matching resolution; parts and mask are untouched."""
    if not (step > 0.0):
        raise ValueError(f"quantization step must be positive, got {step}")
    return InstanceMaps(
        disparity=np.round(maps.disparity / step) * step,
        parts=maps.parts.copy(),
        mask=maps.mask.copy(),
    )


def corrupt_maps(
    maps: InstanceMaps,
    disparity_noise_sigma: float = 0.0,
    part_outlier_fraction: float = 0.0,
    seed=None,
) -> InstanceMaps:
    """Degrade rendered maps: Gaussian disparity noise on foreground pixels
    and a random subset of foreground part locations replaced by uniform
    [0,1]^3 draws. Deterministic given ``seed``."""
    if disparity_noise_sigma < 0.0:
        raise ValueError(f"noise sigma must be >= 0, got {disparity_noise_sigma}")
    if not (0.0 <= part_outlier_fraction < 1.0):
        raise ValueError(
            f"outlier fraction must be in [0,1), got {part_outlier_fraction}"
        )
    rng = np.random.default_rng(seed)
    disparity = maps.disparity.copy()
    parts = maps.parts.copy()
    rows, cols = np.nonzero(maps.mask)
    if disparity_noise_sigma > 0.0 and rows.size:
        disparity[rows, cols] += rng.normal(0.0, disparity_noise_sigma, rows.size)
    if part_outlier_fraction > 0.0 and rows.size:
        n_out = int(round(part_outlier_fraction * rows.size))
        picked = rng.choice(rows.size, size=n_out, replace=False)
        parts[rows[picked], cols[picked]] = rng.uniform(0.0, 1.0, (n_out, 3))
    return InstanceMaps(disparity=disparity, parts=parts, mask=maps.mask.copy())


def scene_to_dict(scene: SyntheticScene) -> dict:
    def cam_dict(cam: CameraIntrinsics) -> dict:
        return {"f_u": cam.f_u, "f_v": cam.f_v, "c_u": cam.c_u, "c_v": cam.c_v,
                "b_x": cam.b_x}

    return {
        "rig": {"left": cam_dict(scene.rig.left), "right": cam_dict(scene.rig.right)},
        "image_size": list(scene.image_size),
        "objects": [
            {
                "category": obj.category,
                "surface": obj.surface,
                "dims": list(obj.box.dims),
                "yaw": obj.box.yaw,
                "t": list(obj.box.t),
            }
            for obj in scene.objects
        ],
    }


def scene_from_dict(data: dict) -> SyntheticScene:
    rig = StereoRig(
        left=CameraIntrinsics(**data["rig"]["left"]),
        right=CameraIntrinsics(**data["rig"]["right"]),
    )
    objects = tuple(
        SceneObject(
            box=Box3D(dims=tuple(o["dims"]), yaw=o["yaw"], t=tuple(o["t"])),
            category=o.get("category", "Car"),
            surface=o.get("surface", SURFACE_BOX_SHELL),
        )
        for o in data["objects"]
    )
    return SyntheticScene(
        rig=rig, objects=objects, image_size=tuple(data["image_size"])
    )


def load_scene(path) -> SyntheticScene:
    with open(path) as fh:
        return scene_from_dict(json.load(fh))


def save_scene(path, scene: SyntheticScene) -> None:
    with open(path, "w") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2)
        fh.write("\n")
