"""Back-projection, instance cloud assembly, sampling, and file round trips."""

import numpy as np
import pytest

from stereozoom import (
    CameraIntrinsics,
    EmptyCloudError,
    InstanceMaps,
    InstancePointCloud,
    NonPositiveDisparityError,
    StereoRig,
    StereoRoI,
    backproject_pixel,
    backproject_pixels,
    build_instance_cloud,
    load_cloud_binary,
    load_disparity_png,
    load_ply,
    make_zoomed_view,
    sample_points,
    save_cloud_binary,
    save_disparity_png,
    save_ply,
)

from conftest import make_rig


@pytest.fixture
def toy_rig():
    # f = 100, c = (50, 60), offsets -0.1 / +0.4 so the baseline is 0.5 m
    # and every expected value below stays hand-checkable.
    left = CameraIntrinsics(100.0, 100.0, 50.0, 60.0, b_x=-0.1)
    right = CameraIntrinsics(100.0, 100.0, 50.0, 60.0, b_x=0.4)
    return StereoRig(left, right)


def full_frame_view(rig, width=200, height=150):
    roi = StereoRoI(x=0.0, x_bar=0.0, y=0.0, w=float(width), h=float(height))
    return make_zoomed_view(roi, rig, target=(width, height))


def test_backproject_known_point(toy_rig):
    view = full_frame_view(toy_rig)
    # z = 1 * 100 * 0.5 / (5 + 0) = 10
    # x = (70 - 50) * 10 / 100 - 0.1 = 2 - 0.1 = 1.9
    # y = (80 - 60) * 10 / 100 = 2
    p = backproject_pixel(70.0, 80.0, 5.0, view, toy_rig)
    assert p[2] == 10.0
    assert p[1] == 2.0
    assert p[0] == pytest.approx(1.9, abs=1e-12)


def test_backproject_zoomed_matches_full_frame(toy_rig):
    # RoI starting at (20, 10), size 32x16, zoomed to 64x32: k = m = 2 and
    # the disparity offset is 2 * (20 - 18) = 4.
    roi = StereoRoI(x=20.0, x_bar=18.0, y=10.0, w=32.0, h=16.0)
    view = make_zoomed_view(roi, toy_rig, target=(64, 32))
    assert view.o_hat == 4.0
    # Full-frame pixel (30, 20) with disparity 5 maps to zoomed pixel
    # (2*(30-20), 2*(20-10)) = (20, 20) with crop disparity 2*5 - 4 = 6.
    p = backproject_pixel(20.0, 20.0, 6.0, view, toy_rig)
    # z = 2 * 100 * 0.5 / (6 + 4) = 10
    assert p[2] == 10.0
    assert p[1] == -4.0
    assert p[0] == pytest.approx(-2.1, abs=1e-12)
    full = full_frame_view(toy_rig)
    q = backproject_pixel(30.0, 20.0, 5.0, full, toy_rig)
    assert np.allclose(p, q, atol=1e-12)


def test_backproject_zoom_invariance_random():
    rng = np.random.default_rng(11)
    rig = make_rig()
    full = full_frame_view(rig, 1242, 375)
    for _ in range(200):
        x = rng.uniform(50.0, 900.0)
        y = rng.uniform(20.0, 300.0)
        w = rng.uniform(20.0, 300.0)
        h = rng.uniform(10.0, 70.0)
        x_bar = x - rng.uniform(0.0, 30.0)
        roi = StereoRoI(x=x, x_bar=x_bar, y=y, w=w, h=h)
        view = make_zoomed_view(roi, rig, target=(256, 128))
        u = rng.uniform(x, x + w)
        v = rng.uniform(y, y + h)
        d = rng.uniform(1.0, 60.0)
        p_full = backproject_pixel(u, v, d, full, rig)
        p_zoom = backproject_pixel(
            view.k * (u - x), view.m * (v - y), view.k * d - view.o_hat, view, rig
        )
        assert np.allclose(p_full, p_zoom, atol=1e-9)


def test_backproject_rejects_nonpositive_effective_disparity(toy_rig):
    view = full_frame_view(toy_rig)
    with pytest.raises(NonPositiveDisparityError):
        backproject_pixel(10.0, 10.0, 0.0, view, toy_rig)
    with pytest.raises(NonPositiveDisparityError):
        backproject_pixel(10.0, 10.0, -3.0, view, toy_rig)


def test_backproject_pixels_broadcasts(toy_rig):
    view = full_frame_view(toy_rig)
    u = np.array([70.0, 70.0])
    pts = backproject_pixels(u, 80.0, np.array([5.0, 10.0]), view, toy_rig)
    assert pts.shape == (2, 3)
    assert pts[0, 2] == 10.0
    # doubling the disparity halves the depth: 50 / 10 = 5
    assert pts[1, 2] == 5.0


def test_build_instance_cloud_rows_and_diagnostics(toy_rig):
    roi = StereoRoI(x=0.0, x_bar=0.0, y=0.0, w=3.0, h=2.0)
    view = make_zoomed_view(roi, toy_rig, target=(3, 2))
    disparity = np.array([[1.0, 2.0, 3.0],
                          [4.0, np.nan, 6.0]])
    parts = (np.arange(18.0) / 18.0).reshape(2, 3, 3)
    mask = np.array([[True, True, False],
                     [True, True, True]])
    maps = InstanceMaps(disparity=disparity, parts=parts, mask=mask)
    cloud = build_instance_cloud(maps, view, toy_rig)
    # Five foreground pixels; the NaN one is dropped; (0,2) is background.
    assert cloud.diagnostics.foreground_count == 5
    assert cloud.diagnostics.dropped_count == 1
    assert len(cloud) == 4
    # Row-major pixel order: (0,0), (0,1), (1,0), (1,2)
    assert np.array_equal(cloud.pixels, [[0, 0], [0, 1], [1, 0], [1, 2]])
    expected_first = backproject_pixel(0.0, 0.0, 1.0, view, toy_rig)
    assert np.allclose(cloud.xyz[0], expected_first, atol=0.0)
    assert np.array_equal(cloud.parts, parts[[0, 0, 1, 1], [0, 1, 0, 2]])


def test_build_instance_cloud_shape_mismatch(toy_rig):
    view = full_frame_view(toy_rig, 4, 4)
    maps = InstanceMaps(
        disparity=np.ones((2, 3)),
        parts=np.zeros((2, 3, 3)),
        mask=np.ones((2, 3), dtype=bool),
    )
    with pytest.raises(ValueError):
        build_instance_cloud(maps, view, toy_rig)


def test_instance_maps_validates_shapes():
    with pytest.raises(ValueError):
        InstanceMaps(
            disparity=np.ones((2, 3)),
            parts=np.zeros((3, 2, 3)),
            mask=np.ones((2, 3), dtype=bool),
        )


def make_cloud(n):
    points = np.arange(float(6 * n)).reshape(n, 6)
    pixels = np.column_stack([np.arange(n), np.arange(n) * 2])
    return InstancePointCloud(points, pixels=pixels)


def test_sample_points_without_replacement():
    pc = make_cloud(10)
    out = sample_points(pc, count=4, seed=0)
    assert len(out) == 4
    # Ascending distinct indices: every sampled row is an original row and
    # the pixel provenance stays aligned with it.
    idx = (out.points[:, 0] / 6.0).astype(int)
    assert np.all(np.diff(idx) > 0)
    assert np.array_equal(out.points, pc.points[idx])
    assert np.array_equal(out.pixels, pc.pixels[idx])


def test_sample_points_with_replacement_when_short():
    pc = make_cloud(3)
    out = sample_points(pc, count=7, seed=1)
    assert len(out) == 7
    idx = (out.points[:, 0] / 6.0).astype(int)
    assert np.all(np.diff(idx) >= 0)
    assert set(idx.tolist()) <= {0, 1, 2}


def test_sample_points_deterministic():
    pc = make_cloud(50)
    a = sample_points(pc, count=10, seed=42)
    b = sample_points(pc, count=10, seed=42)
    assert np.array_equal(a.points, b.points)


def test_sample_points_empty_cloud():
    pc = InstancePointCloud(np.zeros((0, 6)))
    with pytest.raises(EmptyCloudError):
        sample_points(pc, count=5, seed=0)


def test_ply_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    points = rng.standard_normal((17, 6))
    points[:, 3:] = rng.random((17, 3))
    pc = InstancePointCloud(points)
    path = tmp_path / "cloud.ply"
    save_ply(path, pc)
    text = path.read_text()
    assert text.startswith("ply")
    assert "element vertex 17" in text
    back = load_ply(path)
    # repr-formatted doubles reproduce every bit.
    assert np.array_equal(back.points, points)


def test_binary_round_trip(tmp_path):
    points = np.random.default_rng(9).standard_normal((23, 6))
    pc = InstancePointCloud(points)
    path = tmp_path / "cloud.bin"
    save_cloud_binary(path, pc)
    back = load_cloud_binary(path)
    assert np.array_equal(back.points, points)
    # 23 points * 6 doubles * 8 bytes = 1104 bytes on disk
    assert path.stat().st_size == 1104


def test_disparity_png_round_trip(tmp_path):
    disparity = np.array([[0.0, 1.0, 1.5],
                          [63.25, 200.00390625, 255.99609375]])
    path = tmp_path / "disp.png"
    save_disparity_png(path, disparity)
    back = load_disparity_png(path)
    # Every input here is a multiple of 1/256, so the encoding is lossless.
    assert np.array_equal(back, disparity)


def test_disparity_png_quantizes_to_1_256(tmp_path):
    rng = np.random.default_rng(2)
    disparity = rng.uniform(0.0, 200.0, size=(8, 8))
    path = tmp_path / "disp.png"
    save_disparity_png(path, disparity)
    back = load_disparity_png(path)
    assert back.shape == disparity.shape
    # Quantization to the nearest 1/256 step never moves a value by more
    # than half a step.
    assert np.max(np.abs(back - disparity)) <= 1.0 / 512.0 + 1e-12
