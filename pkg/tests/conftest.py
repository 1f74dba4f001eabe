"""Shared fixtures and terminal reporting for the acceptance suite."""

import numpy as np
import pytest

from stereozoom import (
    Box3D,
    CameraIntrinsics,
    SceneObject,
    StereoRig,
    SyntheticScene,
)

# Calibration text shaped like a KITTI object-detection calib file. P2 is the
# left color camera, P3 the right one. Baseline from the P2/P3 pair:
#   b_x(left)  = -44.85728 / 721.5377  = -0.06216900378178438
#   b_x(right) = 339.5242 / 721.5377   =  0.47057392354892346
#   baseline   = 0.47057392354892346 + 0.06216900378178438 = 0.5327254279298227
KITTI_CALIB_TEXT = """\
P0: 721.5377 0.0 609.5593 0.0 0.0 721.5377 172.854 0.0 0.0 0.0 1.0 0.0
P1: 721.5377 0.0 609.5593 -387.5744 0.0 721.5377 172.854 0.0 0.0 0.0 1.0 0.0
P2: 721.5377 0.0 609.5593 44.85728 0.0 721.5377 172.854 0.0 0.0 0.0 1.0 0.0
P3: 721.5377 0.0 609.5593 -339.5242 0.0 721.5377 172.854 0.0 0.0 0.0 1.0 0.0
R0_rect: 0.9999 0.0098 -0.0074 -0.0098 0.9999 -0.0043 0.0074 0.0043 0.9999
Tr_velo_to_cam: 0.0075 -0.9999 -0.0006 -0.0040 0.0148 0.0007 -0.9998 -0.0766 0.9998 0.0075 0.0148 -0.2717
"""

# Ground-truth label lines covering the standard 15-field layout plus a
# DontCare region with placeholder geometry.
KITTI_LABEL_TEXT = """\
Car 0.00 0 -1.58 599.41 156.40 629.75 189.25 2.85 2.63 12.34 0.47 1.49 69.44 -1.56
Van 0.00 2 -1.55 387.63 181.54 423.81 203.12 2.20 1.88 5.12 -16.53 2.39 58.49 -1.82
Pedestrian 0.00 0 -0.20 712.40 143.00 810.73 307.92 1.89 0.48 1.20 1.84 1.47 8.41 0.01
DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10
"""

# Detection-style lines add a trailing confidence score (16 fields).
KITTI_DET_TEXT = """\
Car 0.00 0 -1.58 599.41 156.40 629.75 189.25 2.85 2.63 12.34 0.47 1.49 69.44 -1.56 0.98
Car 0.00 1 1.85 383.51 179.27 425.25 203.79 1.45 1.63 4.02 -16.50 2.40 58.40 1.57 0.42
"""


@pytest.fixture
def kitti_calib_text():
    return KITTI_CALIB_TEXT


@pytest.fixture
def kitti_label_text():
    return KITTI_LABEL_TEXT


@pytest.fixture
def kitti_det_text():
    return KITTI_DET_TEXT


def make_rig(f_u=721.5377, f_v=721.5377, c_u=609.5593, c_v=172.854,
             b_x_left=-0.06, b_x_right=0.48):
    """Stereo rig with a round 0.54 m baseline by default."""
    left = CameraIntrinsics(f_u, f_v, c_u, c_v, b_x=b_x_left)
    right = CameraIntrinsics(f_u, f_v, c_u, c_v, b_x=b_x_right)
    return StereoRig(left, right)


@pytest.fixture
def rig54():
    return make_rig()


def make_scene(boxes, rig=None, surfaces=None, image_size=(1242, 375)):
    """Scene from a list of (dims, yaw, t) tuples or Box3D instances."""
    if rig is None:
        rig = make_rig()
    objects = []
    for i, entry in enumerate(boxes):
        box = entry if isinstance(entry, Box3D) else Box3D(*entry)
        surface = surfaces[i] if surfaces else "box-shell"
        objects.append(SceneObject(box=box, surface=surface))
    return SyntheticScene(rig=rig, objects=objects, image_size=image_size)


def random_car_box(rng, z_range=(10.0, 45.0), x_spread=0.12):
    """Plausible car-sized box fully inside the default camera frustum."""
    z = rng.uniform(*z_range)
    x = rng.uniform(-x_spread, x_spread) * z
    h = rng.uniform(1.3, 1.8)
    w = rng.uniform(1.5, 1.9)
    length = rng.uniform(3.4, 4.6)
    yaw = rng.uniform(-np.pi, np.pi)
    y = rng.uniform(1.2, 1.8)
    return Box3D(dims=(h, w, length), yaw=yaw, t=(x, y, z))


# --- acceptance criterion reporting ---------------------------------------
#
# Collect one outcome per test in test_acceptance.py and print a PASS/FAIL
# line for each at the end of the run, so the criterion status is readable
# without scrolling through the full pytest output.

_ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        _ACCEPTANCE_RESULTS[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        # Setup errors and skips never reach the call phase.
        _ACCEPTANCE_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        outcome = _ACCEPTANCE_RESULTS[name]
        tag = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"[{tag}] {name}")
