"""Depth-error aggregation, the fitting score, and detection confidence."""

import math

import numpy as np
import pytest

from stereozoom import (
    Box3D,
    Detection,
    detection_confidence,
    fitting_score,
    mean_depth_error,
)


def test_mean_depth_error_plain_average():
    # mean(|25.5-25|, |30-31|, |40.2-40|) = mean(0.5, 1.0, 0.2) -> clipped 0.5667
    got = mean_depth_error([25.5, 30.0, 40.2], [25.0, 31.0, 40.0])
    assert got == pytest.approx((0.5 + 1.0 + 0.2) / 3.0, rel=1e-12)


def test_mean_depth_error_clips_to_unit_interval():
    assert mean_depth_error([50.0], [40.0]) == 1.0
    assert mean_depth_error([40.0], [40.0]) == 0.0


def test_mean_depth_error_requires_matching_lengths():
    with pytest.raises(ValueError):
        mean_depth_error([1.0, 2.0], [1.0])


def test_fitting_score_literal_endpoints():
    # Literal reading: F = 1 - exp(-D/theta), so a perfect depth match
    # scores zero.
    assert fitting_score(0.0) == 0.0
    # 1 - e^(-1/8) = 0.117503097415404597... (theta = 8)
    assert fitting_score(1.0, theta=8.0) == pytest.approx(
        0.11750309741540460, abs=1e-12)
    # 1 - e^(-1/16) = 0.060586937186524213...
    assert fitting_score(0.5, theta=8.0) == pytest.approx(
        0.06058693718652421, abs=1e-12)


def test_fitting_score_exp_mode():
    assert fitting_score(0.0, mode="exp") == 1.0
    # e^(-1/8) = 0.882496902584595402...
    assert fitting_score(1.0, theta=8.0, mode="exp") == pytest.approx(
        0.88249690258459540, abs=1e-12)


def test_fitting_score_monotonicity():
    grid = np.linspace(0.0, 1.0, 1001)
    literal = np.array([fitting_score(d) for d in grid])
    flipped = np.array([fitting_score(d, mode="exp") for d in grid])
    assert np.all(np.diff(literal) > 0.0)
    assert np.all(np.diff(flipped) < 0.0)
    # Ranges: literal spans [0, 1 - e^(-1/theta)], exp spans [e^(-1/theta), 1].
    assert literal[0] == 0.0
    assert literal[-1] == pytest.approx(1.0 - math.exp(-1.0 / 8.0), abs=1e-15)
    assert flipped[0] == 1.0
    assert flipped[-1] == pytest.approx(math.exp(-1.0 / 8.0), abs=1e-15)


def test_fitting_score_validates_inputs():
    with pytest.raises(ValueError):
        fitting_score(-0.1)
    with pytest.raises(ValueError):
        fitting_score(1.1)
    with pytest.raises(ValueError):
        fitting_score(0.5, theta=0.0)
    with pytest.raises(ValueError):
        fitting_score(0.5, mode="sideways")


def test_detection_confidence_product():
    assert detection_confidence(1.0, 1.0) == 1.0
    assert detection_confidence(0.8, 0.5) == pytest.approx(0.4, rel=1e-15)
    assert detection_confidence(0.0, 0.73) == 0.0


def test_detection_confidence_domain():
    with pytest.raises(ValueError):
        detection_confidence(1.2, 0.5)
    with pytest.raises(ValueError):
        detection_confidence(0.5, -0.1)


def test_detection_confidence_ranking_invariant_under_scaling():
    # Multiplying every fit score by the same positive constant cannot
    # change how detections rank against each other.
    rng = np.random.default_rng(0)
    probs = rng.random(20)
    fits = rng.random(20)
    base = [detection_confidence(p, f) for p, f in zip(probs, fits)]
    scaled = [detection_confidence(p, f * 0.37) for p, f in zip(probs, fits)]
    assert np.array_equal(np.argsort(base), np.argsort(scaled))


def test_detection_dataclass_confidence():
    box = Box3D(dims=(1.5, 1.6, 3.9), yaw=0.0, t=(0.0, 1.5, 20.0))
    det = Detection(box=box, prob_2d=0.9, fit_score=0.5)
    assert det.confidence == pytest.approx(0.45, rel=1e-15)
    with pytest.raises(ValueError):
        Detection(box=box, prob_2d=1.5, fit_score=0.5)
