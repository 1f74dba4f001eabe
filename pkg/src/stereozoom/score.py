"""Detection scoring: clipped mean depth error, 3D fitting score, confidence.

The fitting score turns the mean absolute depth error between a constructed
instance cloud and its ground-truth counterpart into a bounded scalar that
multiplies the 2D classification probability. Two directions are available:
``literal`` computes 1 - exp(-D/theta), which grows with the error, and
``exp`` computes exp(-D/theta), which decays with it. The default follows
the literal form; both are kept because the two disagree about which way
confidence should move and callers may need either convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .parts import Box3D

DEFAULT_THETA = 8.0
SCORE_MODES = ("literal", "exp")


@dataclass(frozen=True)
class Detection:
    """A scored 3D detection: confidence is prob_2d * fit_score by
    construction, so all three stay in [0, 1]."""

    box: Box3D
    prob_2d: float
    fit_score: float = 1.0
    confidence: float = field(init=False)

    def __post_init__(self):
        if not (0.0 <= self.prob_2d <= 1.0):
            raise ValueError(f"prob_2d must be in [0,1], got {self.prob_2d}")
        if not (0.0 <= self.fit_score <= 1.0):
            raise ValueError(f"fit_score must be in [0,1], got {self.fit_score}")
        object.__setattr__(self, "confidence", self.prob_2d * self.fit_score)


def mean_depth_error(pred_z, gt_z) -> float:
    """Mean |z_pred - z_gt| over paired depths, clipped to [0, 1] meters."""
    pred = np.asarray(pred_z, dtype=float).reshape(-1)
    gt = np.asarray(gt_z, dtype=float).reshape(-1)
    if pred.size == 0:
        raise ValueError("depth lists must be non-empty")
    if pred.size != gt.size:
        raise ValueError(f"depth lists differ in length: {pred.size} vs {gt.size}")
    return float(np.clip(np.mean(np.abs(pred - gt)), 0.0, 1.0))


def fitting_score(
    d_hat: float, theta: float = DEFAULT_THETA, mode: str = "literal"
) -> float:
    """Map a clipped mean depth error to a fitting score.

    ``literal`` mode returns 1 - exp(-d_hat/theta) (strictly increasing on
    [0,1], range [0, 1 - exp(-1/theta)]); ``exp`` mode returns
    exp(-d_hat/theta) (strictly decreasing, range [exp(-1/theta), 1]).
    """
    if not (0.0 <= d_hat <= 1.0):
        raise ValueError(f"d_hat must be in [0,1], got {d_hat}")
    if not (theta > 0.0):
        raise ValueError(f"theta must be positive, got {theta}")
    if mode not in SCORE_MODES:
        raise ValueError(f"mode must be one of {SCORE_MODES}, got {mode!r}")
    decay = math.exp(-d_hat / theta)
    return decay if mode == "exp" else 1.0 - decay


def detection_confidence(prob_2d: float, fit_score: float) -> float:
    """Final detection confidence: the product of the two probabilities."""
    if not (0.0 <= prob_2d <= 1.0):
        raise ValueError(f"prob_2d must be in [0,1], got {prob_2d}")
    if not (0.0 <= fit_score <= 1.0):
        raise ValueError(f"fit_score must be in [0,1], got {fit_score}")
    return prob_2d * fit_score
