"""Exception hierarchy shared across the package."""


class StereoZoomError(Exception):
    """Base class for all stereozoom-specific errors."""


class CalibFormatError(StereoZoomError):
    """Calibration text is malformed (missing or unparseable P2/P3 lines)."""


class InvalidCalibrationError(StereoZoomError):
    """Calibration values are unusable (non-finite, non-positive focal length,
    non-positive baseline)."""


class NegativeDisparityOffsetError(StereoZoomError):
    """Right RoI starts right of the left RoI, implying negative disparity."""


class EmptyCropError(StereoZoomError):
    """RoI does not intersect the source raster at all."""


class NonPositiveDisparityError(StereoZoomError):
    """Effective disparity d + O is not positive, so depth is undefined."""


class EmptyCloudError(StereoZoomError):
    """Operation requires at least one point but the cloud is empty."""


class InsufficientPointsError(StereoZoomError):
    """Pose estimation needs at least three points."""


class DegenerateGeometryError(StereoZoomError):
    """Correspondences are rank-deficient (e.g. all part locations identical),
    so yaw cannot be determined."""


class FitFailureError(StereoZoomError):
    """No RANSAC hypothesis reached the minimum consensus."""


class NotVisibleError(StereoZoomError):
    """Object is behind the camera or entirely outside the frustum."""
