"""Adaptive-zoom stereo geometry for 3D object detection.

The pipeline: zoom an instance's stereo RoI to a fixed raster while scaling
the camera intrinsics, back-project per-pixel disparity into an instance
point cloud carrying part locations, fit the box pose from those
correspondences, and score detections by their depth agreement. A synthetic
scene oracle renders exact inputs for all of it, and the evaluation module
implements the KITTI 3D/BEV AP protocol.
"""

__version__ = "0.1.0"

from .calib import (
    CameraIntrinsics,
    StereoRig,
    parse_kitti_calib,
    serialize_kitti_calib,
    zoom_intrinsics,
    zoomed_baseline,
)
from .errors import (
    CalibFormatError,
    DegenerateGeometryError,
    EmptyCloudError,
    EmptyCropError,
    FitFailureError,
    InsufficientPointsError,
    InvalidCalibrationError,
    NegativeDisparityOffsetError,
    NonPositiveDisparityError,
    NotVisibleError,
    StereoZoomError,
)
from .evaluation import (
    DIFFICULTIES,
    ApResult,
    DifficultyThresholds,
    EvalConfig,
    KittiLabel,
    assign_difficulty,
    bev_iou,
    compute_ap,
    iou_3d,
    label_from_detection,
    parse_kitti_labels,
    read_label_file,
    serialize_kitti_labels,
    write_label_file,
    write_pr_csv,
)
from .parts import (
    Box3D,
    PartLocation,
    decode_part_array,
    decode_part_location,
    decode_part_targets,
    encode_part_array,
    encode_part_location,
    from_object_frame,
    part_location_image,
    save_part_visualization,
    to_object_frame,
    wrap_angle,
    yaw_matrix,
)
from .pointcloud import (
    DEFAULT_SAMPLE_COUNT,
    CloudDiagnostics,
    InstanceMaps,
    InstancePointCloud,
    backproject_pixel,
    backproject_pixels,
    build_instance_cloud,
    load_cloud_binary,
    load_disparity_png,
    load_ply,
    sample_points,
    save_cloud_binary,
    save_disparity_png,
    save_ply,
)
from .pose import PoseFitResult, fit_pose, fit_pose_ransac
from .score import (
    DEFAULT_THETA,
    Detection,
    detection_confidence,
    fitting_score,
    mean_depth_error,
)
from .synthetic import (
    SceneObject,
    SyntheticScene,
    corrupt_maps,
    instance_roi,
    load_scene,
    quantize_disparity,
    render_instance,
    save_scene,
)
from .zoom import (
    DEFAULT_TARGET,
    StereoRoI,
    ZoomedView,
    depth_error,
    make_zoomed_view,
    zoom_raster,
)

__all__ = [
    "__version__",
    "CameraIntrinsics",
    "StereoRig",
    "parse_kitti_calib",
    "serialize_kitti_calib",
    "zoom_intrinsics",
    "zoomed_baseline",
    "StereoZoomError",
    "CalibFormatError",
    "InvalidCalibrationError",
    "NegativeDisparityOffsetError",
    "EmptyCropError",
    "NonPositiveDisparityError",
    "EmptyCloudError",
    "InsufficientPointsError",
    "DegenerateGeometryError",
    "FitFailureError",
    "NotVisibleError",
    "DIFFICULTIES",
    "ApResult",
    "DifficultyThresholds",
    "EvalConfig",
    "KittiLabel",
    "assign_difficulty",
    "bev_iou",
    "compute_ap",
    "iou_3d",
    "label_from_detection",
    "parse_kitti_labels",
    "serialize_kitti_labels",
    "read_label_file",
    "write_label_file",
    "write_pr_csv",
    "Box3D",
    "PartLocation",
    "wrap_angle",
    "yaw_matrix",
    "encode_part_location",
    "decode_part_location",
    "encode_part_array",
    "decode_part_array",
    "decode_part_targets",
    "to_object_frame",
    "from_object_frame",
    "part_location_image",
    "save_part_visualization",
    "DEFAULT_SAMPLE_COUNT",
    "CloudDiagnostics",
    "InstanceMaps",
    "InstancePointCloud",
    "backproject_pixel",
    "backproject_pixels",
    "build_instance_cloud",
    "sample_points",
    "save_ply",
    "load_ply",
    "save_cloud_binary",
    "load_cloud_binary",
    "save_disparity_png",
    "load_disparity_png",
    "PoseFitResult",
    "fit_pose",
    "fit_pose_ransac",
    "DEFAULT_THETA",
    "Detection",
    "mean_depth_error",
    "fitting_score",
    "detection_confidence",
    "SceneObject",
    "SyntheticScene",
    "instance_roi",
    "render_instance",
    "quantize_disparity",
    "corrupt_maps",
    "load_scene",
    "save_scene",
    "DEFAULT_TARGET",
    "StereoRoI",
    "ZoomedView",
    "make_zoomed_view",
    "depth_error",
    "zoom_raster",
]
