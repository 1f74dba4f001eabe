"""KITTI-protocol 3D / bird's-eye-view detection evaluation.

Covers rotated-rectangle IoU by convex polygon clipping, the cumulative
Easy/Moderate/Hard difficulty assignment, greedy confidence-ordered matching
with DontCare and neighbor-class ignoring, and interpolated average
precision at 11 or 40 recall points. Label text follows the KITTI object
format: 15 whitespace-separated fields per line, 16 when a score is present.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import StereoZoomError
from .parts import Box3D, wrap_angle
from .score import Detection

DIFFICULTIES = ("Easy", "Moderate", "Hard")
IGNORED = "Ignored"
DONT_CARE = "DontCare"

# Classes whose ground-truth boxes should not penalize detections of the
# evaluated class: a Car detection on a Van is discarded, not a false
# positive, mirroring the public benchmark protocol.
NEIGHBOR_CLASSES = {"Car": ("Van",), "Pedestrian": ("Person_sitting",)}


@dataclass(frozen=True)
class DifficultyThresholds:
    """Per-difficulty limits: minimum 2D box height (px), maximum occlusion
    level, maximum truncation. Defaults follow the public benchmark."""

    min_height: tuple[float, float, float] = (40.0, 25.0, 25.0)
    max_occlusion: tuple[int, int, int] = (0, 1, 2)
    max_truncation: tuple[float, float, float] = (0.15, 0.30, 0.50)


DEFAULT_DIFFICULTY_THRESHOLDS = DifficultyThresholds()


@dataclass(frozen=True)
class KittiLabel:
    """One row of a KITTI object label file.

    ``dims`` is (height, width, length) in meters; ``location`` is the
    camera-frame bottom-center. DontCare rows carry placeholder geometry
    (negative dims) unless they were produced by re-labeling real objects.
    """

    category: str
    truncation: float
    occlusion: int
    alpha: float
    bbox2d: tuple[float, float, float, float]
    dims: tuple[float, float, float]
    location: tuple[float, float, float]
    rotation_y: float
    score: float | None = None

    def __post_init__(self):
        if self.category != DONT_CARE:
            left, top, right, bottom = self.bbox2d
            if not (right > left and bottom > top):
                raise ValueError(f"degenerate 2D box {self.bbox2d} for {self.category}")
            if not all(d > 0.0 for d in self.dims):
                raise ValueError(f"non-positive dims {self.dims} for {self.category}")

    @property
    def bbox_height(self) -> float:
        return self.bbox2d[3] - self.bbox2d[1]

    @property
    def has_geometry(self) -> bool:
        return all(d > 0.0 for d in self.dims)

    def box3d(self) -> Box3D:
        if not self.has_geometry:
            raise ValueError(f"label of category {self.category} has no valid 3D box")
        return Box3D(dims=self.dims, yaw=self.rotation_y, t=self.location)


@dataclass(frozen=True)
class EvalConfig:
    """Settings for one AP computation.

    ``difficulty`` is cumulative: evaluating Hard includes Easy and Moderate
    objects. ``distance_bucket`` restricts relevant ground truth to
    ``min <= z < max`` meters (``max`` may be inf); ``occlusion_filter``
    restricts it to one occlusion level. Ground truth excluded by either
    becomes ignored, not a miss.
    """

    iou_threshold: float = 0.5
    difficulty: str = "Moderate"
    ap_samples: int = 40
    metric: str = "3D"
    category: str = "Car"
    distance_bucket: tuple[float, float] | None = None
    occlusion_filter: int | None = None

    def __post_init__(self):
        if not (0.0 < self.iou_threshold <= 1.0):
            raise ValueError(f"iou_threshold must be in (0,1], got {self.iou_threshold}")
        if self.difficulty not in DIFFICULTIES:
            raise ValueError(f"difficulty must be one of {DIFFICULTIES}")
        if self.ap_samples not in (11, 40):
            raise ValueError(f"ap_samples must be 11 or 40, got {self.ap_samples}")
        if self.metric not in ("BEV", "3D"):
            raise ValueError(f"metric must be BEV or 3D, got {self.metric!r}")


@dataclass
class ApResult:
    """AP in percent plus the raw precision/recall sweep and the
    interpolated precision at the sampled recall points."""

    ap: float
    recall: np.ndarray
    precision: np.ndarray
    sampled_recall: np.ndarray
    sampled_precision: np.ndarray
    relevant_gt_count: int

    def to_dict(self) -> dict:
        return {
            "ap": self.ap,
            "recall": self.recall.tolist(),
            "precision": self.precision.tolist(),
            "sampled_recall": self.sampled_recall.tolist(),
            "sampled_precision": self.sampled_precision.tolist(),
            "relevant_gt_count": self.relevant_gt_count,
        }


def _polygon_area(poly: list[tuple[float, float]]) -> float:
    """Shoelace area; positive for counterclockwise vertex order."""
    total = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i - 1]
        x1, y1 = poly[i]
        total += x0 * y1 - x1 * y0
    return 0.5 * abs(total)


def _clip_against_edge(subject, a, b):
    """Keep the part of ``subject`` on the interior side of edge a->b of a
    counterclockwise clipper; boundary points count as inside."""
    ex, ey = b[0] - a[0], b[1] - a[1]

    def side(p):
        return ex * (p[1] - a[1]) - ey * (p[0] - a[0])

    out = []
    n = len(subject)
    for i in range(n):
        cur, prev = subject[i], subject[i - 1]
        cur_side, prev_side = side(cur), side(prev)
        if cur_side >= 0.0:
            if prev_side < 0.0:
                out.append(_edge_intersection(prev, cur, prev_side, cur_side))
            out.append(cur)
        elif prev_side >= 0.0:
            out.append(_edge_intersection(prev, cur, prev_side, cur_side))
    return out


def _edge_intersection(p, q, p_side, q_side):
    t = p_side / (p_side - q_side)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _bev_polygons(a: Box3D, b: Box3D):
    pa = [tuple(v) for v in a.bev_corners()]
    pb = [tuple(v) for v in b.bev_corners()]
    return pa, pb


def _intersection_area(pa, pb) -> float:
    poly = pa
    for i in range(len(pb)):
        poly = _clip_against_edge(poly, pb[i - 1], pb[i])
        if not poly:
            return 0.0
    return _polygon_area(poly)


def _canonical_pair(a: Box3D, b: Box3D) -> tuple[Box3D, Box3D]:
    # Evaluate every unordered pair in one fixed argument order so the IoU
    # is exactly symmetric despite floating-point clipping.
    return (b, a) if (b.t, b.dims, b.yaw) < (a.t, a.dims, a.yaw) else (a, b)


def bev_iou(a: Box3D, b: Box3D) -> float:
    """IoU of the yaw-rotated ground-plane rectangles of two boxes."""
    a, b = _canonical_pair(a, b)
    pa, pb = _bev_polygons(a, b)
    area_a, area_b = _polygon_area(pa), _polygon_area(pb)
    if area_a <= 0.0 or area_b <= 0.0:
        return 0.0
    inter = _intersection_area(pa, pb)
    return inter / (area_a + area_b - inter)


def vertical_overlap(a: Box3D, b: Box3D) -> float:
    """Shared vertical extent in meters; y grows downward, boxes sit on
    their bottom face at t_y and extend up to t_y - height."""
    return max(
        0.0, min(a.t[1], b.t[1]) - max(a.t[1] - a.height, b.t[1] - b.height)
    )


def iou_3d(a: Box3D, b: Box3D) -> float:
    """Volumetric IoU; exact because yaw-only boxes share the vertical axis."""
    a, b = _canonical_pair(a, b)
    pa, pb = _bev_polygons(a, b)
    area_a, area_b = _polygon_area(pa), _polygon_area(pb)
    if area_a <= 0.0 or area_b <= 0.0:
        return 0.0
    inter = _intersection_area(pa, pb) * vertical_overlap(a, b)
    vol_a = area_a * a.height
    vol_b = area_b * b.height
    if inter <= 0.0:
        return 0.0
    return inter / (vol_a + vol_b - inter)


def assign_difficulty(
    label: KittiLabel, thresholds: DifficultyThresholds = DEFAULT_DIFFICULTY_THRESHOLDS
) -> str:
    """Strictest difficulty whose height/occlusion/truncation limits the
    label meets, or "Ignored". Difficulties are cumulative: a label rated
    Easy also participates in Moderate and Hard evaluations."""
    for i, name in enumerate(DIFFICULTIES):
        if (
            label.bbox_height >= thresholds.min_height[i]
            and label.occlusion <= thresholds.max_occlusion[i]
            and label.truncation <= thresholds.max_truncation[i]
        ):
            return name
    return IGNORED


def _gt_is_relevant(gt: KittiLabel, cfg: EvalConfig, thresholds) -> bool:
    rank = assign_difficulty(gt, thresholds)
    if rank == IGNORED or DIFFICULTIES.index(rank) > DIFFICULTIES.index(cfg.difficulty):
        return False
    if cfg.distance_bucket is not None:
        lo, hi = cfg.distance_bucket
        if not (lo <= gt.location[2] < hi):
            return False
    if cfg.occlusion_filter is not None and gt.occlusion != cfg.occlusion_filter:
        return False
    return True


def _split_ground_truth(gts, cfg, thresholds):
    """Partition one frame's labels into relevant and ignored 3D boxes.

    Ignored boxes absorb detections without scoring them: same-category
    labels outside the difficulty or filters, neighbor-class labels, and
    DontCare rows that carry real geometry. DontCare rows with placeholder
    geometry cannot overlap in 3D and are skipped.
    """
    relevant, ignored = [], []
    neighbors = NEIGHBOR_CLASSES.get(cfg.category, ())
    for gt in gts:
        if gt.category == cfg.category:
            (relevant if _gt_is_relevant(gt, cfg, thresholds) else ignored).append(
                gt.box3d()
            )
        elif gt.category in neighbors and gt.has_geometry:
            ignored.append(gt.box3d())
        elif gt.category == DONT_CARE and gt.has_geometry:
            ignored.append(gt.box3d())
    return relevant, ignored


def _recall_grid(ap_samples: int) -> np.ndarray:
    if ap_samples == 11:
        return np.arange(11) / 10.0
    return np.arange(1, 41) / 40.0


def compute_ap(
    dets,
    gts,
    cfg: EvalConfig,
    thresholds: DifficultyThresholds = DEFAULT_DIFFICULTY_THRESHOLDS,
) -> ApResult:
    """Average precision of frame-aligned detections against ground truth.

    ``dets`` and ``gts`` are parallel per-frame lists; detections are all of
    ``cfg.category``. Detections are processed in order of (confidence desc,
    frame index, detection index); each takes the unmatched relevant ground
    truth with the highest IoU. A match at or above the threshold is a true
    positive; otherwise the detection is discarded if it overlaps an ignored
    box at the threshold, else it is a false positive. AP is the mean
    interpolated precision over the recall grid, in percent.
    """
    if len(dets) != len(gts):
        raise StereoZoomError(
            f"detections cover {len(dets)} frames but ground truth covers {len(gts)}"
        )
    iou_fn = bev_iou if cfg.metric == "BEV" else iou_3d
    frames = [_split_ground_truth(frame_gts, cfg, thresholds) for frame_gts in gts]
    n_relevant = sum(len(rel) for rel, _ in frames)

    order = sorted(
        (
            (-det.confidence, fi, di)
            for fi, frame in enumerate(dets)
            for di, det in enumerate(frame)
        )
    )
    matched: list[set[int]] = [set() for _ in frames]
    outcomes = []
    for neg_conf, fi, di in order:
        det = dets[fi][di]
        relevant, ignored = frames[fi]
        best_iou, best_gi = 0.0, None
        for gi, gt_box in enumerate(relevant):
            if gi in matched[fi]:
                continue
            iou = iou_fn(det.box, gt_box)
            if iou > best_iou:
                best_iou, best_gi = iou, gi
        if best_gi is not None and best_iou >= cfg.iou_threshold:
            matched[fi].add(best_gi)
            outcomes.append(True)
        elif any(iou_fn(det.box, box) >= cfg.iou_threshold for box in ignored):
            continue
        else:
            outcomes.append(False)

    tp = np.cumsum(outcomes) if outcomes else np.zeros(0)
    counted = np.arange(1, len(outcomes) + 1)
    precision = tp / counted if len(outcomes) else np.zeros(0)
    recall = tp / n_relevant if n_relevant else np.zeros(len(outcomes))

    grid = _recall_grid(cfg.ap_samples)
    sampled = np.zeros_like(grid)
    for i, r in enumerate(grid):
        reachable = precision[recall >= r]
        sampled[i] = reachable.max() if reachable.size else 0.0
    return ApResult(
        ap=100.0 * float(sampled.mean()),
        recall=np.asarray(recall, dtype=float),
        precision=np.asarray(precision, dtype=float),
        sampled_recall=grid,
        sampled_precision=sampled,
        relevant_gt_count=n_relevant,
    )


def parse_kitti_labels(text: str) -> list[KittiLabel]:
    """Parse KITTI object label text, one object per non-empty line."""
    labels = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) not in (15, 16):
            raise ValueError(
                f"label line {lineno} has {len(fields)} fields, expected 15 or 16"
            )
        try:
            labels.append(
                KittiLabel(
                    category=fields[0],
                    truncation=float(fields[1]),
                    occlusion=int(float(fields[2])),
                    alpha=float(fields[3]),
                    bbox2d=tuple(float(x) for x in fields[4:8]),
                    dims=tuple(float(x) for x in fields[8:11]),
                    location=tuple(float(x) for x in fields[11:14]),
                    rotation_y=float(fields[14]),
                    score=float(fields[15]) if len(fields) == 16 else None,
                )
            )
        except ValueError as exc:
            raise ValueError(f"label line {lineno}: {exc}") from exc
    return labels


def serialize_kitti_labels(labels) -> str:
    """Render labels back to KITTI text; floats use repr so a parse of the
    output reproduces the input structures exactly."""
    lines = []
    for lab in labels:
        fields = [
            lab.category,
            repr(float(lab.truncation)),
            str(int(lab.occlusion)),
            repr(float(lab.alpha)),
            *(repr(float(v)) for v in lab.bbox2d),
            *(repr(float(v)) for v in lab.dims),
            *(repr(float(v)) for v in lab.location),
            repr(float(lab.rotation_y)),
        ]
        if lab.score is not None:
            fields.append(repr(float(lab.score)))
        lines.append(" ".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def read_label_file(path) -> list[KittiLabel]:
    with open(path) as fh:
        return parse_kitti_labels(fh.read())


def write_label_file(path, labels) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_kitti_labels(labels))


def label_from_detection(
    det: Detection, category: str, bbox2d: tuple[float, float, float, float]
) -> KittiLabel:
    """KITTI result row for a detection; alpha is the observation angle
    implied by yaw and viewing direction."""
    box = det.box
    alpha = wrap_angle(box.yaw - math.atan2(box.t[0], box.t[2]))
    return KittiLabel(
        category=category,
        truncation=0.0,
        occlusion=0,
        alpha=alpha,
        bbox2d=bbox2d,
        dims=box.dims,
        location=box.t,
        rotation_y=box.yaw,
        score=det.confidence,
    )


def write_pr_csv(path, result: ApResult) -> None:
    """Write the raw and sampled precision/recall points of one AP run."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "recall", "precision"])
        for r, p in zip(result.recall, result.precision):
            writer.writerow(["raw", repr(float(r)), repr(float(p))])
        for r, p in zip(result.sampled_recall, result.sampled_precision):
            writer.writerow(["sampled", repr(float(r)), repr(float(p))])
