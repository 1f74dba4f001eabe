"""Independent reference implementations used to cross-check the library.

Everything in this module is deliberately written from first principles
(Monte-Carlo hit counting, plain-Python greedy matching) so that agreement
with the library is evidence of correctness rather than shared bugs.
"""

import math

import numpy as np


def _bev_halfwidths_and_rot(box):
    """Return ((l/2, w/2), 2x2 world-from-local rotation) for a box's footprint."""
    c = math.cos(box.yaw)
    s = math.sin(box.yaw)
    # Column convention: local +x (length axis) maps to world (c, -s) in the
    # (x, z) plane for a rotation about the downward y axis.
    rot = np.array([[c, s], [-s, c]])
    return (box.length / 2.0, box.width / 2.0), rot


def _points_in_footprint(pts, box):
    """Boolean mask: which (x, z) points fall inside the rotated footprint."""
    (hl, hw), rot = _bev_halfwidths_and_rot(box)
    center = np.array([box.t[0], box.t[2]])
    local = (pts - center) @ rot
    return (np.abs(local[:, 0]) <= hl) & (np.abs(local[:, 1]) <= hw)


def mc_bev_iou(box_a, box_b, samples=200_000, seed=0):
    """Monte-Carlo estimate of the bird's-eye-view IoU of two rotated boxes.

    Uniform samples are drawn over the joint axis-aligned bounding rectangle;
    the IoU estimate is (hits in both) / (hits in either), a ratio whose
    standard error is sqrt(iou * (1 - iou) / n_either).
    """
    rng = np.random.default_rng(seed)
    corners = np.vstack([box_a.bev_corners(), box_b.bev_corners()])
    lo = corners.min(axis=0)
    hi = corners.max(axis=0)
    pts = rng.uniform(lo, hi, size=(samples, 2))
    in_a = _points_in_footprint(pts, box_a)
    in_b = _points_in_footprint(pts, box_b)
    n_union = int(np.count_nonzero(in_a | in_b))
    if n_union == 0:
        return 0.0
    return float(np.count_nonzero(in_a & in_b)) / n_union


def mc_iou_3d(box_a, box_b, samples=200_000, seed=0):
    """Monte-Carlo estimate of volumetric IoU.

    Boxes sit on their translation point and extend height upward along -y
    (camera frame, y pointing down), so the vertical slab is
    [t_y - h, t_y].
    """
    rng = np.random.default_rng(seed)
    corners = np.vstack([box_a.bev_corners(), box_b.bev_corners()])
    lo_xz = corners.min(axis=0)
    hi_xz = corners.max(axis=0)
    y_lo = min(box_a.t[1] - box_a.height, box_b.t[1] - box_b.height)
    y_hi = max(box_a.t[1], box_b.t[1])
    pts_xz = rng.uniform(lo_xz, hi_xz, size=(samples, 2))
    pts_y = rng.uniform(y_lo, y_hi, size=samples)

    def inside(box):
        plan = _points_in_footprint(pts_xz, box)
        vert = (pts_y >= box.t[1] - box.height) & (pts_y <= box.t[1])
        return plan & vert

    in_a = inside(box_a)
    in_b = inside(box_b)
    n_union = int(np.count_nonzero(in_a | in_b))
    if n_union == 0:
        return 0.0
    return float(np.count_nonzero(in_a & in_b)) / n_union


def brute_force_ap(frames, iou_fn, iou_threshold, recall_points):
    """Average precision from first principles.

    frames: list of (detections, relevant_gt_boxes, ignored_boxes) where
      detections are (confidence, Box3D) pairs with distinct confidences.
    iou_fn: callable (box, box) -> overlap used for matching.
    recall_points: 1-D array of recall sample positions.

    Matching walks all detections in descending confidence order. Each
    detection claims the unmatched relevant ground-truth box of highest
    overlap; a claim at or above the threshold is a true positive. Anything
    else that overlaps an ignored box at or above the threshold is dropped
    from scoring; the remainder are false positives.
    """
    order = []
    for frame_idx, (dets, _, _) in enumerate(frames):
        for det_idx, (conf, box) in enumerate(dets):
            order.append((-conf, frame_idx, det_idx, box))
    order.sort(key=lambda item: (item[0], item[1], item[2]))

    n_gt = sum(len(rel) for _, rel, _ in frames)
    used = [[False] * len(rel) for _, rel, _ in frames]
    flags = []
    for neg_conf, frame_idx, det_idx, box in order:
        _, relevant, ignored = frames[frame_idx]
        best_iou = -1.0
        best_gt = None
        for gt_idx, gt_box in enumerate(relevant):
            if used[frame_idx][gt_idx]:
                continue
            overlap = iou_fn(box, gt_box)
            if overlap > best_iou:
                best_iou = overlap
                best_gt = gt_idx
        if best_gt is not None and best_iou >= iou_threshold:
            used[frame_idx][best_gt] = True
            flags.append("tp")
            continue
        if any(iou_fn(box, ig) >= iou_threshold for ig in ignored):
            flags.append("ignore")
            continue
        flags.append("fp")

    tp = 0
    fp = 0
    points = []  # (recall, precision) after each scored detection
    for flag in flags:
        if flag == "ignore":
            continue
        if flag == "tp":
            tp += 1
        else:
            fp += 1
        recall = tp / n_gt if n_gt > 0 else 0.0
        points.append((recall, tp / (tp + fp)))

    sampled = np.zeros(len(recall_points))
    for i, r in enumerate(recall_points):
        candidates = [p for rec, p in points if rec >= r]
        if candidates:
            sampled[i] = max(candidates)
    return 100.0 * float(np.mean(sampled))
