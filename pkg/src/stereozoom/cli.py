"""Command-line front end.

Subcommands cover the zoom geometry report, the synthetic end-to-end
pipeline, KITTI-protocol evaluation, the depth-error model sweep, raw map
rendering, and point cloud export. Every run that writes files also writes
a ``manifest.json`` recording the inputs, configuration, and outputs, and
report paths render matplotlib figures next to the CSV/JSON output.

Configuration resolves in order: explicit flags, then the ``--config`` JSON
file (keys named like the flag destinations), then built-in defaults. The
``STEREOZOOM_THREADS`` environment variable sets the default worker count
for per-instance parallelism; results are aggregated in input order, so the
thread count never changes any output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .calib import CameraIntrinsics, parse_kitti_calib, zoom_intrinsics, zoomed_baseline
from .errors import StereoZoomError
from .evaluation import (
    DIFFICULTIES,
    EvalConfig,
    compute_ap,
    label_from_detection,
    read_label_file,
    write_label_file,
    write_pr_csv,
)
from .parts import save_part_visualization
from .plotting import save_errmodel_figure, save_pipeline_figure, save_pr_figure
from .pointcloud import (
    DEFAULT_SAMPLE_COUNT,
    backproject_pixel,
    build_instance_cloud,
    sample_points,
    save_cloud_binary,
    save_disparity_png,
    save_ply,
)
from .pose import fit_pose, fit_pose_ransac
from .score import (
    DEFAULT_THETA,
    SCORE_MODES,
    Detection,
    detection_confidence,
    fitting_score,
    mean_depth_error,
)
from .synthetic import corrupt_maps, load_scene, quantize_disparity, render_instance
from .zoom import DEFAULT_TARGET, StereoRoI, ZoomedView, depth_error, make_zoomed_view

THREADS_ENV = "STEREOZOOM_THREADS"


@dataclass
class RunManifest:
    """Reproducibility record written alongside every file-producing run."""

    subcommand: str
    inputs: dict
    config: dict
    outputs: list
    version: str = __version__

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / "manifest.json"
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _ensure_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def _pick(flag_value, config: dict, key: str, default):
    """Flag beats config file beats default; flags left unset are None."""
    if flag_value is not None:
        return flag_value
    return config.get(key, default)


def _parse_target(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise ValueError(f"target must look like 256x128, got {text!r}") from exc


def _parse_roi(text: str) -> StereoRoI:
    values = [float(v) for v in text.split(",")]
    if len(values) != 5:
        raise ValueError(f"RoI must be given as x,x_bar,y,w,h; got {text!r}")
    return StereoRoI(*values)


def _parse_float_list(text: str) -> list[float]:
    values = [float(v) for v in str(text).split(",") if str(v).strip()]
    if not values:
        raise ValueError(f"expected a comma-separated number list, got {text!r}")
    return values


def _thread_count(flag_value, config: dict) -> int:
    value = _pick(flag_value, config, "threads", None)
    if value is None:
        value = os.environ.get(THREADS_ENV, "1")
    return max(1, int(value))


def _cam_dict(cam: CameraIntrinsics) -> dict:
    return {"f_u": cam.f_u, "f_v": cam.f_v, "c_u": cam.c_u, "c_v": cam.c_v,
            "b_x": cam.b_x}


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_zoom(args) -> int:
    config = _load_config(args.config)
    target = _parse_target(_pick(args.target, config, "target", "256x128"))
    rig = parse_kitti_calib(Path(args.calib).read_text())
    view = make_zoomed_view(_parse_roi(args.roi), rig, target)
    report = {
        "k": view.k,
        "m": view.m,
        "o_hat": view.o_hat,
        "baseline": rig.baseline,
        "zoomed_baseline": zoomed_baseline(rig, view.k),
        "left_cam": _cam_dict(view.left_cam),
        "right_cam": _cam_dict(view.right_cam),
        "origin": list(view.origin),
        "target": [view.width, view.height],
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        out = _ensure_dir(args.out)
        _write_json(out / "zoom_report.json", report)
        RunManifest(
            subcommand="zoom",
            inputs={"calib": str(args.calib), "roi": args.roi},
            config={"target": f"{target[0]}x{target[1]}"},
            outputs=["zoom_report.json"],
        ).write(out)
    return 0


def cmd_pipeline(args) -> int:
    config = _load_config(args.config)
    target = _parse_target(_pick(args.target, config, "target", "256x128"))
    samples = int(_pick(args.samples, config, "samples", DEFAULT_SAMPLE_COUNT))
    theta = float(_pick(args.theta, config, "theta", DEFAULT_THETA))
    score_mode = _pick(args.score_mode, config, "score_mode", "literal")
    prob_2d = float(_pick(args.prob_2d, config, "prob_2d", 1.0))
    seed = int(_pick(args.seed, config, "seed", 0))
    noise = float(_pick(args.disparity_noise, config, "disparity_noise", 0.0))
    outliers = float(_pick(args.part_outliers, config, "part_outliers", 0.0))
    quantize = _pick(args.quantize, config, "quantize", None)
    use_ransac = bool(_pick(args.ransac, config, "ransac", False))
    ransac_iterations = int(_pick(args.ransac_iterations, config, "ransac_iterations", 200))
    ransac_threshold = float(_pick(args.ransac_threshold, config, "ransac_threshold", 0.1))
    threads = _thread_count(args.threads, config)

    scene = load_scene(args.scene)
    out = _ensure_dir(args.out)
    child_seeds = np.random.SeedSequence(seed).spawn(len(scene.objects))

    def process(index: int):
        rng = np.random.default_rng(child_seeds[index])
        try:
            roi, view, maps = render_instance(scene, index, target)
            pred = maps
            if quantize is not None:
                pred = quantize_disparity(pred, float(quantize))
            if noise > 0.0 or outliers > 0.0:
                pred = corrupt_maps(pred, noise, outliers, seed=rng)
            cloud = build_instance_cloud(pred, view, scene.rig)
            if len(cloud) == 0:
                return {"instance": index, "error": "no usable foreground pixels"}, None
            sampled = sample_points(cloud, samples, seed=rng)
            obj = scene.objects[index]
            if use_ransac:
                fit = fit_pose_ransac(
                    sampled, obj.box.dims, ransac_iterations, ransac_threshold, seed=rng
                )
            else:
                fit = fit_pose(sampled, obj.box.dims)
            rows, cols = sampled.pixels[:, 0], sampled.pixels[:, 1]
            gt_z = (
                view.k * scene.rig.left.f_u * scene.rig.baseline
                / (maps.disparity[rows, cols] + view.o_hat)
            )
            raw_error = float(np.mean(np.abs(sampled.xyz[:, 2] - gt_z)))
            d_hat = mean_depth_error(sampled.xyz[:, 2], gt_z)
            f_hat = fitting_score(d_hat, theta, score_mode)
            confidence = detection_confidence(prob_2d, f_hat)
            detection = Detection(box=fit.box, prob_2d=prob_2d, fit_score=f_hat)
            cloud_file = f"instance_{index:03d}.ply"
            save_ply(out / cloud_file, sampled)
            record = {
                "instance": index,
                "category": obj.category,
                "roi": {"x": roi.x, "x_bar": roi.x_bar, "y": roi.y, "w": roi.w, "h": roi.h},
                "k": view.k,
                "m": view.m,
                "o_hat": view.o_hat,
                "cloud_points": len(cloud),
                "dropped_pixels": cloud.diagnostics.dropped_count,
                "sampled_points": len(sampled),
                "pose": {
                    "yaw": fit.box.yaw,
                    "t": list(fit.box.t),
                    "residual": fit.residual,
                    "inlier_count": fit.inlier_count,
                    "converged": fit.converged,
                },
                "gt_pose": {"yaw": obj.box.yaw, "t": list(obj.box.t)},
                "mean_abs_depth_error": raw_error,
                "d_hat": d_hat,
                "fit_score": f_hat,
                "prob_2d": prob_2d,
                "confidence": confidence,
                "cloud_file": cloud_file,
            }
            label = label_from_detection(
                detection, obj.category, (roi.x, roi.y, roi.x + roi.w, roi.y + roi.h)
            )
            return record, label
        except StereoZoomError as exc:
            return {"instance": index, "error": str(exc)}, None

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(process, range(len(scene.objects))))

    records = [record for record, _ in results]
    labels = [label for _, label in results if label is not None]
    write_label_file(out / "detections.txt", labels)
    run_config = {
        "target": f"{target[0]}x{target[1]}",
        "samples": samples,
        "theta": theta,
        "score_mode": score_mode,
        "prob_2d": prob_2d,
        "seed": seed,
        "disparity_noise": noise,
        "part_outliers": outliers,
        "quantize": quantize,
        "ransac": use_ransac,
        "ransac_iterations": ransac_iterations,
        "ransac_threshold": ransac_threshold,
    }
    _write_json(out / "report.json", {"scene": str(args.scene), "config": run_config,
                                      "instances": records})
    save_pipeline_figure(out / "summary.png", records)
    outputs = sorted(
        ["detections.txt", "report.json", "summary.png"]
        + [r["cloud_file"] for r in records if "cloud_file" in r]
    )
    RunManifest(
        subcommand="pipeline",
        inputs={"scene": str(args.scene)},
        config=run_config,
        outputs=outputs,
    ).write(out)

    failures = 0
    for record in records:
        if "error" in record:
            failures += 1
            print(f"instance {record['instance']}: FAILED: {record['error']}")
        else:
            print(
                f"instance {record['instance']}: {record['cloud_points']} points, "
                f"pose residual {record['pose']['residual']:.3e} m, "
                f"confidence {record['confidence']:.6f}"
            )
    print(f"wrote {out / 'report.json'}")
    return 1 if failures else 0


def _load_frames(det_dir, gt_dir, category: str):
    for name, directory in (("detection", det_dir), ("ground-truth", gt_dir)):
        if not Path(directory).is_dir():
            raise StereoZoomError(f"{name} directory not found: {directory}")
    det_paths = {p.stem: p for p in Path(det_dir).glob("*.txt")}
    gt_paths = {p.stem: p for p in Path(gt_dir).glob("*.txt")}
    frame_ids = sorted(set(det_paths) | set(gt_paths))
    if not frame_ids:
        raise StereoZoomError(f"no .txt label files under {det_dir} or {gt_dir}")
    missing = [f"{fid} (detections)" for fid in frame_ids if fid not in det_paths]
    missing += [f"{fid} (ground truth)" for fid in frame_ids if fid not in gt_paths]
    dets, gts = [], []
    for fid in frame_ids:
        det_labels = read_label_file(det_paths[fid]) if fid in det_paths else []
        gts.append(read_label_file(gt_paths[fid]) if fid in gt_paths else [])
        dets.append(
            [
                Detection(
                    box=lab.box3d(),
                    prob_2d=lab.score if lab.score is not None else 1.0,
                )
                for lab in det_labels
                if lab.category == category and lab.has_geometry
            ]
        )
    return dets, gts, frame_ids, missing


def _parse_buckets(text: str) -> list[tuple[float, float]]:
    buckets = []
    for piece in text.split(","):
        lo, hi = piece.split(":")
        buckets.append((float(lo), float(hi)))
    return buckets


def cmd_eval(args) -> int:
    config = _load_config(args.config)
    metrics = [
        m.strip() for m in _pick(args.metrics, config, "metrics", "3D,BEV").split(",")
        if m.strip()
    ]
    thresholds = _parse_float_list(
        _pick(args.iou_thresholds, config, "iou_thresholds", "0.5,0.7")
    )
    ap_points = int(_pick(args.ap_points, config, "ap_points", 40))
    category = _pick(args.category, config, "category", "Car")
    buckets_arg = _pick(args.distance_buckets, config, "distance_buckets", None)
    occlusion_arg = _pick(args.occlusion_levels, config, "occlusion_levels", None)
    slice_difficulty = _pick(args.slice_difficulty, config, "slice_difficulty", "Hard")

    dets, gts, frame_ids, missing = _load_frames(args.det, args.gt, category)
    for item in missing:
        print(f"missing frame file treated as empty: {item}")
    out = _ensure_dir(args.out)

    rows = []
    outputs = []
    for metric in metrics:
        for threshold in thresholds:
            curves = []
            for difficulty in DIFFICULTIES:
                cfg = EvalConfig(
                    iou_threshold=threshold,
                    difficulty=difficulty,
                    ap_samples=ap_points,
                    metric=metric,
                    category=category,
                )
                result = compute_ap(dets, gts, cfg)
                rows.append(
                    {
                        "metric": metric,
                        "iou_threshold": threshold,
                        "difficulty": difficulty,
                        "distance_bucket": None,
                        "occlusion": None,
                        "ap": result.ap,
                        "relevant_gt_count": result.relevant_gt_count,
                    }
                )
                curve_name = f"pr_{metric.lower()}_iou{threshold:g}_{difficulty.lower()}.csv"
                write_pr_csv(out / curve_name, result)
                outputs.append(curve_name)
                curves.append((difficulty, result))
            figure_name = f"pr_{metric.lower()}_iou{threshold:g}.png"
            save_pr_figure(
                out / figure_name,
                curves,
                f"{category} {metric} AP, IoU >= {threshold:g}",
            )
            outputs.append(figure_name)
            if buckets_arg:
                for lo, hi in _parse_buckets(buckets_arg):
                    cfg = EvalConfig(
                        iou_threshold=threshold,
                        difficulty=slice_difficulty,
                        ap_samples=ap_points,
                        metric=metric,
                        category=category,
                        distance_bucket=(lo, hi),
                    )
                    result = compute_ap(dets, gts, cfg)
                    rows.append(
                        {
                            "metric": metric,
                            "iou_threshold": threshold,
                            "difficulty": slice_difficulty,
                            "distance_bucket": f"{lo:g}:{hi:g}",
                            "occlusion": None,
                            "ap": result.ap,
                            "relevant_gt_count": result.relevant_gt_count,
                        }
                    )
            if occlusion_arg:
                for level in str(occlusion_arg).split(","):
                    cfg = EvalConfig(
                        iou_threshold=threshold,
                        difficulty=slice_difficulty,
                        ap_samples=ap_points,
                        metric=metric,
                        category=category,
                        occlusion_filter=int(level),
                    )
                    result = compute_ap(dets, gts, cfg)
                    rows.append(
                        {
                            "metric": metric,
                            "iou_threshold": threshold,
                            "difficulty": slice_difficulty,
                            "distance_bucket": None,
                            "occlusion": int(level),
                            "ap": result.ap,
                            "relevant_gt_count": result.relevant_gt_count,
                        }
                    )

    _write_json(
        out / "ap_table.json",
        {"frames": frame_ids, "missing": missing, "rows": rows},
    )
    with open(out / "ap_table.csv", "w") as fh:
        fh.write("metric,iou_threshold,difficulty,distance_bucket,occlusion,ap,relevant_gt_count\n")
        for row in rows:
            fh.write(
                f"{row['metric']},{row['iou_threshold']:g},{row['difficulty']},"
                f"{row['distance_bucket'] or ''},"
                f"{'' if row['occlusion'] is None else row['occlusion']},"
                f"{row['ap']!r},{row['relevant_gt_count']}\n"
            )
    outputs += ["ap_table.csv", "ap_table.json"]
    RunManifest(
        subcommand="eval",
        inputs={"det": str(args.det), "gt": str(args.gt)},
        config={
            "metrics": metrics,
            "iou_thresholds": thresholds,
            "ap_points": ap_points,
            "category": category,
            "distance_buckets": buckets_arg,
            "occlusion_levels": occlusion_arg,
            "slice_difficulty": slice_difficulty,
        },
        outputs=sorted(outputs),
    ).write(out)

    for row in rows:
        slice_note = ""
        if row["distance_bucket"]:
            slice_note = f" z in {row['distance_bucket']} m"
        elif row["occlusion"] is not None:
            slice_note = f" occlusion {row['occlusion']}"
        print(
            f"{row['metric']:>3} IoU>={row['iou_threshold']:g} "
            f"{row['difficulty']:<8}{slice_note}: AP {row['ap']:.4f}% "
            f"({row['relevant_gt_count']} GT)"
        )
    return 0


def cmd_errmodel(args) -> int:
    config = _load_config(args.config)
    z_values = _parse_float_list(_pick(args.z_values, config, "z_values", "10,20,30,40,50,60"))
    k_values = _parse_float_list(_pick(args.k_values, config, "k_values", "1,2,4"))
    dd_values = _parse_float_list(_pick(args.delta_d, config, "delta_d", "1"))
    rig = parse_kitti_calib(Path(args.calib).read_text())

    rows = []
    for k in k_values:
        view = ZoomedView(
            k=k,
            m=k,
            o_hat=0.0,
            left_cam=zoom_intrinsics(rig.left, k, k),
            right_cam=zoom_intrinsics(rig.right, k, k),
            width=1,
            height=1,
            origin=(0.0, 0.0),
        )
        for z in z_values:
            d = k * rig.left.f_u * rig.baseline / z
            for dd in dd_values:
                predicted = float(depth_error(z, dd, k, rig))
                # Measured error: perturb the disparity symmetrically about
                # the operating point and take the depth spread.
                low = backproject_pixel(0.0, 0.0, d - dd / 2.0, view, rig)[2]
                high = backproject_pixel(0.0, 0.0, d + dd / 2.0, view, rig)[2]
                empirical = float(abs(low - high))
                rows.append(
                    {
                        "z": z,
                        "k": k,
                        "delta_d": dd,
                        "predicted_dz": predicted,
                        "empirical_dz": empirical,
                        "ratio": empirical / predicted if predicted > 0.0 else None,
                    }
                )

    out = _ensure_dir(args.out)
    with open(out / "errmodel.csv", "w") as fh:
        fh.write("z,k,delta_d,predicted_dz,empirical_dz,ratio\n")
        for row in rows:
            ratio = "" if row["ratio"] is None else repr(row["ratio"])
            fh.write(
                f"{row['z']:g},{row['k']:g},{row['delta_d']:g},"
                f"{row['predicted_dz']!r},{row['empirical_dz']!r},{ratio}\n"
            )
    save_errmodel_figure(out / "errmodel.png", rows)
    RunManifest(
        subcommand="errmodel",
        inputs={"calib": str(args.calib)},
        config={"z_values": z_values, "k_values": k_values, "delta_d": dd_values},
        outputs=["errmodel.csv", "errmodel.png"],
    ).write(out)

    for row in rows:
        ratio = "n/a" if row["ratio"] is None else f"{row['ratio']:.4f}"
        print(
            f"Z={row['z']:g} k={row['k']:g} dD={row['delta_d']:g}: "
            f"predicted {row['predicted_dz']:.6f} m, "
            f"measured {row['empirical_dz']:.6f} m, ratio {ratio}"
        )
    return 0


def cmd_sim_render(args) -> int:
    config = _load_config(args.config)
    target = _parse_target(_pick(args.target, config, "target", "256x128"))
    scene = load_scene(args.scene)
    out = _ensure_dir(args.out)
    indices = range(len(scene.objects)) if args.index is None else [args.index]

    records = []
    outputs = []
    failures = 0
    for index in indices:
        try:
            roi, view, maps = render_instance(scene, index, target)
        except StereoZoomError as exc:
            failures += 1
            records.append({"instance": index, "error": str(exc)})
            print(f"instance {index}: FAILED: {exc}")
            continue
        names = {
            "disparity": f"disparity_{index:03d}.png",
            "parts": f"parts_{index:03d}.npy",
            "parts_rgb": f"parts_{index:03d}.png",
            "mask": f"mask_{index:03d}.png",
        }
        save_disparity_png(out / names["disparity"], maps.disparity)
        np.save(out / names["parts"], maps.parts)
        save_part_visualization(out / names["parts_rgb"], maps.parts, maps.mask)
        Image.fromarray(maps.mask.astype(np.uint8) * 255).save(
            out / names["mask"], format="PNG"
        )
        outputs += list(names.values())
        records.append(
            {
                "instance": index,
                "roi": {"x": roi.x, "x_bar": roi.x_bar, "y": roi.y, "w": roi.w, "h": roi.h},
                "k": view.k,
                "m": view.m,
                "o_hat": view.o_hat,
                "foreground_pixels": int(np.count_nonzero(maps.mask)),
                "files": names,
            }
        )
        print(f"instance {index}: {int(np.count_nonzero(maps.mask))} foreground pixels")
    _write_json(out / "render.json", {"scene": str(args.scene), "instances": records})
    RunManifest(
        subcommand="sim-render",
        inputs={"scene": str(args.scene)},
        config={"target": f"{target[0]}x{target[1]}", "index": args.index},
        outputs=sorted(outputs + ["render.json"]),
    ).write(out)
    return 1 if failures else 0


def cmd_pcd_export(args) -> int:
    config = _load_config(args.config)
    target = _parse_target(_pick(args.target, config, "target", "256x128"))
    fmt = _pick(args.format, config, "format", "ply")
    if fmt not in ("ply", "bin", "both"):
        raise ValueError(f"format must be ply, bin, or both; got {fmt!r}")
    samples = _pick(args.samples, config, "samples", None)
    seed = int(_pick(args.seed, config, "seed", 0))
    scene = load_scene(args.scene)
    out = _ensure_dir(args.out)
    indices = range(len(scene.objects)) if args.index is None else [args.index]

    records = []
    outputs = []
    failures = 0
    child_seeds = np.random.SeedSequence(seed).spawn(len(scene.objects))
    for index in indices:
        try:
            _, view, maps = render_instance(scene, index, target)
            cloud = build_instance_cloud(maps, view, scene.rig)
            if samples is not None:
                cloud = sample_points(cloud, int(samples), seed=child_seeds[index])
        except StereoZoomError as exc:
            failures += 1
            records.append({"instance": index, "error": str(exc)})
            print(f"instance {index}: FAILED: {exc}")
            continue
        files = []
        if fmt in ("ply", "both"):
            name = f"instance_{index:03d}.ply"
            save_ply(out / name, cloud)
            files.append(name)
        if fmt in ("bin", "both"):
            name = f"instance_{index:03d}.bin"
            save_cloud_binary(out / name, cloud)
            files.append(name)
        outputs += files
        records.append({"instance": index, "points": len(cloud), "files": files})
        print(f"instance {index}: wrote {len(cloud)} points to {', '.join(files)}")
    _write_json(out / "export.json", {"scene": str(args.scene), "instances": records})
    RunManifest(
        subcommand="pcd-export",
        inputs={"scene": str(args.scene)},
        config={
            "target": f"{target[0]}x{target[1]}",
            "format": fmt,
            "samples": samples,
            "seed": seed,
            "index": args.index,
        },
        outputs=sorted(outputs + ["export.json"]),
    ).write(out)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereozoom",
        description="Adaptive-zoom stereo 3D detection geometry toolkit.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("zoom", help="zoom a stereo RoI and report scaled intrinsics")
    p.add_argument("calib", help="KITTI calibration file with P2/P3 lines")
    p.add_argument("--roi", required=True, help="RoI as x,x_bar,y,w,h (pixels)")
    p.add_argument("--target", help="zoomed raster size WxH (default 256x128)")
    p.add_argument("--out", help="directory for the JSON report and manifest")
    p.add_argument("--config", help="JSON file with default overrides")
    p.set_defaults(func=cmd_zoom)

    p = sub.add_parser(
        "pipeline",
        help="render a synthetic scene and run cloud construction, pose fit, scoring",
    )
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--target", help="zoomed raster size WxH (default 256x128)")
    p.add_argument("--samples", type=int, help="points sampled per instance (default 500)")
    p.add_argument("--theta", type=float, help="fitting score scale (default 8)")
    p.add_argument("--score-mode", choices=SCORE_MODES, help="fitting score direction")
    p.add_argument("--prob-2d", type=float, help="2D probability for every instance (default 1)")
    p.add_argument("--seed", type=int, help="master random seed (default 0)")
    p.add_argument("--disparity-noise", type=float, help="Gaussian disparity noise sigma, px")
    p.add_argument("--part-outliers", type=float, help="fraction of part pixels replaced")
    p.add_argument("--quantize", type=float, help="disparity quantization step, px")
    p.add_argument("--ransac", action="store_true", default=None, help="fit pose with RANSAC")
    p.add_argument("--ransac-iterations", type=int, help="RANSAC hypothesis count (default 200)")
    p.add_argument("--ransac-threshold", type=float, help="RANSAC inlier threshold, m (default 0.1)")
    p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--config", help="JSON file with default overrides")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("eval", help="KITTI-protocol AP evaluation of detection files")
    p.add_argument("--det", required=True, help="directory of detection .txt files")
    p.add_argument("--gt", required=True, help="directory of ground-truth .txt files")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--metrics", help="comma list from {3D,BEV} (default 3D,BEV)")
    p.add_argument("--iou-thresholds", help="comma list of IoU thresholds (default 0.5,0.7)")
    p.add_argument("--ap-points", type=int, choices=(11, 40),
                   help="AP recall samples (default 40)")
    p.add_argument("--category", help="object category to evaluate (default Car)")
    p.add_argument("--distance-buckets",
                   help="optional z slices as lo:hi,lo:hi (e.g. 0:20,20:40,40:inf)")
    p.add_argument("--occlusion-levels", help="optional comma list of occlusion levels")
    p.add_argument("--slice-difficulty", choices=DIFFICULTIES,
                   help="difficulty used for bucket/occlusion slices (default Hard)")
    p.add_argument("--config", help="JSON file with default overrides")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("errmodel", help="analytic vs. measured depth-error sweep")
    p.add_argument("calib", help="KITTI calibration file with P2/P3 lines")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--z-values", help="comma list of depths in m (default 10..60)")
    p.add_argument("--k-values", help="comma list of zoom factors (default 1,2,4)")
    p.add_argument("--delta-d", help="comma list of disparity errors in px (default 1)")
    p.add_argument("--config", help="JSON file with default overrides")
    p.set_defaults(func=cmd_errmodel)

    p = sub.add_parser("sim-render", help="render ground-truth instance maps from a scene")
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--index", type=int, help="render only this instance")
    p.add_argument("--target", help="zoomed raster size WxH (default 256x128)")
    p.add_argument("--config", help="JSON file with default overrides")
    p.set_defaults(func=cmd_sim_render)

    p = sub.add_parser("pcd-export", help="export instance point clouds as PLY/binary")
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--index", type=int, help="export only this instance")
    p.add_argument("--target", help="zoomed raster size WxH (default 256x128)")
    p.add_argument("--format", choices=("ply", "bin", "both"), help="output format (default ply)")
    p.add_argument("--samples", type=int, help="optional fixed-size subsample")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    p.add_argument("--config", help="JSON file with default overrides")
    p.set_defaults(func=cmd_pcd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StereoZoomError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
