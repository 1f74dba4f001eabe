"""Figure rendering for report outputs.

Figures are written next to the delimited report files by the CLI. The Agg
backend and a suppressed date stamp keep the PNG bytes identical across
runs with the same inputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SAVE_OPTS = {"dpi": 120, "metadata": {"Date": None}}


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def save_pr_figure(path, curves, title: str) -> None:
    """Plot precision/recall sweeps; ``curves`` pairs a label with an
    ApResult-like object exposing recall, precision, and ap."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for label, result in curves:
        ax.plot(result.recall, result.precision, label=f"{label}: AP {result.ap:.2f}%")
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    if curves:
        ax.legend(loc="lower left", fontsize=8)
    ax.set_title(title)
    _finish(fig, path)


def save_errmodel_figure(path, rows) -> None:
    """Plot predicted depth error curves against the measured values.

    ``rows`` are dicts with keys z, k, delta_d, predicted_dz, empirical_dz;
    one line plus marker series per (k, delta_d) pair.
    """
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault((row["k"], row["delta_d"]), []).append(row)
    for (k, delta_d), items in sorted(groups.items()):
        items = sorted(items, key=lambda r: r["z"])
        zs = [r["z"] for r in items]
        line = ax.plot(
            zs,
            [r["predicted_dz"] for r in items],
            "-",
            label=f"k={k:g}, dD={delta_d:g}px",
        )[0]
        ax.plot(
            zs,
            [r["empirical_dz"] for r in items],
            "o",
            color=line.get_color(),
            markersize=4,
        )
    ax.set_xlabel("depth Z (m)")
    ax.set_ylabel("depth error dZ (m)")
    ax.grid(True, alpha=0.3)
    if rows:
        ax.legend(fontsize=8, title="lines predicted, dots measured")
    ax.set_title("depth error vs. depth")
    _finish(fig, path)


def save_pipeline_figure(path, records) -> None:
    """Summarize per-instance pipeline results: depth error and confidence.

    ``records`` are the per-instance report dicts; failed instances (no
    mean_abs_depth_error key) are skipped.
    """
    ok = [r for r in records if "mean_abs_depth_error" in r]
    fig, (ax_err, ax_conf) = plt.subplots(1, 2, figsize=(8.0, 3.5))
    indices = [r["instance"] for r in ok]
    ax_err.bar(indices, [r["mean_abs_depth_error"] for r in ok], color="tab:blue")
    ax_err.set_xlabel("instance")
    ax_err.set_ylabel("mean |dZ| (m)")
    ax_err.set_title("depth error")
    ax_conf.bar(indices, [r["confidence"] for r in ok], color="tab:orange")
    ax_conf.set_xlabel("instance")
    ax_conf.set_ylabel("confidence")
    ax_conf.set_ylim(0.0, 1.05)
    ax_conf.set_title("detection confidence")
    for ax in (ax_err, ax_conf):
        if indices:
            ax.set_xticks(indices)
        ax.grid(True, axis="y", alpha=0.3)
    _finish(fig, path)
