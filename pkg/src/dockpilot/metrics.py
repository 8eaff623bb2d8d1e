"""Evaluation metrics, regression fits, figures, and the run report.

Per-sample errors are stated in normalized label units (the training
loss scale) so regression slopes against distance and speed read as
error-units per meter and per meter-per-second.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import cnn
from .dataset import Sample
from .estimator import Estimator, encode_labels, load_inputs, train
from .se2 import normalize_angle
from .util import make_rng, read_csv, write_csv

EVAL_COLUMNS = ("id", "dist_m", "speed_mps", "sq_err", "pos_err_m", "heading_err_rad")
DATA_EFF_COLUMNS = ("size", "train_loss", "val_loss")


def linear_fit(x, y) -> tuple[float, float]:
    """Least-squares line y = slope*x + intercept, closed form.

    A constant y maps to slope exactly 0 (as does a constant x, where the
    slope is undefined and 0 is the reported convention).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError("inputs must be equal-length 1-D arrays")
    if np.all(y == y[0]):
        return 0.0, float(y[0])
    xm = float(x.mean())
    ym = float(y.mean())
    var = float(((x - xm) ** 2).sum())
    if var == 0.0:
        return 0.0, ym
    slope = float(((x - xm) * (y - ym)).sum()) / var
    return slope, ym - slope * xm


@dataclass
class EvalReport:
    """Single-frame accuracy table plus its regression fits."""

    rows: list
    distance_fit: tuple
    speed_fit: tuple
    mean_sq_err: float

    def summary(self) -> dict:
        return {
            "samples": len(self.rows),
            "mean_sq_err": self.mean_sq_err,
            "distance_slope": self.distance_fit[0],
            "distance_intercept": self.distance_fit[1],
            "speed_slope": self.speed_fit[0],
            "speed_intercept": self.speed_fit[1],
        }


def eval_singleframe(estimator: Estimator, samples: list[Sample], root,
                     chunk: int = 256) -> EvalReport:
    """Per-sample squared error on a split, with error-vs-condition fits."""
    if not samples:
        raise ValueError("evaluation needs at least one sample")
    x = load_inputs(samples, root, estimator.net_cfg.input_side)
    labels = encode_labels(samples, estimator.normalizer)
    preds = np.empty_like(labels)
    for lo in range(0, len(samples), chunk):
        preds[lo:lo + chunk] = cnn.forward(estimator.params, estimator.net_cfg,
                                           x[lo:lo + chunk])
    sq = np.mean((preds.astype(np.float64) - labels) ** 2, axis=1)
    raw = estimator.normalizer.denormalize(preds.astype(np.float64))
    rows = []
    for i, s in enumerate(samples):
        pos_err = math.hypot(raw[i, 0] - s.label.x, raw[i, 1] - s.label.y)
        heading = math.atan2(raw[i, 2], raw[i, 3])
        heading_err = abs(normalize_angle(heading - s.label.theta))
        rows.append((s.id, s.dist, s.speed, float(sq[i]), pos_err, heading_err))
    dist = np.array([r[1] for r in rows])
    speed = np.array([r[2] for r in rows])
    return EvalReport(rows=rows,
                      distance_fit=linear_fit(dist, sq),
                      speed_fit=linear_fit(speed, sq),
                      mean_sq_err=float(sq.mean()))


def write_eval_report(out_dir, report: EvalReport) -> None:
    out = Path(out_dir)
    write_csv(out / "eval-samples.csv", EVAL_COLUMNS, report.rows)


def nested_subsets(samples: list[Sample], sizes, seed: int) -> list[list[Sample]]:
    """Seeded prefixes of one permutation: every subset contains the smaller ones."""
    sizes = list(sizes)
    if sizes != sorted(sizes) or not sizes or sizes[0] <= 0:
        raise ValueError("sizes must be ascending and positive")
    if sizes[-1] > len(samples):
        raise ValueError(
            f"insufficient data: largest subset {sizes[-1]} exceeds {len(samples)} samples")
    order = make_rng(seed, "data-efficiency").permutation(len(samples))
    return [[samples[j] for j in order[:size]] for size in sizes]


@dataclass
class DataEffReport:
    rows: list  # DATA_EFF_COLUMNS

    def summary(self) -> dict:
        return {
            "sizes": [r[0] for r in self.rows],
            "train_losses": [r[1] for r in self.rows],
            "val_losses": [r[2] for r in self.rows],
        }


def data_efficiency(samples: list[Sample], root, net_cfg, train_cfg, sizes,
                    epochs: int, train_fraction: float, seed: int) -> DataEffReport:
    """Loss versus dataset size on nested subsets.

    Each subset is split and trained independently with a shared recipe;
    the recorded validation loss is the best checkpoint's, matching how a
    trained model is scored everywhere else.
    """
    from .dataset import split
    rows = []
    cfg = replace(train_cfg, epochs=epochs)
    for subset in nested_subsets(samples, sizes, seed):
        tr, va = split(subset, train_fraction, seed)
        result = train(tr, va, root, net_cfg, cfg)
        final_train = result.history[-1][1]
        rows.append((len(subset), final_train, result.best_val_loss))
    return DataEffReport(rows=rows)


# --- figures ---------------------------------------------------------------

def _plt():
    import matplotlib
    matplotlib.use("Agg", force=True)
    matplotlib.rcParams["svg.hashsalt"] = "dockpilot"  # stable SVG ids
    import matplotlib.pyplot as plt
    return plt


def _save(plt, fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_loss_curves(path, histories: dict) -> None:
    """histories: label -> sequence of (epoch, train_loss, val_loss)."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label in sorted(histories):
        rows = histories[label]
        epochs = [r[0] for r in rows]
        ax.plot(epochs, [r[1] for r in rows], label=f"{label} train")
        ax.plot(epochs, [r[2] for r in rows], linestyle="--", label=f"{label} val")
    ax.set_xlabel("epoch")
    ax.set_ylabel("MSE loss (normalized units)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    _save(plt, fig, path)


def plot_error_fit(path, x, y, fit: tuple, xlabel: str) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(x, y, s=6, alpha=0.5)
    xs = np.linspace(float(np.min(x)), float(np.max(x)), 2)
    ax.plot(xs, fit[0] * xs + fit[1], color="tab:red",
            label=f"fit: {fit[0]:+.5f} x + {fit[1]:.5f}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("per-sample squared error")
    ax.legend()
    fig.tight_layout()
    _save(plt, fig, path)


def plot_data_efficiency(path, rows) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    sizes = [r[0] for r in rows]
    ax.plot(sizes, [r[1] for r in rows], marker="o", label="train")
    ax.plot(sizes, [r[2] for r in rows], marker="s", label="val")
    ax.set_xlabel("training subset size (samples)")
    ax.set_ylabel("MSE loss (normalized units)")
    ax.legend()
    fig.tight_layout()
    _save(plt, fig, path)


def plot_trajectories(path, scene, tracks: list) -> None:
    """Top-down trial paths over the dock footprint.

    tracks: (label, xs, ys, success) tuples; successes solid, failures dotted.
    """
    plt = _plt()
    from matplotlib.patches import Polygon
    fig, ax = plt.subplots(figsize=(6, 6))
    for block in scene.blocks:
        ax.add_patch(Polygon(block.corners(), closed=True, facecolor="0.4",
                             edgecolor="none"))
    half = scene.docking_area / 2.0
    corners = [scene.dock_pose.to_matrix() @ np.array([sx * half, sy * half, 1.0])
               for sx, sy in ((1, 1), (1, -1), (-1, -1), (-1, 1))]
    ax.add_patch(Polygon([(c[0], c[1]) for c in corners], closed=True, fill=False,
                         edgecolor="tab:green", linestyle=":"))
    for label, xs, ys, ok in tracks:
        ax.plot(xs, ys, linewidth=0.9, linestyle="-" if ok else ":",
                color="tab:blue" if ok else "tab:red", alpha=0.8)
        ax.plot([xs[0]], [ys[0]], marker=".", color="black", markersize=3)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    fig.tight_layout()
    _save(plt, fig, path)


def plot_final_errors(path, by_mode: dict) -> None:
    """Sorted final position errors per servo mode."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    for mode in sorted(by_mode):
        errs = sorted(by_mode[mode])
        ax.plot(range(1, len(errs) + 1), errs, marker="o", label=mode)
    ax.set_xlabel("trial (sorted by error)")
    ax.set_ylabel("final position error (m)")
    ax.legend()
    fig.tight_layout()
    _save(plt, fig, path)


# --- consolidated report ----------------------------------------------------

_REPORT_STAGES = (
    ("collect", "collect-summary.json", ("manifest.jsonl", "stats.csv")),
    ("augment", "augment-summary.json", ("manifest-aug.jsonl",)),
    ("train", "train-summary.json", ("history.csv", "loss-curve.svg")),
    ("eval", "eval-summary.json",
     ("eval-samples.csv", "eval-vs-distance.svg", "eval-vs-speed.svg")),
    ("data-eff", "data-efficiency-summary.json",
     ("data-efficiency.csv", "data-efficiency.svg")),
    ("dock", "dock-summary.json",
     ("dock-trials.csv", "dock-trajectories.svg", "dock-final-errors.svg")),
)


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def build_report(out_dir) -> str:
    """Plain-text aggregation of every stage summary found in out_dir."""
    out = Path(out_dir)
    lines = ["docking pipeline report", "=" * 24, ""]
    found = 0
    missing = []
    for stage, summary_name, artifacts in _REPORT_STAGES:
        summary_path = out / summary_name
        if not summary_path.exists():
            missing.append(stage)
            continue
        found += 1
        info = json.loads(summary_path.read_text())
        lines.append(f"[{stage}]")
        for key in sorted(info):
            lines.append(f"  {key} = {_fmt_value(info[key])}")
        present = [a for a in artifacts if (out / a).exists()]
        if present:
            lines.append("  files: " + ", ".join(present))
        lines.append("")
    if found == 0:
        lines.append("no runs found")
        lines.append("")
    elif missing:
        lines.append("missing stages: " + ", ".join(missing))
        lines.append("")
    return "\n".join(lines)


def stage_tables(out_dir) -> dict:
    """Named tables currently on disk, for report consumers."""
    out = Path(out_dir)
    tables = {}
    for name in ("stats.csv", "history.csv", "eval-samples.csv",
                 "data-efficiency.csv", "dock-trials.csv"):
        p = out / name
        if p.exists():
            tables[name] = read_csv(p)
    return tables
