"""Pipeline driver.

Every subcommand reads one config file, derives all randomness from its
single seed, writes its artifacts into --out, and drops the effective
config (defaults applied) alongside them so any output can be reproduced
from the directory contents alone. Exit status is nonzero only for hard
errors; warnings go to stderr and leave the status at zero.
"""

from __future__ import annotations

import argparse
import statistics
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .augment import augment_manifest
from .collect import collect_dataset, random_dock_scene
from .config import (RunConfig, config_hash, default_config, load_config,
                     with_seed, write_config)
from .dataset import (STATS_METRICS, dataset_stats, read_manifest,
                      split_by_base, write_manifest, write_stats_csv)
from .docking import NetworkPredictor, OraclePredictor, TrialResult, \
    docking_trial, write_trial_log
from .estimator import Estimator, save_weights, train, write_history
from .se2 import Pose2
from .util import ensure_dir, make_rng, write_csv, write_json


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _manifest_path(args, out: Path, default_name: str = "manifest.jsonl") -> Path:
    return Path(args.manifest) if args.manifest else out / default_name


def _disturbance(cfg: RunConfig):
    return cfg.disturbance if cfg.disturbance_enabled else None


def cmd_collect(cfg: RunConfig, out: Path, args) -> int:
    if cfg.collect.scenes == 0:
        write_manifest(out / "manifest.jsonl", [])
        write_csv(out / "stats.csv", ("metric", "mean", "std", "q1", "median", "q3"), [])
        write_json(out / "collect-summary.json",
                   {"config_hash": config_hash(cfg), "samples": 0, "scenes": 0})
        _warn("zero scenes configured; wrote an empty manifest")
        return 0
    samples = collect_dataset(cfg.collect, cfg.plant, cfg.camera, _disturbance(cfg),
                              cfg.seed, out, build=cfg.scene.build)
    write_manifest(out / "manifest.jsonl", samples)
    stats = dataset_stats(samples)
    write_stats_csv(out / "stats.csv", stats)
    summary = {"config_hash": config_hash(cfg), "samples": len(samples),
               "scenes": cfg.collect.scenes}
    for metric in STATS_METRICS:
        summary[f"{metric}_mean"] = stats[metric]["mean"]
        summary[f"{metric}_std"] = stats[metric]["std"]
    write_json(out / "collect-summary.json", summary)
    print(f"collected {len(samples)} samples over {cfg.collect.scenes} scenes -> {out}")
    return 0


def cmd_augment(cfg: RunConfig, out: Path, args) -> int:
    manifest = _manifest_path(args, out)
    samples = read_manifest(manifest)
    combined = augment_manifest(samples, manifest.parent, out, cfg.augment,
                                cfg.augment_copies)
    write_manifest(out / "manifest-aug.jsonl", combined)
    write_json(out / "augment-summary.json",
               {"config_hash": config_hash(cfg), "sources": len(samples),
                "copies_per_source": cfg.augment_copies, "total": len(combined)})
    print(f"augmented {len(samples)} -> {len(combined)} samples -> {out}")
    return 0


def cmd_train(cfg: RunConfig, out: Path, args) -> int:
    manifest = _manifest_path(args, out)
    samples = read_manifest(manifest)
    train_set, val_set = split_by_base(samples, cfg.train_fraction, cfg.seed)
    result = train(train_set, val_set, manifest.parent, cfg.network, cfg.train)
    save_weights(out / "weights.dpw", result.params, cfg.network, result.normalizer,
                 extra={"config_hash": config_hash(cfg),
                        "best_epoch": result.best_epoch,
                        "best_val_loss": result.best_val_loss})
    write_history(out / "history.csv", result.history)
    metrics.plot_loss_curves(out / "loss-curve.svg", {"model": result.history})
    write_json(out / "train-summary.json",
               {"config_hash": config_hash(cfg), "train_samples": len(train_set),
                "val_samples": len(val_set), "epochs": cfg.train.epochs,
                "best_epoch": result.best_epoch,
                "best_val_loss": result.best_val_loss,
                "final_train_loss": result.history[-1][1]})
    print(f"trained {cfg.train.epochs} epochs; best val loss "
          f"{result.best_val_loss:.6f} at epoch {result.best_epoch} -> {out}")
    return 0


def cmd_eval(cfg: RunConfig, out: Path, args) -> int:
    weights = Path(args.weights) if args.weights else out / "weights.dpw"
    manifest = _manifest_path(args, out)
    estimator = Estimator.from_file(weights)
    samples = read_manifest(manifest)
    _, val_set = split_by_base(samples, cfg.train_fraction, cfg.seed)
    report = metrics.eval_singleframe(estimator, val_set, manifest.parent)
    metrics.write_eval_report(out, report)
    dist = [r[1] for r in report.rows]
    speed = [r[2] for r in report.rows]
    sq = [r[3] for r in report.rows]
    metrics.plot_error_fit(out / "eval-vs-distance.svg", dist, sq,
                           report.distance_fit, "distance to dock (m)")
    metrics.plot_error_fit(out / "eval-vs-speed.svg", speed, sq,
                           report.speed_fit, "speed (m/s)")
    write_json(out / "eval-summary.json",
               {"config_hash": config_hash(cfg), **report.summary()})
    print(f"evaluated {len(report.rows)} samples; slope vs distance "
          f"{report.distance_fit[0]:+.6f}, vs speed {report.speed_fit[0]:+.6f} -> {out}")
    return 0


def cmd_data_eff(cfg: RunConfig, out: Path, args) -> int:
    manifest = _manifest_path(args, out)
    samples = read_manifest(manifest)
    report = metrics.data_efficiency(samples, manifest.parent, cfg.network, cfg.train,
                                     cfg.evaluation.data_efficiency_sizes,
                                     cfg.evaluation.data_efficiency_epochs,
                                     cfg.train_fraction, cfg.seed)
    write_csv(out / "data-efficiency.csv", metrics.DATA_EFF_COLUMNS, report.rows)
    metrics.plot_data_efficiency(out / "data-efficiency.svg", report.rows)
    write_json(out / "data-efficiency-summary.json",
               {"config_hash": config_hash(cfg), **report.summary()})
    print(f"data efficiency over sizes {[r[0] for r in report.rows]} -> {out}")
    return 0


def _failed_trial(seed: int, mode: str) -> TrialResult:
    return TrialResult(success=False, collided=False, timed_out=True, settled=False,
                       contact_docked=False, final_position_error=float("inf"),
                       final_heading_error=float("inf"), steps=0, sim_time=0.0,
                       predictions=0, seed=seed, mode=mode, rows=[])


def cmd_dock(cfg: RunConfig, out: Path, args) -> int:
    n = args.trials if args.trials is not None else cfg.dock_trials
    estimator = Estimator.from_file(args.weights) if args.weights else None
    if estimator is None:
        _warn("no --weights given; trials use the ground-truth pose oracle")
    modes = ("continuous", "single_shot")
    results: dict[str, list[TrialResult]] = {m: [] for m in modes}
    tracks = []
    trials_dir = ensure_dir(out / "trials")
    for i in range(n):
        scene_seed = int(make_rng(cfg.seed, "dock-scene", i).integers(1 << 30))
        scene = random_dock_scene(scene_seed, cfg.collect, cfg.scene.build)
        predictor = (NetworkPredictor(estimator, cfg.camera, scene)
                     if estimator else OraclePredictor(scene))
        for mode in modes:
            try:
                res = docking_trial(cfg.plant, scene, predictor, mode, cfg.controller,
                                    cfg.dock, seed=cfg.seed * 1000 + i,
                                    dist_cfg=_disturbance(cfg))
            except Exception as err:  # aborted trial = failure, batch continues
                _warn(f"trial {i} ({mode}) aborted: {err}")
                res = _failed_trial(cfg.seed * 1000 + i, mode)
            results[mode].append(res)
            write_trial_log(trials_dir / f"trial-{i:02d}-{mode}.csv", res)
        # dock-frame track for the overlay plot (continuous mode)
        res = results["continuous"][-1]
        if res.rows:
            m = np.linalg.inv(scene.dock_pose.to_matrix())
            pts = np.array([(r[1], r[2], 1.0) for r in res.rows]) @ m.T
            tracks.append((f"trial-{i:02d}", pts[:, 0].tolist(), pts[:, 1].tolist(),
                           res.success))
    trial_rows = []
    for i in range(n):
        for mode in modes:
            r = results[mode][i]
            trial_rows.append((i, mode, int(r.success), int(r.collided),
                               int(r.timed_out), int(r.settled), int(r.contact_docked),
                               r.final_position_error, r.final_heading_error,
                               r.sim_time, r.predictions, r.seed))
    write_csv(out / "dock-trials.csv",
              ("trial", "mode", "success", "collided", "timed_out", "settled",
               "contact_docked", "final_position_error_m", "final_heading_error_rad",
               "sim_time_s", "predictions", "seed"), trial_rows)
    summary = {"config_hash": config_hash(cfg), "trials": n,
               "predictor": "network" if estimator else "oracle",
               "disturbance": cfg.disturbance_enabled}
    for mode in modes:
        rs = results[mode]
        summary[f"{mode}_successes"] = sum(r.success for r in rs)
        summary[f"{mode}_median_final_position_error_m"] = (
            statistics.median(r.final_position_error for r in rs) if rs else None)
    write_json(out / "dock-summary.json", summary)
    if n > 0:
        metrics.plot_trajectories(out / "dock-trajectories.svg",
                                  cfg.scene.build(Pose2()), tracks)
        metrics.plot_final_errors(out / "dock-final-errors.svg", {
            m: [r.final_position_error for r in results[m]] for m in modes})
    for mode in modes:
        print(f"{mode}: {summary[f'{mode}_successes']}/{n} successes, median final "
              f"position error {summary[f'{mode}_median_final_position_error_m']}")
    return 0


def cmd_report(cfg: RunConfig, out: Path, args) -> int:
    text = metrics.build_report(out)
    (out / "report.txt").write_text(text)
    sys.stdout.write(text)
    return 0


_COMMANDS = {
    "collect": (cmd_collect, "simulate exploration and write an auto-labeled dataset"),
    "augment": (cmd_augment, "append corrupted copies to a dataset manifest"),
    "train": (cmd_train, "train the relative-pose network on a manifest"),
    "eval": (cmd_eval, "single-frame accuracy and robustness fits on the val split"),
    "data-eff": (cmd_data_eff, "loss versus dataset size on nested subsets"),
    "dock": (cmd_dock, "run closed-loop docking trials in both servo modes"),
    "report": (cmd_report, "aggregate stage summaries into one text report"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dockpilot",
        description="deterministic visual-docking pipeline for a planar vessel")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="TOML run config; defaults apply if omitted")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override the run seed")
        p.add_argument("--weights", help="trained weight file")
        p.add_argument("--manifest", help="dataset manifest path")
        p.add_argument("--trials", type=int, help="docking trial count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            cfg = with_seed(cfg, args.seed)
        out = ensure_dir(args.out)
        write_config(out / f"effective-config-{args.command}.toml", cfg)
        handler = _COMMANDS[args.command][0]
        return handler(cfg, out, args)
    except Exception as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
