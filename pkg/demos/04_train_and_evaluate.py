"""Train the pose estimator on the demo dataset and inspect its errors.

Needs the dataset from demos/03_collect_and_augment.py. Trains a short
run, reports the loss history, saves weights, then fits per-sample error
against distance and speed the way the evaluation stage does.
Run:  python3 demos/04_train_and_evaluate.py   (a couple of minutes)
"""

from pathlib import Path

from dockpilot.dataset import read_manifest, split_by_base
from dockpilot.estimator import Estimator, TrainConfig, save_weights, train
from dockpilot.cnn import NetworkConfig, param_count
from dockpilot.metrics import eval_singleframe

root = Path(__file__).parent / "output" / "dataset"
manifest = root / "manifest-aug.jsonl"
if not manifest.exists():
    raise SystemExit("run demos/03_collect_and_augment.py first")

samples = read_manifest(manifest)
train_set, val_set = split_by_base(samples, 0.8, seed=3)
print(f"{len(train_set)} training / {len(val_set)} validation samples")

net_cfg = NetworkConfig()
result = train(train_set, val_set, root, net_cfg,
               TrainConfig(epochs=8, seed=3))
print(f"network has {param_count(result.params)} parameters")
for epoch, tr, va in result.history:
    print(f"  epoch {epoch:2d}: train {tr:.4f}  val {va:.4f}")
print(f"best checkpoint: epoch {result.best_epoch}, val loss {result.best_val_loss:.4f}")

weights_path = root / "demo-weights.dpw"
save_weights(weights_path, result.params, net_cfg, result.normalizer)
report = eval_singleframe(Estimator.from_file(weights_path), val_set, root)
print(f"\nmean per-sample squared error: {report.mean_sq_err:.4f}")
print(f"error vs distance: slope {report.distance_fit[0]:+.5f} /m")
print(f"error vs speed:    slope {report.speed_fit[0]:+.5f} /(m/s)")
print("(a short demo run stays noisy; the full pipeline trains 30 epochs on 2000 samples)")
