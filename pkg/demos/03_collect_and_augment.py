"""Small end-to-end dataset build: exploration, auto-labels, corruption.

Collects two scenes of labeled fisheye images, prints the dataset
statistics, then appends weather-corrupted copies. Everything lands in
demos/output/dataset/.
Run:  python3 demos/03_collect_and_augment.py   (about half a minute)
"""

import math
from pathlib import Path

from dockpilot.augment import AugmentationConfig, augment_manifest
from dockpilot.camera import CameraModel
from dockpilot.collect import CollectionConfig, collect_dataset
from dockpilot.dataset import dataset_stats, read_manifest, write_manifest
from dockpilot.plant import UsvParams

out = Path(__file__).parent / "output" / "dataset"
out.mkdir(parents=True, exist_ok=True)

cfg = CollectionConfig(scenes=2, samples_per_scene=60)
samples = collect_dataset(cfg, UsvParams(), CameraModel(), None, seed=3, out_dir=out)
write_manifest(out / "manifest.jsonl", samples)

stats = dataset_stats(samples)
print(f"collected {len(samples)} samples")
for metric, vals in stats.items():
    print(f"  {metric}: mean={vals['mean']:.3f} std={vals['std']:.3f} "
          f"median={vals['median']:.3f}")

first = samples[0]
print(f"\nfirst sample {first.id}: label dx={first.label.x:.3f} m, "
      f"dy={first.label.y:.3f} m, dtheta={math.degrees(first.label.theta):.1f} deg")

combined = augment_manifest(samples, out, out, AugmentationConfig(seed=3), copies=1)
write_manifest(out / "manifest-aug.jsonl", combined)
flagged = sum(s.augmented for s in combined)
print(f"\naugmented manifest: {len(combined)} rows ({flagged} corrupted copies)")
print(f"reload check: {len(read_manifest(out / 'manifest-aug.jsonl'))} rows parse back")
