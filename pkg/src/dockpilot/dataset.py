"""Auto-labeled sample records, manifest persistence, split, and statistics.

A manifest is a JSON Lines file, one sample per line, stored beside a
directory of PGM images. Field names and float formatting are fixed so a
rerun with identical seeds reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .se2 import Pose2
from .util import make_rng, write_csv

MANIFEST_FIELDS = ("id", "image", "dx_m", "dy_m", "dtheta_rad", "x_m", "y_m",
                   "theta_rad", "speed_mps", "dist_m", "t_s", "scene", "augmented")


@dataclass(frozen=True)
class Sample:
    """One auto-labeled datapoint: image reference, label, capture metadata."""

    id: str
    image: str  # path relative to the manifest location
    label: Pose2  # dock frame expressed in the vessel base frame
    world_pose: Pose2
    speed: float
    dist: float
    t: float
    scene: str
    augmented: bool = False

    def to_row(self) -> dict:
        return {
            "id": self.id,
            "image": self.image,
            "dx_m": self.label.x,
            "dy_m": self.label.y,
            "dtheta_rad": self.label.theta,
            "x_m": self.world_pose.x,
            "y_m": self.world_pose.y,
            "theta_rad": self.world_pose.theta,
            "speed_mps": self.speed,
            "dist_m": self.dist,
            "t_s": self.t,
            "scene": self.scene,
            "augmented": self.augmented,
        }

    @classmethod
    def from_row(cls, row: dict) -> "Sample":
        return cls(
            id=row["id"],
            image=row["image"],
            label=Pose2(row["dx_m"], row["dy_m"], row["dtheta_rad"]),
            world_pose=Pose2(row["x_m"], row["y_m"], row["theta_rad"]),
            speed=float(row["speed_mps"]),
            dist=float(row["dist_m"]),
            t=float(row["t_s"]),
            scene=str(row["scene"]),
            augmented=bool(row["augmented"]),
        )


def write_manifest(path, samples: list[Sample]) -> None:
    with open(path, "w") as fh:
        for s in samples:
            row = s.to_row()
            fh.write(json.dumps({k: row[k] for k in MANIFEST_FIELDS}) + "\n")


def read_manifest(path) -> list[Sample]:
    samples = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                samples.append(Sample.from_row(json.loads(line)))
    return samples


def validate_manifest(samples: list[Sample], root) -> None:
    """Check id uniqueness and that every image reference resolves."""
    root = Path(root)
    ids = set()
    for s in samples:
        if s.id in ids:
            raise ValueError(f"duplicate sample id {s.id!r}")
        ids.add(s.id)
        if not (root / s.image).is_file():
            raise FileNotFoundError(f"sample {s.id}: missing image {root / s.image}")


def split(samples: list[Sample], train_fraction: float, seed: int) -> tuple[list[Sample], list[Sample]]:
    """Seeded-shuffle split; the training side gets the floor share."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if not samples:
        raise ValueError("cannot split an empty manifest")
    order = make_rng(seed, "split").permutation(len(samples))
    n_train = int(len(samples) * train_fraction + 1e-9)
    train = [samples[i] for i in order[:n_train]]
    val = [samples[i] for i in order[n_train:]]
    return train, val


def base_id(sample_id: str) -> str:
    """Source id of an augmented copy (strip one trailing -a<k>); own id otherwise."""
    stem, sep, tail = sample_id.rpartition("-a")
    if sep and tail.isdigit():
        return stem
    return sample_id


def split_by_base(samples: list[Sample], train_fraction: float,
                  seed: int) -> tuple[list[Sample], list[Sample]]:
    """Leakage-safe split: a source and its augmented copies stay together.

    Groups are permuted with the same stream and floor rule as split(), so
    on a manifest with no augmented rows the two functions agree exactly.
    The validation side keeps only unaugmented members; models are never
    scored on synthetic corruptions.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if not samples:
        raise ValueError("cannot split an empty manifest")
    groups: dict[str, list[Sample]] = {}
    keys = []
    for s in samples:
        key = base_id(s.id)
        if key not in groups:
            groups[key] = []
            keys.append(key)
        groups[key].append(s)
    order = make_rng(seed, "split").permutation(len(keys))
    n_train = int(len(keys) * train_fraction + 1e-9)
    train = [s for i in order[:n_train] for s in groups[keys[i]]]
    val = [s for i in order[n_train:] for s in groups[keys[i]] if not s.augmented]
    if not val:
        raise ValueError("validation side is empty; lower train_fraction")
    return train, val


STATS_METRICS = ("dist_m", "speed_mps")


def dataset_stats(samples: list[Sample]) -> dict[str, dict[str, float]]:
    """Mean/std (population) and quartiles of distance and speed."""
    if not samples:
        raise ValueError("cannot summarize an empty manifest")
    series = {
        "dist_m": np.array([s.dist for s in samples]),
        "speed_mps": np.array([s.speed for s in samples]),
    }
    out = {}
    for name in STATS_METRICS:
        vals = series[name]
        q1, median, q3 = np.percentile(vals, [25, 50, 75])
        out[name] = {
            "mean": float(vals.mean()),
            "std": float(vals.std()),
            "q1": float(q1),
            "median": float(median),
            "q3": float(q3),
        }
    return out


def write_stats_csv(path, stats: dict[str, dict[str, float]]) -> None:
    rows = [(m, stats[m]["mean"], stats[m]["std"], stats[m]["q1"],
             stats[m]["median"], stats[m]["q3"]) for m in STATS_METRICS]
    write_csv(path, ("metric", "mean", "std", "q1", "median", "q3"), rows)


def with_image(sample: Sample, sample_id: str, image: str, augmented: bool) -> Sample:
    """Clone a sample onto a new image file, label and metadata untouched."""
    return replace(sample, id=sample_id, image=image, augmented=augmented)


def manifest_counts(samples: list[Sample]) -> dict:
    scenes = sorted({s.scene for s in samples})
    return {
        "total": len(samples),
        "augmented": sum(1 for s in samples if s.augmented),
        "source": sum(1 for s in samples if not s.augmented),
        "scenes": len(scenes),
    }
