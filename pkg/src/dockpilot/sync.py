"""Approximate-time pairing of two timestamped streams.

Mirrors the buffer-matching used on robot middleware: each image is paired
with the closest pose in time, pairs farther apart than the threshold are
dropped, and no pose is handed out twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MatchedPair:
    image_time: float
    pose_time: float
    image_index: int
    pose_index: int

    @property
    def offset(self) -> float:
        return abs(self.image_time - self.pose_time)


def _check_sorted(times: np.ndarray, name: str) -> None:
    if len(times) > 1 and np.any(np.diff(times) < 0):
        raise ValueError(f"{name} stream is not time-ordered")


def approximate_time_pair(pose_times: Sequence[float], image_times: Sequence[float],
                          threshold: float) -> list[MatchedPair]:
    """Match every image to its nearest pose within the threshold.

    Images are processed in time order; if an image's nearest pose was
    already claimed, the next-nearest unused neighbor is considered before
    the image is dropped.
    """
    poses = np.asarray(pose_times, dtype=float)
    images = np.asarray(image_times, dtype=float)
    _check_sorted(poses, "pose")
    _check_sorted(images, "image")
    if len(poses) == 0 or len(images) == 0:
        return []

    used = np.zeros(len(poses), dtype=bool)
    pairs = []
    right = np.searchsorted(poses, images)
    for i, t in enumerate(images):
        candidates = []
        for j in (right[i] - 1, right[i]):
            if 0 <= j < len(poses) and not used[j]:
                dt = abs(poses[j] - t)
                if dt <= threshold:
                    candidates.append((dt, j))
        if not candidates:
            continue
        _, j = min(candidates)
        used[j] = True
        pairs.append(MatchedPair(float(t), float(poses[j]), i, int(j)))
    return pairs
