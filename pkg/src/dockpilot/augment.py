"""Label-invariant image augmentation for the weather/appearance gap.

Each augmented image is produced by one seeded draw of: contrast and
brightness shift, directional motion blur, low-frequency fog overlay, rain
streaks, additive Gaussian noise, and pixel dropout, in that fixed order.
Values are clamped back to 0-255. Labels and metadata are never touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .camera import read_pgm, write_pgm
from .dataset import Sample, with_image
from .util import make_rng

_FOG_GRAY = 205.0
_RAIN_GRAY = 240.0


@dataclass(frozen=True)
class AugmentationConfig:
    gaussian_noise_std: float = 8.0  # gray levels
    pixel_dropout_fraction: float = 0.03
    motion_blur_kernel_px: int = 7  # 0 disables; otherwise odd kernel side
    motion_blur_angle_deg: float = 180.0  # blur direction drawn from [0, this)
    brightness_delta_range: float = 25.0  # +/- gray levels
    contrast_scale_low: float = 0.85
    contrast_scale_high: float = 1.15
    fog_intensity_low: float = 0.0
    fog_intensity_high: float = 0.35
    rain_streak_density: int = 40  # streaks per image
    seed: int = 0

    def __post_init__(self):
        if self.gaussian_noise_std < 0:
            raise ValueError("gaussian_noise_std must be >= 0")
        if not 0.0 <= self.pixel_dropout_fraction <= 1.0:
            raise ValueError("pixel_dropout_fraction must be in [0, 1]")
        if self.motion_blur_kernel_px < 0:
            raise ValueError("motion_blur_kernel_px must be >= 0")
        if self.motion_blur_kernel_px and self.motion_blur_kernel_px % 2 == 0:
            raise ValueError("motion_blur_kernel_px must be odd (or 0)")
        if self.contrast_scale_low > self.contrast_scale_high or self.contrast_scale_low < 0:
            raise ValueError("invalid contrast range")
        if not 0.0 <= self.fog_intensity_low <= self.fog_intensity_high <= 1.0:
            raise ValueError("fog intensity range must sit inside [0, 1]")
        if self.rain_streak_density < 0:
            raise ValueError("rain_streak_density must be >= 0")


def identity_config(seed: int = 0) -> AugmentationConfig:
    """All magnitudes zero: augment() returns byte-identical images."""
    return AugmentationConfig(
        gaussian_noise_std=0.0, pixel_dropout_fraction=0.0,
        motion_blur_kernel_px=0, brightness_delta_range=0.0,
        contrast_scale_low=1.0, contrast_scale_high=1.0,
        fog_intensity_low=0.0, fog_intensity_high=0.0,
        rain_streak_density=0, seed=seed)


def _motion_blur_kernel(k: int, angle: float) -> np.ndarray:
    kern = np.zeros((k, k), dtype=np.float32)
    c = k // 2
    dx, dy = math.cos(angle) * c, math.sin(angle) * c
    cv2.line(kern, (int(round(c - dx)), int(round(c - dy))),
             (int(round(c + dx)), int(round(c + dy))), 1.0, 1)
    return kern / kern.sum()


def augment_image(img: np.ndarray, cfg: AugmentationConfig, draw_seed: int) -> np.ndarray:
    """One seeded augmentation draw applied to a uint8 image."""
    rng = make_rng(cfg.seed, "augment", draw_seed)
    h, w = img.shape
    out = img.astype(np.float32)

    scale = rng.uniform(cfg.contrast_scale_low, cfg.contrast_scale_high)
    delta = rng.uniform(-cfg.brightness_delta_range, cfg.brightness_delta_range)
    if scale != 1.0 or delta != 0.0:
        out = (out - 128.0) * scale + 128.0 + delta

    if cfg.motion_blur_kernel_px >= 3:
        angle = rng.uniform(0.0, math.radians(cfg.motion_blur_angle_deg))
        out = cv2.filter2D(out, -1, _motion_blur_kernel(cfg.motion_blur_kernel_px, angle),
                           borderType=cv2.BORDER_REFLECT)

    intensity = rng.uniform(cfg.fog_intensity_low, cfg.fog_intensity_high)
    if intensity > 0.0:
        coarse = rng.random((4, 4), dtype=np.float64).astype(np.float32)
        fog = cv2.resize(coarse, (w, h), interpolation=cv2.INTER_LINEAR) * intensity
        out = out * (1.0 - fog) + _FOG_GRAY * fog

    if cfg.rain_streak_density > 0:
        storm = rng.uniform(math.radians(75.0), math.radians(105.0))
        xs = rng.integers(0, w, cfg.rain_streak_density)
        ys = rng.integers(0, h, cfg.rain_streak_density)
        lengths = rng.integers(6, 16, cfg.rain_streak_density)
        jitter = rng.uniform(-0.1, 0.1, cfg.rain_streak_density)
        for x, y, ln, jt in zip(xs, ys, lengths, jitter):
            a = storm + jt
            x1 = int(round(x + math.cos(a) * ln))
            y1 = int(round(y + math.sin(a) * ln))
            cv2.line(out, (int(x), int(y)), (x1, y1), _RAIN_GRAY, 1)

    if cfg.gaussian_noise_std > 0.0:
        out = out + rng.normal(0.0, cfg.gaussian_noise_std, (h, w))

    if cfg.pixel_dropout_fraction > 0.0:
        mask = rng.random((h, w)) < cfg.pixel_dropout_fraction
        out = np.where(mask, 0.0, out)

    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def augment_manifest(samples: list[Sample], root, out_dir, cfg: AugmentationConfig,
                     copies: int = 1) -> list[Sample]:
    """Append seeded augmented copies of every source sample.

    Returns sources plus copies; augmented images are written under
    out_dir/images-aug. Copy k of sample i uses draw seed i*copies + k, so
    the result depends only on (manifest order, cfg).
    """
    root = Path(root)
    out_dir = Path(out_dir)
    img_dir = out_dir / "images-aug"
    img_dir.mkdir(parents=True, exist_ok=True)
    result = list(samples)
    for i, s in enumerate(samples):
        src = read_pgm(root / s.image)
        for k in range(copies):
            aug_id = f"{s.id}-a{k}"
            rel = f"images-aug/{aug_id}.pgm"
            write_pgm(out_dir / rel, augment_image(src, cfg, i * copies + k))
            result.append(with_image(s, aug_id, rel, augmented=True))
    return result
