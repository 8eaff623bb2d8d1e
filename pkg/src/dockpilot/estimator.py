"""Relative-pose estimator: label codec, training loop, weight persistence.

Labels are encoded as (x, y, sin theta, cos theta); the translation
channels are standardized with statistics taken from the training split
only. Training is plain SGD with momentum over seeded shuffles, tracking
per-epoch train/validation losses and keeping the weights of the epoch
with the lowest validation loss.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cnn
from .camera import crop_resize, read_pgm
from .dataset import Sample
from .se2 import Pose2
from .util import make_rng, write_csv

WEIGHTS_MAGIC = b"DPWT0001"


@dataclass(frozen=True)
class LabelNormalizer:
    """Per-channel affine codec: normalized = (raw - offset) / scale."""

    offset: tuple = (0.0, 0.0, 0.0, 0.0)
    scale: tuple = (1.0, 1.0, 1.0, 1.0)

    @classmethod
    def fit(cls, labels: list[Pose2]) -> "LabelNormalizer":
        """Standardize x and y; center sin/cos at their training means.

        sin/cos keep unit scale so a normalized heading error reads the
        same as a raw one; centering only spares the net from having to
        learn a nonzero output mean through its zero-initialized biases.
        """
        vec = np.array([[p.x, p.y, math.sin(p.theta), math.cos(p.theta)]
                        for p in labels])
        mean = vec.mean(axis=0)
        std = vec.std(axis=0)
        std = np.where(std > 1e-9, std, 1.0)
        return cls(offset=tuple(float(m) for m in mean),
                   scale=(float(std[0]), float(std[1]), 1.0, 1.0))

    def normalize(self, raw: np.ndarray) -> np.ndarray:
        return (raw - np.asarray(self.offset)) / np.asarray(self.scale)

    def denormalize(self, vec: np.ndarray) -> np.ndarray:
        return vec * np.asarray(self.scale) + np.asarray(self.offset)


def raw_label(delta: Pose2) -> np.ndarray:
    return np.array([delta.x, delta.y, math.sin(delta.theta), math.cos(delta.theta)])


def encode_label(delta: Pose2, norm: LabelNormalizer) -> np.ndarray:
    return norm.normalize(raw_label(delta))


def decode_label(vec: np.ndarray, norm: LabelNormalizer) -> Pose2:
    raw = norm.denormalize(np.asarray(vec, dtype=float))
    return Pose2(raw[0], raw[1], math.atan2(raw[2], raw[3]))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    momentum: float = 0.9
    batch_size: int = 32
    epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def load_inputs(samples: list[Sample], root, side: int) -> np.ndarray:
    """Read, crop, and scale sample images to a (N, side, side, 1) float32 batch."""
    root = Path(root)
    out = np.empty((len(samples), side, side, 1), dtype=np.float32)
    for i, s in enumerate(samples):
        img = crop_resize(read_pgm(root / s.image), side)
        out[i, :, :, 0] = img.astype(np.float32) / 255.0
    return out


def encode_labels(samples: list[Sample], norm: LabelNormalizer) -> np.ndarray:
    return np.stack([encode_label(s.label, norm) for s in samples]).astype(np.float32)


def evaluate(params: dict, cfg: cnn.NetworkConfig, x: np.ndarray, y: np.ndarray,
             chunk: int = 256) -> float:
    """Inference-mode MSE over a dataset, streamed in chunks."""
    total = 0.0
    for i in range(0, len(x), chunk):
        pred = cnn.forward(params, cfg, x[i:i + chunk])
        d = pred - y[i:i + chunk]
        total += float(np.sum(d * d))
    return total / y.size


@dataclass
class TrainResult:
    params: dict  # best-validation checkpoint
    final_params: dict  # weights after the last epoch
    normalizer: LabelNormalizer
    history: list[tuple[int, float, float]]  # (epoch, train_loss, val_loss)
    best_epoch: int
    best_val_loss: float


def train(train_samples: list[Sample], val_samples: list[Sample], root,
          net_cfg: cnn.NetworkConfig, train_cfg: TrainConfig,
          normalizer: LabelNormalizer | None = None) -> TrainResult:
    """Full training run; deterministic given the seeds in train_cfg."""
    if not train_samples or not val_samples:
        raise ValueError("both splits must be non-empty")
    norm = normalizer or LabelNormalizer.fit([s.label for s in train_samples])
    x_train = load_inputs(train_samples, root, net_cfg.input_side)
    y_train = encode_labels(train_samples, norm)
    x_val = load_inputs(val_samples, root, net_cfg.input_side)
    y_val = encode_labels(val_samples, norm)

    params = cnn.init_params(net_cfg, train_cfg.seed)
    velocity = cnn.zero_velocity(params)
    dropout_rng = make_rng(train_cfg.seed, "dropout")

    history = []
    best_val = math.inf
    best_epoch = 0
    best_params = cnn.copy_params(params)
    n = len(train_samples)
    for epoch in range(1, train_cfg.epochs + 1):
        order = make_rng(train_cfg.seed, "shuffle", epoch).permutation(n)
        for start in range(0, n, train_cfg.batch_size):
            idx = order[start:start + train_cfg.batch_size]
            _, grads = cnn.loss_and_grads(params, net_cfg, x_train[idx], y_train[idx],
                                          dropout_rng=dropout_rng)
            cnn.sgd_step(params, velocity, grads, train_cfg.learning_rate, train_cfg.momentum)
        # both losses measured in inference mode so the curves are comparable
        train_loss = evaluate(params, net_cfg, x_train, y_train)
        val_loss = evaluate(params, net_cfg, x_val, y_val)
        history.append((epoch, train_loss, val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best_params = cnn.copy_params(params)
    return TrainResult(params=best_params, final_params=params, normalizer=norm,
                       history=history, best_epoch=best_epoch, best_val_loss=best_val)


def write_history(path, history) -> None:
    write_csv(path, ("epoch", "train_loss", "val_loss"), history)


def save_weights(path, params: dict, net_cfg: cnn.NetworkConfig,
                 norm: LabelNormalizer, extra: dict | None = None) -> None:
    """Binary weight file: magic, JSON header, flat little-endian float32 blob."""
    names = sorted(params)
    header = {
        "arrays": [{"name": n, "shape": list(params[n].shape)} for n in names],
        "network": {
            "input_side": net_cfg.input_side,
            "conv_channels": list(net_cfg.conv_channels),
            "fc_sizes": list(net_cfg.fc_sizes),
            "output_dim": net_cfg.output_dim,
            "dropout_rate": net_cfg.dropout_rate,
        },
        "normalizer": {"offset": list(norm.offset), "scale": list(norm.scale)},
    }
    if extra:
        header.update(extra)
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(WEIGHTS_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for n in names:
            fh.write(np.ascontiguousarray(params[n], dtype="<f4").tobytes())


def load_weights(path) -> tuple[dict, cnn.NetworkConfig, LabelNormalizer, dict]:
    data = Path(path).read_bytes()
    if data[:8] != WEIGHTS_MAGIC:
        raise ValueError(f"{path}: not a weight file")
    hlen = struct.unpack("<I", data[8:12])[0]
    header = json.loads(data[12:12 + hlen].decode("utf-8"))
    net = header["network"]
    cfg = cnn.NetworkConfig(input_side=net["input_side"],
                            conv_channels=tuple(net["conv_channels"]),
                            fc_sizes=tuple(net["fc_sizes"]),
                            output_dim=net["output_dim"],
                            dropout_rate=net["dropout_rate"])
    norm = LabelNormalizer(offset=tuple(header["normalizer"]["offset"]),
                           scale=tuple(header["normalizer"]["scale"]))
    params = {}
    pos = 12 + hlen
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos)
        params[entry["name"]] = arr.reshape(shape).astype(np.float32)
        pos += count * 4
    return params, cfg, norm, header


@dataclass
class Estimator:
    """Trained network packaged for single-image prediction."""

    params: dict
    net_cfg: cnn.NetworkConfig
    normalizer: LabelNormalizer

    @classmethod
    def from_file(cls, path) -> "Estimator":
        params, cfg, norm, _ = load_weights(path)
        return cls(params, cfg, norm)

    def predict_vec(self, image: np.ndarray) -> np.ndarray:
        """Normalized 4-vector prediction from a full-resolution uint8 image."""
        small = crop_resize(image, self.net_cfg.input_side)
        x = (small.astype(np.float32) / 255.0)[None, :, :, None]
        return cnn.forward(self.params, self.net_cfg, x)[0]

    def predict(self, image: np.ndarray) -> Pose2:
        """Relative dock pose estimate from one camera image."""
        return decode_label(self.predict_vec(image), self.normalizer)
