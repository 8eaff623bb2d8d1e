"""From-scratch convolutional regression network.

VGG-style stack: repeated (3x3 conv, pad 1) -> ReLU -> (2x2 max-pool)
blocks, then fully connected layers with ReLU and inverted dropout, ending
in a linear 4-channel regression head. Forward and backward passes are
written directly on numpy; the only external math is the matrix multiply.

Convolutions run as im2col: every 3x3 window is flattened to a row of a
(N*H*W, 9*C) matrix so the convolution becomes one GEMM. Arrays are kept
channels-last (N, H, W, C) throughout. The parameter dtype is configurable;
float32 for training speed, float64 for finite-difference checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .util import make_rng


@dataclass(frozen=True)
class NetworkConfig:
    input_side: int = 64
    conv_channels: tuple = (8, 16, 32, 64)
    fc_sizes: tuple = (256, 64)
    output_dim: int = 4
    dropout_rate: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "conv_channels", tuple(int(c) for c in self.conv_channels))
        object.__setattr__(self, "fc_sizes", tuple(int(c) for c in self.fc_sizes))
        if self.input_side % (1 << len(self.conv_channels)) != 0:
            raise ValueError("input_side must be divisible by 2^len(conv_channels)")
        if self.feature_side < 1:
            raise ValueError("conv stack pools the image away")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.output_dim != 4:
            raise ValueError("output_dim is fixed at 4 (x, y, sin, cos)")

    @property
    def feature_side(self) -> int:
        return self.input_side >> len(self.conv_channels)

    @property
    def flat_features(self) -> int:
        return self.feature_side * self.feature_side * self.conv_channels[-1]

    def layer_dims(self) -> list[tuple[str, int, int]]:
        """(name, fan_in, fan_out) for every parameterized layer, in order."""
        dims = []
        c_in = 1
        for i, c_out in enumerate(self.conv_channels):
            dims.append((f"conv{i}", 9 * c_in, c_out))
            c_in = c_out
        f_in = self.flat_features
        for i, f_out in enumerate(tuple(self.fc_sizes) + (self.output_dim,)):
            dims.append((f"fc{i}", f_in, f_out))
            f_in = f_out
        return dims


def init_params(cfg: NetworkConfig, seed: int, dtype=np.float32) -> dict[str, np.ndarray]:
    """Kaiming fan-in normal weights, zero biases, seeded."""
    rng = make_rng(seed, "init")
    params = {}
    c_in = 1
    for i, c_out in enumerate(cfg.conv_channels):
        std = np.sqrt(2.0 / (9 * c_in))
        params[f"conv{i}_w"] = (rng.standard_normal((3, 3, c_in, c_out)) * std).astype(dtype)
        params[f"conv{i}_b"] = np.zeros(c_out, dtype=dtype)
        c_in = c_out
    f_in = cfg.flat_features
    for i, f_out in enumerate(tuple(cfg.fc_sizes) + (cfg.output_dim,)):
        std = np.sqrt(2.0 / f_in)
        params[f"fc{i}_w"] = (rng.standard_normal((f_in, f_out)) * std).astype(dtype)
        params[f"fc{i}_b"] = np.zeros(f_out, dtype=dtype)
        f_in = f_out
    return params


def _im2col(x: np.ndarray) -> np.ndarray:
    """(N,H,W,C) -> (N*H*W, 9C) rows of zero-padded 3x3 windows."""
    n, h, w, c = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    s = xp.strides
    windows = np.lib.stride_tricks.as_strided(
        xp, shape=(n, h, w, 3, 3, c), strides=(s[0], s[1], s[2], s[1], s[2], s[3]))
    return windows.reshape(n * h * w, 9 * c)


def _col2im(dcols: np.ndarray, n: int, h: int, w: int, c: int) -> np.ndarray:
    """Adjoint of _im2col: scatter-add window gradients back to the image."""
    d = dcols.reshape(n, h, w, 3, 3, c)
    dxp = np.zeros((n, h + 2, w + 2, c), dtype=dcols.dtype)
    for ki in range(3):
        for kj in range(3):
            dxp[:, ki:ki + h, kj:kj + w, :] += d[:, :, :, ki, kj, :]
    return dxp[:, 1:h + 1, 1:w + 1, :]


def _maxpool(x: np.ndarray):
    """2x2/stride-2 max pool; ties route to the first maximum."""
    n, h, w, c = x.shape
    quads = (x.reshape(n, h // 2, 2, w // 2, 2, c)
             .transpose(0, 1, 3, 2, 4, 5)
             .reshape(n, h // 2, w // 2, 4, c))
    idx = quads.argmax(axis=3)
    out = np.take_along_axis(quads, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return out, idx


def _maxpool_backward(dout: np.ndarray, idx: np.ndarray) -> np.ndarray:
    n, h2, w2, c = dout.shape
    dquads = np.zeros((n, h2, w2, 4, c), dtype=dout.dtype)
    np.put_along_axis(dquads, idx[:, :, :, None, :], dout[:, :, :, None, :], axis=3)
    return (dquads.reshape(n, h2, w2, 2, 2, c)
            .transpose(0, 1, 3, 2, 4, 5)
            .reshape(n, h2 * 2, w2 * 2, c))


def forward(params: dict, cfg: NetworkConfig, x: np.ndarray,
            train: bool = False, dropout_rng=None, cache: dict | None = None) -> np.ndarray:
    """Run the network on a (N, side, side, 1) batch; returns (N, 4).

    In training mode a dropout_rng must be supplied when dropout_rate > 0;
    inference mode is deterministic. Pass a dict as cache to record the
    intermediates backward() needs.
    """
    dtype = params["conv0_w"].dtype
    if x.ndim != 4 or x.shape[1] != cfg.input_side or x.shape[2] != cfg.input_side:
        raise ValueError(f"expected (N, {cfg.input_side}, {cfg.input_side}, 1) input, got {x.shape}")
    a = np.ascontiguousarray(x, dtype=dtype)
    keep = 1.0 - cfg.dropout_rate
    record = cache is not None
    if record:
        cache.clear()
        cache["x_shape"] = x.shape
    for i in range(len(cfg.conv_channels)):
        cols = _im2col(a)
        wmat = params[f"conv{i}_w"].reshape(-1, params[f"conv{i}_w"].shape[-1])
        n, h, w, _ = a.shape
        z = (cols @ wmat + params[f"conv{i}_b"]).reshape(n, h, w, -1)
        relu_mask = z > 0
        a = z * relu_mask
        a, pool_idx = _maxpool(a)
        if record:
            cache[f"conv{i}_cols"] = cols
            cache[f"conv{i}_shape"] = (n, h, w)
            cache[f"conv{i}_relu"] = relu_mask
            cache[f"conv{i}_pool"] = pool_idx
    a = a.reshape(a.shape[0], -1)
    n_fc = len(cfg.fc_sizes) + 1
    for i in range(n_fc):
        if record:
            cache[f"fc{i}_in"] = a
        z = a @ params[f"fc{i}_w"] + params[f"fc{i}_b"]
        if i == n_fc - 1:
            a = z  # linear regression head
            break
        relu_mask = z > 0
        a = z * relu_mask
        if record:
            cache[f"fc{i}_relu"] = relu_mask
        if train and cfg.dropout_rate > 0.0:
            if dropout_rng is None:
                raise ValueError("training-mode forward with dropout needs a dropout_rng")
            mask = (dropout_rng.random(a.shape) < keep).astype(dtype) / dtype.type(keep)
            a = a * mask
            if record:
                cache[f"fc{i}_drop"] = mask
    return a


def backward(params: dict, cfg: NetworkConfig, cache: dict, dpred: np.ndarray) -> dict:
    """Gradients of every parameter given d(loss)/d(prediction).

    Requires the cache written by a forward(..., cache=...) call on the
    same batch.
    """
    grads = {}
    n_fc = len(cfg.fc_sizes) + 1
    da = np.ascontiguousarray(dpred, dtype=params["conv0_w"].dtype)
    for i in reversed(range(n_fc)):
        if i < n_fc - 1:
            if f"fc{i}_drop" in cache:
                da = da * cache[f"fc{i}_drop"]
            da = da * cache[f"fc{i}_relu"]
        a_in = cache[f"fc{i}_in"]
        grads[f"fc{i}_w"] = a_in.T @ da
        grads[f"fc{i}_b"] = da.sum(axis=0)
        da = da @ params[f"fc{i}_w"].T
    n_conv = len(cfg.conv_channels)
    last = cfg.conv_channels[-1]
    da = da.reshape(-1, cfg.feature_side, cfg.feature_side, last)
    for i in reversed(range(n_conv)):
        da = _maxpool_backward(da, cache[f"conv{i}_pool"])
        da = da * cache[f"conv{i}_relu"]
        n, h, w = cache[f"conv{i}_shape"]
        dz = da.reshape(n * h * w, -1)
        cols = cache[f"conv{i}_cols"]
        wshape = params[f"conv{i}_w"].shape
        grads[f"conv{i}_w"] = (cols.T @ dz).reshape(wshape)
        grads[f"conv{i}_b"] = dz.sum(axis=0)
        if i > 0:
            dcols = dz @ params[f"conv{i}_w"].reshape(-1, wshape[-1]).T
            da = _col2im(dcols, n, h, w, wshape[2])
    return grads


def mse_loss(pred: np.ndarray, labels: np.ndarray) -> float:
    """Mean over batch and channels of squared differences."""
    if pred.shape != labels.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {labels.shape}")
    diff = pred - labels
    return float(np.mean(diff * diff))


def mse_grad(pred: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """d(mse_loss)/d(pred)."""
    return 2.0 * (pred - labels) / pred.size


def loss_and_grads(params: dict, cfg: NetworkConfig, x: np.ndarray, labels: np.ndarray,
                   dropout_rng=None, train: bool = True) -> tuple[float, dict]:
    """Forward + backward in one call: (loss, parameter gradients)."""
    cache: dict = {}
    pred = forward(params, cfg, x, train=train, dropout_rng=dropout_rng, cache=cache)
    loss = mse_loss(pred, np.asarray(labels, dtype=pred.dtype))
    grads = backward(params, cfg, cache, mse_grad(pred, np.asarray(labels, dtype=pred.dtype)))
    return loss, grads


def zero_velocity(params: dict) -> dict:
    return {k: np.zeros_like(v) for k, v in params.items()}


def sgd_step(params: dict, velocity: dict, grads: dict,
             learning_rate: float, momentum: float) -> None:
    """In-place SGD with momentum: v <- mu*v + g; w <- w - lr*v."""
    for name, w in params.items():
        v = velocity[name]
        v *= momentum
        v += grads[name]
        w -= learning_rate * v


def copy_params(params: dict) -> dict:
    return {k: v.copy() for k, v in params.items()}


def param_count(params: dict) -> int:
    return sum(v.size for v in params.values())
