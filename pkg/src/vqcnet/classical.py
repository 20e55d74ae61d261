"""Minimal dense-tensor neural-network kernel.

Layers keep their parameters as plain float64 numpy arrays and implement
hand-written backward passes (no autodiff graph).  Forward caches whatever
the backward pass needs; calling backward without a preceding forward is an
error.  Shapes follow the (batch, channels, length) convention for 1-D
signal tensors and (batch, features) for dense layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import LabelError, SizeError

BN_EPS = 1e-5
BN_MOMENTUM = 0.1


def glorot_uniform(
    rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


# ---------------------------------------------------------------------------
# layer specs (JSON-able descriptions, separate from live layers)


@dataclass(frozen=True)
class BatchNormSpec:
    features: int
    kind: str = field(default="batchnorm", init=False)


@dataclass(frozen=True)
class Conv1DSpec:
    in_ch: int
    out_ch: int
    kernel: int
    stride: int = 1
    padding: int = 0
    kind: str = field(default="conv1d", init=False)


@dataclass(frozen=True)
class DepthwiseSpec:
    channels: int
    kernel: int
    kind: str = field(default="depthwise", init=False)


@dataclass(frozen=True)
class AvgPoolSpec:
    width: int
    kind: str = field(default="avgpool", init=False)


@dataclass(frozen=True)
class DenseSpec:
    in_features: int
    out_features: int
    zero_init: bool = False
    kind: str = field(default="dense", init=False)


@dataclass(frozen=True)
class ELUSpec:
    kind: str = field(default="elu", init=False)


@dataclass(frozen=True)
class FlattenSpec:
    kind: str = field(default="flatten", init=False)


LayerSpec = Union[
    BatchNormSpec,
    Conv1DSpec,
    DepthwiseSpec,
    AvgPoolSpec,
    DenseSpec,
    ELUSpec,
    FlattenSpec,
]

_SPEC_KINDS = {
    "batchnorm": BatchNormSpec,
    "conv1d": Conv1DSpec,
    "depthwise": DepthwiseSpec,
    "avgpool": AvgPoolSpec,
    "dense": DenseSpec,
    "elu": ELUSpec,
    "flatten": FlattenSpec,
}


def spec_to_dict(spec: LayerSpec) -> dict:
    out = {"kind": spec.kind}
    for name in spec.__dataclass_fields__:
        if name != "kind":
            out[name] = getattr(spec, name)
    return out


def spec_from_dict(data: dict) -> LayerSpec:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in _SPEC_KINDS:
        raise SizeError(f"unknown layer kind {kind!r}")
    return _SPEC_KINDS[kind](**data)


# ---------------------------------------------------------------------------
# live layers


class Layer:
    """Base: forward caches, backward consumes the cache and fills .grads."""

    spec: LayerSpec

    def __init__(self) -> None:
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.buffers: Dict[str, np.ndarray] = {}
        self._cache = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _take_cache(self):
        if self._cache is None:
            raise RuntimeError("backward called without a cached forward")
        cache, self._cache = self._cache, None
        return cache


def _sliding_windows(x: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    # (B, C, L) -> view (B, C, out_len, kernel) without copying
    batch, channels, length = x.shape
    out_len = (length - kernel) // stride + 1
    s0, s1, s2 = x.strides
    return np.lib.stride_tricks.as_strided(
        x,
        shape=(batch, channels, out_len, kernel),
        strides=(s0, s1, s2 * stride, s2),
        writeable=False,
    )


class BatchNorm(Layer):
    """Batch normalization over features; accepts (B, F) or (B, F, L)."""

    def __init__(self, spec: BatchNormSpec) -> None:
        super().__init__()
        self.spec = spec
        f = spec.features
        self.params = {"gamma": np.ones(f), "beta": np.zeros(f)}
        self.buffers = {"run_mean": np.zeros(f), "run_var": np.ones(f)}

    def _axes_and_shape(self, x: np.ndarray):
        if x.ndim == 2:
            return (0,), (1, self.spec.features)
        if x.ndim == 3:
            return (0, 2), (1, self.spec.features, 1)
        raise SizeError(f"batchnorm expects 2-D or 3-D input, got {x.ndim}-D")

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        if x.shape[0] == 0:
            raise SizeError("zero-size batch")
        if x.shape[1] != self.spec.features:
            raise SizeError(
                f"expected {self.spec.features} features, got {x.shape[1]}"
            )
        axes, bshape = self._axes_and_shape(x)
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            self.buffers["run_mean"] *= 1.0 - BN_MOMENTUM
            self.buffers["run_mean"] += BN_MOMENTUM * mean
            self.buffers["run_var"] *= 1.0 - BN_MOMENTUM
            self.buffers["run_var"] += BN_MOMENTUM * var
        else:
            mean = self.buffers["run_mean"]
            var = self.buffers["run_var"]
        inv = 1.0 / np.sqrt(var + BN_EPS)
        xhat = (x - mean.reshape(bshape)) * inv.reshape(bshape)
        self._cache = (xhat, inv, axes, bshape, training)
        return self.params["gamma"].reshape(bshape) * xhat + self.params[
            "beta"
        ].reshape(bshape)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        xhat, inv, axes, bshape, training = self._take_cache()
        self.grads["gamma"] = (grad * xhat).sum(axis=axes)
        self.grads["beta"] = grad.sum(axis=axes)
        dxhat = grad * self.params["gamma"].reshape(bshape)
        if not training:
            return dxhat * inv.reshape(bshape)
        # gradient through the batch statistics (biased variance):
        # dx = inv/m * (m*dxhat - sum(dxhat) - xhat * sum(dxhat*xhat))
        m = grad.size // self.spec.features
        sum_dxhat = dxhat.sum(axis=axes).reshape(bshape)
        sum_dxhat_xhat = (dxhat * xhat).sum(axis=axes).reshape(bshape)
        return (inv.reshape(bshape) / m) * (
            m * dxhat - sum_dxhat - xhat * sum_dxhat_xhat
        )


class Conv1D(Layer):
    """Cross-correlation with zero padding: (B, in_ch, L) -> (B, out_ch, L')."""

    def __init__(self, spec: Conv1DSpec, rng: np.random.Generator) -> None:
        super().__init__()
        self.spec = spec
        fan_in = spec.in_ch * spec.kernel
        fan_out = spec.out_ch * spec.kernel
        self.params = {
            "w": glorot_uniform(
                rng, (spec.out_ch, spec.in_ch, spec.kernel), fan_in, fan_out
            ),
            "b": np.zeros(spec.out_ch),
        }

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        s = self.spec
        if x.ndim != 3 or x.shape[1] != s.in_ch:
            raise SizeError(f"conv1d expects (B, {s.in_ch}, L), got {x.shape}")
        if s.padding:
            x = np.pad(x, ((0, 0), (0, 0), (s.padding, s.padding)))
        if x.shape[2] < s.kernel:
            raise SizeError(
                f"kernel {s.kernel} exceeds padded length {x.shape[2]}"
            )
        windows = _sliding_windows(x, s.kernel, s.stride)
        self._cache = (windows, x.shape[2])
        out = np.einsum("bctk,ock->bot", windows, self.params["w"])
        return out + self.params["b"][None, :, None]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        s = self.spec
        windows, padded_len = self._take_cache()
        self.grads["w"] = np.einsum("bot,bctk->ock", grad, windows)
        self.grads["b"] = grad.sum(axis=(0, 2))
        out_len = grad.shape[2]
        dxp = np.zeros((grad.shape[0], s.in_ch, padded_len))
        w = self.params["w"]
        for k in range(s.kernel):
            dxp[:, :, k : k + s.stride * out_len : s.stride] += np.einsum(
                "bot,oc->bct", grad, w[:, :, k]
            )
        if s.padding:
            return dxp[:, :, s.padding : padded_len - s.padding]
        return dxp


class DepthwiseConv1D(Layer):
    """Per-channel convolution along time, valid padding, stride 1."""

    def __init__(self, spec: DepthwiseSpec, rng: np.random.Generator) -> None:
        super().__init__()
        self.spec = spec
        self.params = {
            "w": glorot_uniform(
                rng, (spec.channels, spec.kernel), spec.kernel, spec.kernel
            ),
            "b": np.zeros(spec.channels),
        }

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        s = self.spec
        if x.ndim != 3 or x.shape[1] != s.channels:
            raise SizeError(f"depthwise expects (B, {s.channels}, L), got {x.shape}")
        if x.shape[2] < s.kernel:
            raise SizeError(f"kernel {s.kernel} exceeds input length {x.shape[2]}")
        windows = _sliding_windows(x, s.kernel, 1)
        self._cache = (windows, x.shape[2])
        out = np.einsum("bctk,ck->bct", windows, self.params["w"])
        return out + self.params["b"][None, :, None]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        s = self.spec
        windows, length = self._take_cache()
        self.grads["w"] = np.einsum("bct,bctk->ck", grad, windows)
        self.grads["b"] = grad.sum(axis=(0, 2))
        out_len = grad.shape[2]
        dx = np.zeros((grad.shape[0], s.channels, length))
        for k in range(s.kernel):
            dx[:, :, k : k + out_len] += grad * self.params["w"][None, :, k : k + 1]
        return dx


class AvgPool1D(Layer):
    """Non-overlapping mean pooling; a trailing partial window is dropped."""

    def __init__(self, spec: AvgPoolSpec) -> None:
        super().__init__()
        self.spec = spec

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        w = self.spec.width
        if x.ndim != 3:
            raise SizeError(f"avgpool expects 3-D input, got {x.ndim}-D")
        out_len = x.shape[2] // w
        if out_len < 1:
            raise SizeError(f"pool width {w} exceeds input length {x.shape[2]}")
        self._cache = x.shape
        trimmed = x[:, :, : out_len * w]
        return trimmed.reshape(x.shape[0], x.shape[1], out_len, w).mean(axis=3)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        shape = self._take_cache()
        w = self.spec.width
        dx = np.zeros(shape)
        spread = np.repeat(grad / w, w, axis=2)
        dx[:, :, : spread.shape[2]] = spread
        return dx


class Dense(Layer):
    def __init__(self, spec: DenseSpec, rng: np.random.Generator) -> None:
        super().__init__()
        self.spec = spec
        if spec.zero_init:
            w = np.zeros((spec.in_features, spec.out_features))
        else:
            w = glorot_uniform(
                rng,
                (spec.in_features, spec.out_features),
                spec.in_features,
                spec.out_features,
            )
        self.params = {"w": w, "b": np.zeros(spec.out_features)}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.spec.in_features:
            raise SizeError(
                f"dense expects (B, {self.spec.in_features}), got {x.shape}"
            )
        self._cache = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        x = self._take_cache()
        self.grads["w"] = x.T @ grad
        self.grads["b"] = grad.sum(axis=0)
        return grad @ self.params["w"].T


class ELU(Layer):
    def __init__(self, spec: Optional[ELUSpec] = None) -> None:
        super().__init__()
        self.spec = spec or ELUSpec()

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        out = np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))
        self._cache = (x > 0, out)
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        positive, out = self._take_cache()
        return grad * np.where(positive, 1.0, out + 1.0)


class Flatten(Layer):
    def __init__(self, spec: Optional[FlattenSpec] = None) -> None:
        super().__init__()
        self.spec = spec or FlattenSpec()

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad.reshape(self._take_cache())


def build_layer(spec: LayerSpec, rng: np.random.Generator) -> Layer:
    if isinstance(spec, BatchNormSpec):
        return BatchNorm(spec)
    if isinstance(spec, Conv1DSpec):
        return Conv1D(spec, rng)
    if isinstance(spec, DepthwiseSpec):
        return DepthwiseConv1D(spec, rng)
    if isinstance(spec, AvgPoolSpec):
        return AvgPool1D(spec)
    if isinstance(spec, DenseSpec):
        return Dense(spec, rng)
    if isinstance(spec, ELUSpec):
        return ELU(spec)
    if isinstance(spec, FlattenSpec):
        return Flatten(spec)
    raise SizeError(f"unknown layer spec {spec!r}")


# ---------------------------------------------------------------------------
# loss and optimizer


def softmax_cross_entropy(
    logits: np.ndarray, labels: Sequence[int]
) -> Tuple[float, np.ndarray]:
    """Mean negative log-softmax of the true class, plus d(loss)/d(logits)."""
    logits = np.asarray(logits, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if logits.ndim != 2:
        raise SizeError(f"logits must be (batch, K), got {logits.shape}")
    batch, num_classes = logits.shape
    if labels.shape != (batch,):
        raise SizeError(f"labels must have shape ({batch},), got {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelError(f"labels must lie in [0, {num_classes})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_z - shifted[np.arange(batch), labels]))
    probs = np.exp(shifted - log_z[:, None])
    probs[np.arange(batch), labels] -= 1.0
    return loss, probs / batch


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(shape, lr: float = 0.1) -> AdamState:
    return AdamState(m=np.zeros(shape), v=np.zeros(shape), lr=lr)


def adam_step(
    params: np.ndarray, grads: np.ndarray, state: AdamState
) -> Tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; returns the new parameter array."""
    params = np.asarray(params, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise SizeError(
            f"shape mismatch: params {params.shape}, grads {grads.shape}, "
            f"state {state.m.shape}"
        )
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads**2
    m_hat = state.m / (1.0 - state.beta1**state.t)
    v_hat = state.v / (1.0 - state.beta2**state.t)
    return params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps), state
