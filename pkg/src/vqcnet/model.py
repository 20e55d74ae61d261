"""Hybrid quantum-classical classifier for multichannel signal windows.

Two modes:

* ``plain``: flatten the (C, T) sample, batch-normalize, amplitude-embed the
  C*T features into one n-qubit register, evolve with the variational
  circuit, read n Pauli-Z expectations, and map them to class logits with a
  single zero-initialized dense layer.
* ``hybrid``: batch-normalize the full sample, slice time into
  non-overlapping windows of w samples, push every window (all C channels)
  through the same circuit (shared angles), stack the per-window readouts
  into an (n, T//w) feature map, and classify it with a small convolutional
  stack.

Setting ``ablate_quantum`` swaps the embed/evolve/measure block for an
identity-initialized dense projection of the same output width, which is the
classical control arm used by the benchmark runner.

Gradients flow end to end: the classical stack backpropagates layer by
layer, the circuit parameters get adjoint-sweep gradients, and the
input-amplitude gradient is pulled back through the embedding normalization
into the input batch-norm parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import classical as cl
from .ansatz import AnsatzConfig, apply_ansatz, init_params, param_count
from .errors import ConfigError, SizeError, TraceError
from .measurement import adjoint_grad_batch, expect_z_all

log = logging.getLogger(__name__)

MODES = ("plain", "hybrid")


@dataclass
class ModelConfig:
    mode: str
    n_qubits: int
    layers: int
    channels: int
    time_steps: int
    num_classes: int
    window: Optional[int] = None
    classical: Optional[List[cl.LayerSpec]] = None
    seed: int = 0
    initial_fixed_rotation: bool = True
    ablate_quantum: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if min(self.channels, self.time_steps, self.num_classes) < 1:
            raise ConfigError("channels, time_steps and num_classes must be >= 1")
        dim = 1 << self.n_qubits
        if self.mode == "plain":
            if self.channels * self.time_steps > dim:
                raise ConfigError(
                    f"plain mode needs C*T <= 2^n: "
                    f"{self.channels}*{self.time_steps} > {dim}"
                )
        else:
            if self.window is None or self.window < 1:
                raise ConfigError("hybrid mode requires a positive window")
            if self.window > self.time_steps:
                raise ConfigError("window exceeds the sample length")
            if self.channels * self.window > dim:
                raise ConfigError(
                    f"hybrid mode needs C*w <= 2^n: "
                    f"{self.channels}*{self.window} > {dim}"
                )

    @property
    def n_windows(self) -> int:
        if self.mode == "plain":
            return 1
        return self.time_steps // self.window

    @property
    def window_features(self) -> int:
        if self.mode == "plain":
            return self.channels * self.time_steps
        return self.channels * self.window

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "n_qubits": self.n_qubits,
            "layers": self.layers,
            "channels": self.channels,
            "time_steps": self.time_steps,
            "num_classes": self.num_classes,
            "window": self.window,
            "seed": self.seed,
            "initial_fixed_rotation": self.initial_fixed_rotation,
            "ablate_quantum": self.ablate_quantum,
            "classical": None
            if self.classical is None
            else [cl.spec_to_dict(s) for s in self.classical],
        }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        data = dict(data)
        if data.get("classical") is not None:
            data["classical"] = [cl.spec_from_dict(d) for d in data["classical"]]
        return cls(**data)


def default_hybrid_stack(
    n_qubits: int, n_windows: int, num_classes: int
) -> List[cl.LayerSpec]:
    """Compact convolutional head sized to the quantum feature map.

    Kernel and pool widths are clamped so the stack stays valid for very
    short window counts.
    """
    specs: List[cl.LayerSpec] = []
    length = n_windows
    k = min(8, length)
    pad = (k - 1) // 2
    specs.append(cl.Conv1DSpec(in_ch=n_qubits, out_ch=8, kernel=k, padding=pad))
    length = length + 2 * pad - k + 1
    specs.append(cl.BatchNormSpec(features=8))
    dk = min(4, length)
    specs.append(cl.DepthwiseSpec(channels=8, kernel=dk))
    length = length - dk + 1
    specs.append(cl.ELUSpec())
    pw = min(4, length)
    specs.append(cl.AvgPoolSpec(width=pw))
    length //= pw
    specs.append(cl.FlattenSpec())
    specs.append(cl.DenseSpec(8 * length, num_classes, zero_init=True))
    return specs


def plain_stack(n_qubits: int, num_classes: int) -> List[cl.LayerSpec]:
    return [cl.DenseSpec(n_qubits, num_classes, zero_init=True)]


@dataclass
class Trace:
    """Intermediates retained by forward for the matching backward call."""

    version: int
    training: bool
    batch: int
    logits: np.ndarray
    rows: Optional[np.ndarray] = None
    norms: Optional[np.ndarray] = None
    fallback: Optional[np.ndarray] = None
    input_states: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)


class Model:
    """A built classifier instance: configuration, parameters, and kernels."""

    def __init__(self, config: ModelConfig) -> None:
        self.config = config
        rng = np.random.default_rng(config.seed)

        self.ansatz_config = AnsatzConfig(
            config.n_qubits, config.layers, config.initial_fixed_rotation
        )
        if config.ablate_quantum:
            self.theta = None
            self.passthrough = self._identity_dense(
                config.window_features, config.n_qubits, rng
            )
        else:
            self.theta = init_params(self.ansatz_config, rng)
            self.passthrough = None

        # input batch-norm always runs on the flattened C*T sample, before
        # any windowing
        self.input_bn = cl.BatchNorm(
            cl.BatchNormSpec(config.channels * config.time_steps)
        )

        if config.classical is not None:
            specs = config.classical
        elif config.mode == "plain":
            specs = plain_stack(config.n_qubits, config.num_classes)
        else:
            specs = default_hybrid_stack(
                config.n_qubits, config.n_windows, config.num_classes
            )
        self.stack_specs = specs
        self.stack = [cl.build_layer(s, rng) for s in specs]

        self._version = 0
        self._warned_fallback = False
        self._warned_tail = False
        if config.mode == "hybrid" and config.time_steps % config.window:
            log.warning(
                "window %d does not divide T=%d: dropping the final %d samples",
                config.window,
                config.time_steps,
                config.time_steps % config.window,
            )

    @staticmethod
    def _identity_dense(
        in_features: int, out_features: int, rng: np.random.Generator
    ) -> cl.Dense:
        layer = cl.Dense(cl.DenseSpec(in_features, out_features, zero_init=True), rng)
        k = min(in_features, out_features)
        layer.params["w"][:k, :k] = np.eye(k)
        return layer

    # -- parameter bookkeeping ---------------------------------------------

    @property
    def quantum_param_count(self) -> int:
        if self.config.ablate_quantum:
            return 0
        return param_count(self.config.n_qubits, self.config.layers)

    def named_parameters(self) -> Dict[str, np.ndarray]:
        out: Dict[str, np.ndarray] = {}
        if self.theta is not None:
            out["quantum.theta"] = self.theta
        for name, arr in self.input_bn.params.items():
            out[f"bn_in.{name}"] = arr
        if self.passthrough is not None:
            for name, arr in self.passthrough.params.items():
                out[f"passthrough.{name}"] = arr
        for i, layer in enumerate(self.stack):
            for name, arr in layer.params.items():
                out[f"stack{i}.{name}"] = arr
        return out

    def named_buffers(self) -> Dict[str, np.ndarray]:
        out = {f"bn_in.{k}": v for k, v in self.input_bn.buffers.items()}
        for i, layer in enumerate(self.stack):
            for name, arr in layer.buffers.items():
                out[f"stack{i}.{name}"] = arr
        return out

    def total_param_count(self) -> int:
        return sum(a.size for a in self.named_parameters().values())

    # -- forward -------------------------------------------------------------

    def _embed_rows(
        self, rows: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Normalize rows into statevectors; zero rows become the uniform state."""
        n = self.config.n_qubits
        dim = 1 << n
        norms = np.linalg.norm(rows, axis=1)
        fallback = norms <= 1e-12
        if fallback.any() and not self._warned_fallback:
            log.warning(
                "%d zero-norm window(s) replaced by the uniform state",
                int(fallback.sum()),
            )
            self._warned_fallback = True
        states = np.zeros((rows.shape[0], dim), dtype=complex)
        safe = ~fallback
        states[safe, : rows.shape[1]] = rows[safe] / norms[safe, None]
        states[fallback] = 2.0 ** (-n / 2.0)
        return states, norms, fallback

    def _quantum_features(self, rows: np.ndarray):
        states, norms, fallback = self._embed_rows(rows)
        evolved = apply_ansatz(states, self.ansatz_config, self.theta)
        return expect_z_all(evolved), states, norms, fallback

    def forward_batch(
        self, x: np.ndarray, training: bool = False
    ) -> Tuple[np.ndarray, Trace]:
        cfg = self.config
        x = np.asarray(x, dtype=float)
        if x.ndim != 3 or x.shape[1:] != (cfg.channels, cfg.time_steps):
            raise SizeError(
                f"expected (B, {cfg.channels}, {cfg.time_steps}), got {x.shape}"
            )
        if not np.isfinite(x).all():
            raise SizeError("input contains NaN/Inf")
        batch = x.shape[0]
        self._version += 1

        flat = x.reshape(batch, -1)
        bn_out = self.input_bn.forward(flat, training)

        if cfg.mode == "plain":
            rows = bn_out
        else:
            used = cfg.n_windows * cfg.window
            wcube = bn_out.reshape(batch, cfg.channels, cfg.time_steps)[:, :, :used]
            # (B, C, W, w) -> (B, W, C, w) -> (B*W, C*w)
            wcube = wcube.reshape(batch, cfg.channels, cfg.n_windows, cfg.window)
            rows = np.ascontiguousarray(wcube.transpose(0, 2, 1, 3)).reshape(
                batch * cfg.n_windows, -1
            )

        trace = Trace(
            version=self._version, training=training, batch=batch, logits=None
        )
        if cfg.ablate_quantum:
            feats = self.passthrough.forward(rows, training)
            trace.rows = rows
        else:
            feats, states, norms, fallback = self._quantum_features(rows)
            trace.rows = rows
            trace.norms = norms
            trace.fallback = fallback
            trace.input_states = states

        if cfg.mode == "plain":
            h = feats
        else:
            # (B*W, n) -> (B, n, W)
            h = np.ascontiguousarray(
                feats.reshape(batch, cfg.n_windows, cfg.n_qubits).transpose(0, 2, 1)
            )
        for layer in self.stack:
            h = layer.forward(h, training)
        trace.logits = h
        return h, trace

    def forward_one(self, signal: np.ndarray, training: bool = False) -> np.ndarray:
        logits, _ = self.forward_batch(signal[None, ...], training)
        return logits[0]

    # -- backward ------------------------------------------------------------

    def backward(self, trace: Trace, labels: np.ndarray):
        """Loss and gradients for every trainable parameter.

        Returns (mean loss, {parameter name: gradient array}).
        """
        loss, d_logits = cl.softmax_cross_entropy(trace.logits, labels)
        grads = self.backward_from_dlogits(trace, d_logits)
        return loss, grads

    def backward_from_dlogits(
        self, trace: Trace, d_logits: np.ndarray
    ) -> Dict[str, np.ndarray]:
        cfg = self.config
        if trace.version != self._version:
            raise TraceError("trace is stale: run forward_batch again")

        grad = d_logits
        for layer in reversed(self.stack):
            grad = layer.backward(grad)

        if cfg.mode == "hybrid":
            # (B, n, W) -> (B*W, n)
            grad = np.ascontiguousarray(grad.transpose(0, 2, 1)).reshape(
                -1, cfg.n_qubits
            )

        out: Dict[str, np.ndarray] = {}
        if cfg.ablate_quantum:
            d_rows = self.passthrough.backward(grad)
            for name, g in self.passthrough.grads.items():
                out[f"passthrough.{name}"] = g
        else:
            qg = adjoint_grad_batch(
                self.ansatz_config, self.theta, trace.input_states, grad
            )
            out["quantum.theta"] = qg.d_theta.sum(axis=0)
            d_rows = self._embed_backward_rows(trace, qg.d_input)

        d_flat = self._rows_to_flat(d_rows, trace.batch)
        self.input_bn.backward(d_flat)
        for name, g in self.input_bn.grads.items():
            out[f"bn_in.{name}"] = g
        for i, layer in enumerate(self.stack):
            for name, g in layer.grads.items():
                out[f"stack{i}.{name}"] = g
        return out

    def _embed_backward_rows(self, trace: Trace, d_amp: np.ndarray) -> np.ndarray:
        """Amplitude gradients -> feature-row gradients through x/||x||.

        Fallback (uniform-state) rows are constants, so their gradient is 0.
        """
        rows, norms, fallback = trace.rows, trace.norms, trace.fallback
        d = rows.shape[1]
        g = d_amp[:, :d].copy()
        safe = ~fallback
        unit = np.zeros_like(rows)
        unit[safe] = rows[safe] / norms[safe, None]
        radial = np.sum(unit * g, axis=1, keepdims=True)
        d_rows = np.zeros_like(rows)
        d_rows[safe] = (g[safe] - unit[safe] * radial[safe]) / norms[safe, None]
        return d_rows

    def _rows_to_flat(self, d_rows: np.ndarray, batch: int) -> np.ndarray:
        cfg = self.config
        if cfg.mode == "plain":
            return d_rows
        used = cfg.n_windows * cfg.window
        cube = d_rows.reshape(batch, cfg.n_windows, cfg.channels, cfg.window)
        d_sig = np.zeros((batch, cfg.channels, cfg.time_steps))
        d_sig[:, :, :used] = cube.transpose(0, 2, 1, 3).reshape(
            batch, cfg.channels, used
        )
        return d_sig.reshape(batch, -1)

    # -- training -------------------------------------------------------------

    def make_adam_states(self, lr: float = 0.1) -> Dict[str, cl.AdamState]:
        return {
            name: cl.adam_init(arr.shape, lr=lr)
            for name, arr in self.named_parameters().items()
        }

    def train_step(
        self,
        x: np.ndarray,
        labels: np.ndarray,
        adam_states: Dict[str, cl.AdamState],
    ) -> float:
        """One Adam update from the mean batch gradient; returns pre-step loss."""
        if len(x) == 0:
            raise SizeError("empty batch")
        logits, trace = self.forward_batch(x, training=True)
        loss, grads = self.backward(trace, labels)
        for name, param in self.named_parameters().items():
            updated, _ = cl.adam_step(param, grads[name], adam_states[name])
            param[...] = updated
        self._version += 1
        return loss

    def predict(self, x: np.ndarray) -> np.ndarray:
        logits, _ = self.forward_batch(x, training=False)
        return np.argmax(logits, axis=1)
