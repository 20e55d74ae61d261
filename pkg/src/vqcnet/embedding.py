"""Amplitude embedding of real feature vectors, with an exact backward pass.

A length-d feature vector x is loaded into the first d amplitudes of an
n-qubit state as x/||x||, the remaining 2^n - d amplitudes are zero.  The
backward pass propagates amplitude-space gradients through the normalization
so that trainable layers upstream of the embedding receive exact gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeError, ZeroVectorError


@dataclass(frozen=True)
class EmbedConfig:
    n_qubits: int
    norm_epsilon: float = 1e-12

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise SizeError(f"n_qubits must be >= 1, got {self.n_qubits}")


def amplitude_embed(x: np.ndarray, cfg: EmbedConfig) -> np.ndarray:
    """Embed x (length d <= 2^n) into a normalized statevector.

    Raises ZeroVectorError when ||x|| <= cfg.norm_epsilon; callers decide the
    fallback policy (the model substitutes the uniform state, see model.py).
    """
    x = np.asarray(x, dtype=float)
    dim = 1 << cfg.n_qubits
    if x.ndim != 1:
        raise SizeError(f"expected a 1-D feature vector, got shape {x.shape}")
    if x.size > dim:
        raise SizeError(f"{x.size} features exceed 2^{cfg.n_qubits} amplitudes")
    norm = float(np.linalg.norm(x))
    if norm <= cfg.norm_epsilon:
        raise ZeroVectorError(f"feature vector norm {norm:.3e} is effectively zero")
    state = np.zeros(dim, dtype=complex)
    state[: x.size] = x / norm
    return state


def embed_backward(
    x: np.ndarray, grad_amp: np.ndarray, cfg: EmbedConfig
) -> np.ndarray:
    """Pull an amplitude-space gradient back to feature space.

    For f(x) = x/||x|| (zero-padded), the Jacobian on the live coordinates is
    (I - u u^T)/||x|| with u = x/||x||, so J^T g = (g_d - u (u . g_d))/||x||.
    """
    x = np.asarray(x, dtype=float)
    grad_amp = np.asarray(grad_amp, dtype=float)
    dim = 1 << cfg.n_qubits
    if x.ndim != 1:
        raise SizeError(f"expected a 1-D feature vector, got shape {x.shape}")
    if x.size > dim:
        raise SizeError(f"{x.size} features exceed 2^{cfg.n_qubits} amplitudes")
    if grad_amp.shape != (dim,):
        raise SizeError(f"gradient must have length {dim}, got {grad_amp.shape}")
    norm = float(np.linalg.norm(x))
    if norm <= cfg.norm_epsilon:
        raise ZeroVectorError(f"feature vector norm {norm:.3e} is effectively zero")
    unit = x / norm
    g = grad_amp[: x.size]
    return (g - unit * float(unit @ g)) / norm
