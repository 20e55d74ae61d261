"""Pauli-Z readout and two independent gradient engines.

``expect_z_all`` measures <Z_q> on every qubit.  Gradients of the weighted
readout E = sum_q upstream[q] * <Z_q> come from either:

* the parameter-shift rule, dE/dtheta_j = (E(theta_j + pi/2) -
  E(theta_j - pi/2)) / 2, exact for rotation gates but costing two full
  circuit runs per parameter; or
* an adjoint reverse sweep that walks the circuit once backwards with a
  bra/ket pair, giving all parameter gradients plus the gradient with
  respect to the input amplitudes in O(|gates| * 2^n).

The adjoint engine is the training default; the shift rule is kept as an
independent cross-check (CLI ``gradcheck``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .ansatz import AnsatzConfig, apply_ansatz, build_circuit, param_count
from .errors import SizeError
from .qstate import (
    GateOp,
    apply_gate_adjoint,
    apply_program,
    apply_single,
    n_qubits_of,
    ry_deriv,
)

SHIFT = np.pi / 2


@dataclass
class QuantumGradients:
    """Gradients of a weighted Z readout: by rotation angle and by input amplitude."""

    d_theta: np.ndarray
    d_input: np.ndarray


@lru_cache(maxsize=32)
def z_sign_table(n_qubits: int) -> np.ndarray:
    """(n, 2^n) table of Z eigenvalues: +1 where bit q of the index is 0."""
    idx = np.arange(1 << n_qubits)
    bits = (idx[None, :] >> np.arange(n_qubits)[:, None]) & 1
    return 1.0 - 2.0 * bits


def expect_z_all(state: np.ndarray) -> np.ndarray:
    """Per-qubit <Z>: values[q] = sum_i (+-1) |amp_i|^2, batched over leading axes."""
    n = n_qubits_of(state)
    probs = state.real**2 + state.imag**2
    return probs @ z_sign_table(n).T


def _weighted_readout(state: np.ndarray, upstream: np.ndarray) -> float:
    return float(expect_z_all(state) @ upstream)


def parameter_shift_grad(
    cfg: AnsatzConfig,
    params: Sequence[float],
    input_state: np.ndarray,
    upstream: Sequence[float],
) -> np.ndarray:
    """Shift-rule gradient of sum_q upstream[q]*<Z_q> w.r.t. every angle.

    Runs 2*len(params) full circuit evaluations.
    """
    params = np.asarray(params, dtype=float)
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != (cfg.n_qubits,):
        raise SizeError(f"upstream must have length {cfg.n_qubits}")
    grad = np.zeros(len(params))
    for j in range(len(params)):
        shifted = params.copy()
        shifted[j] += SHIFT
        plus = _weighted_readout(apply_ansatz(input_state, cfg, shifted), upstream)
        shifted[j] -= 2 * SHIFT
        minus = _weighted_readout(apply_ansatz(input_state, cfg, shifted), upstream)
        grad[j] = (plus - minus) / 2.0
    return grad


def adjoint_grad_program(
    ops: Sequence[GateOp],
    params: Sequence[float],
    input_state: np.ndarray,
    upstream: np.ndarray,
    n_slots: int,
) -> QuantumGradients:
    """Adjoint sweep over an arbitrary gate program.

    Works on a single state or a batch (leading axes of ``input_state`` and
    ``upstream`` must agree).  Forward once, then walk the ops in reverse,
    peeling each unitary off both the bra and the ket; a trainable op
    contributes 2*Re(<bra| dU |ket>) at its slot.  The fully rewound bra is
    A^H M A |psi0>, whose doubled real part is the input-amplitude gradient.
    """
    params = np.asarray(params, dtype=float)
    upstream = np.asarray(upstream, dtype=float)
    n = n_qubits_of(input_state)
    if upstream.shape[-1] != n:
        raise SizeError(f"upstream must have last dimension {n}")

    ket = apply_program(np.asarray(input_state, dtype=complex), ops, params)
    obs_diag = upstream @ z_sign_table(n)
    bra = obs_diag * ket

    batch_shape = input_state.shape[:-1]
    d_theta = np.zeros(batch_shape + (n_slots,))
    for op in reversed(ops):
        ket = apply_gate_adjoint(ket, op, params)
        if op.trainable:
            tilted = apply_single(ket, ry_deriv(params[op.param_slot]), op.target)
            overlap = np.sum(np.conj(bra) * tilted, axis=-1)
            d_theta[..., op.param_slot] += 2.0 * overlap.real
        bra = apply_gate_adjoint(bra, op, params)
    return QuantumGradients(d_theta=d_theta, d_input=2.0 * bra.real)


def adjoint_grad(
    cfg: AnsatzConfig,
    params: Sequence[float],
    input_state: np.ndarray,
    upstream: Sequence[float],
) -> QuantumGradients:
    """Adjoint gradient for the staggered-CZ ansatz on one input state."""
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != (cfg.n_qubits,):
        raise SizeError(f"upstream must have length {cfg.n_qubits}")
    if n_qubits_of(input_state) != cfg.n_qubits:
        raise SizeError("input state does not match the ansatz width")
    return adjoint_grad_program(
        build_circuit(cfg),
        params,
        input_state,
        upstream,
        param_count(cfg.n_qubits, cfg.layers),
    )


def adjoint_grad_batch(
    cfg: AnsatzConfig,
    params: Sequence[float],
    input_states: np.ndarray,
    upstream: np.ndarray,
) -> QuantumGradients:
    """Batched adjoint gradients: states (B, 2^n) and upstream (B, n) in lockstep."""
    if input_states.shape[:-1] != upstream.shape[:-1]:
        raise SizeError("batch shapes of states and upstream weights differ")
    return adjoint_grad_program(
        build_circuit(cfg),
        params,
        input_states,
        upstream,
        param_count(cfg.n_qubits, cfg.layers),
    )
