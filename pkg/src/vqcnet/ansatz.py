"""Variational circuit template: trainable Y-rotations over staggered CZ pairs.

Each layer sweeps the qubit line twice: first the even-anchored
nearest-neighbour pairs (0,1), (2,3), ..., then the odd-anchored pairs
(1,2), (3,4), ....  A pair contributes one CZ entangler followed by a
trainable RY on each of its two qubits, so a layer on n qubits holds
2(n-1) trainable angles and the whole circuit 2(n-1)L.

Optionally a fixed, non-trainable RY(pi/4) on every qubit precedes layer 1;
it breaks the computational-basis symmetry at theta = 0 without changing
the trainable parameter count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import ConfigError, SizeError
from .qstate import GateKind, GateOp, apply_gate, n_qubits_of

FIXED_ROTATION_ANGLE = math.pi / 4


@dataclass(frozen=True)
class AnsatzConfig:
    n_qubits: int
    layers: int
    initial_fixed_rotation: bool = True

    def __post_init__(self) -> None:
        if self.n_qubits < 2:
            raise ConfigError(f"ansatz needs >= 2 qubits, got {self.n_qubits}")
        if self.layers < 1:
            raise ConfigError(f"ansatz needs >= 1 layer, got {self.layers}")


def param_count(n_qubits: int, layers: int) -> int:
    """Number of trainable rotation angles: 2(n-1)L."""
    if n_qubits < 2 or layers < 1:
        raise ConfigError(f"invalid shape n={n_qubits}, L={layers}")
    return 2 * (n_qubits - 1) * layers


def init_params(cfg: AnsatzConfig, rng: np.random.Generator) -> np.ndarray:
    """Full-angle uniform initialization on [-pi, pi)."""
    count = param_count(cfg.n_qubits, cfg.layers)
    return rng.uniform(-math.pi, math.pi, size=count)


def _check_params(cfg: AnsatzConfig, params: Sequence[float]) -> None:
    expected = param_count(cfg.n_qubits, cfg.layers)
    if len(params) != expected:
        raise ConfigError(f"expected {expected} parameters, got {len(params)}")


def _pairs(n_qubits: int, start: int):
    return ((q, q + 1) for q in range(start, n_qubits - 1, 2))


def build_circuit(
    cfg: AnsatzConfig, params: Optional[Sequence[float]] = None
) -> List[GateOp]:
    """Emit the gate program; parameter slots are assigned in emission order."""
    if params is not None:
        _check_params(cfg, params)
    ops: List[GateOp] = []
    if cfg.initial_fixed_rotation:
        for q in range(cfg.n_qubits):
            ops.append(GateOp(GateKind.RY, target=q, angle=FIXED_ROTATION_ANGLE))
    slot = 0
    for _ in range(cfg.layers):
        for start in (0, 1):
            for a, b in _pairs(cfg.n_qubits, start):
                ops.append(GateOp(GateKind.CZ, target=b, control=a))
                ops.append(GateOp(GateKind.RY, target=a, param_slot=slot))
                ops.append(GateOp(GateKind.RY, target=b, param_slot=slot + 1))
                slot += 2
    return ops


def apply_ansatz(
    state: np.ndarray, cfg: AnsatzConfig, params: Sequence[float]
) -> np.ndarray:
    """Run the circuit on a state (or a batch of states along the last axis)."""
    if n_qubits_of(state) != cfg.n_qubits:
        raise SizeError(
            f"state has {n_qubits_of(state)} qubits, config wants {cfg.n_qubits}"
        )
    _check_params(cfg, params)
    for op in build_circuit(cfg):
        state = apply_gate(state, op, params)
    return state


def format_program(ops: Sequence[GateOp]) -> str:
    """Human-readable one-op-per-line dump (the CLI `circuit` output)."""
    lines = []
    for op in ops:
        if op.kind is GateKind.CZ:
            lines.append(f"CZ q{op.control} q{op.target}")
        elif op.kind is GateKind.CNOT:
            lines.append(f"CNOT q{op.control} q{op.target}")
        elif op.kind is GateKind.RY and op.trainable:
            lines.append(f"RY q{op.target} slot={op.param_slot}")
        elif op.kind is GateKind.RY:
            lines.append(f"RY q{op.target} fixed={op.angle:.10f}")
        else:
            lines.append(f"{op.kind.value} q{op.target}")
    return "\n".join(lines)


def trainable_slot_count(ops: Sequence[GateOp]) -> int:
    return sum(1 for op in ops if op.trainable)
