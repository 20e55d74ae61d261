"""Complex statevector simulation of single- and two-qubit gates.

Conventions used throughout the package:

* An n-qubit state is a ``complex128`` array whose last axis has length
  ``2**n``.  Leading axes, when present, are batch dimensions; every kernel
  here acts on the last axis only, so a ``(batch, 2**n)`` array of states
  goes through the same code path as a single state.
* Amplitude index ``i`` encodes the basis state with bit layout
  ``b_{n-1} ... b_1 b_0`` where qubit 0 is the least-significant bit.
* Two-qubit gate matrices use basis index ``2*control_bit + target_bit``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import SizeError

N_MAX = 24          # caps statevector memory at 2^24 complex doubles (~256 MiB)
ORACLE_N_MAX = 10   # the dense-matrix oracle needs (2^n)^2 entries


class GateKind(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    RY = "RY"
    CZ = "CZ"
    CNOT = "CNOT"


TWO_QUBIT_KINDS = (GateKind.CZ, GateKind.CNOT)

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
# basis |control target> = index 2*c + t
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


def ry_matrix(theta: float) -> np.ndarray:
    """Rotation about Y: a real-valued 2x2 unitary, exp(-i*theta*Y/2)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def ry_deriv(theta: float) -> np.ndarray:
    """d/dtheta of ry_matrix(theta)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return 0.5 * np.array([[-s, -c], [c, -s]], dtype=complex)


@dataclass(frozen=True)
class GateOp:
    """One gate in a circuit program.

    Trainable RY ops carry ``param_slot`` (an index into a parameter vector);
    fixed RY ops carry ``angle``.  Exactly one of the two must be set for RY,
    neither for any other kind.
    """

    kind: GateKind
    target: int
    control: Optional[int] = None
    param_slot: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind in TWO_QUBIT_KINDS:
            if self.control is None:
                raise ValueError(f"{self.kind.value} requires a control qubit")
            if self.control == self.target:
                raise ValueError("control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind.value} takes no control qubit")
        if self.kind is GateKind.RY:
            if (self.param_slot is None) == (self.angle is None):
                raise ValueError("RY needs exactly one of param_slot / angle")
        elif self.param_slot is not None or self.angle is not None:
            raise ValueError(f"{self.kind.value} is not parameterized")

    @property
    def trainable(self) -> bool:
        return self.param_slot is not None


def zero_state(n: int) -> np.ndarray:
    """The all-zeros basis state |0...0> on n qubits."""
    if not 1 <= n <= N_MAX:
        raise SizeError(f"qubit count must be in [1, {N_MAX}], got {n}")
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    return state


def n_qubits_of(state: np.ndarray) -> int:
    dim = state.shape[-1]
    n = dim.bit_length() - 1
    if dim != 2**n:
        raise SizeError(f"state length {dim} is not a power of two")
    return n


def state_norm(state: np.ndarray) -> float:
    return float(np.linalg.norm(state))


def gate_matrix(kind: GateKind, angle: Optional[float] = None) -> np.ndarray:
    """The unitary for a gate kind (2x2, or 4x4 for CZ/CNOT)."""
    if kind is GateKind.RY:
        if angle is None:
            raise ValueError("RY requires an angle")
        return ry_matrix(angle)
    if angle is not None:
        raise ValueError(f"{kind.value} takes no angle")
    return {
        GateKind.I: _I,
        GateKind.X: _X,
        GateKind.Y: _Y,
        GateKind.Z: _Z,
        GateKind.H: _H,
        GateKind.CZ: _CZ,
        GateKind.CNOT: _CNOT,
    }[kind].copy()


def _resolve_angle(op: GateOp, params: Sequence[float]) -> float:
    if op.angle is not None:
        return op.angle
    if op.param_slot >= len(params):
        raise IndexError(
            f"param_slot {op.param_slot} out of range for {len(params)} params"
        )
    return float(params[op.param_slot])


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise IndexError(f"qubit {q} out of range for {n}-qubit state")


def apply_single(state: np.ndarray, matrix: np.ndarray, target: int) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a state (or batch of states)."""
    n = n_qubits_of(state)
    _check_qubit(target, n)
    low = 1 << target
    high = 1 << (n - 1 - target)
    view = state.reshape(state.shape[:-1] + (high, 2, low))
    out = np.einsum("ij,...hjl->...hil", matrix, view)
    return np.ascontiguousarray(out).reshape(state.shape)


@lru_cache(maxsize=256)
def _pair_indices(n: int, control: int, target: int) -> tuple:
    """Index arrays for controlled gates: control bit set, split by target bit."""
    idx = np.arange(1 << n)
    ctrl_on = idx[(idx >> control) & 1 == 1]
    t0 = ctrl_on[(ctrl_on >> target) & 1 == 0]
    return t0, t0 | (1 << target), ctrl_on[(ctrl_on >> target) & 1 == 1]


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    n = n_qubits_of(state)
    _check_qubit(control, n)
    _check_qubit(target, n)
    t0, t1, _ = _pair_indices(n, control, target)
    out = state.copy()
    out[..., t0] = state[..., t1]
    out[..., t1] = state[..., t0]
    return out


def apply_cz(state: np.ndarray, control: int, target: int) -> np.ndarray:
    n = n_qubits_of(state)
    _check_qubit(control, n)
    _check_qubit(target, n)
    _, _, both_on = _pair_indices(n, control, target)
    out = state.copy()
    out[..., both_on] *= -1.0
    return out


def apply_gate(
    state: np.ndarray, op: GateOp, params: Sequence[float] = ()
) -> np.ndarray:
    """Apply one GateOp.  Value-in/value-out; the input array is not mutated."""
    if op.kind is GateKind.CNOT:
        return apply_cnot(state, op.control, op.target)
    if op.kind is GateKind.CZ:
        return apply_cz(state, op.control, op.target)
    if op.kind is GateKind.RY:
        return apply_single(state, ry_matrix(_resolve_angle(op, params)), op.target)
    if op.kind is GateKind.I:
        n = n_qubits_of(state)
        _check_qubit(op.target, n)
        return state.copy()
    return apply_single(state, gate_matrix(op.kind), op.target)


def apply_gate_adjoint(
    state: np.ndarray, op: GateOp, params: Sequence[float] = ()
) -> np.ndarray:
    """Apply the inverse of a GateOp (all kinds here are self-inverse except RY)."""
    if op.kind is GateKind.RY:
        return apply_single(state, ry_matrix(-_resolve_angle(op, params)), op.target)
    return apply_gate(state, op, params)


def apply_program(
    state: np.ndarray, ops: Sequence[GateOp], params: Sequence[float] = ()
) -> np.ndarray:
    for op in ops:
        state = apply_gate(state, op, params)
    return state


def _lift_single(matrix: np.ndarray, target: int, n: int) -> np.ndarray:
    low = np.eye(1 << target, dtype=complex)
    high = np.eye(1 << (n - 1 - target), dtype=complex)
    return np.kron(np.kron(high, matrix), low)


def full_unitary_oracle(
    ops: Sequence[GateOp], n: int, params: Sequence[float] = ()
) -> np.ndarray:
    """Dense 2^n x 2^n unitary of a program, built by Kronecker lifting.

    Test oracle only: quadratic memory, capped at ORACLE_N_MAX qubits.
    Controlled gates are lifted through the projector split
    U = P0(c) + P1(c) * G(t).
    """
    if not 1 <= n <= ORACLE_N_MAX:
        raise SizeError(f"oracle supports 1..{ORACLE_N_MAX} qubits, got {n}")
    unitary = np.eye(1 << n, dtype=complex)
    for op in ops:
        _check_qubit(op.target, n)
        if op.kind in TWO_QUBIT_KINDS:
            _check_qubit(op.control, n)
            g = _Z if op.kind is GateKind.CZ else _X
            lifted = _lift_single(_P0, op.control, n) + _lift_single(
                _P1, op.control, n
            ) @ _lift_single(g, op.target, n)
        elif op.kind is GateKind.RY:
            lifted = _lift_single(ry_matrix(_resolve_angle(op, params)), op.target, n)
        else:
            lifted = _lift_single(gate_matrix(op.kind), op.target, n)
        unitary = lifted @ unitary
    return unitary
