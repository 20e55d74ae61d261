import numpy as np
import pytest

from vqcnet.qstate import GateKind, GateOp

ONE_QUBIT_KINDS = [GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.I]


def random_program(rng, n_qubits, n_gates, p_two_qubit=0.35):
    """A random gate program over the full gate set (fixed-angle RY only)."""
    ops = []
    for _ in range(n_gates):
        if n_qubits >= 2 and rng.random() < p_two_qubit:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            kind = GateKind.CZ if rng.random() < 0.5 else GateKind.CNOT
            ops.append(GateOp(kind, target=int(b), control=int(a)))
        elif rng.random() < 0.4:
            ops.append(
                GateOp(
                    GateKind.RY,
                    target=int(rng.integers(n_qubits)),
                    angle=float(rng.uniform(-np.pi, np.pi)),
                )
            )
        else:
            kind = ONE_QUBIT_KINDS[rng.integers(len(ONE_QUBIT_KINDS))]
            ops.append(GateOp(kind, target=int(rng.integers(n_qubits))))
    return ops


def random_real_state(rng, n_qubits):
    vec = rng.normal(size=1 << n_qubits)
    return (vec / np.linalg.norm(vec)).astype(complex)


def random_complex_state(rng, n_qubits):
    vec = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return vec / np.linalg.norm(vec)


def guarded_dev(a, b):
    """max |a-b| / max(1, |a|, |b|): relative deviation with a unit floor."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float((np.abs(a - b) / scale).max()) if a.size else 0.0


def central_diff(f, x, h):
    """Central finite differences of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        bumped = x.copy()
        bumped[i] += h
        up = f(bumped)
        bumped[i] -= 2 * h
        down = f(bumped)
        grad[i] = (up - down) / (2 * h)
    return grad


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
