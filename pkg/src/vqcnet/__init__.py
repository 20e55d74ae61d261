"""Differentiable statevector simulation of variational quantum circuits,
a compact classical NN kernel, and their hybrid assembly for multichannel
biosignal classification."""

from .ansatz import AnsatzConfig, apply_ansatz, build_circuit, param_count
from .embedding import EmbedConfig, amplitude_embed, embed_backward
from .measurement import adjoint_grad, expect_z_all, parameter_shift_grad
from .model import Model, ModelConfig
from .qstate import GateKind, GateOp, apply_gate, full_unitary_oracle, zero_state

__version__ = "0.1.0"

__all__ = [
    "AnsatzConfig",
    "EmbedConfig",
    "GateKind",
    "GateOp",
    "Model",
    "ModelConfig",
    "adjoint_grad",
    "amplitude_embed",
    "apply_ansatz",
    "apply_gate",
    "build_circuit",
    "embed_backward",
    "expect_z_all",
    "full_unitary_oracle",
    "parameter_shift_grad",
    "param_count",
    "zero_state",
]
