import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import central_diff
from vqcnet.embedding import EmbedConfig, amplitude_embed, embed_backward
from vqcnet.errors import SizeError, ZeroVectorError

CFG2 = EmbedConfig(n_qubits=2)


def test_basis_vector_maps_to_basis_state():
    state = amplitude_embed([1, 0, 0, 0], CFG2)
    assert np.array_equal(state, [1, 0, 0, 0])


def test_three_four_five_normalization():
    state = amplitude_embed([3, 4], EmbedConfig(n_qubits=1))
    assert np.allclose(state, [0.6, 0.8])


def test_padding_with_zeros():
    state = amplitude_embed([1, 1, 1], CFG2)
    assert np.allclose(state[:3], 1 / np.sqrt(3))
    assert state[3] == 0


def test_zero_vector_rejected():
    with pytest.raises(ZeroVectorError):
        amplitude_embed([0.0, 0.0], CFG2)


def test_too_many_features():
    with pytest.raises(SizeError):
        amplitude_embed(np.ones(5), CFG2)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    scale=st.floats(min_value=1e-3, max_value=1e3),
)
def test_scale_invariance_and_unit_norm(seed, scale):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    x = rng.normal(size=d)
    if np.linalg.norm(x) < 1e-6:
        x = x + 1.0
    a = amplitude_embed(x, CFG2)
    b = amplitude_embed(scale * x, CFG2)
    assert np.abs(a - b).max() <= 1e-12
    assert abs(np.linalg.norm(a) - 1.0) <= 1e-12


def test_backward_at_unit_vector():
    grad = embed_backward([1.0, 0.0], np.array([0.0, 1.0, 0.0, 0.0]), CFG2)
    assert np.allclose(grad, [0.0, 1.0])


def test_radial_gradient_vanishes(rng):
    x = rng.normal(size=3)
    unit = x / np.linalg.norm(x)
    grad_amp = np.zeros(4)
    grad_amp[:3] = unit
    grad = embed_backward(x, grad_amp, CFG2)
    assert np.allclose(grad, 0.0, atol=1e-14)


def test_backward_matches_finite_differences(rng):
    cfg = EmbedConfig(n_qubits=3)
    for _ in range(100):
        x = rng.normal(size=5)
        if np.linalg.norm(x) < 0.1:
            x = x + 1.0
        grad_amp = rng.normal(size=8)

        def scalar(v):
            return float(amplitude_embed(v, cfg).real @ grad_amp)

        fd = central_diff(scalar, x, 1e-6)
        analytic = embed_backward(x, grad_amp, cfg)
        scale = np.maximum(1.0, np.abs(fd))
        assert (np.abs(analytic - fd) / scale).max() < 1e-6


def test_backward_shape_validation():
    with pytest.raises(SizeError):
        embed_backward([1.0, 2.0], np.zeros(3), CFG2)
    with pytest.raises(ZeroVectorError):
        embed_backward([0.0, 0.0], np.zeros(4), CFG2)
