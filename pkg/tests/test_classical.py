import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import guarded_dev
from vqcnet import classical as cl
from vqcnet.errors import LabelError, SizeError


def check_layer_gradients(layer, x, seed, training=True, tol=1e-5, h=1e-5):
    """Analytic backward vs central finite differences of a random projection."""
    rng = np.random.default_rng(seed)
    out = layer.forward(x, training)
    proj = rng.normal(size=out.shape)

    def loss_for(x_now):
        return float(np.sum(layer.forward(x_now, training) * proj))

    grad_in = layer.backward(proj)

    fd_in = np.zeros_like(x)
    flat, fd_flat = x.ravel(), fd_in.ravel()
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        up = loss_for(x)
        flat[i] = old - h
        down = loss_for(x)
        flat[i] = old
        fd_flat[i] = (up - down) / (2 * h)
    assert guarded_dev(grad_in, fd_in) < tol, "input gradient mismatch"

    layer.forward(x, training)
    layer.backward(proj)
    for name, param in layer.params.items():
        analytic = layer.grads[name].copy()
        pflat = param.ravel()
        fd = np.zeros(pflat.size)
        for i in range(pflat.size):
            old = pflat[i]
            pflat[i] = old + h
            up = loss_for(x)
            pflat[i] = old - h
            down = loss_for(x)
            pflat[i] = old
            fd[i] = (up - down) / (2 * h)
        assert guarded_dev(analytic.ravel(), fd) < tol, f"{name} gradient mismatch"


class TestBatchNorm:
    def test_already_normalized_passthrough(self, rng):
        x = rng.normal(size=(64, 5))
        x = (x - x.mean(0)) / x.std(0)
        layer = cl.BatchNorm(cl.BatchNormSpec(5))
        out = layer.forward(x, training=True)
        assert np.abs(out - x).max() < 1e-4

    def test_constant_column_gives_beta(self):
        layer = cl.BatchNorm(cl.BatchNormSpec(2))
        layer.params["beta"][:] = [0.5, -1.0]
        x = np.full((8, 2), 3.0)
        out = layer.forward(x, training=True)
        assert np.allclose(out, [0.5, -1.0])

    def test_two_point_batch(self):
        layer = cl.BatchNorm(cl.BatchNormSpec(1))
        out = layer.forward(np.array([[1.0], [3.0]]), training=True)
        assert np.abs(out - [[-1.0], [1.0]]).max() < 1e-4

    def test_zero_batch_rejected(self):
        layer = cl.BatchNorm(cl.BatchNormSpec(3))
        with pytest.raises(SizeError):
            layer.forward(np.zeros((0, 3)), training=True)

    def test_eval_mode_batch_size_independent(self, rng):
        layer = cl.BatchNorm(cl.BatchNormSpec(4))
        layer.forward(rng.normal(size=(32, 4)) * 3 + 1, training=True)
        x = rng.normal(size=(10, 4))
        big = layer.forward(x, training=False)
        one = np.concatenate([layer.forward(x[i : i + 1], training=False) for i in range(10)])
        assert np.array_equal(big, one)

    def test_running_stats_move_toward_batch(self, rng):
        layer = cl.BatchNorm(cl.BatchNormSpec(1))
        x = rng.normal(size=(256, 1)) + 10.0
        layer.forward(x, training=True)
        assert layer.buffers["run_mean"][0] == pytest.approx(0.1 * x.mean(), rel=1e-6)

    @pytest.mark.parametrize("seed", range(10))
    def test_gradients_2d(self, seed):
        rng = np.random.default_rng(seed)
        b, f = int(rng.integers(2, 6)), int(rng.integers(1, 5))
        layer = cl.BatchNorm(cl.BatchNormSpec(f))
        layer.params["gamma"][:] = rng.uniform(0.5, 1.5, f)
        layer.params["beta"][:] = rng.normal(size=f)
        check_layer_gradients(layer, rng.normal(size=(b, f)), seed)

    @pytest.mark.parametrize("seed", range(5))
    def test_gradients_3d(self, seed):
        rng = np.random.default_rng(seed + 100)
        layer = cl.BatchNorm(cl.BatchNormSpec(3))
        check_layer_gradients(layer, rng.normal(size=(2, 3, 4)), seed)

    @pytest.mark.parametrize("seed", range(5))
    def test_gradients_eval_mode(self, seed):
        rng = np.random.default_rng(seed + 200)
        layer = cl.BatchNorm(cl.BatchNormSpec(3))
        layer.forward(rng.normal(size=(16, 3)), training=True)  # move stats
        check_layer_gradients(layer, rng.normal(size=(4, 3)), seed, training=False)


class TestConv1D:
    def test_identity_kernel(self, rng):
        layer = cl.Conv1D(cl.Conv1DSpec(in_ch=2, out_ch=2, kernel=1), rng)
        layer.params["w"][:] = np.eye(2)[:, :, None]
        layer.params["b"][:] = 0
        x = rng.normal(size=(3, 2, 7))
        assert np.allclose(layer.forward(x), x)

    def test_kernel_longer_than_input(self, rng):
        layer = cl.Conv1D(cl.Conv1DSpec(in_ch=1, out_ch=1, kernel=9), rng)
        with pytest.raises(SizeError):
            layer.forward(np.zeros((1, 1, 4)))

    def test_padding_and_stride_shapes(self, rng):
        layer = cl.Conv1D(cl.Conv1DSpec(in_ch=2, out_ch=4, kernel=3, stride=2, padding=1), rng)
        out = layer.forward(rng.normal(size=(2, 2, 9)))
        assert out.shape == (2, 4, (9 + 2 - 3) // 2 + 1)

    @pytest.mark.parametrize("seed", range(15))
    def test_gradients(self, seed):
        rng = np.random.default_rng(seed)
        in_ch = int(rng.integers(1, 4))
        out_ch = int(rng.integers(1, 4))
        length = int(rng.integers(4, 9))
        kernel = int(rng.integers(1, min(4, length) + 1))
        stride = int(rng.integers(1, 3))
        padding = int(rng.integers(0, 2))
        layer = cl.Conv1D(cl.Conv1DSpec(in_ch, out_ch, kernel, stride, padding), rng)
        check_layer_gradients(layer, rng.normal(size=(2, in_ch, length)), seed)


class TestDepthwise:
    @pytest.mark.parametrize("seed", range(15))
    def test_gradients(self, seed):
        rng = np.random.default_rng(seed + 42)
        channels = int(rng.integers(1, 5))
        length = int(rng.integers(3, 8))
        kernel = int(rng.integers(1, length + 1))
        layer = cl.DepthwiseConv1D(cl.DepthwiseSpec(channels, kernel), rng)
        check_layer_gradients(layer, rng.normal(size=(2, channels, length)), seed)

    def test_kernel_too_long(self, rng):
        layer = cl.DepthwiseConv1D(cl.DepthwiseSpec(2, 5), rng)
        with pytest.raises(SizeError):
            layer.forward(np.zeros((1, 2, 3)))


class TestPoolEluFlatten:
    def test_avgpool_values(self):
        layer = cl.AvgPool1D(cl.AvgPoolSpec(2))
        x = np.arange(12, dtype=float).reshape(1, 2, 6)
        out = layer.forward(x)
        assert np.allclose(out[0, 0], [0.5, 2.5, 4.5])

    def test_avgpool_drops_tail(self):
        layer = cl.AvgPool1D(cl.AvgPoolSpec(4))
        out = layer.forward(np.ones((1, 1, 7)))
        assert out.shape == (1, 1, 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_avgpool_gradients(self, seed):
        rng = np.random.default_rng(seed)
        width = int(rng.integers(1, 4))
        length = int(rng.integers(width, 9))
        layer = cl.AvgPool1D(cl.AvgPoolSpec(width))
        check_layer_gradients(layer, rng.normal(size=(2, 2, length)), seed)

    @pytest.mark.parametrize("seed", range(10))
    def test_elu_gradients(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(3, 4))
        x = np.where(np.abs(x) < 1e-2, x + 0.5, x)  # keep away from the kink
        check_layer_gradients(cl.ELU(), x, seed)

    def test_elu_values(self):
        out = cl.ELU().forward(np.array([[-1.0, 0.0, 2.0]]))
        assert np.allclose(out, [[np.expm1(-1.0), 0.0, 2.0]])

    def test_flatten_round_trip(self, rng):
        layer = cl.Flatten()
        x = rng.normal(size=(2, 3, 4))
        out = layer.forward(x)
        assert out.shape == (2, 12)
        assert np.array_equal(layer.backward(out), x)


class TestDense:
    def test_identity(self, rng):
        layer = cl.Dense(cl.DenseSpec(3, 3), rng)
        layer.params["w"][:] = np.eye(3)
        layer.params["b"][:] = 0
        x = rng.normal(size=(4, 3))
        assert np.allclose(layer.forward(x), x)

    def test_zero_init(self, rng):
        layer = cl.Dense(cl.DenseSpec(3, 2, zero_init=True), rng)
        assert np.all(layer.params["w"] == 0)

    @pytest.mark.parametrize("seed", range(15))
    def test_gradients(self, seed):
        rng = np.random.default_rng(seed)
        n_in, n_out = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        layer = cl.Dense(cl.DenseSpec(n_in, n_out), rng)
        check_layer_gradients(layer, rng.normal(size=(3, n_in)), seed)


class TestSoftmaxCrossEntropy:
    def test_uniform_logits(self):
        loss, _ = cl.softmax_cross_entropy(np.zeros((2, 4)), [0, 3])
        assert abs(loss - np.log(4)) < 1e-12

    def test_saturated_correct(self):
        loss, _ = cl.softmax_cross_entropy(np.array([[10.0, -10.0]]), [0])
        assert loss < 1e-8

    def test_closed_form(self):
        loss, _ = cl.softmax_cross_entropy(np.array([[1.0, 2.0]]), [1])
        assert abs(loss - np.log1p(np.exp(-1.0))) < 1e-12

    def test_label_out_of_range(self):
        with pytest.raises(LabelError):
            cl.softmax_cross_entropy(np.zeros((1, 3)), [3])
        with pytest.raises(LabelError):
            cl.softmax_cross_entropy(np.zeros((1, 3)), [-1])

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_loss_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        b, k = int(rng.integers(1, 6)), int(rng.integers(2, 6))
        logits = rng.normal(size=(b, k)) * 5
        labels = rng.integers(0, k, size=b)
        loss, d = cl.softmax_cross_entropy(logits, labels)
        assert loss >= 0
        assert np.allclose(d.sum(axis=1), 0, atol=1e-12)

    def test_gradient_matches_fd(self, rng):
        logits = rng.normal(size=(3, 4))
        labels = np.array([0, 2, 1])
        _, d = cl.softmax_cross_entropy(logits, labels)
        h = 1e-6
        flat = logits.ravel()
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            up, _ = cl.softmax_cross_entropy(logits, labels)
            flat[i] = old - h
            down, _ = cl.softmax_cross_entropy(logits, labels)
            flat[i] = old
            assert abs((up - down) / (2 * h) - d.ravel()[i]) < 1e-8


class TestAdam:
    def test_zero_gradient_is_identity(self):
        state = cl.adam_init(3)
        params = np.array([1.0, -2.0, 0.5])
        updated, state = cl.adam_step(params, np.zeros(3), state)
        assert np.array_equal(updated, params)
        assert state.t == 1

    def test_first_step_is_signed_lr(self):
        state = cl.adam_init(2, lr=0.1)
        updated, _ = cl.adam_step(np.zeros(2), np.array([0.3, -7.0]), state)
        assert np.allclose(updated, [-0.1, 0.1], atol=1e-6)

    def test_two_constant_steps(self):
        state = cl.adam_init(1, lr=0.1)
        p = np.array([0.0])
        for _ in range(2):
            p, state = cl.adam_step(p, np.array([1.0]), state)
        assert abs(p[0] + 0.2) < 1e-6

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_lr_zero_identity(self, seed):
        rng = np.random.default_rng(seed)
        state = cl.adam_init(4, lr=0.0)
        params = rng.normal(size=4)
        updated, _ = cl.adam_step(params, rng.normal(size=4), state)
        assert np.array_equal(updated, params)

    def test_shape_mismatch(self):
        with pytest.raises(SizeError):
            cl.adam_step(np.zeros(3), np.zeros(2), cl.adam_init(3))


class TestSpecs:
    def test_round_trip(self):
        specs = [
            cl.Conv1DSpec(2, 8, 3, stride=2, padding=1),
            cl.BatchNormSpec(8),
            cl.DepthwiseSpec(8, 4),
            cl.AvgPoolSpec(4),
            cl.ELUSpec(),
            cl.FlattenSpec(),
            cl.DenseSpec(16, 4, zero_init=True),
        ]
        for spec in specs:
            assert cl.spec_from_dict(cl.spec_to_dict(spec)) == spec

    def test_unknown_kind(self):
        with pytest.raises(SizeError):
            cl.spec_from_dict({"kind": "maxpool"})
