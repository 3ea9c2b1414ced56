import math

import numpy as np
import pytest

from gridiron.network import (
    RELU,
    SIGMOID,
    SOFTPLUS,
    TANH,
    BranchSpec,
    FeatureScaler,
    LayerSpec,
    NetworkConfig,
    NetworkError,
    TrainedNetwork,
    act_relu,
    act_sigmoid,
    act_softplus,
    act_tanh,
    bce_loss,
    default_config,
    evaluate_classifier,
    gradient_check,
    load_model,
    metrics_from_confusion,
    save_model,
    small_config,
    train,
)
from gridiron.network import _BatchNorm, _Dropout


def linear_config(input_dim, activation=TANH, width=2, branches=1, batch_norm=False):
    branch = BranchSpec(0.0, (LayerSpec(width, batch_norm, activation),))
    return NetworkConfig(input_dim=input_dim, branches=(branch,) * branches, trunk=())


class TestActivations:
    def test_symmetry_points(self):
        assert act_tanh(0.0) == 0.0
        assert act_sigmoid(0.0) == 0.5

    def test_softplus_at_zero(self):
        assert float(act_softplus(0.0)) == pytest.approx(math.log(2), abs=1e-15)

    def test_high_precision_values(self):
        assert float(act_tanh(1.0)) == pytest.approx(0.7615941559557649, abs=1e-15)
        assert float(act_softplus(50.0)) == pytest.approx(50.0, abs=1e-12)

    def test_softplus_no_overflow(self):
        assert float(act_softplus(1000.0)) == 1000.0
        assert float(act_sigmoid(1000.0)) == 1.0
        assert float(act_sigmoid(-1000.0)) == 0.0

    def test_relu_alias(self):
        assert float(act_relu(-3.0)) == 0.0
        assert float(act_relu(3.0)) == 3.0

    def test_printed_formulas(self):
        rng = np.random.default_rng(0)
        z = rng.normal(scale=3, size=100)
        assert np.allclose(act_tanh(z), (1 - np.exp(-2 * z)) / (1 + np.exp(-2 * z)), atol=1e-12)
        assert np.allclose(act_softplus(z), np.log(1 + np.exp(z)), atol=1e-12)
        assert np.allclose(act_sigmoid(z), np.exp(z) / (np.exp(z) + 1), atol=1e-12)


class TestConfig:
    def test_default_counts_98_layers(self):
        assert default_config(16).total_layers == 98

    def test_roundtrip(self):
        config = small_config(10, "bust")
        assert NetworkConfig.from_dict(config.to_dict()) == config

    def test_validation(self):
        with pytest.raises(NetworkError):
            LayerSpec(0)
        with pytest.raises(NetworkError):
            LayerSpec(4, activation="swish")
        with pytest.raises(NetworkError):
            BranchSpec(1.0, (LayerSpec(4),))
        with pytest.raises(NetworkError):
            NetworkConfig(input_dim=4, branches=(), trunk=())


class TestForward:
    def test_zero_weights_give_half(self):
        net = TrainedNetwork(linear_config(3, branches=2), seed=0)
        for layer, name, _ in net.parameters():
            getattr(layer, name)[...] = 0.0
        out = net.forward(np.random.default_rng(0).normal(size=(5, 3)))
        assert np.allclose(out, 0.5, atol=1e-15)

    def test_no_dropout_train_equals_infer_without_batchnorm(self):
        net = TrainedNetwork(linear_config(4, branches=2), seed=1)
        x = np.random.default_rng(1).normal(size=(6, 4))
        assert np.allclose(net.forward(x, "infer"), net.forward(x, "train", seed=0), atol=1e-12)

    def test_hand_propagated_tiny_net(self):
        config = linear_config(2, activation=TANH, width=2, branches=2)
        net = TrainedNetwork(config, seed=0)
        w1 = np.array([[0.3, -0.2], [0.1, 0.4]])
        b1 = np.array([0.05, -0.1])
        w2 = np.array([[-0.5, 0.2], [0.3, 0.1]])
        b2 = np.array([0.0, 0.2])
        wo = np.array([[0.7], [-0.3], [0.4], [0.6]])
        bo = np.array([-0.1])
        net.branches[0][1].w, net.branches[0][1].b = w1, b1
        net.branches[1][1].w, net.branches[1][1].b = w2, b2
        net.output.w, net.output.b = wo, bo
        x = np.array([[0.6, -1.2]])
        hidden = np.concatenate([np.tanh(x @ w1 + b1), np.tanh(x @ w2 + b2)], axis=1)
        expected = 1.0 / (1.0 + np.exp(-(hidden @ wo + bo)))
        assert net.forward(x)[0] == pytest.approx(expected[0, 0], abs=1e-10)

    def test_output_in_open_interval(self):
        net = TrainedNetwork(small_config(5), seed=2)
        x = np.random.default_rng(2).normal(scale=10, size=(20, 5))
        out = net.forward(x)
        assert np.all((out > 0) & (out < 1))
        assert np.all(np.isfinite(out))

    def test_infer_deterministic(self):
        net = TrainedNetwork(small_config(5), seed=3)
        x = np.random.default_rng(3).normal(size=(8, 5))
        assert np.array_equal(net.forward(x), net.forward(x))

    def test_shape_mismatch(self):
        net = TrainedNetwork(linear_config(3), seed=0)
        with pytest.raises(NetworkError):
            net.forward(np.zeros((2, 4)))


class TestLayers:
    def test_dropout_preserves_expectation(self):
        rng = np.random.default_rng(7)
        layer = _Dropout(0.3)
        x = np.ones((1, 50))
        draws = 10_000
        acc = np.zeros(50)
        for _ in range(draws):
            acc += layer.forward(x, train=True, rng=rng)[0]
        mean = acc.mean() / draws
        # per-draw variance of a kept/scaled unit is rate/(1-rate)
        se = math.sqrt(0.3 / 0.7 / (draws * 50))
        assert abs(mean - 1.0) <= 3 * se

    def test_batchnorm_identical_rows(self):
        layer = _BatchNorm(3)
        x = np.tile([1.5, -2.0, 0.25], (6, 1))
        out = layer.forward(x, train=True)
        assert np.allclose(out, out[0], atol=1e-12)

    def test_batchnorm_normalizes_batch(self):
        rng = np.random.default_rng(11)
        layer = _BatchNorm(4)
        x = rng.normal(loc=3.0, scale=2.0, size=(256, 4))
        out = layer.forward(x, train=True)  # gamma=1, beta=0
        assert np.all(np.abs(out.mean(axis=0)) <= 1e-6)
        assert np.all(np.abs(out.var(axis=0) - 1.0) <= 1e-4)


class TestTraining:
    def _separable(self, n=200, seed=0):
        rng = np.random.default_rng(seed)
        y = rng.integers(0, 2, size=n)
        x = rng.normal(size=(n, 2)) + np.where(y[:, None] == 1, 3.0, -3.0)
        return x, y.astype(float)

    def test_separable_accuracy(self):
        x, y = self._separable()
        config = small_config(2, branch_layers=1, branch_width=4, trunk_width=4, dropout=0.0)
        net, history = train(config, x, y, learning_rate=0.05, epochs=50, batch_size=32, seed=0)
        pred = net.forward(x) >= 0.5
        assert np.mean(pred == y.astype(bool)) >= 0.95
        assert len(history) == 50

    def test_zero_epochs(self):
        x, y = self._separable(n=20)
        net, history = train(small_config(2), x, y, epochs=0)
        assert history == []
        fresh = TrainedNetwork(small_config(2), seed=0)
        for (k1, v1), (k2, v2) in zip(sorted(net.state_arrays().items()), sorted(fresh.state_arrays().items())):
            assert k1 == k2 and np.array_equal(v1, v2)

    def test_seed_reproducibility(self):
        x, y = self._separable(n=60, seed=5)
        config = small_config(2, branch_layers=1, branch_width=4, trunk_width=4)
        n1, h1 = train(config, x, y, epochs=3, seed=9)
        n2, h2 = train(config, x, y, epochs=3, seed=9)
        assert h1 == h2
        for key, value in n1.state_arrays().items():
            assert np.array_equal(value, n2.state_arrays()[key])

    def test_non_binary_labels_rejected(self):
        with pytest.raises(NetworkError):
            train(small_config(2), np.zeros((4, 2)), np.array([0.0, 0.5, 1.0, 1.0]))

    def test_full_batch_loss_non_increasing(self):
        x, y = self._separable(n=40, seed=2)
        config = linear_config(2, width=4, branches=2)
        _, history = train(config, x, y, learning_rate=0.001, epochs=5, batch_size=40, seed=0)
        for before, after in zip(history, history[1:]):
            assert after <= before + 1e-12

    def test_bce_loss_matches_definition(self):
        p = np.array([0.2, 0.9, 0.5])
        y = np.array([0.0, 1.0, 1.0])
        expected = -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))
        assert bce_loss(p, y) == pytest.approx(expected, abs=1e-12)


class TestGradientCheck:
    def test_single_linear_layer_closed_form(self):
        # empty branch and trunk reduce the net to one dense layer + sigmoid
        config = NetworkConfig(input_dim=3, branches=(BranchSpec(0.0, ()),), trunk=())
        net = TrainedNetwork(config, seed=4)
        x = np.array([[0.5, -1.0, 2.0]])
        y = np.array([1.0])
        z = net._forward_logits(x, train=True, rng=None, update_stats=False)
        net._backward((act_sigmoid(z) - y) / 1)
        residual = act_sigmoid(z) - y
        assert np.allclose(net.output.gw, x.T * residual, atol=1e-12)
        assert np.allclose(net.output.gb, residual, atol=1e-12)

    @pytest.mark.parametrize("activation", [TANH, SOFTPLUS, SIGMOID, RELU])
    def test_small_config_all_activations(self, activation):
        branch = BranchSpec(0.1, (LayerSpec(3, True, activation), LayerSpec(3, False, activation)))
        config = NetworkConfig(input_dim=4, branches=(branch, branch), trunk=(LayerSpec(4, False, activation),))
        rng = np.random.default_rng(0)
        x = rng.normal(size=(6, 4)) + 0.1  # keep relu inputs off the kink
        y = rng.integers(0, 2, size=6).astype(float)
        assert gradient_check(config, x, y, seed=1) <= 1e-4


class TestMetrics:
    def test_hand_confusion_fixture(self):
        m = metrics_from_confusion(tp=6, fp=2, tn=88, fn=4)
        assert m.positive_predictive_value == pytest.approx(0.75)
        assert m.negative_predictive_value == pytest.approx(0.9565, abs=5e-5)
        assert m.accuracy == pytest.approx(0.94)
        assert m.predicted_positive_rate == pytest.approx(0.08)

    def test_constant_negative_predictor(self):
        m = metrics_from_confusion(tp=0, fp=0, tn=88, fn=12)
        assert m.accuracy == pytest.approx(0.88)
        assert m.predicted_positive_rate == 0.0
        assert not m.ppv_defined
        assert m.positive_predictive_value == 0.0

    def test_perfect_predictor_end_to_end(self):
        x = np.array([[5.0], [-5.0], [5.0], [-5.0]])
        y = np.array([1.0, 0.0, 1.0, 0.0])
        config = NetworkConfig(input_dim=1, branches=(BranchSpec(0.0, ()),), trunk=())
        net = TrainedNetwork(config, seed=0)
        net.output.w[...] = [[4.0]]
        net.output.b[...] = 0.0
        m = evaluate_classifier(net, x, y)
        assert m.accuracy == 1.0
        assert m.positive_predictive_value == 1.0
        assert m.negative_predictive_value == 1.0
        assert m.predicted_positive_rate == 0.5

    def test_empty_test_set(self):
        net = TrainedNetwork(linear_config(2), seed=0)
        with pytest.raises(NetworkError):
            evaluate_classifier(net, np.zeros((0, 2)), np.zeros(0))


class TestPersistence:
    def test_model_roundtrip(self, tmp_path):
        x, y = np.random.default_rng(0).normal(size=(30, 3)), (np.arange(30) % 2).astype(float)
        config = small_config(3, "injury", branch_layers=1, branch_width=4, trunk_width=4)
        net, _ = train(config, x, y, epochs=2, seed=0)
        scaler = FeatureScaler.fit(x)
        path = tmp_path / "model.npz"
        save_model(path, net, scaler, state="injury")
        loaded, loaded_scaler, state = load_model(path)
        assert state == "injury"
        assert np.array_equal(loaded.forward(x), net.forward(x))
        assert np.array_equal(loaded_scaler.mean, scaler.mean)

    def test_scaler_zero_variance_column(self):
        x = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        scaler = FeatureScaler.fit(x)
        out = scaler.transform(x)
        assert np.all(np.isfinite(out))
        assert np.allclose(out[:, 1], 0.0)
