"""Deep player-state classifiers: parallel dropout/batch-norm branches
merging into a dense trunk with a sigmoid output, trained by minibatch SGD on
binary cross-entropy. Everything is seeded and deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import expit

MODEL_FORMAT = "gridiron-dnn-1"

TANH = "tanh_eq9"
SOFTPLUS = "softplus_eq10"
SIGMOID = "sigmoid_eq11"
RELU = "relu"

BCE_EPS = 1e-7
BN_MOMENTUM = 0.9
BN_EPS = 1e-5

STATES = ("boom", "bust", "injury", "meaningful")
# injury and bust branches use the tanh form; meaningful and boom use the
# smooth rectifier form
STATE_ACTIVATIONS = {"boom": SOFTPLUS, "bust": TANH, "injury": TANH, "meaningful": SOFTPLUS}


class NetworkError(ValueError):
    pass


class TrainingDiverged(NetworkError):
    pass


def act_tanh(z: np.ndarray) -> np.ndarray:
    """(1 - e^{-2z}) / (1 + e^{-2z}), computed stably."""
    return np.tanh(z)


def act_softplus(z: np.ndarray) -> np.ndarray:
    """log(1 + e^z), stabilized so large z maps to z."""
    return np.logaddexp(0.0, z)


def act_sigmoid(z: np.ndarray) -> np.ndarray:
    """e^z / (e^z + 1) without overflow."""
    return expit(z)


def act_relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


_FORWARD = {TANH: act_tanh, SOFTPLUS: act_softplus, SIGMOID: act_sigmoid, RELU: act_relu}


def _activation_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == TANH:
        return 1.0 - a * a
    if name == SOFTPLUS:
        return expit(z)
    if name == SIGMOID:
        return a * (1.0 - a)
    if name == RELU:
        return (z > 0).astype(float)
    raise NetworkError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class LayerSpec:
    width: int
    batch_norm: bool = True
    activation: str = TANH

    def __post_init__(self) -> None:
        if self.width < 1:
            raise NetworkError("layer width must be >= 1")
        if self.activation not in _FORWARD:
            raise NetworkError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class BranchSpec:
    dropout_rate: float
    layers: tuple[LayerSpec, ...]

    def __post_init__(self) -> None:
        if not (0.0 <= self.dropout_rate < 1.0):
            raise NetworkError("dropout_rate must be in [0, 1)")


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    branches: tuple[BranchSpec, ...]
    trunk: tuple[LayerSpec, ...]

    def __post_init__(self) -> None:
        if len(self.branches) < 1:
            raise NetworkError("need at least one branch")
        if self.input_dim < 1:
            raise NetworkError("input_dim must be >= 1")

    @property
    def total_layers(self) -> int:
        """Counted layers: per-branch dropout, dense and batch-norm layers,
        one merge layer, trunk dense layers, and the sigmoid output unit."""
        count = 0
        for branch in self.branches:
            count += 1  # dropout at the branch head
            for layer in branch.layers:
                count += 1 + int(layer.batch_norm)
        count += 1  # merge
        count += len(self.trunk)
        count += 1  # output
        return count

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "branches": [
                {
                    "dropout_rate": b.dropout_rate,
                    "layers": [[l.width, l.batch_norm, l.activation] for l in b.layers],
                }
                for b in self.branches
            ],
            "trunk": [[l.width, l.batch_norm, l.activation] for l in self.trunk],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkConfig":
        return cls(
            input_dim=data["input_dim"],
            branches=tuple(
                BranchSpec(
                    dropout_rate=b["dropout_rate"],
                    layers=tuple(LayerSpec(w, bn, act) for w, bn, act in b["layers"]),
                )
                for b in data["branches"]
            ),
            trunk=tuple(LayerSpec(w, bn, act) for w, bn, act in data["trunk"]),
        )


def default_config(input_dim: int, state: str = "boom") -> NetworkConfig:
    """Six branches of dropout + 7 dense/batch-norm pairs (width 32) feeding
    a 6-layer width-64 trunk: 6*(1+7+7) + merge + 6 + output = 98 layers."""
    activation = STATE_ACTIVATIONS.get(state, TANH)
    branch = BranchSpec(
        dropout_rate=0.2,
        layers=tuple(LayerSpec(32, True, activation) for _ in range(7)),
    )
    trunk = tuple(LayerSpec(64, False, activation) for _ in range(6))
    return NetworkConfig(input_dim=input_dim, branches=(branch,) * 6, trunk=trunk)


def small_config(input_dim: int, state: str = "boom", branch_layers: int = 2,
                 branch_width: int = 8, trunk_width: int = 16, dropout: float = 0.1) -> NetworkConfig:
    activation = STATE_ACTIVATIONS.get(state, TANH)
    branch = BranchSpec(
        dropout_rate=dropout,
        layers=tuple(LayerSpec(branch_width, True, activation) for _ in range(branch_layers)),
    )
    trunk = (LayerSpec(trunk_width, False, activation), LayerSpec(trunk_width, False, activation))
    return NetworkConfig(input_dim=input_dim, branches=(branch,) * 6, trunk=trunk)


class _Dense:
    def __init__(self, fan_in: int, fan_out: int, rng: np.random.Generator, bias: bool = True):
        limit = np.sqrt(3.0 / fan_in)
        self.w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        self.b = np.zeros(fan_out)
        # a bias feeding straight into batch norm is redundant (the batch
        # mean absorbs it), so such layers are built without one
        self.use_bias = bias

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.w + self.b

    def backward(self, grad: np.ndarray) -> np.ndarray:
        self.gw = self._x.T @ grad
        self.gb = grad.sum(axis=0)
        return grad @ self.w.T

    def params(self):
        if not self.use_bias:
            return [("w", self.w, "gw")]
        return [("w", self.w, "gw"), ("b", self.b, "gb")]


class _BatchNorm:
    def __init__(self, width: int):
        self.gamma = np.ones(width)
        self.beta = np.zeros(width)
        self.running_mean = np.zeros(width)
        self.running_var = np.ones(width)

    def forward(self, x: np.ndarray, train: bool, update_stats: bool = True) -> np.ndarray:
        if train:
            mean = x.mean(axis=0)
            var = x.var(axis=0)
            if update_stats:
                self.running_mean = BN_MOMENTUM * self.running_mean + (1 - BN_MOMENTUM) * mean
                self.running_var = BN_MOMENTUM * self.running_var + (1 - BN_MOMENTUM) * var
        else:
            mean, var = self.running_mean, self.running_var
        self._std = np.sqrt(var + BN_EPS)
        self._xhat = (x - mean) / self._std
        self._train = train
        return self.gamma * self._xhat + self.beta

    def backward(self, grad: np.ndarray) -> np.ndarray:
        self.ggamma = (grad * self._xhat).sum(axis=0)
        self.gbeta = grad.sum(axis=0)
        gx_hat = grad * self.gamma
        if not self._train:
            return gx_hat / self._std
        n = grad.shape[0]
        return (
            gx_hat - gx_hat.mean(axis=0) - self._xhat * (gx_hat * self._xhat).mean(axis=0)
        ) / self._std

    def params(self):
        return [("gamma", self.gamma, "ggamma"), ("beta", self.beta, "gbeta")]


class _Dropout:
    def __init__(self, rate: float):
        self.rate = rate

    def forward(self, x: np.ndarray, train: bool, rng: np.random.Generator | None) -> np.ndarray:
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise NetworkError("train-mode dropout needs an RNG")
        keep = 1.0 - self.rate
        self._mask = (rng.random(x.shape) >= self.rate) / keep
        return x * self._mask

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._mask is None:
            return grad
        return grad * self._mask


class _Activation:
    def __init__(self, name: str):
        self.name = name

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._z = x
        self._a = _FORWARD[self.name](x)
        return self._a

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad * _activation_grad(self.name, self._z, self._a)


class TrainedNetwork:
    """Parallel-branch feedforward classifier with a single sigmoid output."""

    def __init__(self, config: NetworkConfig, seed: int = 0):
        self.config = config
        self.seed = seed
        rng = np.random.default_rng(seed)
        self.branches = []
        for spec in config.branches:
            layers: list = [_Dropout(spec.dropout_rate)]
            width = config.input_dim
            for layer_spec in spec.layers:
                layers.append(_Dense(width, layer_spec.width, rng, bias=not layer_spec.batch_norm))
                if layer_spec.batch_norm:
                    layers.append(_BatchNorm(layer_spec.width))
                layers.append(_Activation(layer_spec.activation))
                width = layer_spec.width
            self.branches.append(layers)
        merged = sum(spec.layers[-1].width if spec.layers else config.input_dim for spec in config.branches)
        self.trunk: list = []
        width = merged
        for layer_spec in config.trunk:
            self.trunk.append(_Dense(width, layer_spec.width, rng, bias=not layer_spec.batch_norm))
            if layer_spec.batch_norm:
                self.trunk.append(_BatchNorm(layer_spec.width))
            self.trunk.append(_Activation(layer_spec.activation))
            width = layer_spec.width
        self.output = _Dense(width, 1, rng)

    # --- forward / backward ---

    def _forward_logits(self, x: np.ndarray, train: bool, rng: np.random.Generator | None,
                        update_stats: bool = True) -> np.ndarray:
        outs = []
        self._branch_widths = []
        for layers in self.branches:
            h = x
            for layer in layers:
                if isinstance(layer, _Dropout):
                    h = layer.forward(h, train, rng)
                elif isinstance(layer, _BatchNorm):
                    h = layer.forward(h, train, update_stats)
                else:
                    h = layer.forward(h)
            outs.append(h)
            self._branch_widths.append(h.shape[1])
        h = np.concatenate(outs, axis=1)
        for layer in self.trunk:
            if isinstance(layer, _BatchNorm):
                h = layer.forward(h, train, update_stats)
            else:
                h = layer.forward(h)
        return self.output.forward(h)[:, 0]

    def forward(self, x: np.ndarray, mode: str = "infer", seed: int | None = None) -> np.ndarray:
        """Probabilities in (0, 1) for a batch of feature rows.

        Infer mode uses batch-norm running statistics, skips dropout, and is
        deterministic; train mode needs a seed for the dropout masks.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.config.input_dim:
            raise NetworkError(
                f"feature length {x.shape[1]} does not match input_dim {self.config.input_dim}"
            )
        if mode == "infer":
            z = self._forward_logits(x, train=False, rng=None)
        elif mode == "train":
            rng = np.random.default_rng(seed)
            z = self._forward_logits(x, train=True, rng=rng)
        else:
            raise NetworkError(f"unknown mode {mode!r}")
        return act_sigmoid(z)

    def _backward(self, grad_z: np.ndarray) -> None:
        grad = self.output.backward(grad_z[:, None])
        for layer in reversed(self.trunk):
            grad = layer.backward(grad)
        offset = 0
        chunks = []
        for width in self._branch_widths:
            chunks.append(grad[:, offset : offset + width])
            offset += width
        for layers, g in zip(self.branches, chunks):
            for layer in reversed(layers):
                g = layer.backward(g)

    def _all_layers(self):
        for layers in self.branches:
            yield from layers
        yield from self.trunk
        yield self.output

    def parameters(self) -> list[tuple[object, str, str]]:
        out = []
        for layer in self._all_layers():
            if hasattr(layer, "params"):
                for name, _, gname in layer.params():
                    out.append((layer, name, gname))
        return out

    def _sgd_step(self, lr: float) -> None:
        for layer, name, gname in self.parameters():
            value = getattr(layer, name)
            value -= lr * getattr(layer, gname)

    # --- persistence ---

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {}
        for i, layer in enumerate(self._all_layers()):
            if isinstance(layer, _Dense):
                arrays[f"l{i}_w"] = layer.w
                arrays[f"l{i}_b"] = layer.b
            elif isinstance(layer, _BatchNorm):
                arrays[f"l{i}_gamma"] = layer.gamma
                arrays[f"l{i}_beta"] = layer.beta
                arrays[f"l{i}_rmean"] = layer.running_mean
                arrays[f"l{i}_rvar"] = layer.running_var
        return arrays

    def load_state_arrays(self, arrays) -> None:
        for i, layer in enumerate(self._all_layers()):
            if isinstance(layer, _Dense):
                layer.w = np.array(arrays[f"l{i}_w"])
                layer.b = np.array(arrays[f"l{i}_b"])
            elif isinstance(layer, _BatchNorm):
                layer.gamma = np.array(arrays[f"l{i}_gamma"])
                layer.beta = np.array(arrays[f"l{i}_beta"])
                layer.running_mean = np.array(arrays[f"l{i}_rmean"])
                layer.running_var = np.array(arrays[f"l{i}_rvar"])


def bce_loss(probabilities: np.ndarray, labels: np.ndarray) -> float:
    p = np.clip(probabilities, BCE_EPS, 1.0 - BCE_EPS)
    y = np.asarray(labels, dtype=float)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log1p(-p)))


def _bce_from_logits(z: np.ndarray, y: np.ndarray) -> float:
    # stable form of -[y ln sigma(z) + (1-y) ln(1-sigma(z))]
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


@dataclass
class FeatureScaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "FeatureScaler":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        return cls(mean, std)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.std


def train(
    config: NetworkConfig,
    features: np.ndarray,
    labels: np.ndarray,
    learning_rate: float = 0.01,
    epochs: int = 50,
    batch_size: int = 32,
    seed: int = 0,
) -> tuple[TrainedNetwork, list[float]]:
    """Minibatch SGD on binary cross-entropy; fully seeded (init, shuffle and
    dropout). Returns the network and the per-epoch mean batch loss."""
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or len(x) == 0:
        raise NetworkError("dataset must be a non-empty 2-D feature array")
    if len(x) != len(y):
        raise NetworkError("features and labels must align")
    if not np.all((y == 0) | (y == 1)):
        raise NetworkError("labels must be binary")
    net = TrainedNetwork(config, seed=seed)
    rng = np.random.default_rng(seed + 1)
    history = []
    n = len(x)
    for epoch in range(epochs):
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            xb, yb = x[idx], y[idx]
            z = net._forward_logits(xb, train=True, rng=rng)
            loss = _bce_from_logits(z, yb)
            if not np.isfinite(loss):
                raise TrainingDiverged(f"loss became non-finite at epoch {epoch}")
            grad_z = (act_sigmoid(z) - yb) / len(yb)
            net._backward(grad_z)
            net._sgd_step(learning_rate)
            losses.append(loss)
        history.append(float(np.mean(losses)))
    return net, history


def gradient_check(config: NetworkConfig, features: np.ndarray, labels: np.ndarray,
                   seed: int = 0, h: float = 1e-5) -> float:
    """Max relative error between the analytic gradient and central finite
    differences over every parameter; dropout disabled, batch norm in train
    mode on the fixed batch."""
    no_dropout = NetworkConfig(
        input_dim=config.input_dim,
        branches=tuple(BranchSpec(0.0, b.layers) for b in config.branches),
        trunk=config.trunk,
    )
    net = TrainedNetwork(no_dropout, seed=seed)
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(labels, dtype=float)

    def loss() -> float:
        z = net._forward_logits(x, train=True, rng=None, update_stats=False)
        return _bce_from_logits(z, y)

    z = net._forward_logits(x, train=True, rng=None, update_stats=False)
    net._backward((act_sigmoid(z) - y) / len(y))

    worst = 0.0
    for layer, name, gname in net.parameters():
        value = getattr(layer, name)
        analytic = getattr(layer, gname)
        flat = value.ravel()
        aflat = np.asarray(analytic).ravel()
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            up = loss()
            flat[k] = orig - h
            down = loss()
            flat[k] = orig
            numeric = (up - down) / (2 * h)
            denom = max(1e-8, abs(aflat[k]) + abs(numeric))
            worst = max(worst, abs(aflat[k] - numeric) / denom)
    return worst


@dataclass
class ClassifierMetrics:
    accuracy: float
    positive_predictive_value: float
    negative_predictive_value: float
    predicted_positive_rate: float
    ppv_defined: bool = True
    npv_defined: bool = True
    confusion: tuple[int, int, int, int] = (0, 0, 0, 0)  # tp, fp, tn, fn


def metrics_from_confusion(tp: int, fp: int, tn: int, fn: int) -> ClassifierMetrics:
    n = tp + fp + tn + fn
    if n == 0:
        raise NetworkError("empty test set")
    ppv_defined = (tp + fp) > 0
    npv_defined = (tn + fn) > 0
    return ClassifierMetrics(
        accuracy=(tp + tn) / n,
        positive_predictive_value=tp / (tp + fp) if ppv_defined else 0.0,
        negative_predictive_value=tn / (tn + fn) if npv_defined else 0.0,
        predicted_positive_rate=(tp + fp) / n,
        ppv_defined=ppv_defined,
        npv_defined=npv_defined,
        confusion=(tp, fp, tn, fn),
    )


def evaluate_classifier(net: TrainedNetwork, features: np.ndarray, labels: np.ndarray,
                        threshold: float = 0.5) -> ClassifierMetrics:
    y = np.asarray(labels)
    if len(y) == 0:
        raise NetworkError("empty test set")
    if not np.all((y == 0) | (y == 1)):
        raise NetworkError("labels must be binary")
    pred = net.forward(features, mode="infer") >= threshold
    actual = y.astype(bool)
    tp = int(np.sum(pred & actual))
    fp = int(np.sum(pred & ~actual))
    tn = int(np.sum(~pred & ~actual))
    fn = int(np.sum(~pred & actual))
    return metrics_from_confusion(tp, fp, tn, fn)


def save_model(path: str | Path, net: TrainedNetwork, scaler: FeatureScaler | None = None,
               state: str | None = None) -> None:
    meta = {
        "format": MODEL_FORMAT,
        "config": net.config.to_dict(),
        "seed": net.seed,
        "state": state,
        "has_scaler": scaler is not None,
    }
    arrays = dict(net.state_arrays())
    if scaler is not None:
        arrays["scaler_mean"] = scaler.mean
        arrays["scaler_std"] = scaler.std
    np.savez(path, meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8), **arrays)


def load_model(path: str | Path) -> tuple[TrainedNetwork, FeatureScaler | None, str | None]:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta.get("format") != MODEL_FORMAT:
            raise NetworkError(f"unsupported model format {meta.get('format')!r}")
        config = NetworkConfig.from_dict(meta["config"])
        net = TrainedNetwork(config, seed=meta["seed"])
        net.load_state_arrays(data)
        scaler = None
        if meta.get("has_scaler"):
            scaler = FeatureScaler(np.array(data["scaler_mean"]), np.array(data["scaler_std"]))
    return net, scaler, meta.get("state")
