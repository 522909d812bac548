"""Logistic regression and MLP risk models trained by mini-batch Adam.

Both models share one dense-layer representation; the loss is binary
cross-entropy computed from logits in log-sum-exp form, so there is no
probability clamp anywhere except when a loss must be computed from
already-squashed probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ConfigurationError,
    DegenerateLabelError,
    DivergenceError,
    ShapeError,
)

KIND_LR = "LR"
KIND_MLP = "MLP"

# predict_proba stays inside the open interval (0, 1) even for saturated
# logits; the loss uses its own clamp (see bce_from_proba).
_PROBA_EPS = 1e-15
_LOSS_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    hidden_sizes: tuple[int, ...] = (64,)
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0
    pos_weight: float | None = None
    # Optional hyperparameter grid; each entry overrides fields above and
    # the winner is picked on validation AUC-ROC, then AUC-PRC.
    candidates: tuple[dict, ...] = ()

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")

    def replace(self, **overrides) -> "TrainConfig":
        base = {
            "hidden_sizes": self.hidden_sizes,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
            "pos_weight": self.pos_weight,
        }
        base.update(overrides)
        if "hidden_sizes" in base:
            base["hidden_sizes"] = tuple(base["hidden_sizes"])
        return TrainConfig(**base)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        kwargs = dict(d)
        if "hidden_sizes" in kwargs:
            kwargs["hidden_sizes"] = tuple(kwargs["hidden_sizes"])
        if "candidates" in kwargs:
            kwargs["candidates"] = tuple(kwargs["candidates"])
        return cls(**kwargs)


@dataclass(frozen=True)
class Layer:
    w: np.ndarray  # (fan_in, fan_out)
    b: np.ndarray  # (fan_out,)
    activation: str  # "relu" | "sigmoid"


class RiskModel:
    """Trained classifier; parameters are frozen after construction."""

    def __init__(self, kind: str, layers: list[Layer], train_meta: dict):
        if kind not in (KIND_LR, KIND_MLP):
            raise ConfigurationError(f"unknown model kind {kind!r}")
        if layers[-1].activation != "sigmoid" or layers[-1].w.shape[1] != 1:
            raise ConfigurationError("final layer must be a single sigmoid unit")
        for a, b in zip(layers, layers[1:]):
            if a.w.shape[1] != b.w.shape[0]:
                raise ConfigurationError("layer shapes do not chain")
        for layer in layers:
            layer.w.setflags(write=False)
            layer.b.setflags(write=False)
        self.kind = kind
        self.layers = tuple(layers)
        self.train_meta = dict(train_meta)

    @property
    def input_width(self) -> int:
        return self.layers[0].w.shape[0]

    # LR accessors
    @property
    def weights(self) -> np.ndarray:
        if self.kind != KIND_LR:
            raise AttributeError("weights is defined for LR models only")
        return self.layers[0].w[:, 0]

    @property
    def bias(self) -> float:
        if self.kind != KIND_LR:
            raise AttributeError("bias is defined for LR models only")
        return float(self.layers[0].b[0])

    def _check_width(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        width = x.shape[-1] if x.ndim else -1
        if x.ndim not in (1, 2) or width != self.input_width:
            raise ShapeError(
                f"input width {width} does not match model width {self.input_width}"
            )
        return x

    def predict_logit(self, x) -> float | np.ndarray:
        x = self._check_width(x)
        squeeze = x.ndim == 1
        z = np.atleast_2d(x)
        for layer in self.layers[:-1]:
            z = z @ layer.w + layer.b
            if layer.activation == "relu":
                z = np.maximum(z, 0.0)
        z = (z @ self.layers[-1].w + self.layers[-1].b)[:, 0]
        return float(z[0]) if squeeze else z

    def predict_proba(self, x) -> float | np.ndarray:
        z = self.predict_logit(x)
        p = np.clip(_sigmoid(np.asarray(z)), _PROBA_EPS, 1.0 - _PROBA_EPS)
        return float(p) if np.ndim(z) == 0 else p

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "kind": self.kind,
            "layers": [
                {
                    "w": [[float(v) for v in row] for row in layer.w],
                    "b": [float(v) for v in layer.b],
                    "activation": layer.activation,
                }
                for layer in self.layers
            ],
            "train_meta": self.train_meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RiskModel":
        if d.get("version") != 1:
            raise ConfigurationError(f"unsupported model version {d.get('version')!r}")
        layers = [
            Layer(
                w=np.array(layer["w"], dtype=np.float64),
                b=np.array(layer["b"], dtype=np.float64),
                activation=layer["activation"],
            )
            for layer in d["layers"]
        ]
        return cls(d["kind"], layers, d.get("train_meta", {}))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_from_logits(z: np.ndarray, y: np.ndarray, pos_weight: float | None = None) -> float:
    """Mean binary cross-entropy, computed without forming probabilities."""
    # log(1 + e^z) - z*y, rewritten as max(z, 0) - z*y + log(1 + e^-|z|)
    per_row = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    if pos_weight is not None:
        w = np.where(y > 0.5, pos_weight, 1.0)
        return float(np.sum(w * per_row) / np.sum(w))
    return float(np.mean(per_row))


def bce_from_proba(p: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(p, _LOSS_EPS, 1.0 - _LOSS_EPS)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _forward(layers: tuple[Layer, ...], x: np.ndarray):
    """Forward pass keeping pre-activations for backprop."""
    acts = [x]
    for layer in layers[:-1]:
        z = acts[-1] @ layer.w + layer.b
        acts.append(np.maximum(z, 0.0) if layer.activation == "relu" else z)
    logits = (acts[-1] @ layers[-1].w + layers[-1].b)[:, 0]
    return acts, logits


def loss_and_grad(
    layers: tuple[Layer, ...],
    x: np.ndarray,
    y: np.ndarray,
    pos_weight: float | None = None,
) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """BCE loss and its analytic gradient for every layer's (w, b)."""
    acts, logits = _forward(layers, x)
    loss = bce_from_logits(logits, y, pos_weight)

    p = _sigmoid(logits)
    if pos_weight is not None:
        w = np.where(y > 0.5, pos_weight, 1.0)
        delta = (w * (p - y) / np.sum(w))[:, None]
    else:
        delta = ((p - y) / len(y))[:, None]

    grads: list[tuple[np.ndarray, np.ndarray]] = []
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        grads.append((acts[i].T @ delta, delta.sum(axis=0)))
        if i > 0:
            delta = delta @ layer.w.T
            if layers[i - 1].activation == "relu":
                delta = delta * (acts[i] > 0.0)
    grads.reverse()
    return loss, grads


def _init_layers(kind: str, n_features: int, config: TrainConfig, rng) -> list[Layer]:
    sizes = [n_features]
    if kind == KIND_MLP:
        sizes += list(config.hidden_sizes)
    sizes.append(1)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        last = i == len(sizes) - 2
        scale = np.sqrt(1.0 / fan_in) if last else np.sqrt(2.0 / fan_in)
        layers.append(
            Layer(
                w=rng.normal(0.0, scale, size=(fan_in, fan_out)),
                b=np.zeros(fan_out),
                activation="sigmoid" if last else "relu",
            )
        )
    return layers


def train(kind: str, x: np.ndarray, y: np.ndarray, config: TrainConfig) -> RiskModel:
    """Fit one model by mini-batch Adam; deterministic for a given seed."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or len(x) != len(y):
        raise ShapeError("features must be 2-D and aligned with labels")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelError("training labels contain a single class")

    rng = np.random.default_rng(config.seed)
    layers = _init_layers(kind, x.shape[1], config, rng)

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m = [(np.zeros_like(l.w), np.zeros_like(l.b)) for l in layers]
    v = [(np.zeros_like(l.w), np.zeros_like(l.b)) for l in layers]
    step = 0

    initial_loss = bce_from_logits(_forward(tuple(layers), x)[1], y, config.pos_weight)
    epoch_losses = []
    n = len(x)
    for epoch in range(config.epochs):
        perm = rng.permutation(n)
        for lo in range(0, n, config.batch_size):
            batch = perm[lo : lo + config.batch_size]
            _, grads = loss_and_grad(tuple(layers), x[batch], y[batch], config.pos_weight)
            step += 1
            for i, (gw, gb) in enumerate(grads):
                mw, mb = m[i]
                vw, vb = v[i]
                mw[:] = beta1 * mw + (1 - beta1) * gw
                mb[:] = beta1 * mb + (1 - beta1) * gb
                vw[:] = beta2 * vw + (1 - beta2) * gw**2
                vb[:] = beta2 * vb + (1 - beta2) * gb**2
                corr1 = 1 - beta1**step
                corr2 = 1 - beta2**step
                new_w = layers[i].w - config.learning_rate * (mw / corr1) / (
                    np.sqrt(vw / corr2) + eps
                )
                new_b = layers[i].b - config.learning_rate * (mb / corr1) / (
                    np.sqrt(vb / corr2) + eps
                )
                layers[i] = Layer(new_w, new_b, layers[i].activation)
        epoch_loss = bce_from_logits(_forward(tuple(layers), x)[1], y, config.pos_weight)
        if not np.isfinite(epoch_loss):
            raise DivergenceError(f"training loss became non-finite at epoch {epoch}")
        epoch_losses.append(epoch_loss)

    train_meta = {
        "seed": config.seed,
        "epochs": config.epochs,
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "hidden_sizes": list(config.hidden_sizes) if kind == KIND_MLP else [],
        "pos_weight": config.pos_weight,
        "initial_loss": initial_loss,
        "final_loss": epoch_losses[-1],
        "epoch_losses": epoch_losses,
    }
    return RiskModel(kind, layers, train_meta)


def train_selected(
    kind: str,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    config: TrainConfig,
) -> RiskModel:
    """Train over the candidate grid and keep the best validation model."""
    from .metrics import auc_prc, auc_roc

    if not config.candidates:
        return train(kind, x_train, y_train, config)

    best = None
    for rank, overrides in enumerate(config.candidates):
        candidate = config.replace(**overrides)
        model = train(kind, x_train, y_train, candidate)
        scores = model.predict_proba(x_val)
        key = (auc_roc(scores, y_val), auc_prc(scores, y_val), -rank)
        if best is None or key > best[0]:
            best = (key, model, overrides)
    _, model, overrides = best
    model.train_meta["selected_candidate"] = dict(overrides)
    return model
