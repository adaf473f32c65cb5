"""Multi-layer fully-connected networks trained by difference backpropagation.

Stacked layers are treated as one backward function. The output difference
d = Y - Y' is carried to earlier layers through the elementwise sign of the
weight matrices (bias rows excluded):

    d_prev = sgn(W_nobias) . d

so only weight signs, never magnitudes, steer the backward flow. Each
layer then forms the same error matrix as the single-layer trainer, with
its input activations in the role of x, and relaxes its weights toward
A * E under a per-weight rate. Rates adapt multiplicatively from the
agreement of consecutive error signs (grow on agreement, shrink on flips,
freeze on zeros), clamped to a configured band.

Training steps are sequential; layer error matrices within one step are
independent once all difference vectors exist.
"""

from __future__ import annotations

import random
import struct
import sys
from array import array
from dataclasses import dataclass, field

from .activations import Activation, ActivationKind, apply_activation
from .backend import kernels as _K
from .errors import CheckpointError, NonFiniteError, ShapeMismatchError
from .matrix import Matrix
from .policies import SignPolicy
from .trainer import _epoch_batches


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: Activation

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ValueError(f"layer dims must be positive, got {self.in_dim}->{self.out_dim}")


@dataclass
class DeepLayer:
    """One layer's weights ((in_dim+1) x out_dim, bias row last), activation,
    per-weight rates, and the error sign remembered from the previous step."""

    weights: Matrix
    activation: Activation
    rates: Matrix
    prev_error_sign: Matrix

    @property
    def in_dim(self) -> int:
        return self.weights.rows - 1

    @property
    def out_dim(self) -> int:
        return self.weights.cols


@dataclass
class DeepModel:
    layers: list[DeepLayer]

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim


@dataclass(frozen=True)
class DeepTrainConfig:
    forward_gain: float = 100.0
    rate: float = 0.01  # initial per-weight rate
    policy: SignPolicy = field(default_factory=SignPolicy.magnitude_weighted)
    eta_plus: float = 1.2
    eta_minus: float = 0.5
    rate_min: float = 1e-6
    rate_max: float = 0.1
    adapt_rates: bool = True
    normalize_error_by_batch: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.forward_gain > 0.0:
            raise ValueError(f"forward_gain must be positive, got {self.forward_gain}")
        if not (0.0 < self.rate <= 1.0):
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")
        if not self.eta_plus > 1.0:
            raise ValueError(f"eta_plus must be > 1, got {self.eta_plus}")
        if not (0.0 < self.eta_minus < 1.0):
            raise ValueError(f"eta_minus must be in (0, 1), got {self.eta_minus}")
        if not (0.0 < self.rate_min <= self.rate_max <= 1.0):
            raise ValueError(
                f"need 0 < rate_min <= rate_max <= 1, got [{self.rate_min}, {self.rate_max}]"
            )
        if self.adapt_rates and not (self.rate_min <= self.rate <= self.rate_max):
            raise ValueError(
                f"initial rate {self.rate} outside the adaptation band "
                f"[{self.rate_min}, {self.rate_max}]"
            )


def build_model(specs: list[LayerSpec], seed: int, initial_rate: float) -> DeepModel:
    """Seeded model with uniform [-r, r] weights, r = 1/sqrt(in_dim+1) per layer."""
    if not specs:
        raise ValueError("need at least one layer")
    for a, b in zip(specs, specs[1:]):
        if a.out_dim != b.in_dim:
            raise ShapeMismatchError(
                f"layer output {a.out_dim} does not match next layer input {b.in_dim}"
            )
    rng = random.Random(f"init:{seed}")
    layers = []
    for spec in specs:
        rows, cols = spec.in_dim + 1, spec.out_dim
        r = 1.0 / (rows ** 0.5)
        weights = Matrix(rows, cols, [rng.uniform(-r, r) for _ in range(rows * cols)])
        layers.append(
            DeepLayer(
                weights=weights,
                activation=spec.activation,
                rates=Matrix.full(rows, cols, initial_rate),
                prev_error_sign=Matrix.zeros(rows, cols),
            )
        )
    return DeepModel(layers)


def forward_pass(model: DeepModel, x_block: Matrix) -> list[Matrix]:
    """All layer outputs [y0, y1, ..., yL], with y0 = x_block.

    x_block must already carry its bias row; a ones row is appended to each
    hidden output before it feeds the next layer (the returned hidden
    outputs are the raw activations, without that row).
    """
    if x_block.rows != model.layers[0].weights.rows:
        raise ShapeMismatchError(
            f"input block has {x_block.rows} rows but the first layer expects "
            f"{model.layers[0].weights.rows}"
        )
    outputs = [x_block]
    current = x_block
    for i, layer in enumerate(model.layers):
        if i > 0:
            current = current.with_bias_row()
        current = apply_activation(layer.activation, layer.weights.matmul_tn(current))
        outputs.append(current)
    return outputs


def predict(model: DeepModel, x_block: Matrix) -> Matrix:
    return forward_pass(model, x_block)[-1]


def backpropagate_difference(model: DeepModel, d_top: Matrix) -> list[Matrix]:
    """Difference vectors for every layer, last to first.

    d for the last layer is d_top (out_dim x m); each earlier layer gets
    sgn(W_nobias) . d of the layer above it. Bias rows are dropped before
    taking signs, so bias weights never route difference backward. Only the
    signs of W matter: scaling W by any positive factor leaves the result
    bitwise unchanged.
    """
    last = model.layers[-1]
    if d_top.rows != last.out_dim:
        raise ShapeMismatchError(
            f"top difference has {d_top.rows} rows but the last layer outputs {last.out_dim}"
        )
    diffs = [d_top]
    d = d_top
    for layer in reversed(model.layers[1:]):
        d = layer.weights.drop_last_row().sgn().matmul(d)
        diffs.append(d)
    diffs.reverse()
    return diffs


def layer_error(
    d_layer: Matrix, y_prev: Matrix, policy: SignPolicy, act: Activation
) -> Matrix:
    """E = S . d^T for one layer, shape (in_dim+1) x out_dim.

    y_prev is the layer's input block with bias row appended; it plays the
    role x plays in the single-layer error matrix, with d in the role of
    the output difference. act feeds the policy's gain-sign rule.
    """
    from .policies import apply_sign_policy

    if d_layer.cols != y_prev.cols:
        raise ShapeMismatchError(
            f"difference has {d_layer.cols} samples but inputs have {y_prev.cols}"
        )
    return apply_sign_policy(policy, y_prev, act).matmul_nt(d_layer)


def adaptive_rate_update(
    prev_sign: Matrix,
    curr_sign: Matrix,
    rates: Matrix,
    eta_plus: float,
    eta_minus: float,
    rate_min: float,
    rate_max: float,
) -> Matrix:
    """Entrywise rate adaptation from consecutive error signs.

    Agreeing nonzero signs multiply by eta_plus, opposing signs by
    eta_minus, a zero on either side leaves the rate as is; results are
    clamped to [rate_min, rate_max].
    """
    if prev_sign.shape != curr_sign.shape or prev_sign.shape != rates.shape:
        raise ShapeMismatchError(
            f"sign/rate shapes differ: {prev_sign.shape}, {curr_sign.shape}, {rates.shape}"
        )
    out = Matrix.zeros(rates.rows, rates.cols)
    _K.rprop_rates(
        prev_sign.data, curr_sign.data, rates.data, out.data, rates.size,
        eta_plus, eta_minus, rate_min, rate_max,
    )
    return out


def deep_train_step(
    model: DeepModel, x_block: Matrix, y_target: Matrix, cfg: DeepTrainConfig
) -> DeepModel:
    """One training step over all layers, in place on the model.

    Forward pass, difference backpropagation, then per layer: form E,
    relax the weights toward forward_gain * E under the current per-weight
    rates, and finally adapt the rates from the new error signs.
    """
    if y_target.rows != model.out_dim:
        raise ShapeMismatchError(
            f"targets have {y_target.rows} rows but the model outputs {model.out_dim}"
        )
    outputs = forward_pass(model, x_block)
    d_top = y_target.sub(outputs[-1])
    if cfg.policy.signs_difference:
        d_top = d_top.sign3()
    diffs = backpropagate_difference(model, d_top)
    m = x_block.cols
    for i, layer in enumerate(model.layers):
        y_prev = outputs[i] if i == 0 else outputs[i].with_bias_row()
        e = layer_error(diffs[i], y_prev, cfg.policy, layer.activation)
        if cfg.normalize_error_by_batch:
            e = e.scale(1.0 / m)
        w = layer.weights
        ok = _K.relax_update_per_weight(w.data, e.data, layer.rates.data, w.size, cfg.forward_gain)
        if not ok:
            raise NonFiniteError(
                f"layer {i} weights became non-finite; lower the rate or forward "
                "gain, or normalize the error by batch size"
            )
        curr_sign = e.sign3()
        if cfg.adapt_rates:
            layer.rates = adaptive_rate_update(
                layer.prev_error_sign, curr_sign, layer.rates,
                cfg.eta_plus, cfg.eta_minus, cfg.rate_min, cfg.rate_max,
            )
        layer.prev_error_sign = curr_sign
    return model


@dataclass
class EpochRecord:
    epoch: int
    train_accuracy: float
    test_accuracy: float | None
    train_mse: float


def _labels_of(y_block: Matrix) -> array:
    return array("q", y_block.argmax_columns())


def evaluate(model: DeepModel, x_block: Matrix, y_block: Matrix) -> tuple[float, float]:
    """(accuracy, mse) of the model on one prepared dataset."""
    pred = predict(model, x_block)
    labels = _labels_of(y_block)
    hits = _K.count_label_matches(pred.data, pred.rows, pred.cols, labels)
    return hits / pred.cols, pred.mean_sq_diff(y_block)


def fit_deep(
    model: DeepModel,
    x_train: Matrix,
    y_train: Matrix,
    cfg: DeepTrainConfig,
    epochs: int,
    batch_size: int,
    x_test: Matrix | None = None,
    y_test: Matrix | None = None,
) -> list[EpochRecord]:
    """Train for whole epochs of shuffled mini-batches; evaluate per epoch.

    Batch order comes from a generator derived from cfg.seed and is
    reshuffled every epoch, so runs are bitwise reproducible.
    """
    if epochs < 0:
        raise ValueError(f"epochs must be >= 0, got {epochs}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    m = x_train.cols
    rng = random.Random(f"batches:{cfg.seed}")
    records = []
    for epoch in range(1, epochs + 1):
        for idx in _epoch_batches(m, min(batch_size, m), rng):
            deep_train_step(
                model, x_train.gather_columns(idx), y_train.gather_columns(idx), cfg
            )
        train_acc, train_mse = evaluate(model, x_train, y_train)
        test_acc = None
        if x_test is not None and y_test is not None:
            test_acc, _ = evaluate(model, x_test, y_test)
        records.append(EpochRecord(epoch, train_acc, test_acc, train_mse))
    return records


# ---------------------------------------------------------------------------
# checkpoint format
#
# Binary, little-endian throughout:
#   magic "FBNW" | u32 version=1 | u32 layer_count | u8 has_state
#   per layer: u32 in_dim, u32 out_dim, u8 activation code, f64 p1, f64 p2
#   per layer: (in_dim+1)*out_dim weights as f64, row-major
#   if has_state: the same-shaped rate matrices, then prev-sign matrices
# load(save(model)) reproduces the model bit-exactly.

_CKPT_MAGIC = b"FBNW"
_CKPT_VERSION = 1
_ACT_CODES = {
    ActivationKind.IDENTITY: 0,
    ActivationKind.TANH: 1,
    ActivationKind.SOFTMAX: 2,
    ActivationKind.LEAKY_RELU: 3,
    ActivationKind.STAIRCASE: 4,
}
_ACT_FROM_CODE = {v: k for k, v in _ACT_CODES.items()}


def _act_params(act: Activation) -> tuple[float, float]:
    if act.kind is ActivationKind.LEAKY_RELU:
        return act.slope, 0.0
    if act.kind is ActivationKind.STAIRCASE:
        return act.step_width, act.step_height
    return 0.0, 0.0


def _act_from(code: int, p1: float, p2: float) -> Activation:
    kind = _ACT_FROM_CODE.get(code)
    if kind is None:
        raise CheckpointError(f"unknown activation code {code}")
    if kind is ActivationKind.LEAKY_RELU:
        return Activation.leaky_relu(p1)
    if kind is ActivationKind.STAIRCASE:
        return Activation.staircase(p1, p2)
    return Activation(kind)


def _matrix_bytes(mat: Matrix) -> bytes:
    buf = mat.data
    if sys.byteorder != "little":  # pragma: no cover
        buf = array("d", buf)
        buf.byteswap()
    return buf.tobytes()


def _matrix_from(blob: bytes, rows: int, cols: int) -> Matrix:
    buf = array("d")
    buf.frombytes(blob)
    if sys.byteorder != "little":  # pragma: no cover
        buf.byteswap()
    return Matrix._raw(rows, cols, buf)


def save_checkpoint(model: DeepModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<IIB", _CKPT_VERSION, len(model.layers), 1))
        for layer in model.layers:
            p1, p2 = _act_params(layer.activation)
            fh.write(
                struct.pack(
                    "<IIBdd", layer.in_dim, layer.out_dim,
                    _ACT_CODES[layer.activation.kind], p1, p2,
                )
            )
        for layer in model.layers:
            fh.write(_matrix_bytes(layer.weights))
        for layer in model.layers:
            fh.write(_matrix_bytes(layer.rates))
        for layer in model.layers:
            fh.write(_matrix_bytes(layer.prev_error_sign))


def load_checkpoint(path) -> DeepModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _CKPT_MAGIC:
        raise CheckpointError(f"not a model checkpoint: bad magic {blob[:4]!r}")
    version, n_layers, has_state = struct.unpack_from("<IIB", blob, 4)
    if version != _CKPT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    offset = 4 + struct.calcsize("<IIB")
    headers = []
    for _ in range(n_layers):
        in_dim, out_dim, code, p1, p2 = struct.unpack_from("<IIBdd", blob, offset)
        offset += struct.calcsize("<IIBdd")
        headers.append((in_dim, out_dim, _act_from(code, p1, p2)))

    def take(rows: int, cols: int) -> Matrix:
        nonlocal offset
        nbytes = rows * cols * 8
        if offset + nbytes > len(blob):
            raise CheckpointError("checkpoint payload is truncated")
        mat = _matrix_from(blob[offset:offset + nbytes], rows, cols)
        offset += nbytes
        return mat

    weights = [take(ind + 1, outd) for ind, outd, _ in headers]
    if has_state:
        rates = [take(ind + 1, outd) for ind, outd, _ in headers]
        signs = [take(ind + 1, outd) for ind, outd, _ in headers]
    else:
        rates = [Matrix.full(w.rows, w.cols, 0.01) for w in weights]
        signs = [Matrix.zeros(w.rows, w.cols) for w in weights]
    layers = [
        DeepLayer(weights=w, activation=act, rates=r, prev_error_sign=s)
        for w, r, s, (_, _, act) in zip(weights, rates, signs, headers)
    ]
    return DeepModel(layers)
