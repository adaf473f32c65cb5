"""Single-layer training driven by the feedback error matrix.

The model is y' = activation(W^T x) over an input block whose last row is
all ones (the bias trick). One training step forms the error matrix
E = S . D^T from the input-side sign factor S and the output difference
D = Y - Y', then relaxes the weights toward the forward block's estimate
A * E:

    W <- W + (A * E - W) * rate

Note the consequence: the settled weights satisfy W = A * E(W), not
E(W) = 0, so with E exactly zero the weights decay by (1 - rate) per step.
That is the literal update rule and is kept as such.

A squared-error gradient-descent baseline is included for equivalence
checks: with the `beta` policy the feedback error matrix equals
(m/2) times the negative gradient of the mean squared error.

fit is sequential across iterations; train_step mutates the model in place
and is deterministic given its inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .activations import Activation, ActivationKind, apply_activation, gain_from_output
from .backend import kernels as _K
from .errors import NonFiniteError, ShapeMismatchError, UnsupportedPolicyError
from .matrix import Matrix, _zero_buf
from .policies import SignPolicy, apply_sign_policy


@dataclass
class SingleLayerModel:
    """Weight matrix of shape (n_inputs+1) x n_outputs plus its activation.

    The last weight row is the bias row, matching the ones row appended to
    the data block.
    """

    weights: Matrix
    activation: Activation


@dataclass(frozen=True)
class TrainConfig:
    forward_gain: float = 100.0
    rate: float = 0.01
    max_iters: int = 100
    batch_size: int | None = None  # None trains on the full batch
    policy: SignPolicy = field(default_factory=SignPolicy.sign_only)
    seed: int = 0
    normalize_error_by_batch: bool = False

    def __post_init__(self):
        if not self.forward_gain > 0.0:
            raise ValueError(f"forward_gain must be positive, got {self.forward_gain}")
        if not (0.0 < self.rate <= 1.0):
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


@dataclass
class MetricTrace:
    """One record per completed iteration: (iteration, mse, accuracy).

    mse is the mean squared output difference over the full dataset;
    accuracy is the argmax match rate for one-hot targets (None for
    single-output regression).
    """

    records: list[tuple[int, float, float | None]] = field(default_factory=list)

    @property
    def mses(self) -> list[float]:
        return [r[1] for r in self.records]

    @property
    def final_mse(self) -> float:
        return self.records[-1][1]


def init_weights(n_rows: int, n_cols: int, seed: int) -> Matrix:
    """Seeded uniform init in [-r, r] with r = 1/sqrt(n_rows), row-major order."""
    r = 1.0 / (n_rows ** 0.5)
    rng = random.Random(f"init:{seed}")
    return Matrix(n_rows, n_cols, [rng.uniform(-r, r) for _ in range(n_rows * n_cols)])


def forward_predict(model: SingleLayerModel, x_block: Matrix) -> Matrix:
    """Y' = activation(W^T X), shape n_outputs x n_samples."""
    if x_block.rows != model.weights.rows:
        raise ShapeMismatchError(
            f"input block has {x_block.rows} rows but the model expects "
            f"{model.weights.rows} (features plus bias row)"
        )
    return apply_activation(model.activation, model.weights.matmul_tn(x_block))


def compute_error_matrix(
    x_block: Matrix,
    y_target: Matrix,
    y_pred: Matrix,
    policy: SignPolicy,
    act: Activation,
    normalize_by_batch: bool = False,
) -> Matrix:
    """Error matrix E = S . D^T of shape (n_inputs+1) x n_outputs.

    D = y_target - y_pred; the signed-diff policy replaces D by its
    three-valued sign first (exact zeros stay zero, so a perfect fit yields
    E = 0). The beta and odd-power policies fold the activation-gain
    magnitude into D, where it is defined per output unit; the input-side
    factor S comes from apply_sign_policy. By default E is the plain sum
    over samples; normalize_by_batch divides by the batch size.
    """
    if y_target.shape != y_pred.shape:
        raise ShapeMismatchError(
            f"target shape {y_target.shape} != prediction shape {y_pred.shape}"
        )
    if x_block.cols != y_target.cols:
        raise ShapeMismatchError(
            f"input block has {x_block.cols} samples but targets have {y_target.cols}"
        )
    diff = y_target.sub(y_pred)
    if policy.signs_difference:
        diff = diff.sign3()
    if policy.uses_gain_magnitude:
        gain = gain_from_output(act, y_pred)
        if policy.power > 1:
            out = _zero_buf(gain.size)
            _K.odd_power(gain.data, out, gain.size, policy.power)
            gain = Matrix._raw(gain.rows, gain.cols, out)
        diff = diff.hadamard(gain)
    s = apply_sign_policy(policy, x_block, act)
    e = s.matmul_nt(diff)
    if normalize_by_batch:
        e = e.scale(1.0 / x_block.cols)
    return e


def train_step(
    model: SingleLayerModel, x_block: Matrix, y_target: Matrix, cfg: TrainConfig
) -> SingleLayerModel:
    """One relaxation step W <- W + (A*E - W)*rate, in place on the model.

    Raises NonFiniteError if the updated weights contain NaN or infinity.
    """
    y_pred = forward_predict(model, x_block)
    e = compute_error_matrix(
        x_block, y_target, y_pred, cfg.policy, model.activation,
        normalize_by_batch=cfg.normalize_error_by_batch,
    )
    w = model.weights
    ok = _K.relax_update(w.data, e.data, w.size, cfg.forward_gain, cfg.rate)
    if not ok:
        raise NonFiniteError(
            "weights became non-finite during training; lower the rate or "
            "forward gain, or normalize the error by batch size"
        )
    return model


def _epoch_batches(n_samples: int, batch_size: int, rng: random.Random, shuffle: bool = True):
    order = list(range(n_samples))
    if shuffle:
        rng.shuffle(order)
    for start in range(0, n_samples, batch_size):
        yield order[start:start + batch_size]


def _dataset_metrics(
    model: SingleLayerModel, x_block: Matrix, y_target: Matrix, labels
) -> tuple[float, float | None]:
    y_all = forward_predict(model, x_block)
    mse = y_all.mean_sq_diff(y_target)
    if labels is None:
        return mse, None
    hits = _K.count_label_matches(y_all.data, y_all.rows, y_all.cols, labels)
    return mse, hits / y_all.cols


def fit(
    model: SingleLayerModel, x_block: Matrix, y_target: Matrix, cfg: TrainConfig
) -> tuple[SingleLayerModel, MetricTrace]:
    """Run cfg.max_iters training steps, full-batch or over shuffled mini-batches.

    Each iteration is one train_step on one batch; batches are reshuffled
    every epoch with a generator derived from cfg.seed, so identical config
    and seed reproduce the run bitwise. Metrics are evaluated on the full
    dataset after every iteration.
    """
    trace = MetricTrace()
    if cfg.max_iters == 0:
        return model, trace

    m = x_block.cols
    labels = None
    if y_target.rows >= 2:
        from array import array

        labels = array("q", y_target.argmax_columns())

    batch = cfg.batch_size if cfg.batch_size is not None else m
    use_batches = batch < m
    rng = random.Random(f"batches:{cfg.seed}")
    batch_iter = _epoch_batches(m, batch, rng) if use_batches else None

    for it in range(1, cfg.max_iters + 1):
        if use_batches:
            try:
                idx = next(batch_iter)
            except StopIteration:
                batch_iter = _epoch_batches(m, batch, rng)
                idx = next(batch_iter)
            xb = x_block.gather_columns(idx)
            yb = y_target.gather_columns(idx)
        else:
            xb, yb = x_block, y_target
        train_step(model, xb, yb, cfg)
        mse, acc = _dataset_metrics(model, x_block, y_target, labels)
        trace.records.append((it, mse, acc))
    return model, trace


def gd_baseline_error(
    x_block: Matrix, y_target: Matrix, y_pred: Matrix, act: Activation
) -> Matrix:
    """Negative gradient of the mean squared error with respect to W.

    Entries are (2/m) * sum_k (y - y')_jk * gain_jk * x_ik. For the
    staircase activation the gradient is zero everywhere off the step
    boundaries, so the result is the zero matrix: this is exactly why a
    gradient method cannot learn it.
    """
    if y_target.shape != y_pred.shape:
        raise ShapeMismatchError(
            f"target shape {y_target.shape} != prediction shape {y_pred.shape}"
        )
    if x_block.cols != y_target.cols:
        raise ShapeMismatchError(
            f"input block has {x_block.cols} samples but targets have {y_target.cols}"
        )
    if act.kind is ActivationKind.STAIRCASE:
        return Matrix.zeros(x_block.rows, y_target.rows)
    if act.kind is ActivationKind.SOFTMAX:
        raise UnsupportedPolicyError(
            "the squared-error gradient baseline covers elementwise "
            "activations only (identity, tanh, leaky-relu, staircase)"
        )
    diff = y_target.sub(y_pred).hadamard(gain_from_output(act, y_pred))
    return x_block.matmul_nt(diff).scale(2.0 / x_block.cols)


def fit_gd(
    model: SingleLayerModel,
    x_block: Matrix,
    y_target: Matrix,
    learning_rate: float,
    max_iters: int,
) -> tuple[SingleLayerModel, MetricTrace]:
    """Plain squared-error gradient descent, as the comparison baseline.

    W <- W + lr * (negative gradient), full batch, metrics per iteration.
    """
    trace = MetricTrace()
    labels = None
    if y_target.rows >= 2:
        from array import array

        labels = array("q", y_target.argmax_columns())
    for it in range(1, max_iters + 1):
        y_pred = forward_predict(model, x_block)
        g = gd_baseline_error(x_block, y_target, y_pred, model.activation)
        wbuf = model.weights.data
        gbuf = g.data
        for i in range(len(wbuf)):
            wbuf[i] += learning_rate * gbuf[i]
        if not model.weights.is_finite():
            raise NonFiniteError("gradient-descent weights became non-finite")
        mse, acc = _dataset_metrics(model, x_block, y_target, labels)
        trace.records.append((it, mse, acc))
    return model, trace
