"""Activation functions and their gain-sign rules.

Five activations are supported: identity, tanh, column-wise softmax, leaky
ReLU, and a staircase (monotone non-decreasing step function). All are
monotone non-decreasing, so the sign of their gain is +1 everywhere; the
staircase has impulse-like gain at its jumps whose magnitude is unusable
but whose sign is still +1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .backend import kernels as _K
from .errors import UnsupportedPolicyError
from .matrix import Matrix, _zero_buf


class ActivationKind(enum.Enum):
    IDENTITY = "identity"
    TANH = "tanh"
    SOFTMAX = "softmax"
    LEAKY_RELU = "leaky-relu"
    STAIRCASE = "staircase"


@dataclass(frozen=True)
class Activation:
    """An activation choice plus its shape parameters.

    slope applies to leaky ReLU only (must be > 0 so the gain never dies);
    step_width/step_height apply to the staircase only (height > 0 keeps it
    monotone non-decreasing).
    """

    kind: ActivationKind
    slope: float = 0.01
    step_width: float = 1.0
    step_height: float = 1.0

    def __post_init__(self):
        if self.kind is ActivationKind.LEAKY_RELU and not self.slope > 0.0:
            raise ValueError(f"leaky ReLU slope must be > 0, got {self.slope}")
        if self.kind is ActivationKind.STAIRCASE:
            if not self.step_width > 0.0:
                raise ValueError(f"staircase step width must be > 0, got {self.step_width}")
            if not self.step_height > 0.0:
                raise ValueError(f"staircase step height must be > 0, got {self.step_height}")

    @classmethod
    def identity(cls) -> "Activation":
        return cls(ActivationKind.IDENTITY)

    @classmethod
    def tanh(cls) -> "Activation":
        return cls(ActivationKind.TANH)

    @classmethod
    def softmax(cls) -> "Activation":
        return cls(ActivationKind.SOFTMAX)

    @classmethod
    def leaky_relu(cls, slope: float = 0.01) -> "Activation":
        return cls(ActivationKind.LEAKY_RELU, slope=slope)

    @classmethod
    def staircase(cls, step_width: float = 1.0, step_height: float = 1.0) -> "Activation":
        return cls(ActivationKind.STAIRCASE, step_width=step_width, step_height=step_height)


def apply_activation(act: Activation, z: Matrix) -> Matrix:
    """Evaluate the activation entrywise (column-wise for softmax).

    Softmax treats each column as one sample's logit vector and normalizes
    it to sum to 1. The staircase returns step_height * floor(z / step_width).
    """
    out = _zero_buf(z.size)
    k = act.kind
    if k is ActivationKind.IDENTITY:
        return z.copy()
    if k is ActivationKind.TANH:
        _K.tanh_fill(z.data, out, z.size)
    elif k is ActivationKind.SOFTMAX:
        _K.softmax_columns(z.data, out, z.rows, z.cols)
    elif k is ActivationKind.LEAKY_RELU:
        _K.leaky_relu_fill(z.data, out, z.size, act.slope)
    elif k is ActivationKind.STAIRCASE:
        _K.staircase_fill(z.data, out, z.size, act.step_width, act.step_height)
    else:  # pragma: no cover
        raise ValueError(f"unknown activation kind {k}")
    return Matrix._raw(z.rows, z.cols, out)


def gain_sign(act: Activation) -> int:
    """Sign of the activation's gain: +1 for every supported activation.

    All five are monotone non-decreasing, and a zero gain carries sign +1
    by the sign convention, so the backward-gain sign reduces to the sign
    of the input alone.
    """
    if not isinstance(act.kind, ActivationKind):  # pragma: no cover
        raise ValueError(f"unsupported activation {act!r}")
    return 1


def gain_from_output(act: Activation, y: Matrix) -> Matrix:
    """Gain magnitude of the activation, recovered from its own output.

    identity -> 1; tanh -> 1 - y^2; leaky ReLU -> slope where y < 0 else 1;
    softmax -> y(1 - y) (the diagonal sensitivity, matching the per-weight
    independence assumption). The staircase has no usable magnitude.
    """
    k = act.kind
    if k is ActivationKind.IDENTITY:
        return Matrix.full(y.rows, y.cols, 1.0)
    out = _zero_buf(y.size)
    if k is ActivationKind.TANH:
        _K.tanh_gain_from_output(y.data, out, y.size)
    elif k is ActivationKind.LEAKY_RELU:
        _K.leaky_gain_from_output(y.data, out, y.size, act.slope)
    elif k is ActivationKind.SOFTMAX:
        _K.softmax_gain_from_output(y.data, out, y.size)
    elif k is ActivationKind.STAIRCASE:
        raise UnsupportedPolicyError(
            "staircase gain is impulse-like at jumps and zero elsewhere; "
            "only its sign is usable"
        )
    else:  # pragma: no cover
        raise ValueError(f"unknown activation kind {k}")
    return Matrix._raw(y.rows, y.cols, out)


def parse_activation(text: str) -> Activation:
    """Parse 'identity' | 'tanh' | 'softmax' | 'leaky-relu:SLOPE' | 'staircase:W:H'."""
    parts = text.strip().split(":")
    name = parts[0]
    if name == "identity" and len(parts) == 1:
        return Activation.identity()
    if name == "tanh" and len(parts) == 1:
        return Activation.tanh()
    if name == "softmax" and len(parts) == 1:
        return Activation.softmax()
    if name == "leaky-relu" and len(parts) <= 2:
        slope = float(parts[1]) if len(parts) == 2 else 0.01
        return Activation.leaky_relu(slope)
    if name == "staircase" and len(parts) <= 3:
        width = float(parts[1]) if len(parts) >= 2 else 1.0
        height = float(parts[2]) if len(parts) == 3 else 1.0
        return Activation.staircase(width, height)
    raise ValueError(
        f"cannot parse activation {text!r}; expected identity, tanh, softmax, "
        "leaky-relu:SLOPE, or staircase:WIDTH:HEIGHT"
    )


def activation_tag(act: Activation) -> str:
    """Inverse of parse_activation, used in config echoes and checkpoints."""
    k = act.kind
    if k is ActivationKind.LEAKY_RELU:
        return f"leaky-relu:{act.slope!r}"
    if k is ActivationKind.STAIRCASE:
        return f"staircase:{act.step_width!r}:{act.step_height!r}"
    return k.value
