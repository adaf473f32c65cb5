"""Sign policies: how the backward gain enters the error matrix.

The backward gain of one weight is (activation gain) * (its input), and all
supported activations have gain sign +1, so the input-side factor carries
the whole sign. The policy decides what function of that input is used:

  sign-only          s = sgn(x)           pure feedback learning
  beta               s = x                gradient-descent special case
                                          (the activation-gain magnitude is
                                          folded in on the difference side,
                                          where it is defined per output)
  odd-power:N        s = x^N, N odd       sign-preserving powers
  magnitude          s = sgn(x)|x| = x    magnitude-weighted feedback
  signed-diff        s = sgn(x), and the trainer additionally replaces the
                     output difference by its elementwise sign
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .activations import Activation, ActivationKind
from .backend import kernels as _K
from .errors import UnsupportedPolicyError
from .matrix import Matrix, _zero_buf


def sgn(x: float) -> int:
    """Two-valued sign: +1 for x >= 0 (zero and -0.0 included), -1 for x < 0."""
    if not math.isfinite(x):
        raise ValueError(f"sgn needs a finite value, got {x}")
    return 1 if x >= 0.0 else -1


class PolicyKind(enum.Enum):
    SIGN_ONLY = "sign"
    RAW_BETA = "beta"
    ODD_POWER = "odd-power"
    MAGNITUDE_WEIGHTED = "magnitude"
    SIGNED_DIFFERENCE = "signed-diff"


@dataclass(frozen=True)
class SignPolicy:
    kind: PolicyKind
    power: int = 1

    def __post_init__(self):
        if self.kind is PolicyKind.ODD_POWER:
            if self.power < 1 or self.power % 2 == 0:
                raise ValueError(f"odd-power exponent must be odd and >= 1, got {self.power}")

    @classmethod
    def sign_only(cls) -> "SignPolicy":
        return cls(PolicyKind.SIGN_ONLY)

    @classmethod
    def raw_beta(cls) -> "SignPolicy":
        return cls(PolicyKind.RAW_BETA)

    @classmethod
    def odd_power(cls, n: int) -> "SignPolicy":
        return cls(PolicyKind.ODD_POWER, power=n)

    @classmethod
    def magnitude_weighted(cls) -> "SignPolicy":
        return cls(PolicyKind.MAGNITUDE_WEIGHTED)

    @classmethod
    def signed_difference(cls) -> "SignPolicy":
        return cls(PolicyKind.SIGNED_DIFFERENCE)

    @property
    def signs_difference(self) -> bool:
        """True when the output difference must be replaced by its sign."""
        return self.kind is PolicyKind.SIGNED_DIFFERENCE

    @property
    def uses_gain_magnitude(self) -> bool:
        """True when the activation-gain magnitude enters the error matrix."""
        return self.kind in (PolicyKind.RAW_BETA, PolicyKind.ODD_POWER)


def apply_sign_policy(policy: SignPolicy, x_matrix: Matrix, act: Activation) -> Matrix:
    """Input-side factor S of the error matrix, same shape as x_matrix.

    Raises UnsupportedPolicyError for beta/odd-power with a staircase
    activation, whose gain magnitude is undefined.
    """
    if policy.uses_gain_magnitude and act.kind is ActivationKind.STAIRCASE:
        raise UnsupportedPolicyError(
            f"{policy.kind.value} needs the activation gain magnitude, which a "
            "staircase activation does not have; use sign-only"
        )
    k = policy.kind
    if k in (PolicyKind.SIGN_ONLY, PolicyKind.SIGNED_DIFFERENCE):
        return x_matrix.sgn()
    if k in (PolicyKind.RAW_BETA, PolicyKind.MAGNITUDE_WEIGHTED):
        # sgn(x)|x| = x, and for beta the input-side factor of the backward
        # gain is x itself.
        return x_matrix.copy()
    if k is PolicyKind.ODD_POWER:
        out = _zero_buf(x_matrix.size)
        _K.odd_power(x_matrix.data, out, x_matrix.size, policy.power)
        return Matrix._raw(x_matrix.rows, x_matrix.cols, out)
    raise ValueError(f"unknown policy kind {k}")  # pragma: no cover


def parse_policy(text: str) -> SignPolicy:
    """Parse 'sign' | 'beta' | 'odd-power:N' | 'magnitude' | 'signed-diff'."""
    parts = text.strip().split(":")
    name = parts[0]
    if name == "sign" and len(parts) == 1:
        return SignPolicy.sign_only()
    if name == "beta" and len(parts) == 1:
        return SignPolicy.raw_beta()
    if name == "odd-power" and len(parts) == 2:
        return SignPolicy.odd_power(int(parts[1]))
    if name == "magnitude" and len(parts) == 1:
        return SignPolicy.magnitude_weighted()
    if name == "signed-diff" and len(parts) == 1:
        return SignPolicy.signed_difference()
    raise ValueError(
        f"cannot parse policy {text!r}; expected sign, beta, odd-power:N, "
        "magnitude, or signed-diff"
    )


def policy_tag(policy: SignPolicy) -> str:
    if policy.kind is PolicyKind.ODD_POWER:
        return f"odd-power:{policy.power}"
    return policy.kind.value
