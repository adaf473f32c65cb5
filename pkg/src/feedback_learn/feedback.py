"""Scalar negative-feedback loop that inverts a monotone function.

A high-gain forward block F(e) = A*e driven by the error between the loop
input and the output of the backward function B settles where
x_input = x_o / (A * s) + B(x_o), i.e. for large A the output approaches
B^-1(x_input). The loop is stable only while the product of forward gain
and backward gain stays positive; a flipped sign turns it into positive
feedback and the iteration runs away.

Everything here is pure and single-threaded; concurrent loops share no
state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import NonFiniteError


@dataclass(frozen=True)
class FeedbackConfig:
    """Loop parameters.

    forward_gain is the gain A of the forward block and must be positive:
    a negative backward gain is handled by the error-function sign, never
    by negating A. rate is the fractional relaxation step toward each new
    output estimate; tolerance is the stopping threshold on the input-side
    residual |x_input - B(x_o)|.
    """

    forward_gain: float = 100.0
    rate: float = 0.01
    max_iters: int = 1000
    tolerance: float = 1e-9

    def __post_init__(self):
        if not (math.isfinite(self.forward_gain) and self.forward_gain > 0.0):
            raise ValueError(f"forward_gain must be positive, got {self.forward_gain}")
        if not (0.0 < self.rate <= 1.0):
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0.0):
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")


@dataclass
class LoopTrace:
    """Per-iteration history: (iteration index, output, input-side residual)."""

    iterates: list[tuple[int, float, float]] = field(default_factory=list)
    converged: bool = False

    @property
    def final_residual(self) -> float:
        return self.iterates[-1][2]

    @property
    def iterations(self) -> int:
        return self.iterates[-1][0]


def is_stable(forward_gain: float, backward_gain: float) -> bool:
    """True iff the loop gain keeps the feedback negative.

    Requires forward_gain * backward_gain > 0; a zero product means zero
    loop gain, which cannot reduce the error and counts as unstable.
    """
    return forward_gain * backward_gain > 0.0


def run_feedback_loop(
    backward_fn: Callable[[float], float],
    backward_sign: int,
    x_input: float,
    cfg: FeedbackConfig,
) -> tuple[float, LoopTrace]:
    """Drive the loop output toward backward_fn^-1(x_input).

    backward_fn must be monotone over the traversed region and
    backward_sign (+1 or -1) must match the sign of its gain there. Starting
    from x_o = 0, each iteration relaxes x_o toward the forward block's new
    estimate A * backward_sign * (x_input - B(x_o)) by the configured rate,
    stopping once the residual magnitude drops to the tolerance or the
    iteration budget runs out.

    Raises NonFiniteError as soon as an iterate or B(iterate) is NaN or
    infinite, the signature of positive feedback (e.g. a wrong
    backward_sign).
    """
    if backward_sign not in (-1, 1):
        raise ValueError(f"backward_sign must be -1 or +1, got {backward_sign}")
    if not math.isfinite(x_input):
        raise NonFiniteError(f"x_input must be finite, got {x_input}")

    gain = cfg.forward_gain * backward_sign
    x_o = 0.0
    residual = x_input - backward_fn(x_o)
    trace = LoopTrace(iterates=[(0, x_o, residual)])
    if abs(residual) <= cfg.tolerance:
        trace.converged = True
        return x_o, trace

    for it in range(1, cfg.max_iters + 1):
        x_o = x_o + (gain * residual - x_o) * cfg.rate
        if not math.isfinite(x_o):
            raise NonFiniteError(
                f"loop output became non-finite at iteration {it}; the loop is "
                "unstable (check that forward_gain * backward_gain > 0)"
            )
        fx = backward_fn(x_o)
        if not math.isfinite(fx):
            raise NonFiniteError(
                f"backward function returned a non-finite value at iteration {it}"
            )
        residual = x_input - fx
        trace.iterates.append((it, x_o, residual))
        if abs(residual) <= cfg.tolerance:
            trace.converged = True
            break

    return x_o, trace
