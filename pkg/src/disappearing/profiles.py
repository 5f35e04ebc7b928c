"""Scalar profiles h(s) generating the explicit field family.

Three kinds are supported: the exponential profile exp(r s) whose rate is the
negative root of eps*r**2 - eps*r - 1 = 0, the compactly supported bump
exp(-1/(b**2 - y**2)), and user-supplied derivative tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ParameterError, UnsupportedOrderError

MAX_ORDER = 3
# Points this close to the bump support edge are treated as outside.
EDGE_PIN = 1e-12


@dataclass(frozen=True)
class Profile:
    kind: str
    rate: Optional[float] = None
    width: Optional[float] = None
    epsilon: Optional[float] = None
    funcs: tuple = field(default=(), repr=False)

    def derivs(self, s, max_order: int = MAX_ORDER) -> np.ndarray:
        """Return an array of shape (max_order + 1, *s.shape) holding h, h', ..."""
        if max_order not in (0, 1, 2, 3):
            raise UnsupportedOrderError(f"max_order must be in 0..3, got {max_order}")
        s = np.asarray(s, dtype=float)
        if self.kind == "exponential":
            return _exp_derivs(self.rate, s, max_order)
        if self.kind == "bump":
            return _bump_derivs(self.width, s, max_order)
        if max_order >= len(self.funcs):
            raise UnsupportedOrderError(
                f"custom profile provides {len(self.funcs)} functions, order {max_order} requested"
            )
        out = np.empty((max_order + 1,) + s.shape)
        for k in range(max_order + 1):
            out[k] = np.broadcast_to(self.funcs[k](s), s.shape)
        return out

    def __call__(self, s):
        return self.derivs(s, 0)[0]

    def describe(self) -> dict:
        if self.kind == "exponential":
            return {"kind": "exponential", "epsilon": self.epsilon, "rate": self.rate}
        if self.kind == "bump":
            return {"kind": "bump", "b": self.width}
        return {"kind": "custom", "orders": len(self.funcs) - 1}


def exponential_rate(epsilon: float) -> float:
    # Negative root written as -1/(eps * positive root) to avoid cancellation.
    root = math.sqrt(1.0 + 4.0 / epsilon)
    return -2.0 / (epsilon * (1.0 + root))


def make_exponential(epsilon: float) -> Profile:
    """Exponential profile tuned so that the eps-boundary residue vanishes."""
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    return Profile("exponential", rate=exponential_rate(epsilon), epsilon=float(epsilon))


def make_rate_profile(rate: float) -> Profile:
    """Exponential profile exp(rate * s) with an arbitrary rate (no boundary tuning)."""
    return Profile("exponential", rate=float(rate))


def make_bump(b: float) -> Profile:
    if not b > 1:
        raise ParameterError(f"b must exceed 1, got {b}")
    return Profile("bump", width=float(b))


def make_custom(funcs: Sequence[Callable]) -> Profile:
    """Profile from callables [h, h', h'', ...]; orders beyond the list are unsupported."""
    funcs = tuple(funcs)
    if not funcs:
        raise ParameterError("custom profile needs at least h itself")
    return Profile("custom", funcs=funcs)


def zero_profile() -> Profile:
    z = lambda s: np.zeros_like(np.asarray(s, dtype=float))  # noqa: E731
    return make_custom([z, z, z, z])


def eval_derivs(p: Profile, s: float, max_order: int) -> list:
    """[h(s), ..., h^(max_order)(s)] at a single point."""
    return [float(v) for v in p.derivs(float(s), max_order)]


def _exp_derivs(rate, s, max_order):
    base = np.exp(rate * s)
    return np.stack([rate**k * base for k in range(max_order + 1)])


def _bump_derivs(b, y, max_order):
    shape = y.shape
    y = np.atleast_1d(y)
    out = np.zeros((max_order + 1,) + y.shape)
    inside = np.abs(y) < b - EDGE_PIN
    if not np.any(inside):
        return out.reshape((max_order + 1,) + shape)
    yi = y[inside]
    u = b * b - yi * yi
    h = np.exp(-1.0 / u)
    y2 = yi * yi
    out[0][inside] = h
    if max_order >= 1:
        out[1][inside] = -2.0 * yi / u**2 * h
    if max_order >= 2:
        num2 = 2.0 * (3.0 * y2 * y2 - 2.0 * (b * b - 1.0) * y2 - b**4)
        out[2][inside] = num2 / u**4 * h
    if max_order >= 3:
        b2 = b * b
        num3 = -4.0 * yi * (
            6 * b2**3 - 6 * b2 * b2 * y2 - 3 * b2 * b2 - 6 * b2 * y2 * y2
            - 6 * b2 * y2 + 6 * y2**3 + 9 * y2 * y2 + 2 * y2
        )
        out[3][inside] = num3 / u**6 * h
    return out.reshape((max_order + 1,) + shape)
