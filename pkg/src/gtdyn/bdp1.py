"""The one-particle bilateral birth-death chain on the integers.

At state ``l`` the chain jumps to ``l + 1`` with rate ``(u - l)(u' - l)`` and
to ``l - 1`` with rate ``(v + l)(v' + l)``.  Its symmetrizing measure is

    M(l) ∝ 1 / [Γ(u+1-l) Γ(u'+1-l) Γ(v+1+l) Γ(v'+1+l)],

whose total mass has a closed form (Dougall's bilateral summation) when
``u + u' + v + v' > -1``.
"""
from __future__ import annotations

import math
from typing import Callable, Mapping, Union

import numpy as np

from .exceptions import MissingValueError, NumericDomainError
from .gamma import log_gamma_product, log_gamma_product_array
from .params import UvParams
from .trajectory import DEFAULT_MAX_EVENTS, Trajectory, UniformStream, make_rng

TestFunction = Union[Mapping, Callable]

IMAG_TOL = 1e-10
DEFAULT_WINDOW = (-40, 40)

__all__ = ["Bdp1Chain", "dougall_rhs", "log_dougall_rhs", "evaluate", "DEFAULT_WINDOW"]


def evaluate(F: TestFunction, point):
    """Evaluate a test function given as a mapping or a callable."""
    if callable(F):
        return F(point)
    try:
        return F[point]
    except KeyError:
        raise MissingValueError(f"test function undefined at {point!r}") from None


def _positive_rate(value: complex) -> float:
    value = complex(value)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)) or value.real <= 0:
        raise NumericDomainError(f"jump rate {value} is not real positive")
    return value.real


def log_dougall_rhs(uv: UvParams) -> float:
    """Log of the closed-form total mass of the one-particle weights."""
    s = uv.sum_real
    if s <= -1:
        raise NumericDomainError(f"measure is infinite: u+u'+v+v' = {s} <= -1")
    u, up, v, vp = uv.as_tuple()
    return log_gamma_product(
        plus=[s + 1],
        minus=[u + v + 1, u + vp + 1, up + v + 1, up + vp + 1],
    )


def dougall_rhs(uv: UvParams) -> float:
    """``Γ(s+1) / [Γ(u+v+1) Γ(u+v'+1) Γ(u'+v+1) Γ(u'+v'+1)]`` with ``s = u+u'+v+v'``."""
    return math.exp(log_dougall_rhs(uv))


class Bdp1Chain:
    """Bilateral birth-death chain with quadratic rates.

    Parameters
    ----------
    uv : UvParams
        Admissible pairs ``(u, u')`` (up rates) and ``(v, v')`` (down rates).
    """

    def __init__(self, uv: UvParams):
        self.uv = uv

    def __repr__(self) -> str:
        return f"Bdp1Chain(uv={self.uv.as_tuple()})"

    def rate_up(self, l: int) -> float:
        u, up = self.uv.uu.as_tuple()
        return _positive_rate((u - l) * (up - l))

    def rate_down(self, l: int) -> float:
        v, vp = self.uv.vv.as_tuple()
        return _positive_rate((v + l) * (vp + l))

    def generator_apply(self, F: TestFunction, l: int) -> float:
        f0 = evaluate(F, l)
        return (self.rate_up(l) * (evaluate(F, l + 1) - f0)
                + self.rate_down(l) * (evaluate(F, l - 1) - f0))

    def log_weight(self, l: int) -> float:
        """Unnormalized log weight of the symmetrizing measure at ``l``."""
        u, up, v, vp = self.uv.as_tuple()
        return log_gamma_product(minus=[u + 1 - l, up + 1 - l, v + 1 + l, vp + 1 + l])

    def log_weights(self, ls) -> np.ndarray:
        ls = np.asarray(ls)
        u, up, v, vp = self.uv.as_tuple()
        return log_gamma_product_array(minus=[u + 1 - ls, up + 1 - ls, v + 1 + ls, vp + 1 + ls])

    def stationary_distribution(self, window: tuple[int, int] = DEFAULT_WINDOW) -> dict[int, float]:
        """Stationary probabilities on ``window`` (inclusive), normalized on the full lattice.

        The reported window mass is at most one; the deficit is the mass
        outside the window.
        """
        lo, hi = window
        ls = np.arange(lo, hi + 1)
        logp = self.log_weights(ls) - log_dougall_rhs(self.uv)
        return {int(l): float(p) for l, p in zip(ls, np.exp(logp))}

    def simulate(self, l0: int, t_max: float, seed: int,
                 max_events: int = DEFAULT_MAX_EVENTS) -> Trajectory:
        """Event-driven run from ``l0`` until the next event would pass ``t_max``."""
        stream = UniformStream(make_rng(seed))
        u, up, v, vp = self.uv.as_tuple()
        times, states = [0.0], [int(l0)]
        t, l = 0.0, int(l0)
        truncated = False
        while True:
            if len(times) - 1 >= max_events:
                truncated = True
                break
            a_up = ((u - l) * (up - l)).real
            a_down = ((v + l) * (vp + l)).real
            total = a_up + a_down
            t += stream.exponential(total)
            if t > t_max:
                break
            l = l + 1 if stream.next() * total < a_up else l - 1
            times.append(t)
            states.append(l)
        return Trajectory(times, states, seed=seed, t_max=t_max, truncated=truncated)
