"""The N-particle chain on Omega_N, the Doob transform of N free copies.

``Omega_N`` is the set of strictly decreasing integer N-tuples.  The free chain
runs N independent one-particle chains; conditioning by the Vandermonde
``V_N(l) = prod_{i<j} (l_i - l_j)``, an eigenfunction of the free generator
with eigenvalue ``-C_N``, gives the generator

    D_N = V_N^{-1} o D_N^free o V_N + C_N

with jump rates ``V_N(l ± e_i)/V_N(l)`` times the one-particle rate at ``l_i``.
"""
from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .bdp1 import Bdp1Chain, TestFunction, evaluate
from .params import UvParams
from .trajectory import DEFAULT_MAX_EVENTS, Trajectory, UniformStream, make_rng

DEFAULT_BOUND = 30
_RESYNC_EVERY = 4096

__all__ = [
    "OmegaPoint",
    "NChain",
    "vandermonde",
    "c_constant",
    "is_strictly_decreasing",
    "box_states",
    "DEFAULT_BOUND",
]


def is_strictly_decreasing(coords: Sequence[int]) -> bool:
    return all(coords[k] > coords[k + 1] for k in range(len(coords) - 1))


class OmegaPoint(tuple):
    """A strictly decreasing integer tuple ``(l_1 > l_2 > ... > l_N)``."""

    def __new__(cls, coords: Iterable[int]):
        coords = tuple(int(c) for c in coords)
        if not coords:
            raise ValueError("an Omega_N point needs at least one coordinate")
        if not is_strictly_decreasing(coords):
            raise ValueError(f"{coords} is not strictly decreasing")
        return super().__new__(cls, coords)

    @property
    def N(self) -> int:
        return len(self)

    def moved(self, i: int, step: int) -> tuple[int, ...]:
        """The tuple with 0-based coordinate ``i`` shifted by ``step`` (may leave Omega_N)."""
        out = list(self)
        out[i] += step
        return tuple(out)

    def to_json(self) -> dict:
        return {"coords": list(self)}

    @classmethod
    def from_json(cls, data: dict) -> OmegaPoint:
        return cls(data["coords"])


def vandermonde(coords: Sequence[int]) -> int:
    """``prod_{i<j} (l_i - l_j)`` as an exact integer (positive on Omega_N)."""
    out = 1
    for i, j in itertools.combinations(range(len(coords)), 2):
        out *= coords[i] - coords[j]
    return out


def log_vandermonde(states: np.ndarray) -> np.ndarray:
    states = np.asarray(states)
    out = np.zeros(states.shape[0])
    for i, j in itertools.combinations(range(states.shape[1]), 2):
        out += np.log((states[:, i] - states[:, j]).astype(float))
    return out


def c_constant(N: int, uv: UvParams) -> float:
    """``N(N-1)/2 (u+u'+v+v') - N(N-1)(N-2)/3``."""
    return N * (N - 1) / 2 * uv.sum_real - N * (N - 1) * (N - 2) / 3


def box_states(N: int, bound: int) -> list[tuple[int, ...]]:
    """All points of Omega_N with every coordinate in ``[-bound, bound]``."""
    return list(itertools.combinations(range(bound, -bound - 1, -1), N))


class NChain:
    """Doob-transformed N-particle chain on Omega_N.

    Parameters
    ----------
    uv : UvParams
        Rate parameters shared by all particles.
    N : int
        Number of particles; ``N = 1`` is the one-particle chain.
    """

    def __init__(self, uv: UvParams, N: int):
        if N < 1:
            raise ValueError(f"N must be >= 1, got {N}")
        self.uv = uv
        self.N = int(N)
        self.one = Bdp1Chain(uv)
        self._u, self._up, self._v, self._vp = uv.as_tuple()

    def __repr__(self) -> str:
        return f"NChain(uv={self.uv.as_tuple()}, N={self.N})"

    # -- rates ------------------------------------------------------------
    def _base(self, l: int, step: int) -> float:
        if step > 0:
            return ((self._u - l) * (self._up - l)).real
        return ((self._v + l) * (self._vp + l)).real

    def _rate(self, coords: Sequence[int], i: int, step: int) -> float:
        li = coords[i]
        ratio = 1.0
        for j, lj in enumerate(coords):
            if j != i:
                ratio *= (li + step - lj) / (li - lj)
        if ratio == 0.0:
            return 0.0
        return ratio * self._base(li, step)

    def jump_rate(self, point: Sequence[int], i: int, dir: str) -> float:
        """Rate of ``l -> l ± e_i`` with ``i`` counted from 1; zero if the move leaves Omega_N."""
        if not 1 <= i <= self.N:
            raise IndexError(f"coordinate index {i} outside 1..{self.N}")
        if dir not in ("up", "down"):
            raise ValueError(f"dir must be 'up' or 'down', got {dir!r}")
        if len(point) != self.N:
            raise ValueError(f"expected {self.N} coordinates, got {len(point)}")
        return self._rate(tuple(point), i - 1, 1 if dir == "up" else -1)

    def neighbor_rates(self, point: Sequence[int]) -> dict[tuple[int, ...], float]:
        """Positive-rate moves out of ``point`` keyed by target state."""
        point = tuple(point)
        out = {}
        for i in range(self.N):
            for step in (1, -1):
                r = self._rate(point, i, step)
                if r > 0:
                    target = list(point)
                    target[i] += step
                    out[tuple(target)] = r
        return out

    def rates_array(self, states: np.ndarray) -> np.ndarray:
        """Rates for a batch of states, shape ``(B, N, 2)`` with ``[..., 0]`` up and ``[..., 1]`` down."""
        S = np.asarray(states, dtype=np.int64)
        B, N = S.shape
        out = np.empty((B, N, 2))
        diff = (S[:, :, None] - S[:, None, :]).astype(float)
        eye = np.eye(N, dtype=bool)
        safe = np.where(eye, 1.0, diff)
        for k, step in enumerate((1, -1)):
            factors = np.where(eye, 1.0, (diff + step) / safe)
            ratio = factors.prod(axis=2)
            if step > 0:
                base = ((self._u - S) * (self._up - S)).real
            else:
                base = ((self._v + S) * (self._vp + S)).real
            out[:, :, k] = ratio * base
        return out

    # -- generator ----------------------------------------------------------
    def generator_apply(self, F: TestFunction, point: Sequence[int]) -> float:
        """Rate form: ``sum_{i,±} rate(l, l±e_i) (F(l±e_i) - F(l))``."""
        point = tuple(point)
        f0 = evaluate(F, point)
        return sum(r * (evaluate(F, m) - f0) for m, r in self.neighbor_rates(point).items())

    def free_generator_apply(self, G: TestFunction, point: Sequence[int]) -> float:
        """The product of N one-particle generators acting on a function on Z^N."""
        point = tuple(point)
        g0 = evaluate(G, point)
        total = 0.0
        for i, li in enumerate(point):
            for step in (1, -1):
                target = list(point)
                target[i] += step
                total += self._base(li, step) * (evaluate(G, tuple(target)) - g0)
        return total

    def generator_apply_doob(self, F: TestFunction, point: Sequence[int]) -> float:
        """Doob form: ``V^{-1} D^free (V F) + C_N F`` evaluated at ``point``."""
        point = tuple(point)

        def vf(m):
            vm = vandermonde(m)
            return 0.0 if vm == 0 else vm * evaluate(F, m)

        v0 = vandermonde(point)
        return self.free_generator_apply(vf, point) / v0 + c_constant(self.N, self.uv) * evaluate(F, point)

    # -- measure ------------------------------------------------------------
    def log_weight(self, point: Sequence[int]) -> float:
        """Unnormalized log of the symmetrizing measure: one-particle terms plus ``2 log V_N``."""
        return sum(self.one.log_weight(l) for l in point) + 2 * math.log(vandermonde(point))

    def log_weights(self, states: np.ndarray) -> np.ndarray:
        S = np.asarray(states, dtype=np.int64)
        lo, hi = int(S.min()), int(S.max())
        table = self.one.log_weights(np.arange(lo, hi + 1))
        return table[S - lo].sum(axis=1) + 2 * log_vandermonde(S)

    def window_measure(self, bound: int = DEFAULT_BOUND):
        """States of the box ``[-bound, bound]^N`` with unnormalized log weights.

        Returns ``(states, log_weights, log_mass)``.
        """
        states = np.array(box_states(self.N, bound), dtype=np.int64).reshape(-1, self.N)
        logw = self.log_weights(states)
        top = logw.max()
        log_mass = top + math.log(np.exp(logw - top).sum())
        return states, logw, log_mass

    def stationary_window(self, bound: int = DEFAULT_BOUND) -> dict[tuple[int, ...], float]:
        """Probabilities normalized over the box ``[-bound, bound]^N``."""
        states, logw, log_mass = self.window_measure(bound)
        probs = np.exp(logw - log_mass)
        return {tuple(int(c) for c in s): float(p) for s, p in zip(states, probs)}

    # -- simulation ---------------------------------------------------------
    def simulate(self, start: Sequence[int], t_max: float, seed: int,
                 max_events: int = DEFAULT_MAX_EVENTS) -> Trajectory:
        """Event-driven run from ``start``; rates are updated in O(N) per jump."""
        coords = list(OmegaPoint(start))
        if len(coords) != self.N:
            raise ValueError(f"expected {self.N} coordinates, got {len(coords)}")
        N = self.N
        stream = UniformStream(make_rng(seed))
        rates = [[self._rate(coords, i, s) for s in (1, -1)] for i in range(N)]
        times, states = [0.0], [tuple(coords)]
        t = 0.0
        truncated = False
        since_sync = 0
        while True:
            if len(times) - 1 >= max_events:
                truncated = True
                break
            total = sum(r[0] + r[1] for r in rates)
            t += stream.exponential(total)
            if t > t_max:
                break
            target = stream.next() * total
            acc = 0.0
            k, d = N - 1, 1
            for i in range(N):
                acc += rates[i][0]
                if target < acc:
                    k, d = i, 0
                    break
                acc += rates[i][1]
                if target < acc:
                    k, d = i, 1
                    break
            step = 1 if d == 0 else -1
            if rates[k][d] <= 0.0:
                # floating round-off at the top of the cumulative sum
                k, d = max(((i, e) for i in range(N) for e in (0, 1)), key=lambda ie: rates[ie[0]][ie[1]])
                step = 1 if d == 0 else -1
            old = coords[k]
            coords[k] = old + step
            since_sync += 1
            if since_sync >= _RESYNC_EVERY:
                rates = [[self._rate(coords, i, s) for s in (1, -1)] for i in range(N)]
                since_sync = 0
            else:
                new = coords[k]
                for j in range(N):
                    if j == k:
                        continue
                    lj = coords[j]
                    for e, s in enumerate((1, -1)):
                        f_old = (lj + s - old) / (lj - old)
                        if f_old == 0.0:
                            rates[j][e] = self._rate(coords, j, s)
                        else:
                            rates[j][e] *= ((lj + s - new) / (lj - new)) / f_old
                rates[k] = [self._rate(coords, k, s) for s in (1, -1)]
            times.append(t)
            states.append(tuple(coords))
        labels = tuple(f"l{i + 1}" for i in range(N))
        return Trajectory(times, states, seed=seed, t_max=t_max, truncated=truncated, labels=labels)

    def simulate_batch(self, starts: np.ndarray, t_max: float, seed: int,
                       max_events: int = DEFAULT_MAX_EVENTS, rate_scale: float = 1.0):
        """Run many independent copies to time ``t_max`` and return their final states.

        Returns ``(final_states, truncated)`` where ``truncated`` flags runs
        stopped by the event cap.  ``rate_scale`` multiplies every rate (a time
        change), used by negative controls.
        """
        S = np.array(starts, dtype=np.int64).reshape(-1, self.N).copy()
        B = S.shape[0]
        rng = make_rng(seed)
        t = np.zeros(B)
        events = np.zeros(B, dtype=np.int64)
        truncated = np.zeros(B, dtype=bool)
        active = np.arange(B)
        while active.size:
            R = self.rates_array(S[active]).reshape(active.size, 2 * self.N) * rate_scale
            np.maximum(R, 0.0, out=R)
            total = R.sum(axis=1)
            t_new = t[active] - np.log1p(-rng.random(active.size)) / total
            moving = t_new <= t_max
            idx = active[moving]
            if idx.size == 0:
                break
            Rm = R[moving]
            pick = rng.random(idx.size) * total[moving]
            k = (np.cumsum(Rm, axis=1) <= pick[:, None]).sum(axis=1)
            k = np.minimum(k, 2 * self.N - 1)
            # guard against landing on a zero-rate slot through round-off
            bad = Rm[np.arange(idx.size), k] <= 0
            if bad.any():
                k[bad] = Rm[bad].argmax(axis=1)
            coord = k // 2
            step = np.where(k % 2 == 0, 1, -1)
            S[idx, coord] += step
            t[idx] = t_new[moving]
            events[idx] += 1
            capped = events[idx] >= max_events
            truncated[idx[capped]] = True
            active = idx[~capped]
        return S, truncated
