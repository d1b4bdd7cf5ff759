"""Numerical certificates for the intertwining structure of the chains.

Every check returns a :class:`VerificationReport`.  Negative controls are run
through the same entry points by overriding one ingredient (the link, the
parameters of one level, or the measure), so the harness can be shown to fail.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bdp1 import log_dougall_rhs
from .exceptions import NumericDomainError, WindowError
from .links import link_row_float
from .nchain import NChain, OmegaPoint, box_states
from .params import UvParams, ZwParams, measure_finite, shift_params
from .trajectory import child_seeds, make_rng

MIN_MARGIN = 3

LinkFn = Callable[[Sequence[int]], list]

__all__ = [
    "BoxTruncation",
    "VerificationReport",
    "check_intertwine_generator",
    "check_coherence",
    "check_detailed_balance",
    "check_semigroup_mc",
    "window_mass",
    "perturbed_link",
    "params_to_json",
]


def _num_to_json(x: complex):
    x = complex(x)
    return x.real if x.imag == 0 else {"re": x.real, "im": x.imag}


def params_to_json(params) -> list:
    return [_num_to_json(x) for x in params.as_tuple()]


@dataclass
class BoxTruncation:
    """Points of Omega_N with all coordinates in ``[-bound, bound]``.

    States at least ``margin`` cells inside the box form the interior where
    residuals are evaluated.
    """

    N: int
    bound: int
    margin: int = MIN_MARGIN
    states: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 1 or self.bound < 1 or self.margin < 1:
            raise ValueError("N, bound and margin must be positive")
        if self.margin >= self.bound:
            raise WindowError(f"margin {self.margin} must be smaller than bound {self.bound}")
        self.states = box_states(self.N, self.bound)

    @property
    def inner_bound(self) -> int:
        return self.bound - self.margin

    def interior(self, N: int | None = None) -> list:
        """Margin-deep points of the box at level ``N`` (default: the box's own level)."""
        return box_states(self.N if N is None else N, self.inner_bound)


@dataclass
class VerificationReport:
    check: str
    params: dict
    max_residual: float
    tolerance: float
    diagnostics: dict = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.tolerance = float(self.tolerance)
        self.passed = bool(self.max_residual <= self.tolerance)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def perturbed_link(state: Sequence[int], factor: float = 1.01) -> LinkFn:
    """Link whose row at ``state`` has its first entry scaled by ``factor`` and renormalized."""
    state = tuple(state)

    def link(point):
        row = link_row_float(point)
        if tuple(point) != state or len(row) < 2:
            return row
        row = [(y, p * factor) if k == 0 else (y, p) for k, (y, p) in enumerate(row)]
        total = sum(p for _, p in row)
        return [(y, p / total) for y, p in row]

    return link


def _generator_row(chain: NChain, point) -> list[tuple[tuple, float]]:
    """Nonzero entries of the generator matrix row at ``point`` (diagonal included)."""
    rates = chain.neighbor_rates(point)
    return list(rates.items()) + [(tuple(point), -sum(rates.values()))]


def check_intertwine_generator(zw: ZwParams, N: int, box: BoxTruncation, tol: float = 1e-9,
                               link: LinkFn | None = None, upper_uv: UvParams | None = None,
                               lower_uv: UvParams | None = None) -> VerificationReport:
    """Compare ``D_N (Lambda F)`` with ``Lambda (D_{N-1} F)`` for delta functions ``F``.

    ``F`` runs over deltas at margin-deep level-(N-1) points and both sides are
    evaluated at margin-deep level-N points.  Only finitely many terms enter
    each side, so no truncation error is involved.
    """
    if N < 2:
        raise ValueError("the link needs N >= 2")
    if box.N != N:
        raise ValueError(f"box is for level {box.N}, not {N}")
    if box.margin < MIN_MARGIN:
        raise WindowError(f"margin must be >= {MIN_MARGIN}")
    link = link or link_row_float
    upper = NChain(upper_uv or shift_params(zw, N), N)
    lower = NChain(lower_uv or shift_params(zw, N - 1), N - 1)
    points = box.interior()
    targets = set(box.interior(N - 1))
    if not points or not targets:
        raise WindowError("box too small: no interior states")

    row_cache: dict = {}

    def row(p):
        if p not in row_cache:
            row_cache[p] = link(p)
        return row_cache[p]

    lower_gen: dict = {}
    worst, worst_at, compared = 0.0, None, 0
    for p in points:
        lhs: dict = {}
        for m, q in _generator_row(upper, p):
            for y, prob in row(m):
                lhs[y] = lhs.get(y, 0.0) + q * prob
        rhs: dict = {}
        for y, prob in row(p):
            if y not in lower_gen:
                lower_gen[y] = _generator_row(lower, y)
            for y2, q in lower_gen[y]:
                rhs[y2] = rhs.get(y2, 0.0) + prob * q
        for y in (lhs.keys() | rhs.keys()) & targets:
            r = abs(lhs.get(y, 0.0) - rhs.get(y, 0.0))
            compared += 1
            if r > worst:
                worst, worst_at = r, (p, y)
    return VerificationReport(
        "intertwine_generator",
        {"zw": params_to_json(zw), "N": N, "bound": box.bound, "margin": box.margin},
        worst, tol,
        {"worst_state": None if worst_at is None else [list(worst_at[0]), list(worst_at[1])],
         "points": len(points), "deltas": len(targets), "nonzero_comparisons": compared},
    )


def _log_mass_ref(chain: NChain, bound: int) -> float:
    if chain.N == 1:
        return log_dougall_rhs(chain.uv)
    return chain.window_measure(bound)[2]


def window_mass(zw: ZwParams, N: int, bound: int, ref_bound: int | None = None) -> float:
    """Mass of the level-N measure inside ``[-bound, bound]^N``.

    For N = 1 the normalization is exact; for N >= 2 it is estimated from a
    larger reference box (default ``2 * bound``).
    """
    chain = NChain(shift_params(zw, N), N)
    ref = _log_mass_ref(chain, ref_bound or 2 * bound)
    return math.exp(chain.window_measure(bound)[2] - ref)


def check_coherence(zw: ZwParams, N: int, box: BoxTruncation, tol: float = 1e-6,
                    ref_bound: int | None = None, upper_zw: ZwParams | None = None) -> VerificationReport:
    """Push the level-N stationary measure through the link and compare with level N-1.

    The level-N measure is normalized using a reference box of half-width
    ``ref_bound`` (default ``2 * bound``); the mass it puts outside the
    truncation box is the window deficit, which is added to the tolerance.
    """
    if zw.sum_real <= -1:
        raise NumericDomainError(f"z+z'+w+w' = {zw.sum_real} <= -1: measures are not finite")
    if N < 2:
        raise ValueError("coherence needs N >= 2")
    ref_bound = ref_bound or 2 * box.bound
    upper = NChain(shift_params(upper_zw or zw, N), N)
    lower = NChain(shift_params(zw, N - 1), N - 1)
    for chain in (upper, lower):
        if not measure_finite(chain.uv, chain.N):
            raise NumericDomainError("measure is not finite")
    states, logw, log_box = upper.window_measure(box.bound)
    log_ref = _log_mass_ref(upper, ref_bound)
    probs = np.exp(logw - log_ref)
    deficit = max(0.0, 1.0 - math.exp(log_box - log_ref))

    pushed: dict = {}
    for s, p in zip(states, probs):
        for y, q in link_row_float(tuple(int(c) for c in s)):
            pushed[y] = pushed.get(y, 0.0) + p * q

    targets = box.interior(N - 1)
    tarr = np.array(targets, dtype=np.int64).reshape(-1, N - 1)
    target_probs = np.exp(lower.log_weights(tarr) - _log_mass_ref(lower, ref_bound))
    worst, worst_at = 0.0, None
    for y, p in zip(targets, target_probs):
        r = abs(pushed.get(tuple(y), 0.0) - p)
        if r > worst:
            worst, worst_at = r, y
    return VerificationReport(
        "coherence",
        {"zw": params_to_json(zw), "N": N, "bound": box.bound, "margin": box.margin,
         "ref_bound": ref_bound},
        worst, tol + deficit,
        {"worst_state": None if worst_at is None else list(worst_at), "window_deficit": deficit,
         "window_mass": 1.0 - deficit, "compared_states": len(targets)},
    )


def _random_points(rng: np.random.Generator, count: int, N: int, radius: int) -> np.ndarray:
    keys = rng.random((count, 2 * radius + 1))
    picks = np.argsort(keys, axis=1)[:, :N] - radius
    return -np.sort(-picks, axis=1)


def check_detailed_balance(uv: UvParams, N: int, sample_count: int, seed: int, tol: float = 1e-9,
                           measure_uv: UvParams | None = None, radius: int = 20) -> VerificationReport:
    """Log-domain residual of ``M(l) q(l -> l') = M(l') q(l' -> l)`` on random moves.

    States are uniform over Omega_N ∩ [-radius, radius]^N; each gets one
    uniformly chosen move that stays in Omega_N.
    """
    chain = NChain(uv, N)
    measure = NChain(measure_uv or uv, N)
    rng = make_rng(seed)
    src = np.empty((0, N), dtype=np.int64)
    dst = np.empty((0, N), dtype=np.int64)
    coord_list, dir_list = [], []
    while src.shape[0] < sample_count:
        need = sample_count - src.shape[0]
        pts = _random_points(rng, 2 * need, N, radius)
        coord = rng.integers(0, N, size=pts.shape[0])
        step = np.where(rng.random(pts.shape[0]) < 0.5, 1, -1)
        moved = pts.copy()
        moved[np.arange(pts.shape[0]), coord] += step
        ok = np.all(moved[:, :-1] > moved[:, 1:], axis=1) if N > 1 else np.ones(pts.shape[0], bool)
        src = np.vstack([src, pts[ok][:need]])
        dst = np.vstack([dst, moved[ok][:need]])
        coord_list.append(coord[ok][:need])
        dir_list.append(step[ok][:need])
    coord = np.concatenate(coord_list)
    step = np.concatenate(dir_list)
    idx = np.arange(sample_count)
    fwd = chain.rates_array(src)[idx, coord, np.where(step > 0, 0, 1)]
    back = chain.rates_array(dst)[idx, coord, np.where(step > 0, 1, 0)]
    if np.any(fwd <= 0) or np.any(back <= 0):
        raise NumericDomainError("nonpositive rate on a move inside Omega_N")
    resid = np.abs(measure.log_weights(src) + np.log(fwd) - measure.log_weights(dst) - np.log(back))
    k = int(resid.argmax())
    return VerificationReport(
        "detailed_balance",
        {"uv": params_to_json(uv), "N": N, "sample_count": sample_count, "seed": seed,
         "measure_uv": params_to_json(measure_uv or uv)},
        float(resid[k]), tol,
        {"worst_state": src[k].tolist(), "worst_target": dst[k].tolist()},
    )


def _mean_link_rows(finals: np.ndarray):
    """Per-category sample mean and variance of ``Lambda(final, y)`` over runs."""
    uniq, counts = np.unique(finals, axis=0, return_counts=True)
    B = finals.shape[0]
    s1: dict = {}
    s2: dict = {}
    for state, c in zip(uniq, counts):
        for y, p in link_row_float(tuple(int(v) for v in state)):
            s1[y] = s1.get(y, 0.0) + c * p
            s2[y] = s2.get(y, 0.0) + c * p * p
    mean = {y: v / B for y, v in s1.items()}
    var = {y: max(s2[y] / B - mean[y] ** 2, 0.0) / B for y in mean}
    return mean, var


def check_semigroup_mc(zw: ZwParams, N: int, start: Sequence[int], t: float, trajectories: int,
                       seed: int, z_score: float = 3.0, slack: float = 0.01,
                       upper_rate_scale: float = 1.0) -> VerificationReport:
    """Monte Carlo comparison of ``P_N(t) Lambda`` and ``Lambda P_{N-1}(t)`` applied to ``delta_start``.

    Left side: run level N from ``start`` and average the link rows at the
    final states.  Right side: for each point ``y`` of the link row at
    ``start``, run level N-1 from ``y`` with a number of copies proportional to
    ``Lambda(start, y)`` and mix the empirical laws.  Passes when the total
    variation distance is below ``radius + slack``, where the radius adds
    ``z_score`` standard errors per category.
    """
    start = OmegaPoint(start)
    if len(start) != N or N < 2:
        raise ValueError("start must be a point of Omega_N with N >= 2")
    upper = NChain(shift_params(zw, N), N)
    lower = NChain(shift_params(zw, N - 1), N - 1)
    row = link_row_float(start)
    seeds = child_seeds(seed, 1 + len(row))

    finals, trunc_u = upper.simulate_batch(np.tile(start, (trajectories, 1)), t, seeds[0],
                                           rate_scale=upper_rate_scale)
    left, left_var = _mean_link_rows(finals)

    right: dict = {}
    right_var: dict = {}
    truncated = int(trunc_u.sum())
    for k, (y, w) in enumerate(row):
        runs = max(1, int(round(trajectories * w)))
        fin, tr = lower.simulate_batch(np.tile(y, (runs, 1)), t, seeds[k + 1])
        truncated += int(tr.sum())
        uniq, counts = np.unique(fin, axis=0, return_counts=True)
        for state, c in zip(uniq, counts):
            key = tuple(int(v) for v in state)
            p = c / runs
            right[key] = right.get(key, 0.0) + w * p
            right_var[key] = right_var.get(key, 0.0) + w * w * p * (1 - p) / runs

    keys = left.keys() | right.keys()
    tv = 0.5 * sum(abs(left.get(y, 0.0) - right.get(y, 0.0)) for y in keys)
    radius = 0.5 * z_score * sum(math.sqrt(left_var.get(y, 0.0) + right_var.get(y, 0.0)) for y in keys)
    return VerificationReport(
        "semigroup_mc",
        {"zw": params_to_json(zw), "N": N, "start": list(start), "t": t,
         "trajectories": trajectories, "seed": seed, "upper_rate_scale": upper_rate_scale},
        tv, radius + slack,
        {"tv": tv, "radius": radius, "categories": len(keys), "truncated_runs": truncated},
    )
