"""Signatures, Gelfand-Tsetlin branching, and the links between Omega_N and Omega_{N-1}.

A signature ``lambda_1 >= ... >= lambda_N`` corresponds to the point
``l_i = lambda_i + N - i`` of Omega_N.  The link from level N to level N-1
sends ``lambda`` to each interlacing ``mu`` with probability
``dim(mu) / dim(lambda)``; rows sum to one by the branching rule.
"""
from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .exceptions import ScopeError, SpaceMismatchError
from .nchain import OmegaPoint, vandermonde

ROW_TOL = 1e-12

__all__ = [
    "Signature",
    "to_signature",
    "from_signature",
    "interlaces",
    "interlacing_signatures",
    "dim_weyl",
    "dim_of_point",
    "dim_gt_oracle",
    "link_row",
    "link_row_float",
    "SparseKernel",
    "link_kernel",
    "push_measure",
    "compose",
]


class Signature(tuple):
    """A nonincreasing integer tuple ``(lambda_1 >= ... >= lambda_N)``."""

    def __new__(cls, parts: Iterable[int]):
        parts = tuple(int(p) for p in parts)
        if not parts:
            raise ValueError("a signature needs at least one part")
        if any(parts[k] < parts[k + 1] for k in range(len(parts) - 1)):
            raise ValueError(f"{parts} is not nonincreasing")
        return super().__new__(cls, parts)

    @property
    def N(self) -> int:
        return len(self)


def to_signature(point: Sequence[int]) -> Signature:
    point = OmegaPoint(point)
    N = len(point)
    return Signature(l - (N - 1 - k) for k, l in enumerate(point))


def from_signature(lam: Sequence[int]) -> OmegaPoint:
    lam = Signature(lam)
    N = len(lam)
    return OmegaPoint(p + (N - 1 - k) for k, p in enumerate(lam))


def interlaces(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """``lam_1 >= mu_1 >= lam_2 >= ... >= mu_{N-1} >= lam_N``."""
    if len(mu) != len(lam) - 1:
        raise ValueError(f"length mismatch: |mu|={len(mu)}, |lambda|={len(lam)}")
    return all(lam[k] >= mu[k] >= lam[k + 1] for k in range(len(mu)))


def interlacing_signatures(lam: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All ``mu`` with ``mu ≺ lam``; each ``mu_k`` ranges over ``[lam_{k+1}, lam_k]`` independently."""
    ranges = [range(lam[k + 1], lam[k] + 1) for k in range(len(lam) - 1)]
    return itertools.product(*ranges)


@lru_cache(maxsize=None)
def _superfactorial(n: int) -> int:
    """``1! 2! ... (n-1)!``."""
    out = 1
    for k in range(1, n):
        out *= math.factorial(k)
    return out


def dim_of_point(point: Sequence[int]) -> int:
    """Weyl dimension in point coordinates: ``prod (l_i - l_j) / (1! ... (N-1)!)``."""
    num = vandermonde(point)
    den = _superfactorial(len(point))
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"inexact Weyl division for {tuple(point)}")
    return q


def dim_weyl(lam: Sequence[int]) -> int:
    """Dimension of the irreducible U(N)-module with signature ``lam``."""
    return dim_of_point(from_signature(lam))


@lru_cache(maxsize=None)
def _gt_count(lam: tuple[int, ...]) -> int:
    if len(lam) == 1:
        return 1
    return sum(_gt_count(mu) for mu in interlacing_signatures(lam))


def dim_gt_oracle(lam: Sequence[int]) -> int:
    """Count Gelfand-Tsetlin patterns with top row ``lam`` by brute-force recursion."""
    lam = Signature(lam)
    if len(lam) > 8 or any(abs(p) > 10 for p in lam):
        raise ScopeError("brute-force count limited to N <= 8 and |parts| <= 10")
    return _gt_count(tuple(lam))


def _row_points(point: Sequence[int]) -> Iterator[tuple[tuple[int, ...], int]]:
    N = len(point)
    lam = [l - (N - 1 - k) for k, l in enumerate(point)]
    for mu in interlacing_signatures(lam):
        target = tuple(m + (N - 2 - k) for k, m in enumerate(mu))
        yield target, dim_of_point(target)


def link_row(point: Sequence[int]) -> list[tuple[OmegaPoint, Fraction]]:
    """Exact row of the link at ``point`` of Omega_N (N >= 2)."""
    point = OmegaPoint(point)
    if len(point) < 2:
        raise ValueError("links go from level N >= 2 to level N - 1")
    d = dim_of_point(point)
    return [(OmegaPoint(target), Fraction(dm, d)) for target, dm in _row_points(point)]


def link_row_float(point: Sequence[int]) -> list[tuple[tuple[int, ...], float]]:
    """Floating-point row; same support and order as :func:`link_row`."""
    point = tuple(point)
    d = dim_of_point(point)
    return [(target, dm / d) for target, dm in _row_points(point)]


class SparseKernel:
    """Row-stochastic kernel between two discrete spaces, stored row by row.

    ``rows`` maps a source state to a dict ``{target: probability}``; zero
    entries are omitted.  Probabilities may be ``Fraction`` or ``float``.
    """

    def __init__(self, rows: Mapping[Hashable, Mapping[Hashable, object]],
                 source: Hashable = None, target: Hashable = None, validate: bool = True):
        self.rows = {x: {y: p for y, p in row.items() if p != 0} for x, row in rows.items()}
        self.source = source
        self.target = target
        if validate:
            self.validate()

    def validate(self) -> None:
        for x, row in self.rows.items():
            total = 0
            for y, p in row.items():
                if not 0 < p <= 1 + ROW_TOL:
                    raise ValueError(f"entry K({x!r}, {y!r}) = {p} outside (0, 1]")
                total += p
            if abs(total - 1) > ROW_TOL:
                raise ValueError(f"row {x!r} sums to {float(total)!r}")

    def __repr__(self) -> str:
        return f"SparseKernel({len(self.rows)} rows, {self.source!r} -> {self.target!r})"

    def __getitem__(self, x) -> dict:
        return self.rows[x]

    def __contains__(self, x) -> bool:
        return x in self.rows

    def __len__(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: SparseKernel) -> SparseKernel:
        return compose(self, other)

    def entry(self, x, y):
        return self.rows.get(x, {}).get(y, 0)

    def row_sums(self) -> dict:
        return {x: sum(row.values()) for x, row in self.rows.items()}

    @classmethod
    def identity(cls, states: Iterable[Hashable], space: Hashable = None) -> SparseKernel:
        return cls({s: {s: Fraction(1)} for s in states}, source=space, target=space)

    def map_rows(self, fn: Callable[[Hashable, dict], dict]) -> SparseKernel:
        return SparseKernel({x: fn(x, dict(row)) for x, row in self.rows.items()},
                            self.source, self.target, validate=False)

    def to_json(self) -> str:
        out = []
        for x, row in self.rows.items():
            entries = []
            for y, p in row.items():
                p = Fraction(p) if not isinstance(p, Fraction) else p
                entries.append({"target": _as_list(y), "p_num": p.numerator, "p_den": p.denominator})
            out.append({"source": _as_list(x), "entries": entries})
        return json.dumps(out)

    @classmethod
    def from_json(cls, text: str, source=None, target=None) -> SparseKernel:
        rows = {}
        for item in json.loads(text):
            rows[_as_key(item["source"])] = {
                _as_key(e["target"]): Fraction(e["p_num"], e["p_den"]) for e in item["entries"]
            }
        return cls(rows, source, target)


def _as_list(state):
    return list(state) if isinstance(state, tuple) else [state]


def _as_key(values):
    return values[0] if len(values) == 1 else tuple(values)


def link_kernel(states: Iterable[Sequence[int]], exact: bool = True) -> SparseKernel:
    """Link rows for the given level-N points, as a :class:`SparseKernel`."""
    rows = {}
    N = None
    for s in states:
        s = tuple(s)
        N = len(s)
        if exact:
            rows[s] = {tuple(t): p for t, p in link_row(s)}
        else:
            rows[s] = dict(link_row_float(s))
    if N is None:
        return SparseKernel({}, validate=False)
    return SparseKernel(rows, source=f"Omega_{N}", target=f"Omega_{N - 1}")


def push_measure(M: Mapping, K: SparseKernel) -> dict:
    """``(MK)(y) = sum_x M(x) K(x, y)`` over the rows of ``K`` present in ``M``."""
    out: dict = {}
    for x, mass in M.items():
        if mass == 0:
            continue
        for y, p in K.rows[x].items():
            out[y] = out.get(y, 0) + mass * p
    return out


def compose(K: SparseKernel, L: SparseKernel) -> SparseKernel:
    """Kernel product ``(KL)(x, z) = sum_y K(x, y) L(y, z)``."""
    if K.target != L.source:
        raise SpaceMismatchError(f"cannot compose {K.target!r} with {L.source!r}")
    rows = {}
    for x, row in K.rows.items():
        missing = [y for y in row if y not in L.rows]
        if missing:
            raise SpaceMismatchError(f"target state {missing[0]!r} has no row in the second kernel")
        rows[x] = push_measure(row, L)
    return SparseKernel(rows, source=K.source, target=L.target)
