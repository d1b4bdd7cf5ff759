"""Two birth-death models on ``{0, ..., N}`` linked by the Pascal triangle.

The link from level N to level N-1 removes a uniformly chosen ball:
``n -> n`` with probability ``(N-n)/N`` and ``n -> n-1`` with probability ``n/N``.
Its boundary is ``[0, 1]`` with binomial links.  Model A (parameters a, b > 0)
has hypergeometric (beta-binomial) stationary laws; model B (parameter c)
has binomial(c) stationary laws and a deterministic boundary flow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .bdp1 import TestFunction, evaluate
from .links import SparseKernel
from .trajectory import DEFAULT_MAX_EVENTS, Trajectory, UniformStream, make_rng
from .verify import VerificationReport

__all__ = [
    "AbParams",
    "PascalLevel",
    "pascal_link",
    "generator_6A",
    "generator_6B",
    "rate_matrix_6A",
    "rate_matrix_6B",
    "link_matrix",
    "intertwining_residual",
    "hypergeometric_stationary",
    "binomial_boundary_kernel",
    "flow_6B",
    "simulate_batch",
    "simulate_path",
    "check_pascal_all",
]


@dataclass(frozen=True)
class AbParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"need a > 0 and b > 0, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class PascalLevel:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @property
    def states(self) -> range:
        return range(self.N + 1)

    def __len__(self) -> int:
        return self.N + 1


def pascal_link(N: int) -> SparseKernel:
    """Exact link ``{0..N} --> {0..N-1}``."""
    if N < 2:
        raise ValueError("the Pascal link is defined for N >= 2")
    rows = {}
    for n in range(N + 1):
        row = {}
        if n < N:
            row[n] = Fraction(N - n, N)
        if n > 0:
            row[n - 1] = Fraction(n, N)
        rows[n] = row
    return SparseKernel(rows, source=f"X_{N}", target=f"X_{N - 1}")


def link_matrix(N: int) -> np.ndarray:
    """Dense ``(N+1) x N`` float matrix of the Pascal link (also for N = 1)."""
    out = np.zeros((N + 1, N))
    for n in range(N + 1):
        if n < N:
            out[n, n] = (N - n) / N
        if n > 0:
            out[n, n - 1] = n / N
    return out


def _rates_6A(N: int, ab: AbParams, n):
    return (N - n) * (n + ab.a), n * (N + ab.b - n)


def _rates_6B(N: int, c: float, n):
    return (N - n) * c, n * (1 - c)


def _apply(up: float, down: float, F: TestFunction, n: int, N: int) -> float:
    f0 = evaluate(F, n)
    out = 0.0
    if n < N:
        out += up * (evaluate(F, n + 1) - f0)
    if n > 0:
        out += down * (evaluate(F, n - 1) - f0)
    return out


def generator_6A(N: int, ab: AbParams, F: TestFunction, n: int) -> float:
    """``(N-n)(n+a)[F(n+1)-F(n)] + n(N+b-n)[F(n-1)-F(n)]``."""
    if not 0 <= n <= N:
        raise ValueError(f"state {n} outside 0..{N}")
    return _apply(*_rates_6A(N, ab, n), F, n, N)


def generator_6B(N: int, c: float, F: TestFunction, n: int) -> float:
    """``(N-n)c[F(n+1)-F(n)] + n(1-c)[F(n-1)-F(n)]``."""
    if not 0 <= c <= 1:
        raise ValueError("c must lie in [0, 1]")
    if not 0 <= n <= N:
        raise ValueError(f"state {n} outside 0..{N}")
    return _apply(*_rates_6B(N, c, n), F, n, N)


def _rate_matrix(N: int, rates) -> np.ndarray:
    Q = np.zeros((N + 1, N + 1))
    for n in range(N + 1):
        up, down = rates(n)
        if n < N:
            Q[n, n + 1] = up
        if n > 0:
            Q[n, n - 1] = down
        Q[n, n] = -Q[n].sum()
    return Q


def rate_matrix_6A(N: int, ab: AbParams) -> np.ndarray:
    return _rate_matrix(N, lambda n: _rates_6A(N, ab, n))


def rate_matrix_6B(N: int, c: float) -> np.ndarray:
    return _rate_matrix(N, lambda n: _rates_6B(N, c, n))


def intertwining_residual(N: int, model: str, ab: AbParams | None = None, c: float | None = None) -> float:
    """``max |Q_N L - L Q_{N-1}|`` for the Pascal link ``L`` from level N to level N-1."""
    if model == "6A":
        Qn, Qm = rate_matrix_6A(N, ab), rate_matrix_6A(N - 1, ab)
    elif model == "6B":
        Qn, Qm = rate_matrix_6B(N, c), rate_matrix_6B(N - 1, c)
    else:
        raise ValueError(f"unknown model {model!r}")
    L = link_matrix(N)
    return float(np.abs(Qn @ L - L @ Qm).max())


def hypergeometric_stationary(N: int, ab: AbParams) -> np.ndarray:
    """Stationary law of model A on ``{0..N}``."""
    a, b = ab.a, ab.b
    n = np.arange(N + 1)
    lg = np.vectorize(math.lgamma)
    log_p = (math.lgamma(a + b) + math.lgamma(N + 1) - math.lgamma(a) - math.lgamma(b)
             - math.lgamma(a + b + N)
             + lg(a + n) + lg(b + N - n) - lg(n + 1.0) - lg(N - n + 1.0))
    return np.exp(log_p)


def binomial_boundary_kernel(x, N: int) -> list:
    """Binomial(N, x) law on ``{0..N}``; exact rationals when ``x`` is rational."""
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    if isinstance(x, Rational):
        x = Fraction(x)
    return [math.comb(N, n) * x**n * (1 - x) ** (N - n) for n in range(N + 1)]


def flow_6B(c: float, x0: float, t: float) -> float:
    """Boundary flow of model B: ``c - (c - x0) exp(-t)``."""
    return c - (c - x0) * math.exp(-t)


def simulate_batch(N: int, n0, t_max: float, seed: int, runs: int, model: str = "6B",
                   ab: AbParams | None = None, c: float | None = None) -> np.ndarray:
    """Final states at ``t_max`` of ``runs`` independent copies started at ``n0``."""
    rng = make_rng(seed)
    n = np.full(runs, int(n0), dtype=np.int64) if np.ndim(n0) == 0 else np.array(n0, dtype=np.int64)
    t = np.zeros(n.shape[0])
    active = np.arange(n.shape[0])
    rates = _rates_for(model, N, ab, c)
    while active.size:
        up, down = rates(n[active])
        up = np.asarray(up, dtype=float)
        down = np.asarray(down, dtype=float)
        total = up + down
        alive = total > 0
        dt = np.full(active.size, np.inf)
        dt[alive] = -np.log1p(-rng.random(int(alive.sum()))) / total[alive]
        t_new = t[active] + dt
        moving = t_new <= t_max
        idx = active[moving]
        if idx.size == 0:
            break
        go_up = rng.random(idx.size) * total[moving] < up[moving]
        n[idx] += np.where(go_up, 1, -1)
        t[idx] = t_new[moving]
        active = idx
    return n


def _rates_for(model: str, N: int, ab: AbParams | None, c: float | None):
    if model == "6A":
        if ab is None:
            raise ValueError("model 6A needs parameters a, b")
        return lambda n: _rates_6A(N, ab, n)
    if model == "6B":
        if c is None or not 0 <= c <= 1:
            raise ValueError("model 6B needs c in [0, 1]")
        return lambda n: _rates_6B(N, c, n)
    raise ValueError(f"unknown model {model!r}")


def simulate_path(N: int, n0: int, t_max: float, seed: int, model: str = "6B",
                  ab: AbParams | None = None, c: float | None = None,
                  max_events: int = DEFAULT_MAX_EVENTS) -> Trajectory:
    """One event-driven run on ``{0..N}`` with the full jump record."""
    if not 0 <= n0 <= N:
        raise ValueError(f"start {n0} outside 0..{N}")
    rates = _rates_for(model, N, ab, c)
    stream = UniformStream(make_rng(seed))
    times, states = [0.0], [int(n0)]
    t, n = 0.0, int(n0)
    truncated = False
    while True:
        if len(times) - 1 >= max_events:
            truncated = True
            break
        up, down = rates(n)
        total = up + down
        if total <= 0:
            break
        t += stream.exponential(total)
        if t > t_max:
            break
        n = n + 1 if stream.next() * total < up else n - 1
        times.append(t)
        states.append(n)
    return Trajectory(times, states, seed=seed, t_max=t_max, truncated=truncated, labels=("n",))


def check_pascal_all(n_max: int = 10, ab: AbParams | None = None, c: float = 0.7,
                     x_values=(0.1, 0.3, 0.5, 0.7, 0.9)) -> list[VerificationReport]:
    """Exact checks of the Pascal sandbox for all levels up to ``n_max``."""
    ab = ab or AbParams(1.5, 2.5)
    reports = []
    params = {"n_max": n_max, "a": ab.a, "b": ab.b, "c": c}
    r6a = max(intertwining_residual(N, "6A", ab=ab) for N in range(2, n_max + 1))
    reports.append(VerificationReport("pascal_intertwine_6A", params, r6a, 1e-12))
    r6b = max(intertwining_residual(N, "6B", c=c) for N in range(2, n_max + 1))
    reports.append(VerificationReport("pascal_intertwine_6B", params, r6b, 1e-12))

    stat = max(float(np.abs(hypergeometric_stationary(N, ab) @ rate_matrix_6A(N, ab)).max())
               for N in range(1, n_max + 1))
    reports.append(VerificationReport("pascal_hypergeometric_stationary", params, stat, 1e-10))

    coh = 0.0
    for N in range(2, n_max + 1):
        coh = max(coh, float(np.abs(hypergeometric_stationary(N, ab) @ link_matrix(N)
                                    - hypergeometric_stationary(N - 1, ab)).max()))
    reports.append(VerificationReport("pascal_hypergeometric_coherence", params, coh, 1e-12))

    # binomial coherence in exact arithmetic, with c replaced by a nearby rational
    cq = Fraction(c).limit_denominator(1000)
    exact_bad = 0
    for N in range(2, n_max + 1):
        K = pascal_link(N)
        row = binomial_boundary_kernel(cq, N)
        pushed = [sum(row[n] * K.entry(n, m) for n in range(N + 1)) for m in range(N)]
        exact_bad += sum(p != q for p, q in zip(pushed, binomial_boundary_kernel(cq, N - 1)))
    reports.append(VerificationReport("pascal_binomial_coherence_exact", {**params, "c_rational": str(cq)},
                                      exact_bad, 0))

    stat_b = max(float(np.abs(np.array(binomial_boundary_kernel(c, N)) @ rate_matrix_6B(N, c)).max())
                 for N in range(1, n_max + 1))
    reports.append(VerificationReport("pascal_binomial_stationary", params, stat_b, 1e-12))

    comp = 0.0
    for N in range(2, n_max + 1):
        for x in x_values:
            lhs = np.array(binomial_boundary_kernel(x, N)) @ link_matrix(N)
            comp = max(comp, float(np.abs(lhs - np.array(binomial_boundary_kernel(x, N - 1))).max()))
    reports.append(VerificationReport("pascal_boundary_compatibility", {**params, "x": list(x_values)},
                                      comp, 1e-14))
    return reports
