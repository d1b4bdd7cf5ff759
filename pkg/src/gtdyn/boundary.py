"""Edrei parameters of the boundary and the boundary links.

A point ``omega = (alpha+, beta+, alpha-, beta-, delta+, delta-)`` of the
boundary determines a totally positive two-sided sequence ``phi_n`` through
its generating function, a product of probability generating functions:

* ``exp(gamma+ (u - 1))``        Poisson(gamma+) on ``n >= 0``
* ``exp(gamma- (1/u - 1))``      Poisson(gamma-) on ``n <= 0``
* ``1 + beta (u - 1)``           Bernoulli(beta) on ``{0, 1}`` (mirrored for beta-)
* ``1 / (1 - alpha (u - 1))``    geometric with ratio ``alpha / (1 + alpha)``

where ``gamma± = delta± - sum(alpha± + beta±)``.  The link to level N is
``dim(lambda) * det[phi_{lambda_i - i + j}]``.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from .exceptions import NumericDomainError, WindowError
from .links import dim_weyl, link_row_float
from .verify import VerificationReport

log = logging.getLogger(__name__)

MASS_TOL = 1e-12
DEFAULT_EPS = 1e-12

__all__ = [
    "EdreiOmega",
    "LaurentWindow",
    "validate_omega",
    "phi_coefficients",
    "toeplitz_det",
    "total_positivity_check",
    "boundary_link",
    "boundary_row",
    "boundary_link_row_mass",
    "check_boundary_compatibility",
]


def _as_tuple(values) -> tuple:
    return tuple(v for v in values)


@dataclass(frozen=True)
class EdreiOmega:
    """Finitely supported Edrei parameters; entries may be floats or Fractions."""

    alpha_plus: tuple = ()
    beta_plus: tuple = ()
    alpha_minus: tuple = ()
    beta_minus: tuple = ()
    delta_plus: float = 0.0
    delta_minus: float = 0.0

    def __post_init__(self):
        for name in ("alpha_plus", "beta_plus", "alpha_minus", "beta_minus"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name)))

    @property
    def gamma_plus(self):
        return self.delta_plus - sum(self.alpha_plus) - sum(self.beta_plus)

    @property
    def gamma_minus(self):
        return self.delta_minus - sum(self.alpha_minus) - sum(self.beta_minus)

    @classmethod
    def pascal(cls, x) -> EdreiOmega:
        """The point of the boundary matching ``x`` in the Pascal boundary ``[0, 1]``."""
        return cls(beta_plus=(x,), delta_plus=x)

    @classmethod
    def from_dict(cls, data: dict) -> EdreiOmega:
        return cls(
            alpha_plus=tuple(data.get("alpha_plus", ())),
            beta_plus=tuple(data.get("beta_plus", ())),
            alpha_minus=tuple(data.get("alpha_minus", ())),
            beta_minus=tuple(data.get("beta_minus", ())),
            delta_plus=data.get("delta_plus", 0.0),
            delta_minus=data.get("delta_minus", 0.0),
        )

    @classmethod
    def parse(cls, text: str) -> EdreiOmega:
        """``"zero"``, ``"pascal:X"`` (X may be a fraction like ``1/3``), a JSON object, or a JSON file path."""
        text = text.strip()
        if text == "zero":
            return cls()
        if text.startswith("pascal:"):
            return cls.pascal(Fraction(text.split(":", 1)[1]))
        if text.startswith("{"):
            return cls.from_dict(json.loads(text))
        with open(text, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        def f(x):
            return float(x)
        return {
            "alpha_plus": [f(a) for a in self.alpha_plus],
            "beta_plus": [f(b) for b in self.beta_plus],
            "alpha_minus": [f(a) for a in self.alpha_minus],
            "beta_minus": [f(b) for b in self.beta_minus],
            "delta_plus": f(self.delta_plus),
            "delta_minus": f(self.delta_minus),
        }

    @property
    def is_exact(self) -> bool:
        """True if every entry is rational and no factor needs truncation."""
        values = [*self.beta_plus, *self.beta_minus, self.delta_plus, self.delta_minus]
        return (all(isinstance(v, Rational) or v == 0 for v in values)
                and not any(self.alpha_plus) and not any(self.alpha_minus)
                and self.gamma_plus == 0 and self.gamma_minus == 0)


def validate_omega(omega: EdreiOmega, tol: float = 1e-12) -> tuple[bool, list[str]]:
    """Check every constraint on ``omega``; return ``(ok, violated clauses)``."""
    problems = []
    for name in ("alpha_plus", "beta_plus", "alpha_minus", "beta_minus"):
        seq = getattr(omega, name)
        if any(x < 0 for x in seq):
            problems.append(f"{name} has a negative entry")
        if any(seq[k] < seq[k + 1] for k in range(len(seq) - 1)):
            problems.append(f"{name} is not nonincreasing")
    for sign in ("plus", "minus"):
        delta = getattr(omega, f"delta_{sign}")
        gamma = getattr(omega, f"gamma_{sign}")
        if delta < 0:
            problems.append(f"delta_{sign} is negative")
        if gamma < -tol:
            problems.append(f"sum(alpha_{sign} + beta_{sign}) exceeds delta_{sign}")
    b_plus = omega.beta_plus[0] if omega.beta_plus else 0
    b_minus = omega.beta_minus[0] if omega.beta_minus else 0
    if b_plus + b_minus > 1 + tol:
        problems.append("beta_plus[0] + beta_minus[0] exceeds 1")
    return (not problems), problems


@dataclass(frozen=True)
class LaurentWindow:
    """Coefficients ``phi_n`` for ``n`` in ``[lo, hi]``.

    ``lo_exact`` / ``hi_exact`` mean the sequence vanishes identically beyond
    that end; otherwise the mass outside the window is at most ``tail_bound``.
    """

    lo: int
    coeffs: np.ndarray
    tail_bound: float = 0.0
    lo_exact: bool = True
    hi_exact: bool = True
    warnings: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if any(c < 0 for c in coeffs):
            raise ValueError("negative coefficient in a Laurent window")
        mass = float(sum(coeffs))
        if mass > 1 + MASS_TOL or mass + self.tail_bound < 1 - MASS_TOL:
            raise ValueError(f"window mass {mass} with tail bound {self.tail_bound} is not a probability")

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    def phi(self, n: int):
        if self.lo <= n <= self.hi:
            return self.coeffs[n - self.lo]
        if (n < self.lo and self.lo_exact) or (n > self.hi and self.hi_exact):
            return Fraction(0) if self.exact else 0.0
        raise WindowError(f"phi_{n} lies outside the truncated window [{self.lo}, {self.hi}]")

    def as_dict(self) -> dict[int, float]:
        return {self.lo + k: c for k, c in enumerate(self.coeffs)}

    def to_csv(self) -> str:
        lines = ["n,phi"]
        lines += [f"{n},{float(c)!r}" for n, c in self.as_dict().items()]
        return "\n".join(lines) + "\n"


def _convolve(a: tuple[int, np.ndarray], b: tuple[int, np.ndarray]) -> tuple[int, np.ndarray]:
    (oa, xa), (ob, xb) = a, b
    if xa.dtype == object or xb.dtype == object:
        out = np.array([Fraction(0)] * (len(xa) + len(xb) - 1), dtype=object)
        for i, p in enumerate(xa):
            for j, q in enumerate(xb):
                out[i + j] += p * q
        return oa + ob, out
    return oa + ob, np.convolve(xa, xb)


def _poisson_cut(rate: float, budget: float, at_least: int) -> int:
    n = max(at_least, int(rate))
    while poisson.sf(n, rate) >= budget:
        n += 1
    return n


def _geometric_cut(ratio: float, budget: float, at_least: int) -> int:
    if ratio == 0:
        return at_least
    # tail P(X > n) = ratio^(n+1)
    n = max(at_least, math.ceil(math.log(budget) / math.log(ratio)) - 1)
    while ratio ** (n + 1) >= budget:
        n += 1
    return n


def phi_coefficients(omega: EdreiOmega, eps: float = DEFAULT_EPS,
                     lo: int | None = None, hi: int | None = None) -> LaurentWindow:
    """Laurent coefficients of the generating function of ``omega``.

    Each truncated factor discards less than ``eps / (number of truncated
    factors)`` of its mass, so the total discarded mass is below ``eps``.
    ``lo`` and ``hi`` request a minimum extent of the window.
    """
    ok, problems = validate_omega(omega)
    if not ok:
        raise ValueError("invalid Edrei parameters: " + "; ".join(problems))
    exact = omega.is_exact
    one = Fraction(1) if exact else 1.0
    gp, gm = omega.gamma_plus, omega.gamma_minus
    ap = [a for a in omega.alpha_plus if a > 0]
    am = [a for a in omega.alpha_minus if a > 0]
    truncated = (gp > 0) + (gm > 0) + len(ap) + len(am)
    budget = eps / truncated if truncated else eps
    want_hi = max(hi or 0, 0)
    want_lo = max(-(lo or 0), 0)

    factors = []
    tail = 0.0
    if gp > 0:
        n = _poisson_cut(float(gp), budget, want_hi)
        factors.append((0, poisson.pmf(np.arange(n + 1), float(gp))))
        tail += float(poisson.sf(n, float(gp)))
    if gm > 0:
        n = _poisson_cut(float(gm), budget, want_lo)
        factors.append((-n, poisson.pmf(np.arange(n + 1), float(gm))[::-1].copy()))
        tail += float(poisson.sf(n, float(gm)))
    for b in omega.beta_plus:
        if b > 0:
            factors.append((0, np.array([one - b, b], dtype=object if exact else float)))
    for b in omega.beta_minus:
        if b > 0:
            factors.append((-1, np.array([b, one - b], dtype=object if exact else float)))
    for group, sign, want in ((ap, 1, want_hi), (am, -1, want_lo)):
        for a in group:
            r = float(a) / (1 + float(a))
            n = _geometric_cut(r, budget, want)
            pmf = (1 - r) * r ** np.arange(n + 1)
            factors.append((0, pmf) if sign > 0 else (-n, pmf[::-1].copy()))
            tail += r ** (n + 1)

    acc = (0, np.array([one], dtype=object if exact else float))
    for f in factors:
        acc = _convolve(acc, f)
    offset, coeffs = acc
    return LaurentWindow(
        lo=offset, coeffs=coeffs, tail_bound=tail,
        lo_exact=not (gm > 0 or am), hi_exact=not (gp > 0 or ap),
    )


def _leibniz_det(M) -> object:
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= M[i][perm[i]]
            if term == 0:
                break
        total += term
    return total


def _fraction_det(M) -> Fraction:
    A = [list(map(Fraction, row)) for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if A[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return det


def toeplitz_det(window: LaurentWindow, lam: Sequence[int]):
    """``det[phi_{lam_i - i + j}]_{i,j=1..N}``."""
    N = len(lam)
    M = [[window.phi(lam[i] - (i + 1) + (j + 1)) for j in range(N)] for i in range(N)]
    if window.exact:
        return _leibniz_det(M) if N <= 4 else _fraction_det(M)
    if N <= 4:
        return float(_leibniz_det(M))
    return float(np.linalg.det(np.array(M, dtype=float)))


def _window_for(omega_or_window, lo: int, hi: int, eps: float) -> LaurentWindow:
    if isinstance(omega_or_window, LaurentWindow):
        return omega_or_window
    return phi_coefficients(omega_or_window, eps, lo=lo, hi=hi)


def _link_value(window: LaurentWindow, lam: Sequence[int], eps: float):
    value = dim_weyl(lam) * toeplitz_det(window, lam)
    if value < 0:
        if value < -eps:
            raise NumericDomainError(f"boundary link {float(value)} is negative beyond tolerance")
        return 0.0, True
    return value, False


def boundary_link(omega, lam: Sequence[int], eps: float = DEFAULT_EPS, return_bound: bool = False):
    """``dim(lam) * det[phi_{lam_i - i + j}]``, the link from the boundary to a signature.

    ``omega`` may be an :class:`EdreiOmega` or a precomputed
    :class:`LaurentWindow`.  Negative values above ``-eps`` are clamped to 0.
    With ``return_bound`` a first-order bound on the effect of the coefficient
    tail is returned as well.
    """
    N = len(lam)
    window = _window_for(omega, lam[-1] - N + 1, lam[0] + N - 1, eps)
    value, clamped = _link_value(window, lam, eps)
    if clamped:
        log.warning("clamped a negative boundary link to 0 at %s", tuple(lam))
    if return_bound:
        bound = dim_weyl(lam) * N * N * math.factorial(N - 1) * window.tail_bound
        return value, bound
    return value


def boundary_row(omega, N: int, coord_window: tuple[int, int], eps: float = DEFAULT_EPS) -> dict:
    """Boundary link values at all points of Omega_N with coordinates in ``coord_window``."""
    lo, hi = coord_window
    window = _window_for(omega, lo - N + 1, hi, eps)
    out = {}
    clamped = 0
    for point in itertools.combinations(range(hi, lo - 1, -1), N):
        lam = tuple(l - (N - 1 - k) for k, l in enumerate(point))
        out[point], hit = _link_value(window, lam, eps)
        clamped += hit
    if clamped:
        log.warning("clamped %d negative boundary links to 0 (rounding below %.1e)", clamped, eps)
    return out


def boundary_link_row_mass(omega, N: int, coord_window: tuple[int, int],
                           eps: float = DEFAULT_EPS) -> float:
    """Total boundary-link mass on the points of Omega_N inside ``coord_window``."""
    return float(sum(boundary_row(omega, N, coord_window, eps).values()))


def total_positivity_check(window: LaurentWindow, max_order: int = 3, eps_tp: float = 1e-10,
                           row_span: int = 6, max_columns: int = 40) -> VerificationReport:
    """Check all Toeplitz minors up to ``max_order`` built from the window.

    By translation invariance the first row index is fixed to 0; the other
    rows range over ``[1, row_span)`` and the columns over every position
    whose entries stay inside the window or in a region known to vanish.
    Windows too narrow for that are padded with zeros, and the tolerance
    grows by the propagated tail bound.
    """
    if not 1 <= max_order <= 4:
        raise ValueError("max_order must be between 1 and 4")
    R = max(row_span, max_order)
    c_lo = window.lo if window.lo_exact else window.lo + R - 1
    c_hi = window.hi + R - 1 if window.hi_exact else window.hi
    padded = c_hi - c_lo + 1 < R
    if padded:
        # too narrow to stay inside the window: treat the truncated tails as zero
        c_lo, c_hi = window.lo, window.hi + R - 1
    if c_hi - c_lo + 1 > max_columns:
        mid = (c_lo + c_hi) // 2
        c_lo, c_hi = mid - max_columns // 2, mid - max_columns // 2 + max_columns - 1
    cols = np.arange(c_lo, c_hi + 1)

    def entry(n):
        return float(window.phi(n)) if window.lo <= n <= window.hi else 0.0

    T = np.array([[entry(j - i) for j in cols] for i in range(R)])
    tol = eps_tp
    if padded:
        # entries move by at most tail_bound, a k x k minor by at most k * k! times that
        tol += max_order * math.factorial(max_order) * window.tail_bound

    worst, worst_at, count = math.inf, None, 0
    for k in range(1, min(max_order, len(cols)) + 1):
        rows = np.array([(0, *rest) for rest in itertools.combinations(range(1, R), k - 1)])
        col_sets = np.array(list(itertools.combinations(range(len(cols)), k)))
        sub = T[rows[:, None, :, None], col_sets[None, :, None, :]]
        dets = np.linalg.det(sub) if k > 1 else sub[..., 0, 0]
        count += dets.size
        idx = np.unravel_index(int(np.argmin(dets)), dets.shape)
        if dets[idx] < worst:
            worst = float(dets[idx])
            worst_at = {"order": k, "rows": rows[idx[0]].tolist(),
                        "cols": cols[col_sets[idx[1]]].tolist()}
    return VerificationReport(
        "total_positivity",
        {"lo": window.lo, "hi": window.hi, "max_order": max_order, "row_span": R},
        max(0.0, -worst), tol,
        {"min_minor": worst, "worst_minor": worst_at, "minors_checked": count, "padded": padded},
    )


def check_boundary_compatibility(omega: EdreiOmega, N: int, coord_window: tuple[int, int],
                                 margin: int = 3, tol: float = 1e-6,
                                 eps: float = DEFAULT_EPS) -> VerificationReport:
    """Push the level-N boundary row through the link and compare with level N-1.

    Compared on points of Omega_{N-1} at least ``margin`` cells inside the
    coordinate window.
    """
    if N < 2:
        raise ValueError("compatibility needs N >= 2")
    lo, hi = coord_window
    window = _window_for(omega, lo - N + 1, hi, eps)
    upper = boundary_row(window, N, coord_window, eps)
    pushed: dict = {}
    for point, value in upper.items():
        if value == 0:
            continue
        for y, p in link_row_float(point):
            pushed[y] = pushed.get(y, 0.0) + float(value) * p
    lower = boundary_row(window, N - 1, coord_window, eps)
    worst, worst_at = 0.0, None
    for y, v in lower.items():
        if min(y) < lo + margin or max(y) > hi - margin:
            continue
        r = abs(pushed.get(y, 0.0) - float(v))
        if r > worst:
            worst, worst_at = r, y
    return VerificationReport(
        "boundary_compatibility",
        {"omega": omega.to_dict(), "N": N, "window": list(coord_window), "margin": margin},
        worst, tol,
        {"worst_state": None if worst_at is None else list(worst_at), "tail_bound": window.tail_bound},
    )
