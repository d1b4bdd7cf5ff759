"""Real logarithms of products of Gamma values at complex points.

The weights of the chains are reciprocals of products of Gamma functions whose
arguments come in conjugate pairs or in real pairs sharing a unit interval, so
each product is real and positive even though the individual factors are not.
We sum principal-branch complex log-gamma values and check that the imaginary
part is a multiple of ``2*pi``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import loggamma

from .exceptions import NumericDomainError

PHASE_TOL = 1e-8

__all__ = ["log_gamma_product", "log_gamma_product_array"]


def _check_phase(total: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(total)):
        raise NumericDomainError("log-gamma evaluated at a pole")
    phase = np.remainder(total.imag + np.pi, 2 * np.pi) - np.pi
    if np.any(np.abs(phase) > PHASE_TOL):
        worst = float(np.max(np.abs(phase)))
        raise NumericDomainError(f"Gamma product is not real positive (phase {worst:.3g})")
    return total.real


def log_gamma_product(plus=(), minus=()) -> float:
    """``log(prod Gamma(plus) / prod Gamma(minus))``, required to be real positive."""
    total = complex(0.0)
    for x in plus:
        total += complex(loggamma(complex(x)))
    for x in minus:
        total -= complex(loggamma(complex(x)))
    return float(_check_phase(np.asarray(total)))


def log_gamma_product_array(plus=(), minus=()) -> np.ndarray:
    """Vectorised :func:`log_gamma_product`; every argument is an array of one shape."""
    total = None
    for x in plus:
        term = loggamma(np.asarray(x, dtype=complex))
        total = term if total is None else total + term
    for x in minus:
        term = -loggamma(np.asarray(x, dtype=complex))
        total = term if total is None else total + term
    if total is None:
        return np.zeros(())
    return _check_phase(np.asarray(total))
