"""Parameter quadruples and their admissibility.

A pair ``(a, b)`` of complex numbers is admissible when ``(a - l)(b - l) > 0``
for every integer ``l``.  This happens exactly when the pair is a nonreal
conjugate pair, or when both entries are real and lie in the same open
interval ``(m, m + 1)`` between consecutive integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

REAL_TOL = 1e-12
CONJ_RTOL = 1e-12

__all__ = [
    "AdmissiblePair",
    "ZwParams",
    "UvParams",
    "check_admissible",
    "shift_params",
    "measure_finite",
    "parse_number",
    "parse_quadruple",
    "zw_from_mapping",
]


def _is_real(x: complex) -> bool:
    return abs(x.imag) <= REAL_TOL


def check_admissible(a: complex, b: complex) -> bool:
    """Return True iff ``(a - l)(b - l) > 0`` for all integers ``l``."""
    a, b = complex(a), complex(b)
    if _is_real(a) and _is_real(b):
        x, y = a.real, b.real
        m = math.floor(x)
        if x == m or y == math.floor(y):
            return False
        return math.floor(y) == m
    if _is_real(a) or _is_real(b):
        return False
    scale = max(abs(a.imag), abs(b.imag))
    if abs(a.imag + b.imag) > CONJ_RTOL * scale:
        return False
    return abs(a.real - b.real) <= CONJ_RTOL * max(1.0, abs(a.real), abs(b.real))


@dataclass(frozen=True)
class AdmissiblePair:
    """An admissible pair ``(a, b)``; raises ``ValueError`` otherwise."""

    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if not check_admissible(self.a, self.b):
            raise ValueError(f"pair ({self.a}, {self.b}) is not admissible")

    @property
    def is_real(self) -> bool:
        return _is_real(self.a)

    @property
    def total(self) -> float:
        """``a + b``, which is real for admissible pairs."""
        return (self.a + self.b).real

    def product_at(self, l) -> float:
        """``(a - l)(b - l)`` as a real number (positive for integer ``l``)."""
        return ((self.a - l) * (self.b - l)).real

    def shifted(self, k: float) -> AdmissiblePair:
        return AdmissiblePair(self.a + k, self.b + k)

    def as_tuple(self) -> tuple[complex, complex]:
        return (self.a, self.b)


@dataclass(frozen=True)
class UvParams:
    """Rate parameters ``(u, u', v, v')`` of the chains on ``Omega_N``."""

    uu: AdmissiblePair
    vv: AdmissiblePair

    @classmethod
    def from_values(cls, u, up, v, vp) -> UvParams:
        return cls(AdmissiblePair(u, up), AdmissiblePair(v, vp))

    @property
    def sum_real(self) -> float:
        return self.uu.total + self.vv.total

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (*self.uu.as_tuple(), *self.vv.as_tuple())

    def swapped(self) -> UvParams:
        """Exchange ``(u, u')`` and ``(v, v')`` (the reflection ``l -> -l``)."""
        return UvParams(self.vv, self.uu)


@dataclass(frozen=True)
class ZwParams:
    """The level-independent quadruple ``(z, z', w, w')``."""

    zz: AdmissiblePair
    ww: AdmissiblePair

    @classmethod
    def from_values(cls, z, zp, w, wp) -> ZwParams:
        return cls(AdmissiblePair(z, zp), AdmissiblePair(w, wp))

    @property
    def sum_real(self) -> float:
        return self.zz.total + self.ww.total

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (*self.zz.as_tuple(), *self.ww.as_tuple())

    def swapped(self) -> ZwParams:
        return ZwParams(self.ww, self.zz)


def shift_params(zw: ZwParams, N: int) -> UvParams:
    """Level-``N`` rate parameters ``(z + N - 1, z' + N - 1, w, w')``."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return UvParams(zw.zz.shifted(N - 1), zw.ww)


def measure_finite(uv: UvParams, N: int) -> bool:
    """Whether the symmetrizing measure on ``Omega_N`` has finite mass."""
    return uv.sum_real > 2 * N - 3


def parse_number(value: Any) -> complex:
    """Parse a real, a complex literal such as ``"1+2j"``, or ``{"re": .., "im": ..}``."""
    if isinstance(value, Mapping):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, str):
        return complex(value.strip().replace("i", "j").replace(" ", ""))
    return complex(value)


def parse_quadruple(text: str) -> tuple[complex, complex, complex, complex]:
    """Parse ``"a,b,c,d"`` into four complex numbers."""
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 4:
        raise ValueError(f"expected four comma-separated values, got {text!r}")
    return tuple(parse_number(p) for p in parts)  # type: ignore[return-value]


_ZW_KEYS = (("z",), ("z'", "zp", "z_prime"), ("w",), ("w'", "wp", "w_prime"))


def zw_from_mapping(config: Mapping[str, Any]) -> ZwParams:
    """Build ``ZwParams`` from a JSON-style mapping with keys z, z', w, w'."""
    values = []
    for aliases in _ZW_KEYS:
        for key in aliases:
            if key in config:
                values.append(parse_number(config[key]))
                break
        else:
            raise ValueError(f"missing parameter {aliases[0]!r}")
    return ZwParams.from_values(*values)
