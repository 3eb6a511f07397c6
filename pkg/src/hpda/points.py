"""Exact memory/load operating points shared by constructions and baselines."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import ParameterError


@dataclass(frozen=True)
class PdaPoint:
    """Single-layer operating point of a (K, F, Z, S) PDA."""

    K: int
    m: Fraction
    r: Fraction
    f: int
    tag: str = ""


@dataclass(frozen=True)
class SchemePoint:
    """Two-layer operating point: normalized memories, loads and subpacketization."""

    m1: Fraction
    m2: Fraction
    r1: Fraction
    r2: Fraction
    f: int | None
    tag: str = ""
    K1: int | None = None
    K2: int | None = None

    def __post_init__(self):
        for name in ("m1", "m2", "r1", "r2"):
            val = getattr(self, name)
            if not isinstance(val, Fraction):
                object.__setattr__(self, name, Fraction(val))
        if not (0 <= self.m1 <= 1 and 0 <= self.m2 <= 1):
            raise ParameterError(f"memory ratios must lie in [0, 1], got ({self.m1}, {self.m2})")
        if self.r1 < 0 or self.r2 < 0:
            raise ParameterError(f"loads must be non-negative, got ({self.r1}, {self.r2})")
        if self.f is not None and self.f < 1:
            raise ParameterError(f"subpacketization must be >= 1, got {self.f}")

    @property
    def t_seq(self) -> Fraction:
        return self.r1 + self.r2

    @property
    def t_par(self) -> Fraction:
        return max(self.r1, self.r2)

    def retag(self, tag: str) -> "SchemePoint":
        return replace(self, tag=tag)


def frac(x) -> Fraction:
    """Coerce ints, Fractions and exact decimal strings; floats are refused."""
    if isinstance(x, float):
        raise TypeError("use exact values (int, Fraction or 'p/q' string), not float")
    return Fraction(x)
