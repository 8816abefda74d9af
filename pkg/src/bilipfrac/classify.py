"""Bilipschitz classes of symbolic spaces with rational ratio.

``(r1, m1)`` and ``(r2, m2)`` are equivalent exactly when some positive
powers agree: ``r1^k1 = r2^k2`` and ``m1^k1 = m2^k2``.  Comparing prime
exponent vectors turns this into a proportionality test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from sympy import factorint

from .lattice import as_fraction


@dataclass(frozen=True)
class FractalClass:
    r: Fraction
    m: int

    def __post_init__(self):
        r = as_fraction(self.r)
        if not 0 < r < 1:
            raise ValueError(f"ratio must lie in (0, 1), got {r}")
        if int(self.m) < 2:
            raise ValueError(f"characteristic must be at least 2, got {self.m}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "m", int(self.m))

    def __str__(self):
        return f"({self.r.numerator}/{self.r.denominator}, {self.m})"


@dataclass(frozen=True)
class EquivalenceWitness:
    equivalent: bool
    k1: Optional[int] = None
    k2: Optional[int] = None


def dimension(c: FractalClass) -> float:
    return -math.log(c.m) / math.log(c.r)


def exponent_vector(c: FractalClass) -> dict:
    """Prime exponents of ``r`` (numerator positive) and of ``m``, keyed by role."""
    vec = {}
    for p, e in factorint(c.r.numerator).items():
        vec[("r", p)] = vec.get(("r", p), 0) + e
    for p, e in factorint(c.r.denominator).items():
        vec[("r", p)] = vec.get(("r", p), 0) - e
    for p, e in factorint(c.m).items():
        vec[("m", p)] = e
    return vec


def equivalent(c1: FractalClass, c2: FractalClass) -> EquivalenceWitness:
    """Test equivalence and return the least exponents ``(k1, k2)``."""
    v1, v2 = exponent_vector(c1), exponent_vector(c2)
    if set(v1) != set(v2):
        return EquivalenceWitness(False)
    ratio = None
    for key in v1:
        q = Fraction(v2[key], v1[key])
        if q <= 0 or (ratio is not None and q != ratio):
            return EquivalenceWitness(False)
        ratio = q
    # k1 * v1 = k2 * v2  =>  k1 / k2 = v2 / v1
    k1, k2 = ratio.numerator, ratio.denominator
    if c1.r ** k1 != c2.r ** k2 or c1.m ** k1 != c2.m ** k2:
        raise AssertionError("exponent witness failed exact verification")
    return EquivalenceWitness(True, k1, k2)


def reduce_class(c: FractalClass) -> FractalClass:
    """The equivalent class with the smallest root: ``(r^(1/g), m^(1/g))``."""
    vec = exponent_vector(c)
    g = 0
    for e in vec.values():
        g = math.gcd(g, abs(e))
    if g <= 1:
        return c
    num = 1
    den = 1
    m = 1
    for (role, p), e in vec.items():
        if role == "m":
            m *= p ** (e // g)
        elif e > 0:
            num *= p ** (e // g)
        else:
            den *= p ** (-e // g)
    reduced = FractalClass(Fraction(num, den), m)
    assert reduced.r ** g == c.r and reduced.m ** g == c.m
    return reduced
