"""Digitization of rotation angles into half-turn plus binary-fraction digits.

An angle is split as

    theta = half_turns * pi + sum_{m=1..M} digit_m * pi / 2^m + remainder

with ``half_turns = floor(theta / pi)`` and ``|remainder| <= pi / 2^M``.  Two
digit extractors are provided: ``floor`` produces digits in {0, 1}; the
``balanced`` extractor produces signed digits in {-1, 0, 1} by greedy nearest
rounding.  Both satisfy the same remainder bound.

The impurity of a digit string is the angle the delegation protocol
over-rotates by: summing a digit's rotation with its impurity always gives
the digit-independent total pi - pi / 2^M, which is what makes the wire
schedule hide the digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

PI = math.pi


def precision_bits(epsilon: float) -> int:
    """Smallest M with pi / 2^M <= epsilon (at least 1 digit)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    # guard against ulp noise pushing an exact power-of-two boundary up
    return max(1, math.ceil(math.log2(PI / epsilon) - 1e-12))


@dataclass(frozen=True)
class AngleDigits:
    """Digitized angle: ``theta ~ half_turns*pi + sum digits[m-1]*pi/2^m``."""

    theta: float
    n_digits: int
    half_turns: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.digits) != self.n_digits:
            raise ValueError("digit count does not match n_digits")
        if any(d not in (-1, 0, 1) for d in self.digits):
            raise ValueError("digits must lie in {-1, 0, 1}")

    @property
    def nonzero_flags(self) -> tuple[int, ...]:
        """Per digit: 1 when a rotation is actually encoded, else 0."""
        return tuple(abs(d) for d in self.digits)

    @property
    def negative_flags(self) -> tuple[int, ...]:
        """Per digit: 1 when the encoded rotation is negative, else 0."""
        return tuple(1 if d < 0 else 0 for d in self.digits)

    @property
    def parity(self) -> int:
        """Half-turn parity; odd means an extra Z on reconstruction."""
        return self.half_turns % 2


def digitize(theta: float, n_digits: int, extractor: str = "floor") -> AngleDigits:
    if n_digits < 1:
        raise ValueError("need at least one digit")
    half_turns = math.floor(theta / PI)
    x = (theta - half_turns * PI) / PI
    # x is in [0, 1) mathematically; rounding near a half-turn boundary can
    # push it to exactly 1.0 or just below 0, which would break the digit sets
    x = min(max(x, 0.0), math.nextafter(1.0, 0.0))
    if extractor == "floor":
        digits = []
        prev = 0
        for m in range(1, n_digits + 1):
            cur = math.floor((2**m) * x)
            digits.append(cur - 2 * prev)
            prev = cur
    elif extractor == "balanced":
        digits = []
        r = x
        for m in range(1, n_digits + 1):
            d = min(1, max(-1, math.floor(r * 2**m + 0.5)))
            digits.append(d)
            r -= d / 2**m
    else:
        raise ValueError(f"unknown extractor {extractor!r}")
    return AngleDigits(float(theta), n_digits, half_turns, tuple(digits))


def reconstruct(d: AngleDigits) -> float:
    """Angle encoded by the digit string (drops only the remainder)."""
    frac = sum(dig / 2**m for m, dig in enumerate(d.digits, start=1))
    return d.half_turns * PI + frac * PI


def impurity(d: AngleDigits) -> float:
    """Extra rotation the protocol applies on top of the encoded fraction."""
    return sum((1 - dig) * PI / 2**m for m, dig in enumerate(d.digits, start=1))


def delegation_angle(half_turns: int, n_digits: int) -> float:
    """reconstruct + impurity for any digit string: digit-independent."""
    return half_turns * PI + PI - PI / 2**n_digits


def remainder(d: AngleDigits) -> float:
    return d.theta - reconstruct(d)
