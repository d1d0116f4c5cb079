"""Bit-exact <I,F> two's-complement fixed-point arithmetic.

A value is held as a signed integer ``raw`` scaled by 2^-F.  I counts the
integer bits including the sign, so the representable range is
[-2^(I-1), 2^(I-1) - 2^-F].

Rounding defaults to floor (toward minus infinity).  Floor is an inferred
rule: it is the one that maps the third-order controller denominator
[1, -1.97, 1.033, -0.06068] to [1, -2, 1, -0.125] at <12,3>.
Round-half-to-even is available as an option.

Dynamic-range bounds are kept as exact rationals so that words wider than a
double mantissa (up to 64 bits) keep their full representable range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable

import numpy as np

from backend.errors import FormatError
from backend.polynomial import Polynomial, as_polynomial

MAX_WORD_BITS = 64


class OverflowMode(str, Enum):
    WRAP = "wrap"
    SATURATE = "saturate"


class Rounding(str, Enum):
    FLOOR = "floor"
    NEAREST_EVEN = "nearest-even"


def _range_end(value, limit: Fraction) -> Fraction:
    """Exact range bound; the double nearest to ``limit`` stands for ``limit``."""
    if value is None:
        return limit
    if isinstance(value, Rational):
        return Fraction(value)
    if not math.isfinite(value):
        raise FormatError(f"dynamic range bound must be finite, got {value}")
    if float(value) == float(limit):
        return limit
    return Fraction(float(value))


@dataclass(frozen=True)
class FxFormat:
    int_bits: int
    frac_bits: int
    overflow_mode: OverflowMode = OverflowMode.WRAP
    rounding: Rounding = Rounding.FLOOR
    # None means "the whole representable range"; stored as exact Fractions
    dyn_min: Real | None = None
    dyn_max: Real | None = None

    def __post_init__(self):
        object.__setattr__(self, "overflow_mode", OverflowMode(self.overflow_mode))
        object.__setattr__(self, "rounding", Rounding(self.rounding))
        if self.int_bits < 1:
            raise FormatError(f"int_bits must be >= 1, got {self.int_bits}")
        if self.frac_bits < 0:
            raise FormatError(f"frac_bits must be >= 0, got {self.frac_bits}")
        if self.int_bits + self.frac_bits > MAX_WORD_BITS:
            raise FormatError(
                f"<{self.int_bits},{self.frac_bits}> exceeds {MAX_WORD_BITS} bits"
            )
        object.__setattr__(self, "dyn_min", _range_end(self.dyn_min, self.min_value))
        object.__setattr__(self, "dyn_max", _range_end(self.dyn_max, self.max_value))
        if not self.dyn_min < self.dyn_max:
            raise FormatError(
                f"dynamic range [{float(self.dyn_min)}, {float(self.dyn_max)}] is empty"
            )
        if self.dyn_min < self.min_value or self.dyn_max > self.max_value:
            raise FormatError(
                f"dynamic range [{float(self.dyn_min)}, {float(self.dyn_max)}] leaves the "
                f"representable range [{float(self.min_value)}, {float(self.max_value)}] "
                f"of <{self.int_bits},{self.frac_bits}>"
            )

    @property
    def width(self) -> int:
        return self.int_bits + self.frac_bits

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def raw_min(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.width - 1)) - 1

    @property
    def min_value(self) -> Fraction:
        return Fraction(self.raw_min, self.scale)

    @property
    def max_value(self) -> Fraction:
        return Fraction(self.raw_max, self.scale)

    @property
    def resolution(self) -> Fraction:
        return Fraction(1, self.scale)

    def representable(self, raw: int) -> bool:
        return self.raw_min <= raw <= self.raw_max

    def dynamic_raws(self) -> tuple[int, int]:
        """Smallest and largest raw whose value lies in [dyn_min, dyn_max]."""
        lo = math.ceil(Fraction(self.dyn_min) * self.scale)
        hi = math.floor(Fraction(self.dyn_max) * self.scale)
        return lo, hi

    def input_grid(self, stride: float | None = None) -> range:
        """Raws of the admissible nondeterministic values, ascending.

        The grid is lazy; for wide words it can hold up to 2^64 raws.

        ``stride`` coarsens the grid to the multiples of ``stride`` that lie
        in the dynamic range; it must be a positive multiple of 2^-F.
        """
        lo, hi = self.dynamic_raws()
        if stride is None:
            return range(lo, hi + 1)
        step = Fraction(stride) * self.scale
        if step <= 0 or step.denominator != 1:
            raise FormatError(
                f"grid stride {stride} is not a positive multiple of 2^-{self.frac_bits}"
            )
        step = int(step)
        start = -((-lo) // step) * step
        return range(start, hi + 1, step)

    def label(self) -> str:
        return f"<{self.int_bits},{self.frac_bits}>"


@dataclass(frozen=True)
class FxNum:
    raw: int
    fmt: FxFormat

    def __post_init__(self):
        if not self.fmt.representable(self.raw):
            raise FormatError(
                f"raw {self.raw} outside {self.fmt.width}-bit range of {self.fmt.label()}"
            )

    @property
    def exact(self) -> Fraction:
        return Fraction(self.raw, self.fmt.scale)

    @property
    def value(self) -> float:
        return self.raw / self.fmt.scale

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"FxNum({self.value!r} raw={self.raw} {self.fmt.label()})"


def fit_raw(raw: int, fmt: FxFormat) -> tuple[int, bool]:
    """Apply the overflow policy to an exact integer; flag if it did not fit."""
    if fmt.raw_min <= raw <= fmt.raw_max:
        return raw, False
    if fmt.overflow_mode is OverflowMode.WRAP:
        return ((raw - fmt.raw_min) % (1 << fmt.width)) + fmt.raw_min, True
    return (fmt.raw_max if raw > fmt.raw_max else fmt.raw_min), True


def round_scaled(value: Fraction, rounding: Rounding) -> int:
    if rounding is Rounding.FLOOR:
        return math.floor(value)
    # round() on a Fraction is round-half-to-even
    return round(value)


def mul_raw(a: int, b: int, fmt: FxFormat) -> tuple[int, bool]:
    """Double-width product of two raws, rescaled once to F bits."""
    product = a * b
    if fmt.rounding is Rounding.FLOOR:
        rescaled = product >> fmt.frac_bits
    else:
        rescaled = round(Fraction(product, fmt.scale))
    return fit_raw(rescaled, fmt)


def quantize_checked(x: Real, fmt: FxFormat) -> tuple[FxNum, bool]:
    if isinstance(x, FxNum):
        x = x.exact
    exact = x if isinstance(x, Rational) else Fraction(float(x))
    raw, flag = fit_raw(round_scaled(Fraction(exact) * fmt.scale, fmt.rounding), fmt)
    return FxNum(raw, fmt), flag


def quantize(x: Real, fmt: FxFormat) -> FxNum:
    return quantize_checked(x, fmt)[0]


def _same_format(a: FxNum, b: FxNum) -> FxFormat:
    if a.fmt != b.fmt:
        raise FormatError(f"format mismatch: {a.fmt.label()} vs {b.fmt.label()}")
    return a.fmt


def fx_add(a: FxNum, b: FxNum) -> tuple[FxNum, bool]:
    fmt = _same_format(a, b)
    raw, flag = fit_raw(a.raw + b.raw, fmt)
    return FxNum(raw, fmt), flag


def fx_sub(a: FxNum, b: FxNum) -> tuple[FxNum, bool]:
    fmt = _same_format(a, b)
    raw, flag = fit_raw(a.raw - b.raw, fmt)
    return FxNum(raw, fmt), flag


def fx_mul(a: FxNum, b: FxNum) -> tuple[FxNum, bool]:
    fmt = _same_format(a, b)
    raw, flag = mul_raw(a.raw, b.raw, fmt)
    return FxNum(raw, fmt), flag


def fwl_poly(p: Polynomial | Iterable[float], fmt: FxFormat) -> Polynomial:
    """The FWL map: every coefficient replaced by its quantized value.

    Rounding an in-range double onto a binary grid gives a double, so the
    float coefficients are exact at every width unless a coefficient wraps.
    """
    p = as_polynomial(p)
    return Polynomial(quantize(c, fmt).value for c in p.coeffs)


def quantize_matrix(m, fmt: FxFormat) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return np.vectorize(lambda x: quantize(x, fmt).value, otypes=[float])(m)


def raw_matrix(m, fmt: FxFormat) -> list[list[int]]:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return [[quantize(x, fmt).raw for x in row] for row in m]
