from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from backend.errors import SystemModelError


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in z, coefficients in descending powers."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        values = tuple(float(c) for c in coeffs)
        if not values:
            raise SystemModelError("polynomial needs at least one coefficient")
        if not all(math.isfinite(c) for c in values):
            raise SystemModelError(f"non-finite polynomial coefficient in {values}")
        object.__setattr__(self, "coeffs", values)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, index):
        return self.coeffs[index]

    @property
    def degree(self) -> int:
        return len(self.trim().coeffs) - 1

    @property
    def leading(self) -> float:
        return self.trim().coeffs[0]

    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)

    def trim(self) -> Polynomial:
        """Drop leading zeros, keeping at least one coefficient."""
        values = self.coeffs
        start = 0
        while start < len(values) - 1 and values[start] == 0.0:
            start += 1
        return self if start == 0 else Polynomial(values[start:])

    def pad(self, length: int) -> Polynomial:
        """Left-pad with zeros to ``length`` coefficients (same polynomial)."""
        missing = length - len(self.coeffs)
        if missing <= 0:
            return self
        return Polynomial((0.0,) * missing + self.coeffs)

    def scale(self, factor: float) -> Polynomial:
        return Polynomial(c * factor for c in self.coeffs)

    def exact(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c) for c in self.coeffs)

    def __call__(self, z):
        return np.polyval(np.asarray(self.coeffs), z)

    def __add__(self, other: Polynomial) -> Polynomial:
        size = max(len(self), len(other))
        left, right = self.pad(size), other.pad(size)
        return Polynomial(a + b for a, b in zip(left.coeffs, right.coeffs))

    def __mul__(self, other: Polynomial) -> Polynomial:
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


def as_polynomial(p: Polynomial | Sequence[float]) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial(p)
