"""System representations: transfer functions, state space, closed loops.

In closed loops only the controller is passed through the FWL map; the
plant models physical reality and stays at full precision.  Both
connection modes use negative unity feedback: ``series`` puts the
controller in the forward path (T = CP / (1 + CP)), ``feedback`` puts it in
the return path (T = P / (1 + CP)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import signal

from backend.errors import DegenerateLoopError, SystemModelError
from backend.fixedpoint import FxFormat, fwl_poly, quantize_matrix
from backend.polynomial import Polynomial, as_polynomial

__all__ = [
    "Polynomial",
    "TransferFunction",
    "StateSpace",
    "CMode",
    "ClosedLoopTf",
    "ClosedLoopSs",
    "close_loop_tf",
    "close_loop_ss",
    "tf_to_ss",
    "ss_to_tf",
]


@dataclass(frozen=True)
class TransferFunction:
    num: Polynomial
    den: Polynomial
    sample_time: float = 1.0

    def __post_init__(self):
        num = as_polynomial(self.num).trim()
        den = as_polynomial(self.den).trim()
        if den.is_zero():
            raise SystemModelError("transfer function denominator is zero")
        if not (self.sample_time > 0 and math.isfinite(self.sample_time)):
            raise SystemModelError(f"sample time must be positive, got {self.sample_time}")
        if not num.is_zero() and num.degree > den.degree:
            raise SystemModelError(
                f"improper transfer function: deg(num)={num.degree} > deg(den)={den.degree}"
            )
        lead = den.coeffs[0]
        object.__setattr__(self, "num", num.scale(1.0 / lead))
        object.__setattr__(self, "den", den.scale(1.0 / lead))

    @classmethod
    def from_filter(cls, b: Sequence[float], a: Sequence[float], sample_time: float = 1.0):
        """Build from DSP-convention coefficients of z^0, z^-1, z^-2, ..."""
        size = max(len(b), len(a))
        b = list(b) + [0.0] * (size - len(b))
        a = list(a) + [0.0] * (size - len(a))
        return cls(Polynomial(b), Polynomial(a), sample_time)

    @property
    def order(self) -> int:
        return self.den.degree

    def filter_coeffs(self) -> tuple[list[float], list[float]]:
        """(b, a) in the z^-1 convention, both of length order + 1, a[0] == 1."""
        n = self.order + 1
        return list(self.num.pad(n).coeffs), list(self.den.coeffs)

    def quantized(self, fmt: FxFormat) -> TransferFunction:
        return TransferFunction(fwl_poly(self.num, fmt), fwl_poly(self.den, fmt), self.sample_time)


@dataclass(frozen=True, eq=False)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    sample_time: float = 1.0

    def __post_init__(self):
        for name in ("A", "B", "C", "D"):
            m = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            if m.ndim != 2:
                raise SystemModelError(f"{name} must be a matrix")
            if not np.all(np.isfinite(m)):
                raise SystemModelError(f"{name} has non-finite entries")
            object.__setattr__(self, name, m)
        n = self.A.shape[0]
        if n < 1 or self.A.shape != (n, n):
            raise SystemModelError(f"A must be square with n >= 1, got {self.A.shape}")
        if self.B.shape[0] != n:
            raise SystemModelError(f"B has {self.B.shape[0]} rows, expected {n}")
        if self.C.shape[1] != n:
            raise SystemModelError(f"C has {self.C.shape[1]} columns, expected {n}")
        if self.D.shape != (self.C.shape[0], self.B.shape[1]):
            raise SystemModelError(
                f"D must be {self.C.shape[0]}x{self.B.shape[1]}, got {self.D.shape}"
            )
        if not self.sample_time > 0:
            raise SystemModelError(f"sample time must be positive, got {self.sample_time}")

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    def quantized(self, fmt: FxFormat) -> StateSpace:
        return StateSpace(
            quantize_matrix(self.A, fmt),
            quantize_matrix(self.B, fmt),
            quantize_matrix(self.C, fmt),
            quantize_matrix(self.D, fmt),
            self.sample_time,
        )

    def __eq__(self, other):
        if not isinstance(other, StateSpace):
            return NotImplemented
        return (
            all(np.array_equal(getattr(self, k), getattr(other, k)) for k in "ABCD")
            and self.sample_time == other.sample_time
        )


class CMode(str, Enum):
    SERIES = "series"
    FEEDBACK = "feedback"


@dataclass(frozen=True)
class ClosedLoopTf:
    controller: TransferFunction
    plant: TransferFunction
    cmode: CMode = CMode.SERIES

    def __post_init__(self):
        object.__setattr__(self, "cmode", CMode(self.cmode))
        if not math.isclose(self.controller.sample_time, self.plant.sample_time):
            raise SystemModelError(
                f"controller sample time {self.controller.sample_time} differs from "
                f"plant sample time {self.plant.sample_time}"
            )


@dataclass(frozen=True, eq=False)
class ClosedLoopSs:
    plant: StateSpace
    K: np.ndarray

    def __post_init__(self):
        K = np.atleast_2d(np.asarray(self.K, dtype=float))
        expected = (self.plant.n_inputs, self.plant.n_states)
        if K.shape != expected:
            raise SystemModelError(f"K must be {expected[0]}x{expected[1]}, got {K.shape}")
        object.__setattr__(self, "K", K)


def characteristic_polynomial(cl: ClosedLoopTf, fmt: FxFormat) -> Polynomial:
    c = cl.controller.quantized(fmt)
    return c.num * cl.plant.num + c.den * cl.plant.den


def close_loop_tf(cl: ClosedLoopTf, fmt: FxFormat) -> TransferFunction:
    c = cl.controller.quantized(fmt)
    p = cl.plant
    char = c.num * p.num + c.den * p.den
    if char.trim().is_zero():
        raise DegenerateLoopError("closed-loop characteristic polynomial is identically zero")
    if cl.cmode is CMode.SERIES:
        num = c.num * p.num
    else:
        num = p.num * c.den
    try:
        return TransferFunction(num, char, p.sample_time)
    except SystemModelError as e:
        raise DegenerateLoopError(f"closed loop is not realizable: {e}") from e


def close_loop_ss(cl: ClosedLoopSs, fmt: FxFormat) -> StateSpace:
    p = cl.plant
    k_q = quantize_matrix(cl.K, fmt)
    return StateSpace(p.A - p.B @ k_q, p.B, p.C, p.D, p.sample_time)


def tf_to_ss(tf: TransferFunction) -> StateSpace:
    """Controllable canonical realization of a proper SISO transfer function."""
    if tf.order == 0:
        # static gain: one inert state keeps n >= 1
        gain = tf.num.coeffs[0] / tf.den.coeffs[0]
        return StateSpace([[0.0]], [[0.0]], [[0.0]], [[gain]], tf.sample_time)
    with warnings.catch_warnings():
        # a zero numerator is legal here
        warnings.simplefilter("ignore", signal.BadCoefficients)
        A, B, C, D = signal.tf2ss(tf.num.coeffs, tf.den.coeffs)
    return StateSpace(A, B, C, D, tf.sample_time)


def ss_to_tf(ss: StateSpace) -> TransferFunction:
    """SISO transfer function of (A, B, C, D)."""
    if ss.n_inputs != 1 or ss.n_outputs != 1:
        raise SystemModelError("ss_to_tf needs a SISO system")
    num, den = signal.ss2tf(ss.A, ss.B, ss.C, ss.D)
    return TransferFunction(Polynomial(np.real(num[0])), Polynomial(np.real(den)), ss.sample_time)
