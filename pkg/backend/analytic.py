"""Complete (bound-free) checks: stability, minimum phase, controllability,
observability.

Eigenvalues of state matrices up to order six are the roots of their exact
characteristic polynomial, so both kinds of check share one root finder;
larger matrices use QR iteration directly.  With ``DSV_CROSSCHECK`` on every
verdict is compared against the exact Jury test.

Root and eigenvalue moduli decide the verdict with the rule "modulus equal
or greater than one is a violation", taken literally.  Floating-point root
finding cannot place a root exactly on the unit circle, so a modulus within
``BOUNDARY_BAND`` of one is decided by the exact Jury (Schur-Cohn) test on
the rational coefficients of the quantized polynomial instead.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from backend import config
from backend.errors import SystemModelError
from backend.fixedpoint import FxFormat, fwl_poly, quantize_matrix
from backend.polynomial import Polynomial, as_polynomial
from backend.schemas import describe_system
from backend.sysmodel import ClosedLoopTf, StateSpace, TransferFunction, close_loop_tf
from backend.verdict import (
    Counterexample,
    EngineProvenance,
    Property,
    Status,
    Verdict,
    VerificationStats,
    Violation,
)

logger = logging.getLogger(__name__)

BOUNDARY_BAND = 1e-9
RANK_RTOL = 1e-10
RESIDUAL_TOL = 1e-8
# state matrices up to this order go through their characteristic polynomial
CHARPOLY_MAX_ORDER = 6


@dataclass(frozen=True)
class RootSet:
    roots: tuple[complex, ...]
    max_modulus: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "max_modulus", max((abs(r) for r in self.roots), default=0.0))

    def __len__(self) -> int:
        return len(self.roots)

    def moduli(self) -> list[float]:
        return [abs(r) for r in self.roots]

    def rounded(self, digits: int = 4) -> list[complex]:
        return [complex(round(r.real, digits), round(r.imag, digits)) for r in self.roots]


def _polish(p: np.ndarray, r: complex) -> complex:
    dp = np.polyder(p)
    for _ in range(3):
        d = np.polyval(dp, r)
        if d == 0:
            break
        nxt = r - np.polyval(p, r) / d
        if abs(np.polyval(p, nxt)) >= abs(np.polyval(p, r)):
            break
        r = nxt
    return complex(r)


def roots(p: Polynomial | Sequence[float]) -> RootSet:
    """All complex roots, with multiplicity, via companion-matrix eigenvalues."""
    p = as_polynomial(p).trim()
    if p.is_zero():
        raise SystemModelError("the zero polynomial has no root set")
    if p.degree == 0:
        return RootSet(())
    coeffs = np.asarray(p.coeffs)
    found = [_polish(coeffs, r) for r in np.roots(coeffs)]
    found.sort(key=lambda r: (-abs(r), -r.real, -r.imag))
    worst = max(residual(p, r) for r in found)
    if worst > RESIDUAL_TOL:
        logger.warning("root residual %.3g exceeds %.0e for %r", worst, RESIDUAL_TOL, p)
    return RootSet(tuple(found))


def residual(p: Polynomial, r: complex) -> float:
    p = as_polynomial(p)
    return abs(p(r)) / sum(abs(c) for c in p.coeffs)


def jury_stable(p: Polynomial | Sequence[float] | Sequence[Fraction]) -> bool:
    """Exact test: are all roots strictly inside the unit circle?

    Schur-Cohn reduction on rational coefficients: p is stable iff
    |c_n| < |c_0| and (c_0 p(z) - c_n z^n p(1/z)) / z is stable.
    """
    if isinstance(p, Polynomial):
        coeffs = list(p.trim().exact())
    else:
        coeffs = [Fraction(c) for c in p]
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs.pop(0)
    if all(c == 0 for c in coeffs):
        raise SystemModelError("the zero polynomial has no stability verdict")
    while len(coeffs) > 1:
        first, last = coeffs[0], coeffs[-1]
        if abs(last) >= abs(first):
            return False
        n = len(coeffs) - 1
        coeffs = [first * coeffs[k] - last * coeffs[n - k] for k in range(n)]
    return True


def charpoly_exact(A) -> list[Fraction]:
    """Characteristic polynomial of A on rationals (Faddeev-LeVerrier)."""
    A = [[Fraction(float(x)) for x in row] for row in np.atleast_2d(A)]
    n = len(A)
    coeffs = [Fraction(1)]
    M = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        M = [[sum(A[i][t] * M[t][j] for t in range(n)) + (c if i == j else 0) for j in range(n)] for i in range(n)]
        AM_trace = sum(sum(A[i][t] * M[t][i] for t in range(n)) for i in range(n))
        c = -AM_trace / k
        coeffs.append(c)
    return coeffs


def _violates(rootset: RootSet, exact_stable) -> bool:
    """Modulus >= 1 rule with the boundary band deferred to the exact test."""
    if abs(rootset.max_modulus - 1.0) <= BOUNDARY_BAND:
        return not exact_stable()
    unstable = rootset.max_modulus >= 1.0
    if config.CROSSCHECK and exact_stable() == unstable:
        raise AssertionError(
            f"root modulus {rootset.max_modulus} disagrees with the Jury criterion"
        )
    return unstable


def _system_doc(system, doc):
    return doc if doc is not None else describe_system(system)


def _root_evidence(poly: Polynomial | None, rootset: RootSet) -> dict:
    evidence = {
        "roots": [[r.real, r.imag] for r in rootset.roots],
        "max_modulus": rootset.max_modulus,
    }
    if poly is not None:
        evidence["polynomial"] = list(poly.coeffs)
    return evidence


def _verdict(prop: Property, failed: bool, started: float, ce_factory) -> Verdict:
    stats = VerificationStats(mode="analytic", wall_time=time.perf_counter() - started)
    if not failed:
        return Verdict(Status.SUCCESSFUL, prop, None, stats)
    return Verdict(Status.FAILED, prop, ce_factory(), stats)


def _analytic_ce(prop, doc, fmt, node, kind, evidence) -> Counterexample:
    return Counterexample(
        property=prop,
        system=doc,
        fmt=fmt,
        violation=Violation(0, node, kind),
        engine=EngineProvenance("analytic"),
        evidence=evidence,
    )


def _polynomial_check(prop, poly, fmt, doc, node, kind) -> Verdict:
    started = time.perf_counter()
    rootset = roots(poly)
    failed = _violates(rootset, lambda: jury_stable(poly))
    logger.debug("%s: max modulus %.12g -> %s", prop.value, rootset.max_modulus, failed)
    return _verdict(
        prop, failed, started,
        lambda: _analytic_ce(prop, doc, fmt, f"{node}[0]", kind, _root_evidence(poly, rootset)),
    )


def check_stability_tf(tf: TransferFunction, fmt: FxFormat, system_doc: dict | None = None) -> Verdict:
    den = fwl_poly(tf.den, fmt)
    if den.trim().is_zero():
        raise SystemModelError("denominator quantizes to the zero polynomial")
    return _polynomial_check(
        Property.STABILITY, den, fmt, _system_doc(tf, system_doc), "pole", "unstable-pole"
    )


def check_minimum_phase(tf: TransferFunction, fmt: FxFormat, system_doc: dict | None = None) -> Verdict:
    if tf.num.is_zero():
        raise SystemModelError("minimum phase is undefined for a zero numerator")
    num = fwl_poly(tf.num, fmt)
    if num.trim().is_zero():
        raise SystemModelError("numerator quantizes to the zero polynomial")
    return _polynomial_check(
        Property.MINIMUM_PHASE, num, fmt, _system_doc(tf, system_doc), "zero", "non-minimum-phase-zero"
    )


def check_closed_stability(cl: ClosedLoopTf, fmt: FxFormat, system_doc: dict | None = None) -> Verdict:
    char = close_loop_tf(cl, fmt).den
    return _polynomial_check(
        Property.CLOSED_STABILITY, char, fmt, _system_doc(cl, system_doc), "pole", "unstable-pole"
    )


def eigenvalues(A) -> RootSet:
    """Eigenvalues of A: roots of the exact characteristic polynomial for
    small A, QR iteration on A itself above ``CHARPOLY_MAX_ORDER``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] <= CHARPOLY_MAX_ORDER:
        return roots([float(c) for c in charpoly_exact(A)])
    ev = [complex(v) for v in np.linalg.eigvals(A)]
    ev.sort(key=lambda r: (-abs(r), -r.real, -r.imag))
    return RootSet(tuple(ev))


def check_stability_ss(ss: StateSpace, fmt: FxFormat, system_doc: dict | None = None) -> Verdict:
    started = time.perf_counter()
    Aq = quantize_matrix(ss.A, fmt)
    rootset = eigenvalues(Aq)
    failed = _violates(rootset, lambda: jury_stable(charpoly_exact(Aq)))
    doc = _system_doc(ss, system_doc)
    return _verdict(
        Property.SS_STABILITY, failed, started,
        lambda: _analytic_ce(
            Property.SS_STABILITY, doc, fmt, "eigenvalue[0]", "unstable-eigenvalue",
            {**_root_evidence(None, rootset), "A": Aq.tolist()},
        ),
    )


def krylov(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """[B, AB, ..., A^(n-1) B]."""
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def numerical_rank(M: np.ndarray, n: int) -> tuple[int, np.ndarray]:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, sv
    return int(np.sum(sv > n * sv[0] * RANK_RTOL)), sv


def _rank_check(prop, A, B, fmt, doc, kind, started) -> Verdict:
    n = A.shape[0]
    rank, sv = numerical_rank(krylov(A, B), n)
    return _verdict(
        prop, rank < n, started,
        lambda: _analytic_ce(
            prop, doc, fmt, "rank", kind,
            {"rank": rank, "n": n, "singular_values": sv.tolist()},
        ),
    )


def check_controllability(ss: StateSpace, fmt: FxFormat, system_doc: dict | None = None) -> Verdict:
    started = time.perf_counter()
    Aq = quantize_matrix(ss.A, fmt)
    Bq = quantize_matrix(ss.B, fmt)
    return _rank_check(
        Property.SS_CONTROLLABILITY, Aq, Bq, fmt, _system_doc(ss, system_doc), "uncontrollable", started
    )


def check_observability(ss: StateSpace, fmt: FxFormat, system_doc: dict | None = None) -> Verdict:
    """Dual of controllability: rank of [C; CA; ...] via (A^T, C^T)."""
    started = time.perf_counter()
    At = np.ascontiguousarray(quantize_matrix(ss.A, fmt).T)
    Ct = np.ascontiguousarray(quantize_matrix(ss.C, fmt).T)
    return _rank_check(
        Property.SS_OBSERVABILITY, At, Ct, fmt, _system_doc(ss, system_doc), "unobservable", started
    )
