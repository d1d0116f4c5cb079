"""Verification outcomes and the counterexample data model."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from backend.fixedpoint import FxFormat, FxNum
from backend.realization import RealizationSpec

SUCCESS_BANNER = "VERIFICATION SUCCESSFUL"
FAILURE_BANNER = "VERIFICATION FAILED"


class Property(str, Enum):
    STABILITY = "stability"
    OVERFLOW = "overflow"
    QUANTIZATION_ERROR = "quantization_error"
    MINIMUM_PHASE = "minimum_phase"
    LIMIT_CYCLE = "limit_cycle"
    CLOSED_STABILITY = "closed_stability"
    CLOSED_QUANTIZATION_ERROR = "closed_quantization_error"
    CLOSED_LIMIT_CYCLE = "closed_limit_cycle"
    SS_STABILITY = "ss_stability"
    SS_CONTROLLABILITY = "ss_controllability"
    SS_OBSERVABILITY = "ss_observability"
    SS_QUANTIZATION_ERROR = "ss_quantization_error"

    @property
    def bounded(self) -> bool:
        return self in BOUNDED_PROPERTIES


BOUNDED_PROPERTIES = frozenset(
    {
        Property.OVERFLOW,
        Property.LIMIT_CYCLE,
        Property.QUANTIZATION_ERROR,
        Property.SS_QUANTIZATION_ERROR,
        Property.CLOSED_LIMIT_CYCLE,
        Property.CLOSED_QUANTIZATION_ERROR,
    }
)


class Status(str, Enum):
    SUCCESSFUL = "successful"
    FAILED = "failed"


@dataclass(frozen=True)
class Violation:
    step: int
    node: str
    kind: str


@dataclass(frozen=True)
class EngineProvenance:
    mode: str
    seed: int | None = None
    grid: float | None = None


@dataclass
class Counterexample:
    """Replayable witness of a property violation.

    Signal samples are ``FxNum`` for scalar signals and tuples of ``FxNum``
    for vector (state-space) signals.  Analytic properties carry no signals;
    their witness (quantized polynomial, offending root, rank) is in
    ``evidence``.
    """

    property: Property
    system: dict
    fmt: FxFormat
    violation: Violation
    engine: EngineProvenance
    realization: RealizationSpec | None = None
    bound: int | None = None
    error_bound: float | None = None
    inputs: list = field(default_factory=list)
    initial_states: list[FxNum] = field(default_factory=list)
    outputs: list = field(default_factory=list)
    evidence: dict[str, Any] = field(default_factory=dict)


@dataclass
class VerificationStats:
    mode: str = "analytic"
    states_explored: int = 0
    wall_time: float = 0.0
    notes: list[str] = field(default_factory=list)


@dataclass
class Verdict:
    status: Status
    property: Property
    counterexample: Counterexample | None = None
    stats: VerificationStats = field(default_factory=VerificationStats)

    def __post_init__(self):
        if (self.status is Status.FAILED) != (self.counterexample is not None):
            raise ValueError("a verdict is FAILED exactly when it carries a counterexample")

    @property
    def failed(self) -> bool:
        return self.status is Status.FAILED

    @property
    def banner(self) -> str:
        return FAILURE_BANNER if self.failed else SUCCESS_BANNER
