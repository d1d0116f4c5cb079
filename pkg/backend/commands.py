"""The twelve verification commands and their parameter matrix.

Shared by the command line and the HTTP service so both accept exactly the
same parameters and produce the same verdicts.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from backend import analytic, bmc, config
from backend.errors import IncompatibleSystemError, MissingParameterError, VerificationError
from backend.fixedpoint import FxFormat
from backend.realization import RealizationSpec
from backend.schemas import parse_system
from backend.sysmodel import ClosedLoopSs, close_loop_ss
from backend.verdict import Property, Verdict

logger = logging.getLogger(__name__)

TF = ("tf",)
CLOSED = ("cl-tf",)
SS = ("ss", "cl-ss")

_RANGE = frozenset({"intbits", "fracbits", "max", "min"})
_WORD = frozenset({"intbits", "fracbits"})


@dataclass(frozen=True)
class Command:
    name: str
    property: Property
    systems: tuple[str, ...]
    # Table parameters besides the system file
    required: frozenset[str]
    summary: str


COMMANDS: dict[str, Command] = {
    c.name: c
    for c in (
        Command("verify-stability", Property.STABILITY, TF, _RANGE,
                "poles of the quantized transfer function inside the unit circle"),
        Command("verify-overflow", Property.OVERFLOW, TF, _RANGE | {"bound"},
                "no arithmetic overflow in the realization for k steps"),
        Command("verify-error", Property.QUANTIZATION_ERROR, TF, _RANGE | {"bound", "error"},
                "output quantization error stays within the error bound for k steps"),
        Command("verify-minimum-phase", Property.MINIMUM_PHASE, TF, _RANGE,
                "zeros of the quantized transfer function inside the unit circle"),
        Command("verify-limit-cycle", Property.LIMIT_CYCLE, TF, _RANGE | {"bound"},
                "no zero-input limit cycle within k steps"),
        Command("verify-closed-stability", Property.CLOSED_STABILITY, CLOSED, _RANGE | {"cmode"},
                "closed-loop poles inside the unit circle"),
        Command("verify-closed-quantization-error", Property.CLOSED_QUANTIZATION_ERROR, CLOSED,
                _RANGE | {"bound", "cmode", "error"},
                "closed-loop output error stays within the error bound for k steps"),
        Command("verify-closed-limit-cycle", Property.CLOSED_LIMIT_CYCLE, CLOSED,
                _RANGE | {"bound", "cmode"},
                "no zero-reference closed-loop limit cycle within k steps"),
        Command("verify-ss-stability", Property.SS_STABILITY, SS, _WORD,
                "eigenvalues of the quantized A inside the unit circle"),
        Command("verify-ss-controllability", Property.SS_CONTROLLABILITY, SS, _WORD,
                "quantized (A, B) controllable"),
        Command("verify-ss-observability", Property.SS_OBSERVABILITY, SS, _WORD,
                "quantized (A, C) observable"),
        Command("verify-ss-quantization-error", Property.SS_QUANTIZATION_ERROR, SS,
                _WORD | {"bound", "error"},
                "state-space output error stays within the error bound for k steps"),
    )
}

_ANALYTIC = {
    Property.STABILITY: analytic.check_stability_tf,
    Property.MINIMUM_PHASE: analytic.check_minimum_phase,
    Property.CLOSED_STABILITY: analytic.check_closed_stability,
    Property.SS_STABILITY: analytic.check_stability_ss,
    Property.SS_CONTROLLABILITY: analytic.check_controllability,
    Property.SS_OBSERVABILITY: analytic.check_observability,
}


class CommandParams(BaseModel):
    """Parameters of one verification run; names follow the command-line flags."""

    model_config = ConfigDict(extra="forbid")

    system: dict[str, Any]
    intbits: Optional[int] = None
    fracbits: Optional[int] = None
    max: Optional[float] = None
    min: Optional[float] = None
    bound: Optional[int] = None
    cmode: Optional[Literal["series", "feedback"]] = None
    error: Optional[float] = None

    realization: Literal["DFI", "DFII", "TDFII", "DDFI", "DDFII", "TDDFII"] = "DFI"
    delta: Optional[float] = None
    overflow_mode: Literal["wrap", "saturate"] = "wrap"
    rounding: Literal["floor", "nearest-even"] = "floor"
    engine: Literal["exhaustive", "random"] = "exhaustive"
    samples: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    grid: Optional[float] = Field(None, gt=0)
    workers: Optional[int] = Field(None, ge=1)
    fallback: bool = True
    count_saturation: bool = True


def get_command(name: str) -> Command:
    try:
        return COMMANDS[name]
    except KeyError:
        raise VerificationError(f"unknown command {name!r}") from None


def missing_parameters(command: Command, params: CommandParams) -> list[str]:
    return sorted(p for p in command.required if getattr(params, p) is None)


def system_document(command: Command, params: CommandParams) -> dict:
    """The system description actually verified (``cmode`` applied)."""
    doc = dict(params.system)
    kind = doc.get("type", "tf")
    if kind not in command.systems:
        raise IncompatibleSystemError(
            f"{command.name} needs a {' or '.join(command.systems)} system, got {kind!r}"
        )
    if params.cmode is not None and kind == "cl-tf":
        doc["cmode"] = params.cmode
    return doc


def fx_format(params: CommandParams) -> FxFormat:
    return FxFormat(
        params.intbits,
        params.fracbits,
        overflow_mode=params.overflow_mode,
        rounding=params.rounding,
        dyn_min=params.min,
        dyn_max=params.max,
    )


def engine_config(params: CommandParams) -> bmc.EngineConfig:
    return bmc.EngineConfig(
        mode=params.engine,
        samples=params.samples or config.FALLBACK_SAMPLES,
        seed=config.FALLBACK_SEED if params.seed is None else params.seed,
        input_grid=params.grid,
        budget=config.SEARCH_BUDGET,
        fallback=params.fallback,
        workers=params.workers or config.WORKERS,
    )


def run_command(name: str, params: CommandParams) -> Verdict:
    command = get_command(name)
    missing = missing_parameters(command, params)
    if missing:
        raise MissingParameterError(
            f"{command.name} requires {', '.join('--' + p for p in missing)}"
        )
    doc = system_document(command, params)
    system = parse_system(doc)
    fmt = fx_format(params)
    logger.info("%s on a %s system at %s", command.name, doc.get("type", "tf"), fmt.label())

    if command.property in _ANALYTIC:
        if isinstance(system, ClosedLoopSs):
            system = close_loop_ss(system, fmt)
        return _ANALYTIC[command.property](system, fmt, doc)

    task = bmc.VerificationTask(
        system=system,
        fmt=fmt,
        property=command.property,
        bound=params.bound,
        error_bound=params.error,
        realization=RealizationSpec(params.realization, params.delta),
        engine=engine_config(params),
        count_saturation=params.count_saturation,
        system_doc=doc,
    )
    return bmc.verify(task)
