"""Counterexample files and their replay.

A counterexample is written as a JSON document tagged ``"schema": "fwl-ce/1"``.
Signal samples carry both the raw integer and its value; the raw is
authoritative on the way back in.  ``replay`` re-runs the recorded witness
through the same realization (or re-runs the analytic check) and says
whether the recorded violation happens again.
"""
from __future__ import annotations

import json
import logging
import re
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from backend import analytic
from backend.errors import CounterexampleError, FormatError, VerificationError
from backend.fixedpoint import FxFormat, FxNum
from backend.realization import (
    RealizationSpec,
    RealizationState,
    quantize_coeffs,
    simulate,
    simulate_closed_loop,
    simulate_closed_loop_reference,
    simulate_reference,
    simulate_ss,
    simulate_ss_reference,
    step,
)
from backend.schemas import describe_system, parse_system
from backend.sysmodel import ClosedLoopSs, close_loop_ss
from backend.verdict import Counterexample, EngineProvenance, Property, Violation

logger = logging.getLogger(__name__)

SCHEMA = "fwl-ce/1"

__all__ = [
    "SCHEMA",
    "Counterexample",
    "CounterexampleDoc",
    "ReplayResult",
    "deserialize",
    "read_file",
    "replay",
    "serialize",
    "write_file",
]


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SampleDoc(_Doc):
    raw: int
    value: float


Sample = Union[SampleDoc, list[SampleDoc]]


class FormatDoc(_Doc):
    int_bits: int
    frac_bits: int
    overflow_mode: Literal["wrap", "saturate"] = "wrap"
    rounding: Literal["floor", "nearest-even"] = "floor"
    dyn_min: float
    dyn_max: float


class RealizationDoc(_Doc):
    form: Literal["DFI", "DFII", "TDFII", "DDFI", "DDFII", "TDDFII"]
    delta: Optional[float] = None


class ViolationDoc(_Doc):
    step: int = Field(ge=0)
    node: str
    kind: str


class EngineDoc(_Doc):
    mode: Literal["exhaustive", "random", "analytic"]
    seed: Optional[int] = None
    grid: Optional[float] = None


class CounterexampleDoc(_Doc):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: str = Field(alias="schema")
    property: Property
    system: dict[str, Any]
    format: FormatDoc
    realization: Optional[RealizationDoc] = None
    bound: Optional[int] = Field(None, ge=1)
    error_bound: Optional[float] = Field(None, ge=0)
    inputs: list[Sample] = []
    initial_states: list[SampleDoc] = []
    outputs: list[Sample] = []
    violation: ViolationDoc
    engine: EngineDoc
    evidence: dict[str, Any] = {}


class ReplayResult(str, Enum):
    CONFIRMED = "confirmed"
    REFUTED = "refuted"


# -- (de)serialization ------------------------------------------------------

def _sample(x) -> dict | list:
    if isinstance(x, FxNum):
        return {"raw": x.raw, "value": x.value}
    return [_sample(v) for v in x]


def _fx(sample: SampleDoc | list, fmt: FxFormat):
    if isinstance(sample, list):
        return tuple(_fx(s, fmt) for s in sample)
    try:
        return FxNum(sample.raw, fmt)
    except FormatError as e:
        raise CounterexampleError(f"off-grid sample: {e}") from e


def serialize(ce: Counterexample) -> dict:
    fmt = ce.fmt
    doc = {
        "schema": SCHEMA,
        "property": ce.property.value,
        "system": ce.system,
        "format": {
            "int_bits": fmt.int_bits,
            "frac_bits": fmt.frac_bits,
            "overflow_mode": fmt.overflow_mode.value,
            "rounding": fmt.rounding.value,
            "dyn_min": float(fmt.dyn_min),
            "dyn_max": float(fmt.dyn_max),
        },
        "realization": (
            {"form": ce.realization.form.value, "delta": ce.realization.delta}
            if ce.realization is not None else None
        ),
        "bound": ce.bound,
        "error_bound": ce.error_bound,
        "inputs": [_sample(u) for u in ce.inputs],
        "initial_states": [_sample(s) for s in ce.initial_states],
        "outputs": [_sample(y) for y in ce.outputs],
        "violation": {"step": ce.violation.step, "node": ce.violation.node, "kind": ce.violation.kind},
        "engine": {"mode": ce.engine.mode, "seed": ce.engine.seed, "grid": ce.engine.grid},
        "evidence": ce.evidence,
    }
    return doc


def deserialize(doc: Any) -> Counterexample:
    if not isinstance(doc, dict):
        raise CounterexampleError("counterexample must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise CounterexampleError(
            f"unsupported counterexample schema {doc.get('schema')!r}, expected {SCHEMA!r}"
        )
    try:
        parsed = CounterexampleDoc.model_validate(doc)
    except ValidationError as e:
        raise CounterexampleError(f"malformed counterexample: {e}") from e
    try:
        fmt = FxFormat(**parsed.format.model_dump())
        spec = RealizationSpec(**parsed.realization.model_dump()) if parsed.realization else None
    except VerificationError as e:
        raise CounterexampleError(f"malformed counterexample: {e}") from e
    return Counterexample(
        property=parsed.property,
        system=parsed.system,
        fmt=fmt,
        violation=Violation(**parsed.violation.model_dump()),
        engine=EngineProvenance(**parsed.engine.model_dump()),
        realization=spec,
        bound=parsed.bound,
        error_bound=parsed.error_bound,
        inputs=[_fx(u, fmt) for u in parsed.inputs],
        initial_states=[_fx(s, fmt) for s in parsed.initial_states],
        outputs=[_fx(y, fmt) for y in parsed.outputs],
        evidence=parsed.evidence,
    )


def write_file(ce: Counterexample, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(serialize(ce), indent=2) + "\n")
    logger.info("counterexample written to %s", path)
    return path


def read_file(path: str | Path) -> Counterexample:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CounterexampleError(f"cannot read counterexample {path}: {e}") from e
    return deserialize(doc)


# -- replay -----------------------------------------------------------------

def _raws(signal) -> list:
    return [tuple(v.raw for v in s) if isinstance(s, tuple) else s.raw for s in signal]


def _spec(ce: Counterexample) -> RealizationSpec:
    if ce.realization is None:
        raise CounterexampleError(f"{ce.property.value} counterexample names no realization")
    return ce.realization


def _init(ce: Counterexample, spec: RealizationSpec) -> RealizationState | None:
    return RealizationState(spec.form, tuple(ce.initial_states)) if ce.initial_states else None


def _needs_signals(ce: Counterexample):
    if not ce.inputs or ce.violation.step >= len(ce.inputs):
        raise CounterexampleError(
            f"violation at step {ce.violation.step} lies outside the {len(ce.inputs)} recorded inputs"
        )


def _first_recurrence(keys: list) -> int | None:
    last = keys[-1]
    for i, key in enumerate(keys[:-1]):
        if key == last:
            return i
    return None


def _replay_overflow(ce, system) -> bool:
    spec = _spec(ce)
    if ce.violation.kind == "coefficient-overflow":
        coeffs = quantize_coeffs(system, ce.fmt, spec)
        return ce.violation.node.removeprefix("coeff:") in coeffs.overflowed
    _needs_signals(ce)
    run = simulate(system, ce.fmt, spec, ce.inputs, _init(ce, spec))
    if _raws([y for y, _ in run]) != _raws(ce.outputs):
        return False
    return any(n.node == ce.violation.node for n in run[ce.violation.step][1].events)


def _replay_error(ce, system) -> bool:
    spec = _spec(ce)
    _needs_signals(ce)
    init = _init(ce, spec)
    outputs = [y for y, _ in simulate(system, ce.fmt, spec, ce.inputs, init)]
    if _raws(outputs) != _raws(ce.outputs):
        return False
    reference = simulate_reference(system, spec, ce.inputs, init)
    t = ce.violation.step
    return abs(outputs[t].value - reference[t]) > ce.error_bound


def _replay_limit_cycle(ce, system) -> bool:
    spec = _spec(ce)
    _needs_signals(ce)
    coeffs = quantize_coeffs(system, ce.fmt, spec)
    state = _init(ce, spec) or RealizationState.zeros(spec.form, coeffs.order, ce.fmt)
    states, outputs = [state.raws()], []
    for t, u in enumerate(ce.inputs[: ce.violation.step + 1]):
        state, y, _ = step(coeffs, state, u, spec, t)
        states.append(state.raws())
        outputs.append(y)
    if _raws(outputs) != _raws(ce.outputs):
        return False
    start = _first_recurrence(states)
    return start is not None and any(y.raw for y in outputs[start:])


def _ss_model(system, fmt):
    return close_loop_ss(system, fmt) if isinstance(system, ClosedLoopSs) else system


def _replay_ss_error(ce, system) -> bool:
    _needs_signals(ce)
    ss = _ss_model(system, ce.fmt)
    x0 = ce.initial_states or None
    outputs = [y for y, _ in simulate_ss(ss, ce.fmt, ce.inputs, x0)]
    if _raws(outputs) != _raws(ce.outputs):
        return False
    reference = simulate_ss_reference(ss, ce.inputs, x0)
    t = ce.violation.step
    match = re.fullmatch(r"y\[(\d+)\]", ce.violation.node)
    rows = [int(match.group(1))] if match else range(ss.n_outputs)
    return any(abs(outputs[t][i].value - reference[t][i]) > ce.error_bound for i in rows)


def _replay_closed_error(ce, system) -> bool:
    spec = _spec(ce)
    _needs_signals(ce)
    init = _init(ce, spec)
    run = simulate_closed_loop(system, ce.fmt, spec, ce.inputs, init)
    if _raws([s.controller_output for s in run]) != _raws(ce.outputs):
        return False
    reference = simulate_closed_loop_reference(system, spec, ce.inputs, init)
    t = ce.violation.step
    return not abs(run[t].plant_output - reference[t].plant_output) <= ce.error_bound


def _replay_closed_limit_cycle(ce, system) -> bool:
    spec = _spec(ce)
    _needs_signals(ce)
    run = simulate_closed_loop(system, ce.fmt, spec, ce.inputs[: ce.violation.step + 1], _init(ce, spec))
    outputs = [s.controller_output for s in run]
    if _raws(outputs) != _raws(ce.outputs):
        return False
    keys = [run[0].key_before] + [s.key_after for s in run]
    if keys[-1] is None:
        return False
    start = _first_recurrence(keys)
    return start is not None and any(u.raw for u in outputs[start:])


_ANALYTIC = {
    Property.STABILITY: analytic.check_stability_tf,
    Property.MINIMUM_PHASE: analytic.check_minimum_phase,
    Property.CLOSED_STABILITY: analytic.check_closed_stability,
    Property.SS_STABILITY: analytic.check_stability_ss,
    Property.SS_CONTROLLABILITY: analytic.check_controllability,
    Property.SS_OBSERVABILITY: analytic.check_observability,
}

_BOUNDED = {
    Property.OVERFLOW: _replay_overflow,
    Property.QUANTIZATION_ERROR: _replay_error,
    Property.LIMIT_CYCLE: _replay_limit_cycle,
    Property.SS_QUANTIZATION_ERROR: _replay_ss_error,
    Property.CLOSED_QUANTIZATION_ERROR: _replay_closed_error,
    Property.CLOSED_LIMIT_CYCLE: _replay_closed_limit_cycle,
}


def _replay_analytic(ce, system) -> bool:
    if ce.property.value.startswith("ss_"):
        system = _ss_model(system, ce.fmt)
    verdict = _ANALYTIC[ce.property](system, ce.fmt, ce.system)
    return verdict.failed and verdict.counterexample.violation.kind == ce.violation.kind


def replay(ce: Counterexample, task=None) -> ReplayResult:
    """Re-run ``ce`` and report whether its violation reproduces.

    ``task`` (a ``VerificationTask``), when given, must describe the same
    system and format as the counterexample.
    """
    system = parse_system(ce.system)
    if task is not None:
        if describe_system(task.system) != describe_system(system) or task.fmt != ce.fmt:
            raise CounterexampleError("counterexample does not belong to this system and format")
    try:
        if ce.property in _BOUNDED:
            if ce.property in (
                Property.QUANTIZATION_ERROR,
                Property.SS_QUANTIZATION_ERROR,
                Property.CLOSED_QUANTIZATION_ERROR,
            ) and ce.error_bound is None:
                raise CounterexampleError(f"{ce.property.value} counterexample carries no error bound")
            confirmed = _BOUNDED[ce.property](ce, system)
        else:
            confirmed = _replay_analytic(ce, system)
    except (TypeError, AttributeError) as e:
        raise CounterexampleError(
            f"counterexample system does not fit {ce.property.value}: {e}"
        ) from e
    result = ReplayResult.CONFIRMED if confirmed else ReplayResult.REFUTED
    logger.info("replay of %s counterexample: %s", ce.property.value, result.value)
    return result
