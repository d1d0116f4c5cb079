"""JSON system descriptions.

  {"type": "tf", "num": [...], "den": [...], "ts": 0.001}
  {"type": "ss", "A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]], "ts": 0.001}
  {"type": "cl-tf", "controller": {...}, "plant": {...}, "cmode": "series"}
  {"type": "cl-ss", "plant": {...}, "K": [[...]]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from backend.errors import SystemModelError
from backend.sysmodel import ClosedLoopSs, ClosedLoopTf, StateSpace, TransferFunction

Matrix = list[list[float]]


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TfDoc(_Doc):
    type: Literal["tf"] = "tf"
    num: list[float] = Field(min_length=1)
    den: list[float] = Field(min_length=1)
    ts: float = Field(1.0, gt=0)

    def to_model(self) -> TransferFunction:
        return TransferFunction(self.num, self.den, self.ts)


class SsDoc(_Doc):
    type: Literal["ss"] = "ss"
    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix
    ts: float = Field(1.0, gt=0)

    def to_model(self) -> StateSpace:
        return StateSpace(self.A, self.B, self.C, self.D, self.ts)


class ClTfDoc(_Doc):
    type: Literal["cl-tf"]
    controller: TfDoc
    plant: TfDoc
    cmode: Literal["series", "feedback"] = "series"

    def to_model(self) -> ClosedLoopTf:
        return ClosedLoopTf(self.controller.to_model(), self.plant.to_model(), self.cmode)


class ClSsDoc(_Doc):
    type: Literal["cl-ss"]
    plant: SsDoc
    K: Matrix

    def to_model(self) -> ClosedLoopSs:
        return ClosedLoopSs(self.plant.to_model(), self.K)


SystemDoc = Annotated[Union[TfDoc, SsDoc, ClTfDoc, ClSsDoc], Field(discriminator="type")]
_system_adapter = TypeAdapter(SystemDoc)


def parse_system(doc: dict):
    """Validate a system description and build its model object."""
    try:
        parsed = _system_adapter.validate_python(doc)
    except ValidationError as e:
        raise SystemModelError(f"invalid system description: {e}") from e
    return parsed.to_model()


def load_system(path: str | Path) -> tuple[dict, object]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise SystemModelError(f"cannot read system file {path}: {e}") from e
    if not isinstance(doc, dict):
        raise SystemModelError(f"system file {path} must hold a JSON object")
    return doc, parse_system(doc)


def _tf_doc(tf: TransferFunction) -> dict:
    return {"type": "tf", "num": list(tf.num.coeffs), "den": list(tf.den.coeffs), "ts": tf.sample_time}


def _ss_doc(ss: StateSpace) -> dict:
    return {
        "type": "ss",
        **{k: getattr(ss, k).tolist() for k in "ABCD"},
        "ts": ss.sample_time,
    }


def describe_system(system) -> dict:
    """Inverse of ``parse_system`` (up to TF normalization)."""
    if isinstance(system, TransferFunction):
        return _tf_doc(system)
    if isinstance(system, StateSpace):
        return _ss_doc(system)
    if isinstance(system, ClosedLoopTf):
        return {
            "type": "cl-tf",
            "controller": _tf_doc(system.controller),
            "plant": _tf_doc(system.plant),
            "cmode": system.cmode.value,
        }
    if isinstance(system, ClosedLoopSs):
        return {"type": "cl-ss", "plant": _ss_doc(system.plant), "K": system.K.tolist()}
    raise SystemModelError(f"cannot describe {type(system).__name__}")
