import copy
import json

import pytest

from backend.analytic import check_stability_tf
from backend.bmc import VerificationTask, verify
from backend.counterexample import SCHEMA, ReplayResult, deserialize, read_file, replay, serialize, write_file
from backend.errors import CounterexampleError
from backend.fixedpoint import FxFormat
from backend.sysmodel import StateSpace, TransferFunction
from backend.verdict import Property

MINIMAL = {
    "schema": "fwl-ce/1",
    "property": "overflow",
    "system": {"type": "tf", "num": [1.5], "den": [1]},
    "format": {"int_bits": 2, "frac_bits": 4, "dyn_min": -2, "dyn_max": 1.9375},
    "realization": {"form": "DFI"},
    "bound": 1,
    "inputs": [{"raw": -32, "value": -2.0}],
    "outputs": [{"raw": 16, "value": 1.0}],
    "violation": {"step": 0, "node": "mul:b0", "kind": "overflow"},
    "engine": {"mode": "exhaustive"},
}


@pytest.fixture
def overflow_ce():
    fmt = FxFormat(2, 4, dyn_min=-1, dyn_max=1)
    tf = TransferFunction.from_filter([1.75, 1.5], [1, -0.5])
    return verify(VerificationTask(tf, fmt, Property.OVERFLOW, 3)).counterexample


@pytest.fixture
def ss_error_ce():
    ss = StateSpace([[0.3]], [[1]], [[1]], [[0]])
    task = VerificationTask(ss, FxFormat(2, 3), Property.SS_QUANTIZATION_ERROR, 3, error_bound=0.0)
    return verify(task).counterexample


def through_json(ce):
    return deserialize(json.loads(json.dumps(serialize(ce))))


def test_minimal_document_replays():
    ce = deserialize(MINIMAL)
    assert ce.inputs[0].value == -2.0
    assert ce.initial_states == []
    assert replay(ce) is ReplayResult.CONFIRMED


def test_round_trip_is_lossless(overflow_ce, ss_error_ce, third_order, q12_3):
    analytic_ce = check_stability_tf(third_order, q12_3).counterexample
    for ce in (overflow_ce, ss_error_ce, analytic_ce):
        assert through_json(ce) == ce


def test_document_layout(overflow_ce):
    doc = serialize(overflow_ce)
    assert doc["schema"] == SCHEMA
    assert doc["format"]["int_bits"] == 2
    assert doc["realization"] == {"form": "DFI", "delta": None}
    assert all(set(s) == {"raw", "value"} for s in doc["inputs"])
    assert doc["engine"]["mode"] == "exhaustive"


def test_file_round_trip(tmp_path, overflow_ce):
    path = write_file(overflow_ce, tmp_path / "ce.json")
    assert read_file(path) == overflow_ce
    assert replay(read_file(path)) is ReplayResult.CONFIRMED


def test_unreadable_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(CounterexampleError):
        read_file(path)
    with pytest.raises(CounterexampleError):
        read_file(tmp_path / "missing.json")


def test_version_mismatch():
    doc = {**MINIMAL, "schema": "fwl-ce/2"}
    with pytest.raises(CounterexampleError, match="schema"):
        deserialize(doc)


def test_off_grid_sample():
    doc = copy.deepcopy(MINIMAL)
    doc["inputs"][0]["raw"] = 64
    with pytest.raises(CounterexampleError, match="off-grid"):
        deserialize(doc)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("violation"),
        lambda d: d.update(extra=1),
        lambda d: d["violation"].update(step=-1),
        lambda d: d["format"].update(int_bits=0),
        lambda d: d.update(realization={"form": "DDFI"}),
    ],
)
def test_malformed_documents(mutate):
    doc = copy.deepcopy(MINIMAL)
    mutate(doc)
    with pytest.raises(CounterexampleError):
        deserialize(doc)


def test_non_object_document():
    with pytest.raises(CounterexampleError):
        deserialize([MINIMAL])


def test_perturbed_output_is_refuted(overflow_ce):
    doc = serialize(overflow_ce)
    doc["outputs"][-1]["raw"] = (doc["outputs"][-1]["raw"] + 1) % 32
    assert replay(deserialize(doc)) is ReplayResult.REFUTED


def test_changed_overflow_mode_is_refuted(overflow_ce):
    doc = serialize(overflow_ce)
    doc["format"]["overflow_mode"] = "saturate"
    assert replay(deserialize(doc)) is ReplayResult.REFUTED


def test_analytic_counterexample_replays(third_order, q12_3):
    doc = serialize(check_stability_tf(third_order, q12_3).counterexample)
    assert replay(deserialize(doc)) is ReplayResult.CONFIRMED
    doc["format"].update(int_bits=2, frac_bits=13)
    assert replay(deserialize(doc)) is ReplayResult.REFUTED


def test_error_counterexample_needs_its_bound(ss_error_ce):
    doc = serialize(ss_error_ce)
    assert replay(deserialize(doc)) is ReplayResult.CONFIRMED
    doc["error_bound"] = None
    with pytest.raises(CounterexampleError):
        replay(deserialize(doc))


def test_replay_against_another_system(overflow_ce):
    task = VerificationTask(TransferFunction([0.5], [1]), overflow_ce.fmt, Property.OVERFLOW, 1)
    with pytest.raises(CounterexampleError):
        replay(overflow_ce, task)


def test_violation_past_recorded_inputs(overflow_ce):
    doc = serialize(overflow_ce)
    doc["violation"]["step"] = len(doc["inputs"])
    with pytest.raises(CounterexampleError):
        replay(deserialize(doc))
