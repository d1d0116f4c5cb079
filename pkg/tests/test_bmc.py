import numpy as np
import pytest

from backend.bmc import (
    SAMPLED_NOTE,
    EngineConfig,
    EngineMode,
    VerificationTask,
    verify,
    verify_closed_error,
    verify_closed_limit_cycle,
    verify_error,
    verify_limit_cycle,
    verify_overflow,
    verify_ss_quantization_error,
)
from backend.counterexample import ReplayResult, replay
from backend.errors import IncompatibleSystemError, SearchBudgetExceeded, VerificationError
from backend.fixedpoint import FxFormat
from backend.realization import RealizationSpec, quantize_coeffs
from backend.sysmodel import ClosedLoopSs, ClosedLoopTf, StateSpace, TransferFunction
from backend.verdict import Property, Status
from oracle import first_overflow, has_limit_cycle, max_error

UNIT = dict(dyn_min=-1, dyn_max=1)


def gain(k):
    return TransferFunction([k], [1])


def assert_replays(verdict):
    assert verdict.status is Status.FAILED
    assert replay(verdict.counterexample) is ReplayResult.CONFIRMED


# -- task validation -------------------------------------------------------

def test_task_rejects_analytic_property():
    with pytest.raises(IncompatibleSystemError):
        VerificationTask(gain(1), FxFormat(2, 4), Property.STABILITY, 1)


def test_task_rejects_wrong_system_type():
    ss = StateSpace([[0.5]], [[1]], [[1]], [[0]])
    with pytest.raises(IncompatibleSystemError):
        VerificationTask(ss, FxFormat(2, 4), Property.OVERFLOW, 1)


def test_task_requires_error_bound_and_positive_bound():
    with pytest.raises(VerificationError):
        VerificationTask(gain(1), FxFormat(2, 4), Property.QUANTIZATION_ERROR, 2)
    with pytest.raises(VerificationError):
        VerificationTask(gain(1), FxFormat(2, 4), Property.OVERFLOW, 0)


def test_wrapper_checks_property():
    task = VerificationTask(gain(1), FxFormat(2, 4), Property.OVERFLOW, 1)
    with pytest.raises(IncompatibleSystemError):
        verify_error(task)


def test_engine_config_validation():
    with pytest.raises(VerificationError):
        EngineConfig(samples=0)
    with pytest.raises(VerificationError):
        EngineConfig(workers=0)
    assert EngineConfig(mode="random").mode is EngineMode.RANDOM


# -- overflow --------------------------------------------------------------

@pytest.mark.parametrize("overflow_mode", ["wrap", "saturate"])
def test_large_gain_overflows(overflow_mode):
    fmt = FxFormat(2, 4, overflow_mode=overflow_mode, **UNIT)
    verdict = verify_overflow(VerificationTask(gain(10), fmt, Property.OVERFLOW, 1))
    ce = verdict.counterexample
    assert (ce.violation.step, ce.violation.node, ce.violation.kind) == (0, "coeff:b0", "coefficient-overflow")
    assert_replays(verdict)


def test_saturation_can_be_ignored():
    fmt = FxFormat(2, 4, overflow_mode="saturate", **UNIT)
    task = VerificationTask(gain(10), fmt, Property.OVERFLOW, 2, count_saturation=False)
    assert verify_overflow(task).status is Status.SUCCESSFUL


@pytest.mark.parametrize("k", [0.0, 0.5])
def test_small_gain_never_overflows(k):
    fmt = FxFormat(2, 8, **UNIT)
    verdict = verify_overflow(VerificationTask(gain(k), fmt, Property.OVERFLOW, 2))
    assert verdict.status is Status.SUCCESSFUL
    assert verdict.counterexample is None
    assert verdict.stats.states_explored > 0


@pytest.mark.parametrize(
    "b,a",
    [([1.75, 1.5], [1, -0.5]), ([0.75, -0.5, 0.3], [1, -1.2, 0.6]), ([0.5], [1, 0.25])],
)
def test_overflow_matches_brute_force(b, a):
    fmt = FxFormat(2, 4, **UNIT)
    tf = TransferFunction.from_filter(b, a)
    coeffs = quantize_coeffs(tf, fmt, RealizationSpec())
    grid = fmt.input_grid()
    expected = first_overflow(coeffs.b, coeffs.a, 4, fmt.width, grid, 3)

    verdict = verify_overflow(VerificationTask(tf, fmt, Property.OVERFLOW, 3))
    if expected is None:
        assert verdict.status is Status.SUCCESSFUL
    else:
        assert [u.raw for u in verdict.counterexample.inputs] == expected
        assert_replays(verdict)


def test_overflow_counterexample_contents():
    fmt = FxFormat(2, 4, **UNIT)
    tf = TransferFunction.from_filter([1.75, 1.5], [1, -0.5])
    ce = verify_overflow(VerificationTask(tf, fmt, Property.OVERFLOW, 3)).counterexample
    assert ce.violation.kind == "overflow"
    assert len(ce.outputs) == len(ce.inputs) == ce.violation.step + 1
    assert [s.raw for s in ce.initial_states] == [0, 0]
    assert ce.violation.node in ce.evidence["events"]
    assert ce.engine.mode == "exhaustive"


def test_failure_is_monotone_in_bound():
    fmt = FxFormat(2, 4)
    for k in (1, 2, 3):
        assert verify_overflow(VerificationTask(gain(1.5), fmt, Property.OVERFLOW, k)).failed


@pytest.mark.parametrize("form", ["DFII", "TDFII"])
def test_other_forms_overflow_and_replay(form):
    fmt = FxFormat(2, 4, **UNIT)
    tf = TransferFunction.from_filter([1.75, 1.5], [1, -0.5])
    task = VerificationTask(tf, fmt, Property.OVERFLOW, 3, realization=RealizationSpec(form))
    assert_replays(verify_overflow(task))


def test_delta_form_overflow_replays():
    fmt = FxFormat(3, 4, **UNIT)
    tf = TransferFunction.from_filter([1.75, 1.5], [1, -0.5])
    task = VerificationTask(tf, fmt, Property.OVERFLOW, 3, realization=RealizationSpec("DDFII", 0.5))
    verdict = verify_overflow(task)
    if verdict.failed:
        assert_replays(verdict)


# -- limit cycles ----------------------------------------------------------

@pytest.mark.parametrize("a1", [0.875, -0.875, -0.5])
def test_limit_cycle_matches_brute_force(a1):
    fmt = FxFormat(2, 4)
    tf = TransferFunction.from_filter([1], [1, a1])
    coeffs = quantize_coeffs(tf, fmt, RealizationSpec())
    expected = has_limit_cycle(coeffs.b, coeffs.a, 4, fmt.width, fmt.input_grid(), 16)

    verdict = verify_limit_cycle(VerificationTask(tf, fmt, Property.LIMIT_CYCLE, 16))
    assert verdict.failed == expected
    if verdict.failed:
        ce = verdict.counterexample
        assert ce.violation.kind == "limit-cycle"
        assert ce.evidence["period"] >= 1
        assert all(u.raw == 0 for u in ce.inputs)
        assert_replays(verdict)


def test_fir_has_no_limit_cycle():
    tf = TransferFunction.from_filter([0.5, 0.25], [1])
    verdict = verify_limit_cycle(VerificationTask(tf, FxFormat(2, 4), Property.LIMIT_CYCLE, 16))
    assert verdict.status is Status.SUCCESSFUL


# -- quantization error ----------------------------------------------------

def test_inexact_coefficient_with_zero_tolerance_fails():
    fmt = FxFormat(2, 4, **UNIT)
    task = VerificationTask(gain(0.3), fmt, Property.QUANTIZATION_ERROR, 1, error_bound=0.0)
    verdict = verify_error(task)
    ce = verdict.counterexample
    assert (ce.violation.step, ce.violation.node) == (0, "output")
    assert ce.evidence["error"] == pytest.approx(0.05)
    assert_replays(verdict)


def test_exact_system_stays_within_one_lsb():
    fmt = FxFormat(2, 8, dyn_min=-0.25, dyn_max=0.25)
    task = VerificationTask(gain(0.5), fmt, Property.QUANTIZATION_ERROR, 2, error_bound=2**-8)
    assert verify_error(task).status is Status.SUCCESSFUL


def test_error_is_monotone_in_tolerance():
    fmt = FxFormat(2, 4, **UNIT)
    verdicts = [
        verify_error(VerificationTask(gain(0.3), fmt, Property.QUANTIZATION_ERROR, 2, error_bound=eps)).status
        for eps in (0.0, 0.09, 0.1, 0.5)
    ]
    assert verdicts == [Status.FAILED, Status.FAILED, Status.SUCCESSFUL, Status.SUCCESSFUL]


def test_controller_error_matches_brute_force(third_order, q2_13):
    engine = EngineConfig(input_grid=0.25)
    coeffs = quantize_coeffs(third_order, q2_13, RealizationSpec())
    b, a = third_order.filter_coeffs()
    grid = q2_13.input_grid(0.25)
    worst = max_error(coeffs.b, coeffs.a, b, a, 13, q2_13.width, grid, 5)

    task = VerificationTask(third_order, q2_13, Property.QUANTIZATION_ERROR, 5, error_bound=0.5, engine=engine)
    verdict = verify_error(task)
    assert verdict.failed == (worst > 0.5)
    assert "grid stride 0.25" in verdict.stats.notes
    if verdict.failed:
        assert verdict.counterexample.engine.grid == 0.25
        assert_replays(verdict)


def test_state_space_error_from_inexact_dynamics():
    ss = StateSpace([[0.3]], [[1]], [[1]], [[0]])
    task = VerificationTask(ss, FxFormat(2, 3), Property.SS_QUANTIZATION_ERROR, 3, error_bound=0.0)
    verdict = verify_ss_quantization_error(task)
    ce = verdict.counterexample
    assert (ce.violation.step, ce.violation.node) == (2, "y[0]")
    assert_replays(verdict)


def test_zero_state_space_has_no_error():
    ss = StateSpace([[0]], [[0]], [[0]], [[0]])
    task = VerificationTask(ss, FxFormat(2, 3), Property.SS_QUANTIZATION_ERROR, 3, error_bound=0.0)
    assert verify_ss_quantization_error(task).status is Status.SUCCESSFUL


@pytest.mark.parametrize("mode", ["exhaustive", "random"])
def test_single_input_state_space_error_in_every_mode(mode):
    ss = StateSpace([[0.3]], [[1]], [[1]], [[0]])
    engine = EngineConfig(mode=mode, samples=200, seed=1)
    task = VerificationTask(ss, FxFormat(2, 3), Property.SS_QUANTIZATION_ERROR, 3, error_bound=0.0, engine=engine)
    verdict = verify_ss_quantization_error(task)
    ce = verdict.counterexample
    assert all(len(u) == 1 for u in ce.inputs)
    assert ce.engine.mode == mode
    assert_replays(verdict)


def test_two_input_state_space_error_replays():
    ss = StateSpace([[0.3]], [[1, 0.5]], [[1]], [[0, 0]])
    task = VerificationTask(ss, FxFormat(2, 2), Property.SS_QUANTIZATION_ERROR, 2, error_bound=0.0)
    verdict = verify_ss_quantization_error(task)
    assert all(len(u) == 2 for u in verdict.counterexample.inputs)
    assert_replays(verdict)


def test_closed_loop_state_space_error_replays():
    plant = StateSpace([[1]], [[1]], [[1]], [[0]])
    task = VerificationTask(
        ClosedLoopSs(plant, [[0.7]]), FxFormat(2, 3), Property.SS_QUANTIZATION_ERROR, 3, error_bound=0.0
    )
    verdict = verify_ss_quantization_error(task)
    assert verdict.counterexample.violation.kind == "quantization-error"
    assert_replays(verdict)


# -- words wider than a double mantissa -------------------------------------

def test_wide_word_overflow_found_by_fallback():
    fmt = FxFormat(2, 62)
    engine = EngineConfig(fallback=True, samples=50, seed=4)
    verdict = verify(VerificationTask(gain(1.5), fmt, Property.OVERFLOW, 1, engine=engine))
    assert verdict.stats.mode == "random"
    ce = verdict.counterexample
    assert abs(ce.inputs[0].exact) * 3 > 4
    assert_replays(verdict)


def test_wide_word_success_is_labelled_sampled():
    fmt = FxFormat(32, 32)
    engine = EngineConfig(fallback=True, samples=50, seed=4)
    verdict = verify(VerificationTask(gain(0.5), fmt, Property.OVERFLOW, 1, engine=engine))
    assert verdict.status is Status.SUCCESSFUL
    assert SAMPLED_NOTE in verdict.stats.notes
    assert any(n.startswith("fallback: exhaustive space") for n in verdict.stats.notes)


# -- closed loop -----------------------------------------------------------

def delay_loop(controller):
    return ClosedLoopTf(controller, TransferFunction([1], [1, 0]))


def test_zero_controller_loop_is_exact():
    fmt = FxFormat(2, 3, **UNIT)
    task = VerificationTask(
        delay_loop(TransferFunction([0], [1, -0.5])), fmt, Property.CLOSED_QUANTIZATION_ERROR, 3, error_bound=0.0
    )
    assert verify_closed_error(task).status is Status.SUCCESSFUL


def test_unit_loop_is_exact_while_signals_fit():
    fmt = FxFormat(2, 3, dyn_min=-0.5, dyn_max=0.5)
    task = VerificationTask(delay_loop(gain(1)), fmt, Property.CLOSED_QUANTIZATION_ERROR, 3, error_bound=0.0)
    assert verify_closed_error(task).status is Status.SUCCESSFUL


def test_unit_loop_error_once_the_converter_wraps():
    fmt = FxFormat(2, 3, **UNIT)
    task = VerificationTask(delay_loop(gain(1)), fmt, Property.CLOSED_QUANTIZATION_ERROR, 3, error_bound=0.0)
    verdict = verify_closed_error(task)
    ce = verdict.counterexample
    assert ce.violation.node == "loop:y"
    assert len(ce.evidence["plant_outputs"]) == len(ce.inputs)
    assert_replays(verdict)


def test_closed_limit_cycle_from_controller_deadband():
    fmt = FxFormat(2, 3, **UNIT)
    task = VerificationTask(
        delay_loop(TransferFunction([0], [1, -0.5])), fmt, Property.CLOSED_LIMIT_CYCLE, 4
    )
    verdict = verify_closed_limit_cycle(task)
    assert verdict.counterexample.violation.kind == "limit-cycle"
    assert_replays(verdict)


def test_static_controller_has_no_closed_limit_cycle():
    fmt = FxFormat(2, 3, **UNIT)
    task = VerificationTask(delay_loop(gain(1)), fmt, Property.CLOSED_LIMIT_CYCLE, 4)
    assert verify_closed_limit_cycle(task).status is Status.SUCCESSFUL


# -- engine modes ----------------------------------------------------------

def test_random_mode_labels_success_as_sampled():
    fmt = FxFormat(2, 8, **UNIT)
    engine = EngineConfig(mode="random", samples=200, seed=5)
    verdict = verify(VerificationTask(gain(0.5), fmt, Property.OVERFLOW, 3, engine=engine))
    assert verdict.status is Status.SUCCESSFUL
    assert verdict.stats.mode == "random"
    assert SAMPLED_NOTE in verdict.stats.notes


def test_random_mode_failure_is_replayable_and_seeded():
    fmt = FxFormat(2, 4)
    engine = EngineConfig(mode="random", samples=100, seed=3)
    task = VerificationTask(gain(1.5), fmt, Property.OVERFLOW, 2, engine=engine)
    first, second = verify(task), verify(task)
    assert first.counterexample.engine.mode == "random"
    assert first.counterexample.engine.seed == 3
    assert [u.raw for u in first.counterexample.inputs] == [u.raw for u in second.counterexample.inputs]
    assert SAMPLED_NOTE not in first.stats.notes
    assert_replays(first)


def test_budget_exceeded_without_fallback():
    fmt = FxFormat(2, 4, **UNIT)
    engine = EngineConfig(budget=100)
    with pytest.raises(SearchBudgetExceeded):
        verify(VerificationTask(gain(0.5), fmt, Property.OVERFLOW, 3, engine=engine))


def test_budget_fallback_switches_to_random():
    fmt = FxFormat(2, 4, **UNIT)
    engine = EngineConfig(budget=100, fallback=True, samples=50)
    verdict = verify(VerificationTask(gain(0.5), fmt, Property.OVERFLOW, 3, engine=engine))
    assert verdict.stats.mode == "random"
    assert any(n.startswith("fallback: exhaustive space 35937") for n in verdict.stats.notes)


def test_parallel_search_reports_the_same_counterexample():
    fmt = FxFormat(2, 4, **UNIT)
    tf = TransferFunction.from_filter([1.75, 1.5], [1, -0.5])
    serial = verify(VerificationTask(tf, fmt, Property.OVERFLOW, 3))
    parallel = verify(VerificationTask(tf, fmt, Property.OVERFLOW, 3, engine=EngineConfig(workers=2)))
    assert parallel.status is serial.status is Status.FAILED
    assert [u.raw for u in parallel.counterexample.inputs] == [u.raw for u in serial.counterexample.inputs]
    assert parallel.counterexample.violation == serial.counterexample.violation


# -- brute-force sweep over small first-order systems ----------------------

# systems per horizon; the brute-force oracles grow as 16^k at <2,2>
SWEEP = {1: 40, 2: 20, 3: 12, 4: 4}


def _small_systems(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        b0, b1, a1 = (int(v) / 4 for v in rng.integers(-8, 8, 3))
        yield b0, b1, a1


SWEEP_CASES = [
    pytest.param(k, *system, id=f"k{k}-{i}")
    for k, count in SWEEP.items()
    for i, system in enumerate(_small_systems(count, seed=k))
]


@pytest.mark.parametrize("k,b0,b1,a1", SWEEP_CASES)
def test_first_order_systems_match_brute_force(k, b0, b1, a1):
    fmt = FxFormat(2, 2)
    tf = TransferFunction.from_filter([b0, b1], [1, a1])
    coeffs = quantize_coeffs(tf, fmt, RealizationSpec())
    b, a = tf.filter_coeffs()
    grid, width = fmt.input_grid(), fmt.width

    overflow = verify_overflow(VerificationTask(tf, fmt, Property.OVERFLOW, k))
    expected = first_overflow(coeffs.b, coeffs.a, 2, width, grid, k)
    assert overflow.failed == (expected is not None)
    if expected is not None:
        assert [u.raw for u in overflow.counterexample.inputs] == expected

    cycle = verify_limit_cycle(VerificationTask(tf, fmt, Property.LIMIT_CYCLE, k))
    assert cycle.failed == has_limit_cycle(coeffs.b, coeffs.a, 2, width, grid, k)

    worst = max_error(coeffs.b, coeffs.a, b, a, 2, width, grid, k)
    for eps in (0.0, 0.25):
        task = VerificationTask(tf, fmt, Property.QUANTIZATION_ERROR, k, error_bound=eps)
        assert verify_error(task).failed == (worst > eps)

    for verdict in (overflow, cycle):
        if verdict.failed:
            assert_replays(verdict)


def test_verdicts_are_monotone():
    fmt = FxFormat(2, 2)
    for b0, b1, a1 in _small_systems(50, seed=9):
        tf = TransferFunction.from_filter([b0, b1], [1, a1])
        overflow = [verify_overflow(VerificationTask(tf, fmt, Property.OVERFLOW, k)).failed for k in (1, 2, 3)]
        assert overflow == sorted(overflow)
        cycle = [verify_limit_cycle(VerificationTask(tf, fmt, Property.LIMIT_CYCLE, k)).failed for k in (1, 2, 4)]
        assert cycle == sorted(cycle)
        error = [
            verify_error(VerificationTask(tf, fmt, Property.QUANTIZATION_ERROR, 2, error_bound=eps)).failed
            for eps in (0.0, 0.25, 0.5)
        ]
        assert error == sorted(error, reverse=True)
