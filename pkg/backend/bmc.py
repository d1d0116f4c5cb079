"""Bounded checks by explicit-state search.

Every bounded property is a search problem over a finite space of
nondeterministic choices: input sequences u(0..k-1) drawn from the grid of
representable values in the dynamic range (overflow, quantization error),
or initial realization states drawn from the same grid (limit cycles).

``exhaustive`` mode enumerates the space in lexicographic order and is
sound and complete up to k; the first violation found is the
lexicographically smallest one.  ``random`` mode evaluates a seeded sample;
its SUCCESSFUL only means no violation was sampled.

The space is split into chunks (one per first choice, or one per slice of
samples).  With ``workers > 1`` chunks run in a process pool; a worker
stops early once a chunk with a lower index has reported a violation, so the
reported counterexample does not depend on scheduling.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from multiprocessing import Manager
from typing import Any

import numpy as np

from backend import config
from backend.errors import FormatError, IncompatibleSystemError, SearchBudgetExceeded, VerificationError
from backend.fixedpoint import FxFormat, FxNum, OverflowMode
from backend.realization import (
    REAL,
    ClosedLoopSimulator,
    FixedPointRealization,
    RealizationSpec,
    RealizationState,
    ReferenceLoopSimulator,
    ReferenceRealization,
    _FixedArith,
    _ss_step,
    quantize_ss,
    reference_ss,
    simulate,
    simulate_closed_loop,
    simulate_closed_loop_reference,
    simulate_reference,
    simulate_ss,
    simulate_ss_reference,
    step as realization_step,
)
from backend.schemas import describe_system
from backend.sysmodel import ClosedLoopSs, ClosedLoopTf, StateSpace, TransferFunction, close_loop_ss
from backend.verdict import (
    BOUNDED_PROPERTIES,
    Counterexample,
    EngineProvenance,
    Property,
    Status,
    Verdict,
    VerificationStats,
    Violation,
)

logger = logging.getLogger(__name__)

SAMPLED_NOTE = "bounded, sampled"
_STOP_POLL = 2048


class EngineMode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"


@dataclass(frozen=True)
class EngineConfig:
    mode: EngineMode = EngineMode.EXHAUSTIVE
    samples: int = config.FALLBACK_SAMPLES
    seed: int = config.FALLBACK_SEED
    input_grid: float | None = None
    budget: int = config.SEARCH_BUDGET
    # switch to random mode instead of failing when the space exceeds the budget
    fallback: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", EngineMode(self.mode))
        if self.samples < 1:
            raise VerificationError(f"random mode needs samples >= 1, got {self.samples}")
        if self.workers < 1:
            raise VerificationError(f"workers must be >= 1, got {self.workers}")
        if not -(2**63) <= self.seed < 2**64:
            raise VerificationError(f"seed {self.seed} is not a 64-bit integer")


_TF_PROPERTIES = {Property.OVERFLOW, Property.LIMIT_CYCLE, Property.QUANTIZATION_ERROR}
_CLOSED_PROPERTIES = {Property.CLOSED_LIMIT_CYCLE, Property.CLOSED_QUANTIZATION_ERROR}
_ERROR_PROPERTIES = {
    Property.QUANTIZATION_ERROR,
    Property.SS_QUANTIZATION_ERROR,
    Property.CLOSED_QUANTIZATION_ERROR,
}


@dataclass(frozen=True)
class VerificationTask:
    system: Any
    fmt: FxFormat
    property: Property
    bound: int
    error_bound: float | None = None
    realization: RealizationSpec = RealizationSpec()
    engine: EngineConfig = EngineConfig()
    # in saturate mode, whether a clamping event is an overflow violation
    count_saturation: bool = True
    system_doc: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "property", Property(self.property))
        if self.property not in BOUNDED_PROPERTIES:
            raise IncompatibleSystemError(f"{self.property.value} is not a bounded property")
        if self.bound < 1:
            raise VerificationError(f"bound must be >= 1, got {self.bound}")
        if self.property in _ERROR_PROPERTIES:
            if self.error_bound is None or not self.error_bound >= 0:
                raise VerificationError(
                    f"{self.property.value} needs an error bound >= 0, got {self.error_bound}"
                )
        expected = (
            TransferFunction if self.property in _TF_PROPERTIES
            else ClosedLoopTf if self.property in _CLOSED_PROPERTIES
            else (StateSpace, ClosedLoopSs)
        )
        if not isinstance(self.system, expected):
            raise IncompatibleSystemError(
                f"{self.property.value} cannot be checked on a {type(self.system).__name__}"
            )
        if self.system_doc is None:
            object.__setattr__(self, "system_doc", describe_system(self.system))

    def overflow_counts(self) -> bool:
        return self.fmt.overflow_mode is OverflowMode.WRAP or self.count_saturation


# -- search problems --------------------------------------------------------

class _Cancelled(Exception):
    pass


def _count(grid: range) -> int:
    # len() overflows for 64-bit grids
    return max(0, (grid.stop - grid.start + grid.step - 1) // grid.step)


def _draw(rng: np.random.Generator, n: int, shape) -> np.ndarray:
    """Uniform indices in [0, n) for any n up to 2^64."""
    if n <= np.iinfo(np.int64).max:
        return rng.integers(0, n, size=shape)
    return rng.integers(0, n, size=shape, dtype=np.uint64)


class _Alphabet:
    """Input choices addressed by index: grid raws, or ``width``-tuples of them.

    Tuples are ordered lexicographically, first component most significant.
    """

    def __init__(self, grid: range, width: int = 1, vector: bool = False):
        self.grid = grid
        self.width = width
        self.vector = vector or width > 1
        self.base = _count(grid)
        if not self.base:
            raise FormatError("no grid value lies in the dynamic range")
        self.size = self.base**width

    def raw(self, d: int) -> int:
        return self.grid.start + d * self.grid.step

    def __getitem__(self, s: int):
        if not self.vector:
            return self.raw(s)
        digits = []
        for _ in range(self.width):
            s, d = divmod(s, self.base)
            digits.append(self.raw(d))
        return tuple(reversed(digits))

    def sample(self, rng: np.random.Generator, count: int, k: int) -> list[list[int]]:
        if not self.vector:
            return [list(map(int, row)) for row in _draw(rng, self.base, (count, k))]
        picks = _draw(rng, self.base, (count, k, self.width))
        out = []
        for row in picks:
            seq = []
            for digits in row:
                s = 0
                for d in digits:
                    s = s * self.base + int(d)
                seq.append(s)
            out.append(seq)
        return out


class _InputSearch:
    """DFS over input sequences; subclasses define start() and advance()."""

    def __init__(self, task: VerificationTask, width: int = 1, vector: bool = False):
        self.task = task
        self.fmt = task.fmt
        self.k = task.bound
        self.alphabet = _Alphabet(self.fmt.input_grid(task.engine.input_grid), width, vector)

    def space_size(self) -> int:
        return self.alphabet.size**self.k

    def chunk_count(self) -> int:
        return self.alphabet.size

    def precheck(self):
        return None

    def search_chunk(self, first: int, should_stop=None):
        n = self.alphabet.size
        explored = 0
        path = [first]
        carried = [self.start()]
        while True:
            d = len(path) - 1
            explored += 1
            if should_stop is not None and explored % _STOP_POLL == 0 and should_stop():
                raise _Cancelled
            nxt, bad = self.advance(carried[d], path[d], d)
            if bad is not None:
                return list(path), bad, explored
            if d + 1 < self.k:
                carried.append(nxt)
                path.append(0)
                continue
            while True:
                if len(path) == 1:
                    return None, None, explored
                path[-1] += 1
                if path[-1] < n:
                    break
                path.pop()
                carried.pop()

    def sample(self, rng: np.random.Generator, count: int) -> list:
        return self.alphabet.sample(rng, count, self.k)

    def evaluate(self, candidate):
        carried = self.start()
        for t, s in enumerate(candidate):
            carried, bad = self.advance(carried, s, t)
            if bad is not None:
                return candidate[: t + 1], bad, t + 1
        return None, None, len(candidate)


class _InitialStateSearch:
    """Enumerate initial states; subclasses define state_width and run()."""

    state_width = 0

    def __init__(self, task: VerificationTask):
        self.task = task
        self.fmt = task.fmt
        self.k = task.bound
        self.grid = _Alphabet(self.fmt.input_grid(task.engine.input_grid))

    def space_size(self) -> int:
        return self.grid.size**self.state_width

    def chunk_count(self) -> int:
        return self.grid.size if self.state_width else 1

    def precheck(self):
        return None

    def search_chunk(self, first: int, should_stop=None):
        explored = 0
        if not self.state_width:
            bad, steps = self.run(())
            return ((), bad, steps) if bad is not None else (None, None, steps)
        for count, rest in enumerate(product(range(self.grid.size), repeat=self.state_width - 1), 1):
            if should_stop is not None and count % _STOP_POLL == 0 and should_stop():
                raise _Cancelled
            candidate = (first,) + rest
            bad, steps = self.run(candidate)
            explored += steps
            if bad is not None:
                return candidate, bad, explored
        return None, None, explored

    def sample(self, rng: np.random.Generator, count: int) -> list:
        if not self.state_width:
            return [()]
        picks = _draw(rng, self.grid.size, (count, self.state_width))
        return [tuple(map(int, row)) for row in picks]

    def evaluate(self, candidate):
        bad, steps = self.run(candidate)
        return (candidate, bad, steps) if bad is not None else (None, None, steps)

    def initial_raws(self, candidate) -> tuple[int, ...]:
        return tuple(self.grid[i] for i in candidate)


def _find_cycle(seen: dict, key, t: int, outputs: list):
    """Bit-equal recurrence of ``key`` after step t with a nonzero window."""
    i = seen.get(key)
    if i is None:
        seen[key] = t + 1
        return None, False
    window = outputs[i : t + 1]
    if any(window):
        return Violation(t, "state", "limit-cycle"), True
    # zero-output recurrence: the trajectory is periodic from here on
    return None, True


def _provenance(task: VerificationTask, mode: EngineMode) -> EngineProvenance:
    return EngineProvenance(mode.value, task.engine.seed, task.engine.input_grid)


class _OverflowSearch(_InputSearch):
    def __init__(self, task):
        super().__init__(task)
        self.fx = FixedPointRealization(task.system, self.fmt, task.realization)
        self.counts = task.overflow_counts()
        self.kind = "overflow" if self.fmt.overflow_mode is OverflowMode.WRAP else "saturation"
        self.arith = _FixedArith(self.fmt, record=False)

    def precheck(self):
        if self.counts and self.fx.coeffs.overflowed:
            return [0], Violation(0, f"coeff:{self.fx.coeffs.overflowed[0]}", "coefficient-overflow")
        return None

    def start(self):
        return self.fx.zero_state()

    def advance(self, state, s, t):
        self.arith.reset()
        state, _ = self.fx.step_raw(state, self.alphabet[s], self.arith)
        if self.counts and self.arith.overflows:
            return state, Violation(t, self.arith.overflows[0], self.kind)
        return state, None

    def witness(self, candidate, violation, mode) -> Counterexample:
        task, fmt = self.task, self.fmt
        inputs = [FxNum(self.alphabet[s], fmt) for s in candidate]
        run = simulate(task.system, fmt, task.realization, inputs)
        if violation.kind == "coefficient-overflow":
            evidence = {"coefficients": list(self.fx.coeffs.overflowed)}
        else:
            evidence = {"events": [n.node for n in run[violation.step][1].events]}
        return Counterexample(
            property=task.property,
            system=task.system_doc,
            fmt=fmt,
            violation=violation,
            engine=_provenance(task, mode),
            realization=task.realization,
            bound=task.bound,
            inputs=inputs,
            initial_states=[FxNum(0, fmt)] * self.fx.state_size,
            outputs=[y for y, _ in run],
            evidence=evidence,
        )


class _ErrorSearch(_InputSearch):
    def __init__(self, task):
        super().__init__(task)
        self.fx = FixedPointRealization(task.system, self.fmt, task.realization)
        self.ref = ReferenceRealization(task.system, task.realization)
        self.arith = _FixedArith(self.fmt, record=False)
        self.scale = self.fmt.scale
        self.eps = task.error_bound

    def start(self):
        return self.fx.zero_state(), self.ref.zero_state()

    def advance(self, carried, s, t):
        fx_state, ref_state = carried
        u = self.alphabet[s]
        self.arith.reset()
        fx_state, y = self.fx.step_raw(fx_state, u, self.arith)
        ref_state, y_ref = self.ref.step_value(ref_state, u / self.scale)
        if abs(y / self.scale - y_ref) > self.eps:
            return (fx_state, ref_state), Violation(t, "output", "quantization-error")
        return (fx_state, ref_state), None

    def witness(self, candidate, violation, mode) -> Counterexample:
        task, fmt = self.task, self.fmt
        inputs = [FxNum(self.alphabet[s], fmt) for s in candidate]
        outputs = [y for y, _ in simulate(task.system, fmt, task.realization, inputs)]
        reference = simulate_reference(task.system, task.realization, inputs)
        return Counterexample(
            property=task.property,
            system=task.system_doc,
            fmt=fmt,
            violation=violation,
            engine=_provenance(task, mode),
            realization=task.realization,
            bound=task.bound,
            error_bound=task.error_bound,
            inputs=inputs,
            initial_states=[FxNum(0, fmt)] * self.fx.state_size,
            outputs=outputs,
            evidence={
                "reference_outputs": reference,
                "error": outputs[violation.step].value - reference[violation.step],
            },
        )


class _SsErrorSearch(_InputSearch):
    def __init__(self, task):
        ss = task.system
        if isinstance(ss, ClosedLoopSs):
            ss = close_loop_ss(ss, task.fmt)
        self.ss = ss
        # input samples are always vectors for the state-space step
        super().__init__(task, width=ss.n_inputs, vector=True)
        self.fxc = quantize_ss(ss, self.fmt)
        self.refc = reference_ss(ss)
        self.arith = _FixedArith(self.fmt, record=False)
        self.scale = self.fmt.scale
        self.eps = task.error_bound

    def start(self):
        return (0,) * self.ss.n_states, (0.0,) * self.ss.n_states

    def advance(self, carried, s, t):
        x, xr = carried
        u = self.alphabet[s]
        self.arith.reset()
        x, y = _ss_step(self.arith, self.fxc, x, u)
        xr, yr = _ss_step(REAL, self.refc, xr, tuple(v / self.scale for v in u))
        for i, (a, b) in enumerate(zip(y, yr)):
            if abs(a / self.scale - b) > self.eps:
                return (x, xr), Violation(t, f"y[{i}]", "quantization-error")
        return (x, xr), None

    def witness(self, candidate, violation, mode) -> Counterexample:
        task, fmt = self.task, self.fmt
        inputs = [tuple(FxNum(v, fmt) for v in self.alphabet[s]) for s in candidate]
        outputs = [y for y, _ in simulate_ss(self.ss, fmt, inputs)]
        reference = simulate_ss_reference(self.ss, inputs)
        return Counterexample(
            property=task.property,
            system=task.system_doc,
            fmt=fmt,
            violation=violation,
            engine=_provenance(task, mode),
            bound=task.bound,
            error_bound=task.error_bound,
            inputs=inputs,
            initial_states=[FxNum(0, fmt)] * self.ss.n_states,
            outputs=outputs,
            evidence={"reference_outputs": [r.tolist() for r in reference]},
        )


class _ClosedErrorSearch(_InputSearch):
    def __init__(self, task):
        super().__init__(task)
        self.fx = ClosedLoopSimulator(task.system, self.fmt, task.realization)
        self.ref = ReferenceLoopSimulator(task.system, task.realization)
        self.arith = _FixedArith(self.fmt, record=False)
        self.scale = self.fmt.scale
        self.eps = task.error_bound

    def start(self):
        return self.fx.zero_state(), self.ref.zero_state()

    def advance(self, carried, s, t):
        fx_state, ref_state = carried
        r = self.alphabet[s] / self.scale
        self.arith.reset()
        fx_state, _, _, y = self.fx.step(fx_state, r, self.arith)
        ref_state, _, _, y_ref = self.ref.step(ref_state, r)
        if not abs(y - y_ref) <= self.eps:
            return (fx_state, ref_state), Violation(t, "loop:y", "quantization-error")
        return (fx_state, ref_state), None

    def witness(self, candidate, violation, mode) -> Counterexample:
        task, fmt = self.task, self.fmt
        inputs = [FxNum(self.alphabet[s], fmt) for s in candidate]
        run = simulate_closed_loop(task.system, fmt, task.realization, inputs)
        reference = simulate_closed_loop_reference(task.system, task.realization, inputs)
        return Counterexample(
            property=task.property,
            system=task.system_doc,
            fmt=fmt,
            violation=violation,
            engine=_provenance(task, mode),
            realization=task.realization,
            bound=task.bound,
            error_bound=task.error_bound,
            inputs=inputs,
            initial_states=[FxNum(0, fmt)] * self.fx.controller.state_size,
            outputs=[s.controller_output for s in run],
            evidence={
                "plant_outputs": [s.plant_output for s in run],
                "reference_plant_outputs": [s.plant_output for s in reference],
            },
        )


class _LimitCycleSearch(_InitialStateSearch):
    def __init__(self, task):
        super().__init__(task)
        self.fx = FixedPointRealization(task.system, self.fmt, task.realization)
        self.state_width = self.fx.state_size
        self.arith = _FixedArith(self.fmt, record=False)

    def run(self, candidate):
        state = self.initial_raws(candidate)
        seen = {state: 0}
        outputs = []
        for t in range(self.k):
            self.arith.reset()
            state, y = self.fx.step_raw(state, 0, self.arith)
            outputs.append(y)
            bad, closed = _find_cycle(seen, state, t, outputs)
            if closed:
                return bad, t + 1
        return None, self.k

    def witness(self, candidate, violation, mode) -> Counterexample:
        task, fmt, spec = self.task, self.fmt, self.task.realization
        init = RealizationState(spec.form, tuple(FxNum(r, fmt) for r in self.initial_raws(candidate)))
        inputs = [FxNum(0, fmt)] * (violation.step + 1)
        outputs, states = [], [init.raws()]
        state = init
        for t, u in enumerate(inputs):
            state, y, _ = realization_step(self.fx.coeffs, state, u, spec, t)
            outputs.append(y)
            states.append(state.raws())
        start = states.index(states[-1])
        return Counterexample(
            property=task.property,
            system=task.system_doc,
            fmt=fmt,
            violation=violation,
            engine=_provenance(task, mode),
            realization=spec,
            bound=task.bound,
            inputs=inputs,
            initial_states=list(init.values),
            outputs=outputs,
            evidence={"cycle_start": start, "period": len(states) - 1 - start},
        )


class _ClosedLimitCycleSearch(_InitialStateSearch):
    def __init__(self, task):
        super().__init__(task)
        self.fx = ClosedLoopSimulator(task.system, self.fmt, task.realization)
        self.state_width = self.fx.controller.state_size
        self.arith = _FixedArith(self.fmt, record=False)

    def run(self, candidate):
        state = (self.initial_raws(candidate), self.fx.zero_state()[1])
        seen = {self.fx.state_key(state): 0}
        outputs = []
        for t in range(self.k):
            self.arith.reset()
            state, _, u, _ = self.fx.step(state, 0.0, self.arith)
            outputs.append(u)
            key = self.fx.state_key(state)
            if key is None:
                return None, t + 1
            bad, closed = _find_cycle(seen, key, t, outputs)
            if closed:
                return bad, t + 1
        return None, self.k

    def witness(self, candidate, violation, mode) -> Counterexample:
        task, fmt, spec = self.task, self.fmt, self.task.realization
        init = RealizationState(spec.form, tuple(FxNum(r, fmt) for r in self.initial_raws(candidate)))
        inputs = [FxNum(0, fmt)] * (violation.step + 1)
        run = simulate_closed_loop(task.system, fmt, spec, inputs, init)
        keys = [run[0].key_before] + [s.key_after for s in run]
        start = keys.index(keys[-1])
        return Counterexample(
            property=task.property,
            system=task.system_doc,
            fmt=fmt,
            violation=violation,
            engine=_provenance(task, mode),
            realization=spec,
            bound=task.bound,
            inputs=inputs,
            initial_states=list(init.values),
            outputs=[s.controller_output for s in run],
            evidence={
                "cycle_start": start,
                "period": len(keys) - 1 - start,
                "plant_outputs": [s.plant_output for s in run],
            },
        )


_SEARCHES = {
    Property.OVERFLOW: _OverflowSearch,
    Property.QUANTIZATION_ERROR: _ErrorSearch,
    Property.LIMIT_CYCLE: _LimitCycleSearch,
    Property.SS_QUANTIZATION_ERROR: _SsErrorSearch,
    Property.CLOSED_QUANTIZATION_ERROR: _ClosedErrorSearch,
    Property.CLOSED_LIMIT_CYCLE: _ClosedLimitCycleSearch,
}


# -- chunk execution --------------------------------------------------------

def _run_chunk(problem, chunk, index: int, best=None):
    """Run one chunk: ("prefix", first choice) or ("samples", candidates)."""
    should_stop = (lambda: best.value < index) if best is not None else None
    kind, payload = chunk
    try:
        if kind == "prefix":
            return problem.search_chunk(payload, should_stop)
        explored = 0
        for count, candidate in enumerate(payload, 1):
            if should_stop is not None and count % _STOP_POLL == 0 and should_stop():
                raise _Cancelled
            hit, bad, steps = problem.evaluate(candidate)
            explored += steps
            if bad is not None:
                return hit, bad, explored
        return None, None, explored
    except _Cancelled:
        return None, None, 0


def _run_chunks(problem, chunks: list, workers: int):
    """First hit in chunk order, plus the total number of explored steps."""
    if workers <= 1 or len(chunks) <= 1:
        total = 0
        for i, chunk in enumerate(chunks):
            hit, bad, explored = _run_chunk(problem, chunk, i)
            total += explored
            logger.debug("chunk %d/%d explored %d", i + 1, len(chunks), explored)
            if bad is not None:
                return hit, bad, total
        return None, None, total

    hits = {}
    total = 0
    with Manager() as manager:
        best = manager.Value("q", len(chunks))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_run_chunk, problem, chunk, i, best): i for i, chunk in enumerate(chunks)
            }
            for fut in as_completed(futures):
                if fut.cancelled():
                    continue
                i = futures[fut]
                hit, bad, explored = fut.result()
                total += explored
                if bad is not None:
                    hits[i] = (hit, bad)
                    if i < best.value:
                        best.value = i
                    for other, j in futures.items():
                        if j > i:
                            other.cancel()
    if not hits:
        return None, None, total
    hit, bad = hits[min(hits)]
    return hit, bad, total


def _random_chunks(candidates: list, workers: int) -> list:
    size = max(1, math.ceil(len(candidates) / max(workers, 1)))
    return [("samples", candidates[i : i + size]) for i in range(0, len(candidates), size)]


def verify(task: VerificationTask) -> Verdict:
    """Run the bounded check ``task.property`` up to ``task.bound`` steps."""
    started = time.perf_counter()
    engine = task.engine
    problem = _SEARCHES[task.property](task)
    stats = VerificationStats(mode=engine.mode.value)
    if engine.input_grid is not None:
        stats.notes.append(f"grid stride {engine.input_grid}")

    mode = engine.mode
    space = problem.space_size()
    if mode is EngineMode.EXHAUSTIVE and space > engine.budget:
        if not engine.fallback:
            raise SearchBudgetExceeded(space, engine.budget)
        logger.warning(
            "exhaustive space of %d states exceeds the budget of %d; "
            "falling back to random search (%d samples, seed %d)",
            space, engine.budget, engine.samples, engine.seed,
        )
        stats.notes.append(f"fallback: exhaustive space {space} exceeds budget {engine.budget}")
        mode = EngineMode.RANDOM
        stats.mode = mode.value
    logger.info("%s: %s search over a space of %d states", task.property.value, mode.value, space)

    found = problem.precheck()
    if found is not None:
        hit, bad = found
    elif mode is EngineMode.EXHAUSTIVE:
        chunks = [("prefix", i) for i in range(problem.chunk_count())]
        hit, bad, stats.states_explored = _run_chunks(problem, chunks, engine.workers)
    else:
        rng = np.random.default_rng(engine.seed)
        candidates = problem.sample(rng, engine.samples)
        hit, bad, stats.states_explored = _run_chunks(
            problem, _random_chunks(candidates, engine.workers), engine.workers
        )
    if bad is None and mode is EngineMode.RANDOM:
        stats.notes.append(SAMPLED_NOTE)

    ce = problem.witness(hit, bad, mode) if bad is not None else None
    stats.wall_time = time.perf_counter() - started
    status = Status.FAILED if ce is not None else Status.SUCCESSFUL
    return Verdict(status, task.property, ce, stats)


def _checked(task: VerificationTask, prop: Property) -> Verdict:
    if task.property is not prop:
        raise IncompatibleSystemError(f"task checks {task.property.value}, not {prop.value}")
    return verify(task)


def verify_overflow(task: VerificationTask) -> Verdict:
    return _checked(task, Property.OVERFLOW)


def verify_limit_cycle(task: VerificationTask) -> Verdict:
    return _checked(task, Property.LIMIT_CYCLE)


def verify_error(task: VerificationTask) -> Verdict:
    return _checked(task, Property.QUANTIZATION_ERROR)


def verify_ss_quantization_error(task: VerificationTask) -> Verdict:
    return _checked(task, Property.SS_QUANTIZATION_ERROR)


def verify_closed_limit_cycle(task: VerificationTask) -> Verdict:
    return _checked(task, Property.CLOSED_LIMIT_CYCLE)


def verify_closed_error(task: VerificationTask) -> Verdict:
    return _checked(task, Property.CLOSED_QUANTIZATION_ERROR)
