"""Executable realizations of transfer functions, state-space models and loops.

Every structure is written once against a small arithmetic interface and
run either bit-accurately in fixed point (``_FixedArith``, raws) or in
double precision with unquantized coefficients (``_RealArith``).

Evaluation order, per accumulator: the products feeding it are formed in
coefficient-index order, then summed left to right into a single
accumulator.  Overflow is checked after every product and every partial
accumulation; each check is a node in the ``StepTrace``.

  DFI     y = b0 x(n) + ... + bN x(n-N) - a1 y(n-1) - ... - aN y(n-N)
          state (x(n-1)..x(n-N), y(n-1)..y(n-N))
  DFII    w = x - a1 w1 - ... - aN wN ; y = b0 w + b1 w1 + ... + bN wN
          state (w(n-1)..w(n-N))
  TDFII   y = b0 x + s1 ; s_i' = (b_i x + s_{i+1}) - a_i y
          state (s1..sN)

The delta forms run the same equations with the delay z^-1 replaced by the
delta integrator: a state x feeding on v is updated x' = x + D*v, where D is
the delta step.  Their coefficients are the delta-domain coefficients of
``to_delta_coeffs``; in fixed point D itself is quantized like any other
coefficient.

  DDFI    state (integrator chain on x, integrator chain on y)
  DDFII   state (integrator chain on w)
  TDDFII  y = b0 x + s1 ; e_i = (b_i x + s_{i+1}) - a_i y ; s_i' = s_i + D e_i
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np
from scipy import signal

from backend.errors import DegenerateLoopError, SystemModelError
from backend.fixedpoint import (
    FxFormat,
    FxNum,
    fit_raw,
    mul_raw,
    quantize,
    quantize_checked,
    raw_matrix,
)
from backend.polynomial import Polynomial, as_polynomial
from backend.sysmodel import ClosedLoopTf, CMode, StateSpace, TransferFunction, tf_to_ss


class Form(str, Enum):
    DFI = "DFI"
    DFII = "DFII"
    TDFII = "TDFII"
    DDFI = "DDFI"
    DDFII = "DDFII"
    TDDFII = "TDDFII"

    @property
    def is_delta(self) -> bool:
        return self in (Form.DDFI, Form.DDFII, Form.TDDFII)


@dataclass(frozen=True)
class RealizationSpec:
    form: Form = Form.DFI
    delta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "form", Form(self.form))
        if self.form.is_delta:
            if self.delta is None or not self.delta > 0:
                raise SystemModelError(f"{self.form.value} needs a positive delta, got {self.delta}")
        elif self.delta is not None:
            raise SystemModelError(f"delta is only meaningful for delta forms, not {self.form.value}")


def state_size(form: Form, order: int) -> int:
    return 2 * order if form in (Form.DFI, Form.DDFI) else order


@dataclass(frozen=True)
class RealizationState:
    form: Form
    values: tuple

    @classmethod
    def zeros(cls, form: Form, order: int, fmt: FxFormat | None = None) -> RealizationState:
        zero = FxNum(0, fmt) if fmt is not None else 0.0
        return cls(Form(form), (zero,) * state_size(Form(form), order))

    def raws(self) -> tuple[int, ...]:
        return tuple(v.raw for v in self.values)

    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)


@dataclass(frozen=True)
class NodeRecord:
    node: str
    op: str
    raw: int
    overflow: bool


@dataclass
class StepTrace:
    step: int
    input: Any
    output: Any = None
    nodes: list[NodeRecord] = field(default_factory=list)

    @property
    def events(self) -> list[NodeRecord]:
        return [n for n in self.nodes if n.overflow]


class _FixedArith:
    """Raw-integer arithmetic with per-node overflow bookkeeping."""

    __slots__ = ("fmt", "record", "nodes", "overflows")

    def __init__(self, fmt: FxFormat, record: bool = True):
        self.fmt = fmt
        self.record = record
        self.nodes: list[NodeRecord] = []
        self.overflows: list[str] = []

    def _note(self, node: str, op: str, raw: int, flag: bool) -> int:
        if flag:
            self.overflows.append(node)
        if self.record:
            self.nodes.append(NodeRecord(node, op, raw, flag))
        return raw

    def mul(self, node: str, a: int, b: int) -> int:
        return self._note(node, "mul", *mul_raw(a, b, self.fmt))

    def add(self, node: str, a: int, b: int) -> int:
        return self._note(node, "add", *fit_raw(a + b, self.fmt))

    def sub(self, node: str, a: int, b: int) -> int:
        return self._note(node, "sub", *fit_raw(a - b, self.fmt))

    def reset(self):
        self.nodes = []
        self.overflows = []


class _RealArith:
    __slots__ = ()

    def mul(self, node, a, b):
        return a * b

    def add(self, node, a, b):
        return a + b

    def sub(self, node, a, b):
        return a - b


REAL = _RealArith()


def _accumulate(ar, tag: str, first, terms, subtract=()):
    acc = first
    for name, t in terms:
        acc = ar.add(f"acc:{tag}+{name}", acc, t)
    for name, t in subtract:
        acc = ar.sub(f"acc:{tag}-{name}", acc, t)
    return acc


def _integrate(ar, tag: str, d, head, chain: Sequence) -> tuple:
    """Delta integrator chain: x_i' = x_i + d * x_{i-1}, with x_0 = head."""
    out = []
    prev = head
    for i, x in enumerate(chain, 1):
        p = ar.mul(f"mul:d*{tag}{i - 1}", d, prev)
        out.append(ar.add(f"int:{tag}{i}", x, p))
        prev = x
    return tuple(out)


def _dfi(ar, c, state, u):
    n = c.order
    xs = (u,) + tuple(state[:n])
    ys = tuple(state[n:])
    pb = [ar.mul(f"mul:b{i}", c.b[i], xs[i]) for i in range(n + 1)]
    pa = [ar.mul(f"mul:a{i}", c.a[i], ys[i - 1]) for i in range(1, n + 1)]
    y = _accumulate(
        ar, "y", pb[0],
        [(f"b{i}", pb[i]) for i in range(1, n + 1)],
        [(f"a{i}", pa[i - 1]) for i in range(1, n + 1)],
    )
    return xs[:n] + ((y,) + ys)[:n], y


def _dfii(ar, c, state, u):
    n = c.order
    pa = [ar.mul(f"mul:a{i}", c.a[i], state[i - 1]) for i in range(1, n + 1)]
    w = _accumulate(ar, "w", u, (), [(f"a{i}", pa[i - 1]) for i in range(1, n + 1)])
    ws = (w,) + tuple(state)
    pb = [ar.mul(f"mul:b{i}", c.b[i], ws[i]) for i in range(n + 1)]
    y = _accumulate(ar, "y", pb[0], [(f"b{i}", pb[i]) for i in range(1, n + 1)])
    return ws[:n], y


def _tdfii(ar, c, state, u):
    n = c.order
    p0 = ar.mul("mul:b0", c.b[0], u)
    y = ar.add("acc:y+s1", p0, state[0]) if n else p0
    new = []
    for i in range(1, n + 1):
        pb = ar.mul(f"mul:b{i}", c.b[i], u)
        pa = ar.mul(f"mul:a{i}", c.a[i], y)
        acc = ar.add(f"acc:s{i}+s{i + 1}", pb, state[i]) if i < n else pb
        new.append(ar.sub(f"acc:s{i}-a{i}", acc, pa))
    return tuple(new), y


def _ddfi(ar, c, state, u):
    n = c.order
    xu = tuple(state[:n])
    xy = tuple(state[n:])
    pb = [ar.mul("mul:b0", c.b[0], u)] + [
        ar.mul(f"mul:b{i}", c.b[i], xu[i - 1]) for i in range(1, n + 1)
    ]
    pa = [ar.mul(f"mul:a{i}", c.a[i], xy[i - 1]) for i in range(1, n + 1)]
    y = _accumulate(
        ar, "y", pb[0],
        [(f"b{i}", pb[i]) for i in range(1, n + 1)],
        [(f"a{i}", pa[i - 1]) for i in range(1, n + 1)],
    )
    return _integrate(ar, "x", c.delta, u, xu) + _integrate(ar, "y", c.delta, y, xy), y


def _ddfii(ar, c, state, u):
    n = c.order
    pa = [ar.mul(f"mul:a{i}", c.a[i], state[i - 1]) for i in range(1, n + 1)]
    w = _accumulate(ar, "w", u, (), [(f"a{i}", pa[i - 1]) for i in range(1, n + 1)])
    pb = [ar.mul("mul:b0", c.b[0], w)] + [
        ar.mul(f"mul:b{i}", c.b[i], state[i - 1]) for i in range(1, n + 1)
    ]
    y = _accumulate(ar, "y", pb[0], [(f"b{i}", pb[i]) for i in range(1, n + 1)])
    return _integrate(ar, "w", c.delta, w, state), y


def _tddfii(ar, c, state, u):
    n = c.order
    p0 = ar.mul("mul:b0", c.b[0], u)
    y = ar.add("acc:y+s1", p0, state[0]) if n else p0
    new = []
    for i in range(1, n + 1):
        pb = ar.mul(f"mul:b{i}", c.b[i], u)
        pa = ar.mul(f"mul:a{i}", c.a[i], y)
        e = ar.add(f"acc:e{i}+s{i + 1}", pb, state[i]) if i < n else pb
        e = ar.sub(f"acc:e{i}-a{i}", e, pa)
        p = ar.mul(f"mul:d*e{i}", c.delta, e)
        new.append(ar.add(f"int:s{i}", state[i - 1], p))
    return tuple(new), y


_KERNELS = {
    Form.DFI: _dfi,
    Form.DFII: _dfii,
    Form.TDFII: _tdfii,
    Form.DDFI: _ddfi,
    Form.DDFII: _ddfii,
    Form.TDDFII: _tddfii,
}


def to_delta_coeffs(p: Polynomial | Sequence[float], delta: float, normalize: bool = True) -> Polynomial:
    """Coefficients of p(1 + delta*d) in powers of the delta operator d."""
    if not delta > 0:
        raise SystemModelError(f"delta must be positive, got {delta}")
    p = as_polynomial(p)
    shift = Polynomial([delta, 1.0])
    out = Polynomial([p.coeffs[0]])
    for c in p.coeffs[1:]:
        out = out * shift + Polynomial([c])
    if normalize and out.coeffs[0] != 0.0:
        out = out.scale(1.0 / out.coeffs[0])
    return out


@dataclass(frozen=True)
class RealizationCoeffs:
    """Coefficients as one realization consumes them.

    ``fmt`` set: raws on that format; ``fmt`` None: unquantized reals.
    ``a[0]`` is the normalized leading coefficient and is never multiplied.
    """

    b: tuple
    a: tuple
    delta: Any = None
    fmt: FxFormat | None = None
    overflowed: tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return len(self.a) - 1


def _filter_coeffs(tf: TransferFunction, spec: RealizationSpec) -> tuple[list[float], list[float]]:
    b, a = tf.filter_coeffs()
    if not spec.form.is_delta:
        return b, a
    beta = to_delta_coeffs(b, spec.delta, normalize=False)
    alpha = to_delta_coeffs(a, spec.delta, normalize=False)
    lead = alpha.coeffs[0]
    return [x / lead for x in beta.coeffs], [x / lead for x in alpha.coeffs]


def reference_coeffs(tf: TransferFunction, spec: RealizationSpec) -> RealizationCoeffs:
    b, a = _filter_coeffs(tf, spec)
    return RealizationCoeffs(tuple(b), tuple(a), spec.delta)


def quantize_coeffs(tf: TransferFunction, fmt: FxFormat, spec: RealizationSpec) -> RealizationCoeffs:
    """FWL map applied to the coefficients a realization multiplies by.

    Delta forms quantize the delta-domain coefficients and the delta step.
    """
    b, a = _filter_coeffs(tf, spec)
    overflowed = []
    raws = {}
    for tag, values in (("b", b), ("a", a)):
        out = []
        for i, x in enumerate(values):
            q, flag = quantize_checked(x, fmt)
            if flag and not (tag == "a" and i == 0):
                overflowed.append(f"{tag}{i}")
            out.append(q.raw)
        raws[tag] = tuple(out)
    delta = None
    if spec.form.is_delta:
        q, flag = quantize_checked(spec.delta, fmt)
        if flag:
            overflowed.append("delta")
        delta = q.raw
    return RealizationCoeffs(raws["b"], raws["a"], delta, fmt, tuple(overflowed))


class FixedPointRealization:
    """A transfer function compiled to raw fixed-point coefficients."""

    def __init__(self, tf: TransferFunction, fmt: FxFormat, spec: RealizationSpec):
        self.tf = tf
        self.fmt = fmt
        self.spec = spec
        self.coeffs = quantize_coeffs(tf, fmt, spec)
        self._kernel = _KERNELS[spec.form]

    @property
    def state_size(self) -> int:
        return state_size(self.spec.form, self.coeffs.order)

    def zero_state(self) -> tuple[int, ...]:
        return (0,) * self.state_size

    def step_raw(self, state: tuple[int, ...], u: int, arith: _FixedArith) -> tuple[tuple[int, ...], int]:
        return self._kernel(arith, self.coeffs, state, u)


class ReferenceRealization:
    def __init__(self, tf: TransferFunction, spec: RealizationSpec):
        self.tf = tf
        self.spec = spec
        self.coeffs = reference_coeffs(tf, spec)
        self._kernel = _KERNELS[spec.form]

    @property
    def state_size(self) -> int:
        return state_size(self.spec.form, self.coeffs.order)

    def zero_state(self) -> tuple[float, ...]:
        return (0.0,) * self.state_size

    def step_value(self, state: tuple[float, ...], u: float) -> tuple[tuple[float, ...], float]:
        return self._kernel(REAL, self.coeffs, state, u)


def _check_state(state: RealizationState, form: Form, size: int):
    if state.form is not form or len(state.values) != size:
        raise SystemModelError(
            f"state for {state.form.value} with {len(state.values)} entries does not match "
            f"{form.value} with {size} entries"
        )


def step(
    coeffs: RealizationCoeffs,
    state: RealizationState,
    u: FxNum,
    spec: RealizationSpec,
    index: int = 0,
) -> tuple[RealizationState, FxNum, StepTrace]:
    """One fixed-point sample of the realization, with its full node trace."""
    fmt = coeffs.fmt
    if fmt is None:
        raise SystemModelError("step needs quantized coefficients")
    if spec.form.is_delta and coeffs.delta is None:
        raise SystemModelError("delta form needs a quantized delta coefficient")
    _check_state(state, spec.form, state_size(spec.form, coeffs.order))
    if u.fmt != fmt:
        raise SystemModelError(f"input format {u.fmt.label()} differs from {fmt.label()}")
    arith = _FixedArith(fmt)
    raws, y = _KERNELS[spec.form](arith, coeffs, state.raws(), u.raw)
    y = FxNum(y, fmt)
    trace = StepTrace(index, u, y, arith.nodes)
    return RealizationState(spec.form, tuple(FxNum(r, fmt) for r in raws)), y, trace


def _as_fx(x, fmt: FxFormat) -> FxNum:
    return x if isinstance(x, FxNum) else quantize(x, fmt)


def simulate(
    tf: TransferFunction,
    fmt: FxFormat,
    spec: RealizationSpec,
    inputs: Sequence,
    init: RealizationState | None = None,
) -> list[tuple[FxNum, StepTrace]]:
    if len(inputs) < 1:
        raise SystemModelError("simulation needs at least one input sample")
    coeffs = quantize_coeffs(tf, fmt, spec)
    state = init or RealizationState.zeros(spec.form, coeffs.order, fmt)
    if init is not None:
        state = RealizationState(init.form, tuple(_as_fx(v, fmt) for v in init.values))
    out = []
    for t, u in enumerate(inputs):
        state, y, trace = step(coeffs, state, _as_fx(u, fmt), spec, t)
        out.append((y, trace))
    return out


def simulate_reference(
    tf: TransferFunction,
    spec: RealizationSpec,
    inputs: Sequence,
    init: RealizationState | None = None,
) -> list[float]:
    ref = ReferenceRealization(tf, spec)
    if init is None:
        state = ref.zero_state()
    else:
        _check_state(init, spec.form, ref.state_size)
        state = init.floats()
    out = []
    for u in inputs:
        state, y = ref.step_value(state, float(u))
        out.append(float(y))
    return out


def impulse_response(tf: TransferFunction, steps: int, spec: RealizationSpec | None = None) -> list[float]:
    return simulate_reference(tf, spec or RealizationSpec(), [1.0] + [0.0] * (steps - 1))


def step_response(tf: TransferFunction, steps: int, spec: RealizationSpec | None = None) -> list[float]:
    return simulate_reference(tf, spec or RealizationSpec(), [1.0] * steps)


# -- state space ------------------------------------------------------------

@dataclass(frozen=True)
class SsCoeffs:
    A: tuple
    B: tuple
    C: tuple
    D: tuple
    fmt: FxFormat | None = None


def quantize_ss(ss: StateSpace, fmt: FxFormat) -> SsCoeffs:
    return SsCoeffs(*(tuple(map(tuple, raw_matrix(getattr(ss, k), fmt))) for k in "ABCD"), fmt=fmt)


def reference_ss(ss: StateSpace) -> SsCoeffs:
    return SsCoeffs(*(tuple(map(tuple, getattr(ss, k).tolist())) for k in "ABCD"))


def _ss_step(ar, c: SsCoeffs, x: tuple, u: tuple) -> tuple[tuple, tuple]:
    def row(tag, M, N, i):
        terms = [ar.mul(f"mul:{M[0]}[{i},{j}]", M[1][i][j], x[j]) for j in range(len(x))]
        terms += [ar.mul(f"mul:{N[0]}[{i},{j}]", N[1][i][j], u[j]) for j in range(len(u))]
        acc = terms[0]
        for k, t in enumerate(terms[1:], 1):
            acc = ar.add(f"acc:{tag}[{i}]+{k}", acc, t)
        return acc

    y = tuple(row("y", ("C", c.C), ("D", c.D), i) for i in range(len(c.C)))
    nx = tuple(row("x", ("A", c.A), ("B", c.B), i) for i in range(len(c.A)))
    return nx, y


def _as_vector(u, m: int) -> tuple:
    vec = tuple(np.atleast_1d(np.asarray(u, dtype=object)).tolist())
    if len(vec) != m:
        raise SystemModelError(f"input sample has {len(vec)} components, expected {m}")
    return vec


def simulate_ss(
    ss: StateSpace,
    fmt: FxFormat,
    inputs: Sequence,
    x0: Sequence | None = None,
) -> list[tuple[tuple[FxNum, ...], StepTrace]]:
    """Fixed-point recursion x' = A_q x + B_q u, y = C_q x + D_q u."""
    c = quantize_ss(ss, fmt)
    x = tuple(_as_fx(v, fmt).raw for v in x0) if x0 is not None else (0,) * ss.n_states
    out = []
    for t, u in enumerate(inputs):
        u = tuple(_as_fx(v, fmt) for v in _as_vector(u, ss.n_inputs))
        arith = _FixedArith(fmt)
        x, y = _ss_step(arith, c, x, tuple(v.raw for v in u))
        y = tuple(FxNum(v, fmt) for v in y)
        out.append((y, StepTrace(t, u, y, arith.nodes)))
    return out


def simulate_ss_reference(ss: StateSpace, inputs: Sequence, x0: Sequence | None = None) -> list[np.ndarray]:
    """Full-precision outputs of (A, B, C, D), one array per step."""
    if not len(inputs):
        return []
    u = np.array([[float(v) for v in _as_vector(s, ss.n_inputs)] for s in inputs])
    x0 = None if x0 is None else np.array([float(v) for v in x0])
    _, y, _ = signal.dlsim((ss.A, ss.B, ss.C, ss.D, ss.sample_time), u, x0=x0)
    return list(np.atleast_2d(y).reshape(len(inputs), ss.n_outputs))


# -- closed loop ------------------------------------------------------------

@dataclass
class LoopStep:
    reference: Any
    controller_input: Any
    controller_output: Any
    plant_output: float
    trace: StepTrace | None = None
    key_before: Any = None
    key_after: Any = None


def _plant_model(cl: ClosedLoopTf) -> StateSpace:
    plant = tf_to_ss(cl.plant)
    if plant.D[0, 0] != 0.0:
        raise DegenerateLoopError(
            "plant has direct feedthrough; the loop would be algebraic"
        )
    return plant


class ClosedLoopSimulator:
    """Controller realized in fixed point, plant in reference arithmetic.

    series:   e = r - y ; u = C(Q(e)) ; plant driven by u
    feedback: c = C(Q(y)) ; plant driven by r - c
    Q is the converter into the controller's format.  The loop output is the
    plant output y.
    """

    def __init__(self, cl: ClosedLoopTf, fmt: FxFormat, spec: RealizationSpec):
        self.cl = cl
        self.fmt = fmt
        self.controller = FixedPointRealization(cl.controller, fmt, spec)
        self.plant = _plant_model(cl)

    def zero_state(self) -> tuple[tuple[int, ...], tuple[float, ...]]:
        return self.controller.zero_state(), (0.0,) * self.plant.n_states

    def state_key(self, state):
        """Controller raws plus the plant state rounded onto the format grid.

        None once the plant state is no longer finite.
        """
        ctrl, xp = state
        if not all(math.isfinite(x) for x in xp):
            return None
        return ctrl, tuple(round(x * self.fmt.scale) for x in xp)

    def step(self, state, r: float, arith: _FixedArith):
        ctrl, xp = state
        xp = np.asarray(xp, dtype=float)
        y = float((self.plant.C @ xp)[0])
        sensed = r - y if self.cl.cmode is CMode.SERIES else y
        q, flag = _convert(sensed, self.fmt)
        arith._note("adc", "convert", q, flag)
        ctrl, out = self.controller.step_raw(ctrl, q, arith)
        drive = out / self.fmt.scale
        if self.cl.cmode is CMode.FEEDBACK:
            drive = r - drive
        xp = self.plant.A @ xp + self.plant.B[:, 0] * drive
        return (ctrl, tuple(xp.tolist())), q, out, y


class ReferenceLoopSimulator:
    def __init__(self, cl: ClosedLoopTf, spec: RealizationSpec):
        self.cl = cl
        self.controller = ReferenceRealization(cl.controller, spec)
        self.plant = _plant_model(cl)

    def zero_state(self):
        return self.controller.zero_state(), (0.0,) * self.plant.n_states

    def step(self, state, r: float):
        ctrl, xp = state
        xp = np.asarray(xp, dtype=float)
        y = float((self.plant.C @ xp)[0])
        sensed = r - y if self.cl.cmode is CMode.SERIES else y
        ctrl, out = self.controller.step_value(ctrl, sensed)
        drive = r - out if self.cl.cmode is CMode.FEEDBACK else out
        xp = self.plant.A @ xp + self.plant.B[:, 0] * drive
        return (ctrl, tuple(xp.tolist())), sensed, out, y


def _convert(x: float, fmt: FxFormat) -> tuple[int, bool]:
    if not math.isfinite(x):
        # a diverged plant saturates the converter
        return (fmt.raw_max if x > 0 else fmt.raw_min), True
    q, flag = quantize_checked(x, fmt)
    return q.raw, flag


def simulate_closed_loop(
    cl: ClosedLoopTf,
    fmt: FxFormat,
    spec: RealizationSpec,
    refs: Sequence,
    init: RealizationState | None = None,
) -> list[LoopStep]:
    sim = ClosedLoopSimulator(cl, fmt, spec)
    ctrl, xp = sim.zero_state()
    if init is not None:
        _check_state(init, spec.form, sim.controller.state_size)
        ctrl = tuple(_as_fx(v, fmt).raw for v in init.values)
    state = (ctrl, xp)
    out = []
    for t, r in enumerate(refs):
        arith = _FixedArith(fmt)
        r = float(r)
        before = sim.state_key(state)
        state, q, u, y = sim.step(state, r, arith)
        q, u = FxNum(q, fmt), FxNum(u, fmt)
        out.append(LoopStep(r, q, u, y, StepTrace(t, q, u, arith.nodes), before, sim.state_key(state)))
    return out


def simulate_closed_loop_reference(
    cl: ClosedLoopTf,
    spec: RealizationSpec,
    refs: Sequence,
    init: RealizationState | None = None,
) -> list[LoopStep]:
    sim = ReferenceLoopSimulator(cl, spec)
    ctrl, xp = sim.zero_state()
    if init is not None:
        _check_state(init, spec.form, sim.controller.state_size)
        ctrl = init.floats()
    state = (ctrl, xp)
    out = []
    for r in refs:
        state, e, u, y = sim.step(state, float(r))
        out.append(LoopStep(float(r), e, u, y))
    return out
