from fractions import Fraction

import numpy as np
import pytest

from backend.errors import FormatError
from backend.fixedpoint import (
    FxFormat,
    FxNum,
    OverflowMode,
    Rounding,
    fit_raw,
    fwl_poly,
    fx_add,
    fx_mul,
    fx_sub,
    mul_raw,
    quantize,
    quantize_checked,
    quantize_matrix,
    raw_matrix,
)


def test_format_ranges():
    fmt = FxFormat(2, 13)
    assert fmt.width == 15
    assert fmt.min_value == -2
    assert fmt.max_value == 2 - Fraction(1, 2**13)
    assert (fmt.dyn_min, fmt.dyn_max) == (fmt.min_value, fmt.max_value)
    assert fmt.label() == "<2,13>"


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(int_bits=0, frac_bits=4),
        dict(int_bits=2, frac_bits=-1),
        dict(int_bits=40, frac_bits=30),
        dict(int_bits=2, frac_bits=4, dyn_min=1.0, dyn_max=1.0),
        dict(int_bits=2, frac_bits=4, dyn_min=-3.0, dyn_max=1.0),
        dict(int_bits=2, frac_bits=4, dyn_min=-1.0, dyn_max=2.0),
    ],
)
def test_invalid_formats(kwargs):
    with pytest.raises(FormatError):
        FxFormat(**kwargs)


def test_fxnum_rejects_raw_outside_word():
    with pytest.raises(FormatError):
        FxNum(1 << 15, FxFormat(2, 14))


def test_quantize_exact_value():
    q, flag = quantize_checked(0.5, FxFormat(2, 13))
    assert (q.raw, q.value, flag) == (4096, 0.5, False)


def test_quantize_floors_toward_minus_infinity():
    fmt = FxFormat(12, 3)
    assert quantize(-1.97, fmt).value == -2.0
    assert quantize(-0.06068, fmt).value == -0.125
    assert quantize(1.033, fmt).value == 1.0


def test_quantize_nearest_even():
    fmt = FxFormat(4, 2, rounding=Rounding.NEAREST_EVEN)
    assert quantize(0.125, fmt).value == 0.0   # tie -> even raw 0
    assert quantize(0.375, fmt).value == 0.5   # tie -> even raw 2
    assert quantize(-1.97, fmt).value == -2.0


def test_quantize_out_of_range_is_flagged():
    q, flag = quantize_checked(10, FxFormat(2, 4))
    assert flag
    assert q.raw == -32  # 160 wrapped into 6 bits
    q, flag = quantize_checked(10, FxFormat(2, 4, overflow_mode="saturate"))
    assert flag and q.raw == 31


def test_add_and_sub():
    fmt = FxFormat(2, 13)
    s, flag = fx_add(quantize(1.5, fmt), quantize(-1.5, fmt))
    assert (s.value, flag) == (0.0, False)
    d, flag = fx_sub(quantize(0.25, fmt), quantize(1.0, fmt))
    assert (d.value, flag) == (-0.75, False)


def test_add_wraps_and_saturates():
    wrap = FxFormat(2, 13)
    s, flag = fx_add(quantize(1.5, wrap), quantize(1.0, wrap))
    assert flag and s.value == -1.5

    sat = FxFormat(2, 13, overflow_mode=OverflowMode.SATURATE)
    s, flag = fx_add(quantize(1.5, sat), quantize(1.0, sat))
    assert flag and s.exact == 2 - Fraction(1, 2**13)


def test_mul():
    fmt = FxFormat(2, 13)
    p, flag = fx_mul(quantize(0.5, fmt), quantize(0.5, fmt))
    assert (p.value, flag) == (0.25, False)
    z, flag = fx_mul(quantize(1.7, fmt), quantize(0, fmt))
    assert (z.raw, flag) == (0, False)
    small = FxFormat(2, 4)
    _, flag = fx_mul(quantize(1.9, small), quantize(1.9, small))
    assert flag


def test_mixed_formats_rejected():
    with pytest.raises(FormatError):
        fx_add(quantize(0.5, FxFormat(2, 13)), quantize(0.5, FxFormat(2, 12)))


def test_wrap_matches_wide_integer_oracle():
    fmt = FxFormat(3, 5)
    rng = np.random.default_rng(7)
    for a, b in rng.integers(fmt.raw_min, fmt.raw_max + 1, size=(500, 2)):
        a, b = int(a), int(b)
        s, flag = fx_add(FxNum(a, fmt), FxNum(b, fmt))
        exact = a + b
        expected = ((exact + 128) & 0xFF) - 128
        assert s.raw == expected
        assert flag == (not -128 <= exact <= 127)


@pytest.mark.parametrize("int_bits,frac_bits", [(2, 4), (4, 12), (12, 3), (2, 13)])
def test_raw_kernels_match_twos_complement(int_bits, frac_bits):
    fmt = FxFormat(int_bits, frac_bits)
    width = fmt.width
    mask = (1 << width) - 1
    sign = 1 << (width - 1)

    def wrap(v):
        return ((v & mask) ^ sign) - sign

    rng = np.random.default_rng(width)
    pairs = rng.integers(fmt.raw_min, fmt.raw_max + 1, size=(100_000, 2)).tolist()
    for a, b in pairs:
        assert fit_raw(a + b, fmt) == (wrap(a + b), not fmt.representable(a + b))
        exact = (a * b) >> frac_bits
        assert mul_raw(a, b, fmt) == (wrap(exact), not fmt.representable(exact))


def test_saturation_is_monotone():
    fmt = FxFormat(3, 5, overflow_mode="saturate")
    rng = np.random.default_rng(11)
    for a, b in rng.integers(fmt.raw_min, fmt.raw_max + 1, size=(500, 2)):
        s, _ = fx_mul(FxNum(int(a), fmt), FxNum(int(b), fmt))
        assert fmt.raw_min <= s.raw <= fmt.raw_max
        exact = (int(a) * int(b)) >> 5
        if fmt.representable(exact):
            assert s.raw == exact


@pytest.mark.parametrize("rounding,limit", [("floor", 1.0), ("nearest-even", 0.5)])
def test_quantization_error_bound(rounding, limit):
    fmt = FxFormat(3, 8, rounding=rounding)
    rng = np.random.default_rng(3)
    for x in rng.uniform(-4, 3.99, size=1000):
        err = abs(quantize(x, fmt).value - x) * fmt.scale
        assert err < 1.0 if rounding == "floor" else err <= limit


def test_fwl_poly_reproduces_quantized_denominator():
    den = [1.0, -1.97, 1.033, -0.06068]
    assert list(fwl_poly(den, FxFormat(12, 3)).coeffs) == [1.0, -2.0, 1.0, -0.125]
    fine = fwl_poly(den, FxFormat(2, 13)).coeffs
    assert fine[1] == -16139 / 8192
    assert fine[3] == -498 / 8192


def test_fwl_poly_is_identity_on_representable_coefficients():
    p = [1.0, -0.5, 0.25, -0.125]
    assert list(fwl_poly(p, FxFormat(2, 8)).coeffs) == p


def test_input_grid():
    fmt = FxFormat(2, 4, dyn_min=-1, dyn_max=1)
    assert list(fmt.input_grid()) == list(range(-16, 17))
    assert list(fmt.input_grid(0.25)) == [-16, -12, -8, -4, 0, 4, 8, 12, 16]
    with pytest.raises(FormatError):
        fmt.input_grid(0.1)
    odd = FxFormat(4, 4, dyn_min=-0.3, dyn_max=0.9)
    assert list(odd.input_grid(0.5)) == [0, 8]


@pytest.mark.parametrize("int_bits,frac_bits", [(2, 62), (32, 32), (1, 63), (8, 48), (2, 52)])
def test_wide_formats_keep_their_full_range(int_bits, frac_bits):
    fmt = FxFormat(int_bits, frac_bits)
    assert fmt.dyn_min == fmt.min_value
    assert fmt.dyn_max == fmt.max_value
    grid = fmt.input_grid()
    assert (grid.start, grid.stop) == (fmt.raw_min, fmt.raw_max + 1)
    assert grid[-1] == fmt.raw_max


def test_wide_format_range_given_as_double():
    fmt = FxFormat(2, 62, dyn_min=-2.0, dyn_max=2.0)
    assert fmt.dyn_max == fmt.max_value
    assert fmt.dynamic_raws() == (fmt.raw_min, fmt.raw_max)
    half = FxFormat(2, 62, dyn_min=-0.5, dyn_max=0.5)
    assert half.dynamic_raws() == (-(2**61), 2**61)
    for bad in (2.5, float("nan"), float("inf")):
        with pytest.raises(FormatError):
            FxFormat(2, 62, dyn_max=bad)


def test_wide_format_quantization_is_exact():
    fmt = FxFormat(2, 62)
    x = quantize(Fraction(1, 3), fmt)
    assert x.raw == (2**62) // 3
    assert abs(x.exact - Fraction(1, 3)) < fmt.resolution


def test_fwl_poly_is_idempotent():
    rng = np.random.default_rng(12)
    for int_bits, frac_bits in [(2, 4), (4, 12), (12, 3), (2, 13)]:
        fmt = FxFormat(int_bits, frac_bits)
        for _ in range(50):
            p = np.concatenate([[1.0], rng.uniform(-1.9, 1.9, int(rng.integers(1, 6)))])
            once = fwl_poly(p, fmt)
            assert fwl_poly(once, fmt).coeffs == once.coeffs


def test_matrix_quantization():
    fmt = FxFormat(2, 3)
    m = [[0.3, -0.3], [1.0, 0.0]]
    assert quantize_matrix(m, fmt).tolist() == [[0.25, -0.375], [1.0, 0.0]]
    assert raw_matrix(m, fmt) == [[2, -3], [8, 0]]
