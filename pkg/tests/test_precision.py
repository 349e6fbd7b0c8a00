"""Context arithmetic, decimal parsing and formatting."""

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, strategies as st

import torusharmonics as th
from torusharmonics.errors import (ArithmeticDomainError, ConfigError,
                                   ParseError, PrecisionMismatchError)


def test_context_basics():
    ctx = th.PrecisionContext(256)
    assert ctx.bits == 256
    assert ctx.digits == 78  # ceil(256 log10 2)
    assert float(ctx.eps) == pytest.approx(2.0 ** -255, rel=1e-12)


def test_context_rejects_tiny_precision():
    with pytest.raises(ConfigError):
        th.PrecisionContext(32)


def test_context_equality_and_mismatch():
    a = th.PrecisionContext(128)
    b = th.PrecisionContext(128)
    c = th.PrecisionContext(192)
    assert a == b and hash(a) == hash(b)
    assert a != c
    with pytest.raises(PrecisionMismatchError):
        a.require_same(c)


def test_parse_decimal_round_trip_digits():
    # 60 significant digits survive a parse at 256 bits (77 digits)
    ctx = th.PrecisionContext(256)
    s = "3.14159265358979323846264338327950288419716939937510582097494"
    x = th.parse_decimal(s, ctx)
    with ctx.working():
        ref = gmpy2.const_pi()
        assert abs(x - ref) < mpfr(2) ** (-190)


def test_parse_decimal_errors_carry_offset():
    ctx = th.PrecisionContext(128)
    with pytest.raises(ParseError) as ei:
        th.parse_decimal("1.25x7", ctx)
    assert ei.value.offset == 4
    with pytest.raises(ParseError):
        th.parse_decimal("", ctx)
    with pytest.raises(ParseError):
        th.parse_decimal("--3", ctx)


def test_parse_accepts_exponent_forms():
    ctx = th.PrecisionContext(128)
    for s in ("1e3", "-2.5E-7", "+.5e+2", "7.", "0"):
        th.parse_decimal(s, ctx)


def test_elementary_exactness():
    ctx = th.PrecisionContext(192)
    one = ctx.real("1")
    assert ctx.exp(ctx.real("0")) == 1
    assert ctx.log(one) == 0
    assert ctx.sqrt(ctx.real("4")) == 2


def test_exp_i_pi():
    ctx = th.PrecisionContext(256)
    with ctx.working():
        z = ctx.complex("0", "1") * ctx.pi()
    val = ctx.exp(z)
    assert abs(val + 1) < mpfr(2) ** (-ctx.bits + 8)


def test_domain_errors():
    ctx = th.PrecisionContext(128)
    zero = ctx.real("0")
    with pytest.raises(ArithmeticDomainError):
        ctx.log(zero)
    with pytest.raises(ArithmeticDomainError):
        ctx.log(ctx.real("-2"))
    with pytest.raises(ArithmeticDomainError):
        ctx.sqrt(ctx.real("-1"))
    with pytest.raises(ArithmeticDomainError):
        ctx.div(ctx.real("1"), zero)
    with pytest.raises(ArithmeticDomainError):
        ctx.arg(ctx.complex("0", "0"))


def test_complex_log_of_negative_real_allowed():
    ctx = th.PrecisionContext(128)
    z = ctx.complex("-2", "0")
    val = ctx.log(z)
    with ctx.working():
        assert abs(val.imag - ctx.pi()) < mpfr(2) ** (-ctx.bits + 8)


def test_format_decimal_basics():
    ctx = th.PrecisionContext(128)
    assert th.format_decimal(ctx.real("0"), ctx) == "0"
    s = th.format_decimal(ctx.real("-0.25"), ctx)
    assert s.startswith("-2.5") and s.endswith("e-1")
    assert th.format_decimal(ctx.real("1"), ctx) == "1e0"


def test_format_rejects_non_finite_and_complex():
    ctx = th.PrecisionContext(128)
    with pytest.raises(ArithmeticDomainError):
        th.format_decimal(gmpy2.inf(), ctx)
    with pytest.raises(ArithmeticDomainError):
        th.format_decimal(ctx.complex("1", "1"), ctx)


@given(st.integers(min_value=-10**25, max_value=10**25),
       st.integers(min_value=-20, max_value=20))
def test_parse_format_round_trip(mant, e10):
    # values written by format_decimal parse back to the same mpfr
    ctx = th.PrecisionContext(128)
    x = th.parse_decimal(f"{mant}e{e10}", ctx)
    s = th.format_decimal(x, ctx)
    y = th.parse_decimal(s, ctx)
    if x == 0:
        assert y == 0
    else:
        assert abs(y - x) <= abs(x) * mpfr(2) ** (-ctx.bits + 8)


@given(st.floats(min_value=-1e6, max_value=1e6,
                 allow_nan=False, allow_infinity=False))
def test_exp_log_inverse(v):
    ctx = th.PrecisionContext(128)
    with ctx.working():
        x = abs(mpfr(repr(v))) + mpfr("0.001")
    y = ctx.exp(ctx.log(x))
    assert abs(y - x) <= x * mpfr(2) ** (-ctx.bits + 16)
