"""Arbitrary-precision arithmetic contract.

All numeric work in this package happens in MPFR/MPC values (via gmpy2)
under an explicit PrecisionContext.  Precision is threaded through
constructors as a value; nothing consults ambient global state, so a
computation is reproducible from (inputs, bits) alone.

Conventions:

* Public operations in this module round at exactly ``ctx.bits``.
* Internal numerical modules evaluate under ``ctx.working()``, which adds
  GUARD_BITS guard bits; all tolerance contracts are stated relative to
  ``ctx.bits``, so the guard only adds headroom.
* Decimal serialization uses d = ceil(bits * log10 2) digits, which makes
  parse(format(x)) change x by less than 2^(-bits+8) relatively.
"""

import math
import re

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import ArithmeticDomainError, ConfigError, ParseError, PrecisionMismatchError

# Type aliases used in signatures throughout the package.
BigReal = mpfr
BigComplex = mpc

GUARD_BITS = 64

_DECIMAL_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class PrecisionContext:
    """Working binary precision for a computation.

    Immutable value object; hashable and copyable.  Two contexts compare
    equal iff their bit counts agree, and mixing objects built under
    unequal contexts raises PrecisionMismatchError at the point of use.
    """

    __slots__ = ("bits",)

    def __init__(self, bits=1024):
        if not isinstance(bits, int) or isinstance(bits, bool) or bits < 64:
            raise ConfigError(f"precision bits must be an integer >= 64, got {bits!r}")
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("PrecisionContext is immutable")

    def __eq__(self, other):
        return isinstance(other, PrecisionContext) and other.bits == self.bits

    def __hash__(self):
        return hash(("PrecisionContext", self.bits))

    def __repr__(self):
        return f"PrecisionContext(bits={self.bits})"

    @property
    def digits(self):
        """Decimal digits carried by serialization: ceil(bits * log10 2)."""
        return math.ceil(self.bits * math.log10(2))

    @property
    def eps(self):
        """2^(-bits), the relative resolution of the context."""
        return mpfr(2, self.bits) ** (-self.bits)

    def gmp(self, extra=0):
        """gmpy2 context manager at bits + extra binary digits."""
        return gmpy2.context(precision=self.bits + extra)

    def working(self, extra=0):
        """gmpy2 context manager at the internal working precision."""
        return gmpy2.context(precision=self.bits + GUARD_BITS + extra)

    def require_same(self, other):
        if self.bits != other.bits:
            raise PrecisionMismatchError(
                f"mixed precision contexts: {self.bits} bits vs {other.bits} bits"
            )

    # -- constructors -------------------------------------------------

    def real(self, x):
        """BigReal from an int, float, BigReal, or decimal string."""
        if isinstance(x, str):
            return parse_decimal(x, self)
        if isinstance(x, mpc):
            raise ArithmeticDomainError("complex value where a real was required")
        with self.gmp():
            return mpfr(x)

    def complex(self, re_part, im_part=0):
        """BigComplex from real and imaginary parts (each as in real())."""
        if isinstance(re_part, mpc) and im_part == 0:
            with self.gmp():
                return mpc(re_part)
        return mpc(self.real(re_part), self.real(im_part))

    # -- elementary function family ------------------------------------
    # Each rounds at ctx.bits and raises ArithmeticDomainError instead of
    # returning non-finite values.

    def _checked(self, value, op):
        if isinstance(value, mpc):
            ok = gmpy2.is_finite(value.real) and gmpy2.is_finite(value.imag)
        else:
            ok = gmpy2.is_finite(value)
        if not ok:
            raise ArithmeticDomainError(f"{op} produced a non-finite value")
        return value

    def exp(self, z):
        with self.gmp():
            return self._checked(gmpy2.exp(z), "exp")

    def log(self, z):
        if z == 0:
            raise ArithmeticDomainError("log(0) is undefined")
        if not isinstance(z, mpc) and z < 0:
            raise ArithmeticDomainError("log of a negative real; pass a complex value")
        with self.gmp():
            return self._checked(gmpy2.log(z), "log")

    def sqrt(self, z):
        if not isinstance(z, mpc) and z < 0:
            raise ArithmeticDomainError("sqrt of a negative real; pass a complex value")
        with self.gmp():
            return self._checked(gmpy2.sqrt(z), "sqrt")

    def sin(self, z):
        with self.gmp():
            return self._checked(gmpy2.sin(z), "sin")

    def cos(self, z):
        with self.gmp():
            return self._checked(gmpy2.cos(z), "cos")

    def tan(self, z):
        with self.gmp():
            return self._checked(gmpy2.tan(z), "tan")

    def abs(self, z):
        with self.gmp():
            return self._checked(abs(z), "abs")

    def conj(self, z):
        with self.gmp():
            if isinstance(z, mpc):
                return mpc(z.real, -z.imag)
            return mpfr(z)

    def arg(self, z):
        """Principal argument in (-pi, pi]."""
        if z == 0:
            raise ArithmeticDomainError("arg(0) is undefined")
        with self.gmp():
            if isinstance(z, mpc):
                return self._checked(gmpy2.phase(z), "arg")
            return mpfr(0) if z > 0 else gmpy2.const_pi()

    def div(self, a, b):
        if b == 0:
            raise ArithmeticDomainError("division by zero")
        with self.gmp():
            return self._checked(a / b, "div")

    def pi(self):
        with self.gmp():
            return gmpy2.const_pi()


def parse_decimal(s, ctx):
    """Parse a finite decimal literal (optional sign/exponent) to BigReal.

    The value is correctly rounded to ctx.bits.  Malformed input raises
    ParseError carrying the offset of the first offending character.
    """
    if not isinstance(s, str):
        raise ParseError(f"expected a decimal string, got {type(s).__name__}", 0)
    if not s:
        raise ParseError("empty decimal literal", 0)
    m = _DECIMAL_RE.fullmatch(s)
    if m is None:
        head = _DECIMAL_RE.match(s)
        raise ParseError(f"malformed decimal literal {s!r}", head.end() if head else 0)
    return mpfr(s, ctx.bits)


def format_decimal(x, ctx):
    """Serialize BigReal to 'd.dddd...e<exp>' with ctx.digits digits.

    Inverse of parse_decimal up to 2^(-bits+8) relative round-trip error.
    """
    if isinstance(x, mpc):
        raise ArithmeticDomainError("format_decimal takes a real; serialize parts separately")
    with ctx.gmp():
        x = mpfr(x)
    if not gmpy2.is_finite(x):
        raise ArithmeticDomainError("cannot serialize a non-finite value")
    if x == 0:
        return "0"
    mant, exp10, _ = x.digits(10, ctx.digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    tail = mant[1:].rstrip("0")
    body = mant[0] + ("." + tail if tail else "")
    return f"{sign}{body}e{exp10 - 1}"
