"""Reduced first theta function and its angular derivatives.

The kernel evaluates

    t1(v, q) = sum_{n >= 0} (-1)^n q^(n(n+1)) sin((2n+1) v)

together with d/dv derivatives up to order three.  t1 equals
theta_1(v, q) / (2 q^(1/4)); every consumer in this package uses only
quotients of t1-derivatives, in which the 2 q^(1/4) prefactor cancels,
so no fractional power of q (and no branch choice) ever appears.

Runs at the ambient gmpy2 precision; callers activate a context first.
The q^(n(n+1)) factors decay super-exponentially, which beats the
e^((2n+1)|Im v|) growth of the sine factors, so the series converges
for any v once |q| < 1.
"""

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import ConditioningError


def theta1_ratios(v, q):
    """(t1, t1', t1'', t1''') at v, accurate to the ambient precision."""
    prec = gmpy2.get_context().precision
    cutoff = mpfr(2) ** (-(prec + 16))
    growth = gmpy2.exp(2 * abs(gmpy2.mpfr(v.imag if isinstance(v, mpc) else 0)))
    s1 = gmpy2.sin(v)
    c1 = gmpy2.cos(v)
    s2 = 2 * s1 * c1
    c2 = 2 * c1 * c1 - 1
    sn, cn = s1, c1          # sin((2n+1)v), cos((2n+1)v)
    qq = q * q
    qpow = mpc(1)            # q^(n(n+1))
    qstep = qq               # ratio to the next qpow: q^(2(n+1))
    t0 = mpc(0)
    t1 = mpc(0)
    t2 = mpc(0)
    t3 = mpc(0)
    scale = mpfr(0)
    sign = 1
    nmax = 8 * int(gmpy2.isqrt(prec)) + 64
    for n in range(nmax):
        k = 2 * n + 1
        term = qpow if sign > 0 else -qpow
        t0 += term * sn
        t1 += term * k * cn
        t2 -= term * k * k * sn
        t3 -= term * k * k * k * cn
        qpow = qpow * qstep
        qstep = qstep * qq
        sn, cn = sn * c2 + cn * s2, cn * c2 - sn * s2
        sign = -sign
        scale = max(scale, abs(t0))
        kn = 2 * n + 3
        bound = 4 * abs(qpow) * kn * kn * kn * (abs(sn) + abs(cn)) * growth
        if bound < cutoff * max(scale, mpfr(1)):
            return t0, t1, t2, t3
    raise ConditioningError("theta series did not converge; |q| too close to 1")


def theta1_consts(q):
    """(t1'(0), t1'''(0)): the odd-order derivatives at v = 0."""
    prec = gmpy2.get_context().precision
    cutoff = mpfr(2) ** (-(prec + 16))
    qq = q * q
    qpow = mpc(1)
    qstep = qq
    d1 = mpc(0)
    d3 = mpc(0)
    sign = 1
    nmax = 8 * int(gmpy2.isqrt(prec)) + 64
    for n in range(nmax):
        k = 2 * n + 1
        term = qpow if sign > 0 else -qpow
        d1 += term * k
        d3 -= term * k * k * k
        qpow = qpow * qstep
        qstep = qstep * qq
        sign = -sign
        kn = 2 * n + 3
        if 4 * abs(qpow) * kn * kn * kn < cutoff:
            return d1, d3
    raise ConditioningError("theta series did not converge; |q| too close to 1")
