"""Lattice L = 2 omega1 Z + 2 omega2 Z and its invariants.

Production route for the invariants is geometric-convergence q-series:

* g2, g3 from the Eisenstein series E4, E6 in the squared nome,
* eta1 from the theta-derivative quotient at the primary frame,
* eta2 from the same quotient in the swapped frame (omega2, -omega1),
  which keeps the Legendre identity eta1 omega2 - eta2 omega1 = i pi / 2
  an honest cross-check between two independent computations,
* gamma2 = (eta1 - pi conj(omega1)/A) / omega1, the exact relation that
  defines the Eisenstein-summation constant,
* area A = 4 |Im(conj(omega1) omega2)| of the fundamental cell.

The direct shell-ordered lattice sum survives as eisenstein_direct, an
oracle with an O(R^(2-2k)) tail used only for cross-checks; it shares no
code with the q-series route.
"""

import gmpy2
from gmpy2 import mpc, mpfr

from ._theta import theta1_consts
from .errors import ConditioningError, GeometryError
from .precision import PrecisionContext

# |q| must stay below 1 - 2^-8; torus shapes nearer degeneracy are rejected.
_Q_LIMIT_SHIFT = 8


class Lattice:
    """Half-periods plus every derived invariant, frozen at construction.

    Fields: ctx, omega1, omega2 (normalized so Im(omega2/omega1) > 0; the
    generated lattice is unchanged), tau, nome_q, g2, g3, gamma2, eta1,
    eta2, area.  Instances are immutable and safe for concurrent reads.
    """

    __slots__ = (
        "ctx", "omega1", "omega2", "tau", "nome_q",
        "g2", "g3", "gamma2", "eta1", "eta2", "area",
    )

    def __init__(self, **fields):
        for name in self.__slots__:
            object.__setattr__(self, name, fields[name])

    def __setattr__(self, name, value):
        raise AttributeError("Lattice is immutable")

    def __repr__(self):
        return (f"Lattice(omega1={complex(self.omega1)!r}, "
                f"omega2={complex(self.omega2)!r}, bits={self.ctx.bits})")

    @property
    def tol(self):
        """tol_lattice = 2^(-bits+32), the invariant-check tolerance."""
        return mpfr(2) ** (-self.ctx.bits + 32)

    def legendre_residual(self):
        """|eta1 omega2 - eta2 omega1 - i pi/2|, ideally at precision floor."""
        with self.ctx.working():
            pi = gmpy2.const_pi()
            return abs(self.eta1 * self.omega2 - self.eta2 * self.omega1
                       - mpc(0, 1) * pi / 2)


def _eisenstein_e4_e6(qhat):
    """E4, E6 at the ambient precision via divisor-form q-series."""
    prec = gmpy2.get_context().precision
    cutoff = mpfr(2) ** (-(prec + 16))
    e4 = mpc(1)
    e6 = mpc(1)
    qn = qhat
    n = 1
    # |qhat| < (1 - 2^-8)^2, so the loop terminates; cap defensively.
    nmax = 512 * prec
    while n <= nmax:
        common = qn / (1 - qn)
        n3 = n * n * n
        e4 += 240 * n3 * common
        e6 -= 504 * n3 * n * n * common
        if n3 * n * n * abs(common) * 1024 < cutoff:
            return e4, e6
        qn = qn * qhat
        n += 1
    raise ConditioningError("Eisenstein series did not converge; |q| too close to 1")


def lattice_invariants(omega1, omega2, ctx):
    """Build the Lattice for half-periods (omega1, omega2) under ctx.

    Raises GeometryError for colinear periods and ConditioningError when
    the nome is too close to the unit circle (in either modular frame).
    Postcondition, verified here: the Legendre identity and the relations
    eta_i = gamma2 omega_i + pi conj(omega_i)/A hold to tol_lattice.
    """
    if not isinstance(ctx, PrecisionContext):
        raise TypeError("ctx must be a PrecisionContext")
    with ctx.working():
        w1 = mpc(omega1)
        w2 = mpc(omega2)
        if w1 == 0 or w2 == 0:
            raise GeometryError("half-periods must be nonzero")
        tau = w2 / w1
        if tau.imag == 0:
            raise GeometryError("half-periods are colinear: Im(omega2/omega1) = 0")
        if tau.imag < 0:
            w2 = -w2
            tau = -tau
        pi = gmpy2.const_pi()
        q_limit = 1 - mpfr(2) ** (-_Q_LIMIT_SHIFT)

        q = gmpy2.exp(mpc(0, 1) * pi * tau)
        if abs(q) >= q_limit:
            raise ConditioningError(f"|q| = {float(abs(q)):.6f} too close to 1")
        e4, e6 = _eisenstein_e4_e6(q * q)
        g2 = (4 * pi ** 4 / 3) * e4 / (2 * w1) ** 4
        g3 = (8 * pi ** 6 / 27) * e6 / (2 * w1) ** 6

        d1, d3 = theta1_consts(q)
        eta1 = -(pi * pi / (12 * w1)) * (d3 / d1)

        # swapped frame (omega2, -omega1): Im(-omega1/omega2) > 0 follows
        # from Im(tau) > 0, so eta2 has its own geometrically-convergent nome.
        taup = -w1 / w2
        qp = gmpy2.exp(mpc(0, 1) * pi * taup)
        if abs(qp) >= q_limit:
            raise ConditioningError(f"|q'| = {float(abs(qp)):.6f} too close to 1 "
                                    "(swapped frame)")
        d1p, d3p = theta1_consts(qp)
        eta2 = -(pi * pi / (12 * w2)) * (d3p / d1p)

        area = 4 * abs((gmpy2.mpc(w1.real, -w1.imag) * w2).imag)
        gamma2 = (eta1 - pi * mpc(w1.real, -w1.imag) / area) / w1

        lat = Lattice(ctx=ctx, omega1=w1, omega2=w2, tau=tau, nome_q=q,
                      g2=g2, g3=g3, gamma2=gamma2, eta1=eta1, eta2=eta2,
                      area=area)

        tol = lat.tol
        if lat.legendre_residual() >= tol:
            raise ConditioningError("Legendre identity violated beyond tol_lattice")
        for w, eta in ((w1, eta1), (w2, eta2)):
            resid = abs(eta - gamma2 * w - pi * mpc(w.real, -w.imag) / area)
            if resid >= tol:
                raise ConditioningError("eta relation violated beyond tol_lattice")
        return lat


def eisenstein_direct(omega, k, radius):
    """Shell-ordered partial sum of sum_{l != 0} l^(-2k), plus a tail estimate.

    omega is the half-period pair; lattice points are l = 2 p omega1 +
    2 q omega2 over 0 < max(|p|, |q|) <= radius.  Returns (value, bound)
    where bound is a heuristic estimate of the truncation tail, of order
    R^(2-2k).  Pure brute force, kept as an oracle for the q-series route.
    """
    if k < 2:
        raise ValueError("eisenstein_direct requires k >= 2")
    if radius < 10:
        raise ValueError("eisenstein_direct requires radius >= 10")
    w1, w2 = (mpc(omega[0]), mpc(omega[1]))
    total = mpc(0)
    last_shell_abs = mpfr(0)
    for n in range(1, radius + 1):
        shell = mpc(0)
        shell_abs = mpfr(0)
        # perimeter of the square shell max(|p|,|q|) = n
        for p in range(-n, n + 1):
            qs = (-n, n) if abs(p) != n else range(-n, n + 1)
            for q in qs:
                l = 2 * p * w1 + 2 * q * w2
                term = l ** (-2 * k)
                shell += term
                shell_abs += abs(term)
        total += shell
        last_shell_abs = shell_abs
    # tail ~ sum over shells n > R of shell_abs(n) ~ last * (n/R)^(1-2k) * 8n/8R
    bound = last_shell_abs * radius / (2 * k - 2) * 4
    return total, bound
