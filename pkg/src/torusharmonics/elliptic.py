"""Weierstrass functions and their periodic modifications on a lattice.

Evaluation route: reduce z to the centered fundamental cell (a 2x2 real
solve plus rounding), evaluate theta-derivative quotients there, and add
back the exact quasi-periodic corrections:

    sigma(z) = (2 omega1 / pi) exp(eta1 z^2 / (2 omega1)) t1(v) / t1'(0)
    zeta(z)  = eta1 z / omega1 + (pi / (2 omega1)) t1'(v) / t1(v)
    wp(z)    = -eta1/omega1 - (pi/(2 omega1))^2 [t1''/t1 - (t1'/t1)^2]
    wp'(z)   = -(pi/(2 omega1))^3 [t1'''/t1 - 3 t1'' t1'/t1^2 + 2 (t1'/t1)^3]

with v = pi z / (2 omega1) and t1 the reduced theta kernel.  Higher
derivatives of wp come from the binomial recursion

    wp''      = 6 wp^2 - g2/2
    wp^(n+2)  = 6 sum_{k=0}^{n} C(n, k) wp^(n-k) wp^(k),   n >= 1,

which reuses wp and wp' exactly and costs O(k_max^2) per point.

The periodic modifications are evaluated directly at the reduced point,
where they are well-defined representatives of doubly-periodic functions:

    zeta_hat(z)          = zeta(z) - gamma2 z - (pi/A) conj(z)
    log|sigma_hat(z)|    = log|sigma(z)| - Re(gamma2 z^2)/2 - pi |z|^2/(2A)
"""

from collections import namedtuple
from math import comb

import gmpy2
from gmpy2 import mpc, mpfr

from ._theta import theta1_consts, theta1_ratios
from .errors import PoleError
from .precision import BigComplex, BigReal  # noqa: F401  (documented aliases)

_K_CAP = 512

# One-pass evaluation record at the reduced representative z_red:
# derivs = [wp, wp', ..., wp^(k)], zeta_red = zeta(z_red) (representative,
# no quasi-period terms), zeta_hat and log_sig_hat are the periodic
# modifications.  Gradient formulas must pair zeta_red with z_red.
CellBundle = namedtuple(
    "CellBundle", ["z_red", "derivs", "zeta_red", "zeta_hat", "log_sig_hat"])


class EllipticEvaluator:
    """Point evaluator for wp, wp^(k), zeta, sigma, zeta_hat, log|sigma_hat|.

    Immutable; point evaluations are independent of each other.  All
    evaluations with dist(z, L) > pole_guard return finite values;
    closer approaches raise PoleError (sigma itself excepted: it is
    entire and accepts any z).
    """

    def __init__(self, lattice, pole_guard=None):
        self.lattice = lattice
        self.ctx = lattice.ctx
        with self.ctx.working():
            if pole_guard is None:
                pole_guard = mpfr(2) ** (-self.ctx.bits // 2)
            self.pole_guard = mpfr(pole_guard)
            w1 = lattice.omega1
            w2 = lattice.omega2
            self._w1d = 2 * w1
            self._w2d = 2 * w2
            pi = gmpy2.const_pi()
            self._pi = pi
            self._u = pi / (2 * w1)              # v = u * z
            self._t1p0, _ = theta1_consts(lattice.nome_q)
            # reduction solve: z = 2 w1 x + 2 w2 y, x y real
            self._det1 = (self._conj(self._w2d) * self._w1d).imag
            self._det2 = (self._conj(self._w1d) * self._w2d).imag
            # shortest nonzero lattice vectors bound the pole distance check
            self._neighbors = [
                p * self._w1d + q * self._w2d
                for p in (-1, 0, 1) for q in (-1, 0, 1)
                if (p, q) != (0, 0)
            ]

    @staticmethod
    def _conj(z):
        return mpc(z.real, -z.imag)

    # -- argument reduction ---------------------------------------------

    def _reduce(self, z):
        """(z_red, m, n) with z = z_red + 2 m omega1 + 2 n omega2 and the
        cell coordinates of z_red in [-1/2, 1/2]."""
        z = mpc(z)
        x = (self._conj(self._w2d) * z).imag / self._det1
        y = (self._conj(self._w1d) * z).imag / self._det2
        m = int(gmpy2.rint(x))
        n = int(gmpy2.rint(y))
        return z - m * self._w1d - n * self._w2d, m, n

    def _dist_to_lattice(self, z_red):
        d = abs(z_red)
        for l in self._neighbors:
            d = min(d, abs(z_red - l))
        return d

    def _require_off_pole(self, z_red):
        if self._dist_to_lattice(z_red) <= self.pole_guard:
            raise PoleError("evaluation point within pole_guard of a lattice point")

    # -- theta-quotient core ----------------------------------------------

    def _ratios(self, z_red):
        v = self._u * z_red
        t0, t1, t2, t3 = theta1_ratios(v, self.lattice.nome_q)
        r1 = t1 / t0
        r2 = t2 / t0
        r3 = t3 / t0
        return r1, r2, r3

    def _wp_wpp_zeta_at(self, z_red):
        """(wp, wp', zeta) at an already-reduced point."""
        lat = self.lattice
        u = self._u
        r1, r2, r3 = self._ratios(z_red)
        e = lat.eta1 / lat.omega1
        zeta = e * z_red + u * r1
        wp = -e - u * u * (r2 - r1 * r1)
        wpp = -(u ** 3) * (r3 - 3 * r2 * r1 + 2 * r1 ** 3)
        return wp, wpp, zeta

    # -- public evaluations -------------------------------------------------

    def wp(self, z):
        with self.ctx.working():
            z_red, _, _ = self._reduce(z)
            self._require_off_pole(z_red)
            return self._wp_wpp_zeta_at(z_red)[0]

    def wp_prime(self, z):
        with self.ctx.working():
            z_red, _, _ = self._reduce(z)
            self._require_off_pole(z_red)
            return self._wp_wpp_zeta_at(z_red)[1]

    def wp_derivs(self, z, k_max):
        """[wp, wp', ..., wp^(k_max)] via the binomial recursion."""
        if k_max < 0:
            raise ValueError("k_max must be >= 0")
        if k_max > _K_CAP:
            raise ValueError(f"k_max exceeds cap {_K_CAP}")
        with self.ctx.working():
            z_red, _, _ = self._reduce(z)
            self._require_off_pole(z_red)
            wp, wpp, _ = self._wp_wpp_zeta_at(z_red)
            out = [wp, wpp]
            if k_max >= 2:
                out.append(6 * wp * wp - self.lattice.g2 / 2)
            for n in range(1, k_max - 1):
                acc = mpc(0)
                for k in range(n + 1):
                    acc += comb(n, k) * out[n - k] * out[k]
                out.append(6 * acc)
            return out[: k_max + 1]

    def zeta(self, z):
        with self.ctx.working():
            z_red, m, n = self._reduce(z)
            self._require_off_pole(z_red)
            base = self._wp_wpp_zeta_at(z_red)[2]
            return base + 2 * m * self.lattice.eta1 + 2 * n * self.lattice.eta2

    def zeta_hat(self, z):
        """zeta(z) - gamma2 z - (pi/A) conj(z); exactly doubly-periodic, so
        it is computed at the reduced representative directly."""
        lat = self.lattice
        with self.ctx.working():
            z_red, _, _ = self._reduce(z)
            self._require_off_pole(z_red)
            base = self._wp_wpp_zeta_at(z_red)[2]
            return (base - lat.gamma2 * z_red
                    - self._pi / lat.area * self._conj(z_red))

    def sigma(self, z):
        """Entire; quasi-periodic factors restore the value at unreduced z."""
        lat = self.lattice
        with self.ctx.working():
            z_red, m, n = self._reduce(z)
            v = self._u * z_red
            t0 = theta1_ratios(v, lat.nome_q)[0]
            sig = (2 * lat.omega1 / self._pi
                   * gmpy2.exp(lat.eta1 * z_red * z_red / (2 * lat.omega1))
                   * t0 / self._t1p0)
            if m == 0 and n == 0:
                return sig
            u = 2 * m * lat.eta1 + 2 * n * lat.eta2
            parity = -1 if (m + n + m * n) % 2 else 1
            return parity * sig * gmpy2.exp(
                u * (z_red + m * lat.omega1 + n * lat.omega2))

    def log_abs_sigma_hat(self, z):
        """log|sigma(z)| - Re(gamma2 z^2)/2 - pi |z|^2 / (2A), doubly-periodic;
        evaluated at the reduced representative."""
        lat = self.lattice
        with self.ctx.working():
            z_red, _, _ = self._reduce(z)
            self._require_off_pole(z_red)   # simple zero of sigma: log -> -inf
            v = self._u * z_red
            t0 = theta1_ratios(v, lat.nome_q)[0]
            log_sig = (gmpy2.log(abs(2 * lat.omega1 / self._pi * t0 / self._t1p0))
                       + (lat.eta1 * z_red * z_red / (2 * lat.omega1)).real)
            quad = (lat.gamma2 * z_red * z_red).real / 2
            r2 = z_red.real * z_red.real + z_red.imag * z_red.imag
            return log_sig - quad - self._pi * r2 / (2 * lat.area)

    def cell_bundle(self, z, k_max):
        """Everything a basis row needs at z, from one theta evaluation:
        wp derivatives through order k_max, the representative zeta at the
        reduced point, zeta_hat, and log|sigma_hat|."""
        if k_max < 0 or k_max > _K_CAP:
            raise ValueError(f"k_max must be in [0, {_K_CAP}]")
        lat = self.lattice
        with self.ctx.working():
            z_red, _, _ = self._reduce(z)
            self._require_off_pole(z_red)
            u = self._u
            v = u * z_red
            t0, t1, t2, t3 = theta1_ratios(v, lat.nome_q)
            r1 = t1 / t0
            r2 = t2 / t0
            r3 = t3 / t0
            e = lat.eta1 / lat.omega1
            zeta_red = e * z_red + u * r1
            wp = -e - u * u * (r2 - r1 * r1)
            wpp = -(u ** 3) * (r3 - 3 * r2 * r1 + 2 * r1 ** 3)
            derivs = [wp, wpp]
            if k_max >= 2:
                derivs.append(6 * wp * wp - lat.g2 / 2)
            for n in range(1, k_max - 1):
                acc = mpc(0)
                for k in range(n + 1):
                    acc += comb(n, k) * derivs[n - k] * derivs[k]
                derivs.append(6 * acc)
            derivs = derivs[: k_max + 1]
            zeta_hat = (zeta_red - lat.gamma2 * z_red
                        - self._pi / lat.area * self._conj(z_red))
            log_sig = (gmpy2.log(abs(2 * lat.omega1 / self._pi * t0 / self._t1p0))
                       + (lat.eta1 * z_red * z_red / (2 * lat.omega1)).real)
            log_sig_hat = (log_sig - (lat.gamma2 * z_red * z_red).real / 2
                           - self._pi * (z_red.real * z_red.real
                                         + z_red.imag * z_red.imag)
                           / (2 * lat.area))
            return CellBundle(z_red, derivs, zeta_red, zeta_hat, log_sig_hat)
