"""Truncated series basis for harmonic functions on the punctured torus.

For a domain with b holes centered at a_j and truncation order k_max, the
m = 1 + 2b(k_max + 2) + (b - 1) real basis functions are, in layout order:

    index 0:            the constant 1
    per hole j:         Re zeta_hat(z - a_j),  Im zeta_hat(z - a_j),
                        Re wp^(k)(z - a_j), Im wp^(k)(z - a_j)  (0 <= k <= k_max)
    per hole j < b - 1: log|sigma_hat(z - a_j)| - log|sigma_hat(z - a_{b-1})|

The difference form of the log slots encodes the zero-sum constraint on
log coefficients structurally (c_{b-1} = -sum of the others), so the
downstream linear algebra stays unconstrained; with b = 1 there are no
log slots at all.

Normal derivatives: for an analytic f, d/dn Re f = Re(n f') and
d/dn Im f = Im(n f') with the unit normal read as the complex number
n = n1 + i n2.  The non-analytic corrections of zeta_hat and
log|sigma_hat| contribute the affine and linear-gradient terms spelled
out in normal_row below, all in coordinates shifted to the hole center
and reduced to the fundamental cell.
"""

import gmpy2
from gmpy2 import mpfr

from .elliptic import EllipticEvaluator
from .errors import GeometryError
from .precision import BigComplex, BigReal  # noqa: F401


class BasisSpec:
    """Domain plus truncation order; enumerates the m basis slots.

    slots[i] is a tuple: ("const",), ("zh", j, part), ("wp", j, k, part)
    with part in {"re", "im"}, or ("log", j).
    """

    def __init__(self, domain, k_max):
        if not isinstance(k_max, int) or k_max < 0:
            raise ValueError("k_max must be a nonnegative integer")
        self.domain = domain
        self.ctx = domain.ctx
        self.k_max = k_max
        b = domain.hole_count
        self.m = 1 + 2 * b * (k_max + 2) + (b - 1)
        self.evaluator = EllipticEvaluator(domain.lattice)
        slots = [("const",)]
        for j in range(b):
            slots.append(("zh", j, "re"))
            slots.append(("zh", j, "im"))
            for k in range(k_max + 1):
                slots.append(("wp", j, k, "re"))
                slots.append(("wp", j, k, "im"))
        for j in range(b - 1):
            slots.append(("log", j))
        assert len(slots) == self.m
        self.slots = slots

    @property
    def hole_count(self):
        return self.domain.hole_count

    def _require_evaluable(self, z):
        """Reject points strictly inside a hole (boundary itself is fine)."""
        with self.ctx.working():
            guard = 1 - mpfr(2) ** (-self.ctx.bits // 2)
            for h in self.domain.holes:
                w = self.domain.reduce_to_center(gmpy2.mpc(z) - h.center)
                d = abs(w)
                if h.kind == "circle":
                    if d < h.radius * guard:
                        raise GeometryError("evaluation point inside a hole")
                elif d == 0 or d < h.rho(gmpy2.phase(w)) * guard:
                    raise GeometryError("evaluation point inside a hole")


def _value_row(spec, z):
    """All m basis values at z (no membership check)."""
    ev = spec.evaluator
    b = spec.hole_count
    with spec.ctx.working():
        bundles = [ev.cell_bundle(gmpy2.mpc(z) - h.center, spec.k_max)
                   for h in spec.domain.holes]
        row = [mpfr(1)]
        for j in range(b):
            bd = bundles[j]
            row.append(bd.zeta_hat.real)
            row.append(bd.zeta_hat.imag)
            for k in range(spec.k_max + 1):
                row.append(bd.derivs[k].real)
                row.append(bd.derivs[k].imag)
        for j in range(b - 1):
            row.append(bundles[j].log_sig_hat - bundles[b - 1].log_sig_hat)
        return row


def _log_slot_normal_term(lat, bundle, n1, n2, pi):
    """d/dn of log|sigma_hat(w)| at one hole, from the representative pair
    (z_red, zeta_red) plus the quadratic-correction gradient."""
    zr = bundle.zeta_red
    xt = bundle.z_red.real
    yt = bundle.z_red.imag
    g2re = lat.gamma2.real
    g2im = lat.gamma2.imag
    pi_a = pi / lat.area
    return (n1 * zr.real - n2 * zr.imag
            + n1 * ((-g2re - pi_a) * xt + g2im * yt)
            + n2 * (g2im * xt + (g2re - pi_a) * yt))


def _normal_row(spec, sample):
    """All m normal derivatives at a boundary sample (no membership check)."""
    ev = spec.evaluator
    lat = spec.domain.lattice
    b = spec.hole_count
    with spec.ctx.working():
        pi = gmpy2.const_pi()
        n = sample.normal
        n1 = n.real
        n2 = n.imag
        bundles = [ev.cell_bundle(gmpy2.mpc(sample.point) - h.center,
                                  spec.k_max + 1)
                   for h in spec.domain.holes]
        g2re = lat.gamma2.real
        g2im = lat.gamma2.imag
        pi_a = pi / lat.area
        row = [mpfr(0)]
        for j in range(b):
            bd = bundles[j]
            wp = bd.derivs[0]
            nwp = n * wp
            row.append(-nwp.real - ((g2re + pi_a) * n1 - g2im * n2))
            row.append(-nwp.imag - (g2im * n1 + (g2re - pi_a) * n2))
            for k in range(spec.k_max + 1):
                nf = n * bd.derivs[k + 1]
                row.append(nf.real)
                row.append(nf.imag)
        for j in range(b - 1):
            row.append(_log_slot_normal_term(lat, bundles[j], n1, n2, pi)
                       - _log_slot_normal_term(lat, bundles[b - 1], n1, n2, pi))
        return row


def rows_at_sample(spec, sample):
    """(value_row, normal_row) at one boundary sample, sharing the per-hole
    elliptic evaluations; the workhorse of collocation assembly."""
    ev = spec.evaluator
    lat = spec.domain.lattice
    b = spec.hole_count
    with spec.ctx.working():
        pi = gmpy2.const_pi()
        n = sample.normal
        n1 = n.real
        n2 = n.imag
        bundles = [ev.cell_bundle(gmpy2.mpc(sample.point) - h.center,
                                  spec.k_max + 1)
                   for h in spec.domain.holes]
        g2re = lat.gamma2.real
        g2im = lat.gamma2.imag
        pi_a = pi / lat.area
        vrow = [mpfr(1)]
        arow = [mpfr(0)]
        for j in range(b):
            bd = bundles[j]
            vrow.append(bd.zeta_hat.real)
            vrow.append(bd.zeta_hat.imag)
            wp = bd.derivs[0]
            nwp = n * wp
            arow.append(-nwp.real - ((g2re + pi_a) * n1 - g2im * n2))
            arow.append(-nwp.imag - (g2im * n1 + (g2re - pi_a) * n2))
            for k in range(spec.k_max + 1):
                vrow.append(bd.derivs[k].real)
                vrow.append(bd.derivs[k].imag)
                nf = n * bd.derivs[k + 1]
                arow.append(nf.real)
                arow.append(nf.imag)
        for j in range(b - 1):
            vrow.append(bundles[j].log_sig_hat - bundles[b - 1].log_sig_hat)
            arow.append(_log_slot_normal_term(lat, bundles[j], n1, n2, pi)
                        - _log_slot_normal_term(lat, bundles[b - 1], n1, n2, pi))
        return vrow, arow


def basis_eval(spec, i, z):
    """phi_i(z).  z must lie in the closed domain (holes excluded)."""
    if not 0 <= i < spec.m:
        raise IndexError(f"basis index {i} out of range [0, {spec.m})")
    spec._require_evaluable(z)
    return _value_row(spec, z)[i]


def basis_normal_deriv(spec, i, sample):
    """d phi_i / dn at a boundary sample (outward normal of the domain)."""
    if not 0 <= i < spec.m:
        raise IndexError(f"basis index {i} out of range [0, {spec.m})")
    return _normal_row(spec, sample)[i]


class CoefficientVector:
    """m real coefficients in slot layout order, tied to a BasisSpec."""

    def __init__(self, spec, values):
        values = list(values)
        if len(values) != spec.m:
            raise ValueError(f"expected {spec.m} coefficients, got {len(values)}")
        self.spec = spec
        self.values = values

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def expand_coefficients(spec, vec):
    """Addressable coefficient map, with the implied last log coefficient.

    Keys: "C" for the constant; ("a", j, k) / ("b", j, k) for the Re / Im
    series coefficients (k = -1 is the zeta_hat pair, k >= 0 the wp^(k)
    pairs); ("c", j) for log coefficients of every hole including the
    eliminated last one, which equals minus the sum of the others.
    """
    if isinstance(vec, CoefficientVector):
        if vec.spec is not spec:
            raise ValueError("coefficient vector belongs to a different spec")
        values = vec.values
    else:
        values = list(vec)
    if len(values) != spec.m:
        raise ValueError(f"expected {spec.m} coefficients, got {len(values)}")
    out = {}
    csum = mpfr(0)
    for i, slot in enumerate(spec.slots):
        v = values[i]
        if slot[0] == "const":
            out["C"] = v
        elif slot[0] == "zh":
            key = "a" if slot[2] == "re" else "b"
            out[(key, slot[1], -1)] = v
        elif slot[0] == "wp":
            key = "a" if slot[3] == "re" else "b"
            out[(key, slot[1], slot[2])] = v
        else:
            out[("c", slot[1])] = v
            csum += v
    if spec.hole_count > 1:
        out[("c", spec.hole_count - 1)] = -csum
    return out
