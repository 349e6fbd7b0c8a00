"""Punctured-torus geometry: holes, boundary sampling, membership.

The computational domain is the torus C / (2 omega1 Z + 2 omega2 Z) with
b >= 1 disjoint holes removed.  Holes are circles or polar star-shaped
curves rho(theta) around a center; boundaries are parameterized
counterclockwise by theta in [0, 2 pi).

The outward normal of the domain points INTO each hole (the universal
Steklov convention); for a circle about its center that is -e^{i theta}.
Quadrature weights are periodic-trapezoid arclength weights
|gamma'(theta)| * dtheta, spectrally accurate on smooth boundaries.
"""

import random

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import GeometryError
from .precision import PrecisionContext

_POSITIVITY_GRID = 1024
_PERIMETER_GRID = 512


class Hole:
    """Circular or polar hole.

    Circle: pass radius.  Polar: pass rho_cos_coeffs = [rho0, rho1, ...]
    for rho(t) = rho0 + sum_k rho_k cos(k t), evaluated at t = theta -
    phase so that phase rotates the shape about its center.
    """

    def __init__(self, center, radius=None, rho_cos_coeffs=None, phase=0):
        if (radius is None) == (rho_cos_coeffs is None):
            raise GeometryError("a hole takes exactly one of radius / rho_cos_coeffs")
        self.center = mpc(center)
        if radius is not None:
            self.kind = "circle"
            self.radius = mpfr(radius)
            if self.radius <= 0:
                raise GeometryError("circle radius must be positive")
            self.rho_cos_coeffs = None
            self.phase = mpfr(0)
        else:
            self.kind = "polar"
            self.radius = None
            self.rho_cos_coeffs = [mpfr(c) for c in rho_cos_coeffs]
            if not self.rho_cos_coeffs:
                raise GeometryError("polar hole needs at least the constant coefficient")
            self.phase = mpfr(phase)

    # -- polar radius and its derivative ---------------------------------

    def rho(self, theta):
        if self.kind == "circle":
            return self.radius
        t = theta - self.phase
        val = self.rho_cos_coeffs[0]
        for k in range(1, len(self.rho_cos_coeffs)):
            val += self.rho_cos_coeffs[k] * gmpy2.cos(k * t)
        return val

    def rho_prime(self, theta):
        if self.kind == "circle":
            return mpfr(0)
        t = theta - self.phase
        val = mpfr(0)
        for k in range(1, len(self.rho_cos_coeffs)):
            val -= k * self.rho_cos_coeffs[k] * gmpy2.sin(k * t)
        return val

    def boundary_point(self, theta):
        """(point, unit outward-of-domain normal, |gamma'(theta)|)."""
        e = mpc(gmpy2.cos(theta), gmpy2.sin(theta))
        if self.kind == "circle":
            return self.center + self.radius * e, -e, self.radius
        r = self.rho(theta)
        rp = self.rho_prime(theta)
        speed = gmpy2.sqrt(rp * rp + r * r)
        # tangent (rho' + i rho) e^{i theta}; normal = i * tangent / |tangent|
        n = mpc(0, 1) * mpc(rp, r) * e / speed
        return self.center + r * e, n, speed

    def max_radius(self):
        """Upper bound on |gamma(theta) - center| (exact for circles)."""
        if self.kind == "circle":
            return self.radius
        return sum(abs(c) for c in self.rho_cos_coeffs)

    def check_positive(self):
        if self.kind == "circle":
            return
        pi = gmpy2.const_pi()
        for i in range(_POSITIVITY_GRID):
            if self.rho(2 * pi * i / _POSITIVITY_GRID) <= 0:
                raise GeometryError("polar radius rho(theta) must stay positive")

    def perimeter(self):
        if self.kind == "circle":
            return 2 * gmpy2.const_pi() * self.radius
        pi = gmpy2.const_pi()
        n = _PERIMETER_GRID
        acc = mpfr(0)
        for i in range(n):
            theta = 2 * pi * i / n
            r = self.rho(theta)
            rp = self.rho_prime(theta)
            acc += gmpy2.sqrt(rp * rp + r * r)
        return acc * 2 * pi / n


class BoundarySample:
    """One collocation node: point, unit outward normal (into the hole),
    owning hole index, trapezoid arclength weight, and parameter angle."""

    __slots__ = ("point", "normal", "hole_index", "weight", "theta")

    def __init__(self, point, normal, hole_index, weight, theta):
        self.point = point
        self.normal = normal
        self.hole_index = hole_index
        self.weight = weight
        self.theta = theta

    def __repr__(self):
        return (f"BoundarySample(hole={self.hole_index}, "
                f"theta={float(self.theta):.6f})")


class Domain:
    """Flat torus minus b disjoint holes.

    Validates, at construction: every hole fits strictly inside the torus
    injectivity radius (so it lies in one cell translate), rho stays
    positive for polar holes, and holes are pairwise disjoint across the
    3x3 block of periodic images.  The disjointness test is conservative:
    it compares center distances against summed outer radii.
    """

    def __init__(self, lattice, holes):
        if not holes:
            raise GeometryError("domain needs at least one hole")
        self.lattice = lattice
        self.ctx = lattice.ctx
        self.holes = list(holes)
        with self.ctx.working():
            w1d = 2 * lattice.omega1
            w2d = 2 * lattice.omega2
            shifts = [p * w1d + q * w2d
                      for p in (-1, 0, 1) for q in (-1, 0, 1)]
            injectivity = min(abs(s) for s in shifts if s != 0) / 2
            for h in self.holes:
                h.check_positive()
                if h.max_radius() >= injectivity:
                    raise GeometryError(
                        "hole too large: it must lie strictly inside one cell")
            for i in range(len(self.holes)):
                for j in range(i, len(self.holes)):
                    ri = self.holes[i].max_radius()
                    rj = self.holes[j].max_radius()
                    for s in shifts:
                        if i == j and s == 0:
                            continue
                        gap = abs(self.holes[i].center - self.holes[j].center + s)
                        if gap <= ri + rj:
                            raise GeometryError(
                                f"holes {i} and {j} overlap (or touch) across "
                                "periodic images")

    @property
    def hole_count(self):
        return len(self.holes)

    def reduce_to_center(self, z):
        """Representative of z with cell coordinates in [-1/2, 1/2]."""
        lat = self.lattice
        w1d = 2 * lat.omega1
        w2d = 2 * lat.omega2
        det1 = (mpc(w2d.real, -w2d.imag) * w1d).imag
        det2 = (mpc(w1d.real, -w1d.imag) * w2d).imag
        z = mpc(z)
        x = (mpc(w2d.real, -w2d.imag) * z).imag / det1
        y = (mpc(w1d.real, -w1d.imag) * z).imag / det2
        return z - int(gmpy2.rint(x)) * w1d - int(gmpy2.rint(y)) * w2d


def contains(domain, z):
    """True iff z, reduced modulo the lattice, lies strictly outside
    every hole (boundary points count as not contained)."""
    with domain.ctx.working():
        for h in domain.holes:
            w = domain.reduce_to_center(mpc(z) - h.center)
            d = abs(w)
            if h.kind == "circle":
                if d <= h.radius:
                    return False
            else:
                if d <= 0:
                    return False
                theta = gmpy2.phase(w)
                if d <= h.rho(theta):
                    return False
        return True


def _apportion(perimeters, total):
    """Integer counts >= 8 per hole, proportional to perimeter, summing to
    total (largest-remainder method; deterministic index tie-break)."""
    b = len(perimeters)
    wsum = sum(perimeters)
    quotas = [total * p / wsum for p in perimeters]
    counts = [max(8, int(gmpy2.floor(q))) for q in quotas]
    remainders = sorted(
        range(b), key=lambda j: (-(quotas[j] - int(gmpy2.floor(quotas[j]))), j))
    idx = 0
    while sum(counts) < total:
        counts[remainders[idx % b]] += 1
        idx += 1
    while sum(counts) > total:
        # a minimum bump overshot the total; shave the largest counts
        k = max(range(b), key=lambda j: (counts[j], j))
        if counts[k] <= 8:
            break
        counts[k] -= 1
    return counts


def sample_boundary(domain, S, counts=None):
    """S boundary samples distributed over the holes.

    Circles are sampled uniformly in theta (uniform in arclength); polar
    holes uniformly in the parameter angle.  Per-hole counts are
    proportional to perimeter with a floor of 8.  Passing explicit
    `counts` overrides the apportionment; solvers use that to refine a
    sample set by exact per-hole doubling (angles then nest).
    """
    b = domain.hole_count
    if counts is None and S < 8 * b:
        raise GeometryError(f"S = {S} too small: need at least 8 per hole")
    with domain.ctx.working():
        pi = gmpy2.const_pi()
        if counts is None:
            perimeters = [h.perimeter() for h in domain.holes]
            counts = _apportion(perimeters, S)
        samples = []
        for j, h in enumerate(domain.holes):
            n = counts[j]
            if n < 8:
                raise GeometryError("per-hole sample count must be >= 8")
            dtheta = 2 * pi / n
            for i in range(n):
                theta = dtheta * i
                point, normal, speed = h.boundary_point(theta)
                samples.append(BoundarySample(
                    point=point, normal=normal, hole_index=j,
                    weight=speed * dtheta, theta=theta))
        return samples


def sample_counts(samples, b):
    """Per-hole counts of an existing sample list."""
    counts = [0] * b
    for s in samples:
        counts[s.hole_index] += 1
    return counts


def double_samples(domain, samples):
    """Resample with every per-hole count doubled; circle angles nest."""
    counts = sample_counts(samples, domain.hole_count)
    return sample_boundary(domain, 2 * len(samples),
                           counts=[2 * c for c in counts])


def random_interior_points(domain, R, seed):
    """R points uniform on the domain by seeded rejection sampling."""
    if R < 1:
        raise GeometryError("need at least one interior point")
    rng = random.Random(seed)
    lat = domain.lattice
    with domain.ctx.working():
        w1d = 2 * lat.omega1
        w2d = 2 * lat.omega2
        points = []
        attempts = 0
        max_attempts = 200 * R + 1000
        while len(points) < R:
            if attempts >= max_attempts:
                raise GeometryError(
                    "rejection sampling acceptance below 1%: holes nearly fill the torus")
            attempts += 1
            u = mpfr(rng.random())
            v = mpfr(rng.random())
            z = u * w1d + v * w2d
            if contains(domain, z):
                points.append(z)
        return points
