"""Hole parametrization, boundary sampling, membership, interior points."""

import gmpy2
import pytest
from gmpy2 import mpfr

import torusharmonics as th
from torusharmonics.errors import GeometryError
from torusharmonics.geometry import sample_counts


def _tol(ctx, shift):
    return mpfr(2) ** (-ctx.bits + shift)


def test_hole_constructor_validation(ctx192):
    c = ctx192.complex("0", "0")
    with pytest.raises(GeometryError):
        th.Hole(c)  # neither radius nor coefficients
    with pytest.raises(GeometryError):
        th.Hole(c, radius=ctx192.real("0.1"),
                rho_cos_coeffs=[ctx192.real("0.1")])
    with pytest.raises(GeometryError):
        th.Hole(c, radius=ctx192.real("0"))
    with pytest.raises(GeometryError):
        th.Hole(c, rho_cos_coeffs=[])


def test_negative_polar_radius_rejected(square_lattice):
    ctx = square_lattice.ctx
    # rho = 0.1 + 0.2 cos 3t dips negative
    hole = th.Hole(ctx.complex("0", "0"),
                   rho_cos_coeffs=[ctx.real("0.1"), ctx.real("0"),
                                   ctx.real("0"), ctx.real("0.2")])
    with pytest.raises(GeometryError):
        th.Domain(square_lattice, [hole])


def test_oversized_hole_rejected(square_lattice):
    ctx = square_lattice.ctx
    with pytest.raises(GeometryError):
        th.Domain(square_lattice,
                  [th.Hole(ctx.complex("0", "0"), radius=ctx.real("1.05"))])


def test_overlap_across_periodic_images_rejected(square_lattice):
    ctx = square_lattice.ctx
    # centers 0.9 and -0.9: distance 1.8 inside the cell but only 0.2
    # through the periodic boundary (period 2)
    holes = [th.Hole(ctx.complex("0.9", "0"), radius=ctx.real("0.15")),
             th.Hole(ctx.complex("-0.9", "0"), radius=ctx.real("0.15"))]
    with pytest.raises(GeometryError):
        th.Domain(square_lattice, holes)


def test_circle_samples_are_uniform(one_hole_domain):
    dom = one_hole_domain
    ctx = dom.ctx
    samples = th.sample_boundary(dom, 12)
    assert len(samples) == 12
    with ctx.working():
        pi = gmpy2.const_pi()
        r = dom.holes[0].radius
        for i, s in enumerate(samples):
            assert s.hole_index == 0
            assert abs(s.theta - 2 * pi * i / 12) < _tol(ctx, 16)
            # on the circle, normal anti-radial (into the hole)
            assert abs(abs(s.point - dom.holes[0].center) - r) < _tol(ctx, 16)
            radial = (s.point - dom.holes[0].center) / r
            assert abs(s.normal + radial) < _tol(ctx, 16)


def test_weights_sum_to_perimeter(one_hole_domain):
    dom = one_hole_domain
    ctx = dom.ctx
    samples = th.sample_boundary(dom, 40)
    with ctx.working():
        total = sum((s.weight for s in samples), mpfr(0))
        expect = 2 * gmpy2.const_pi() * dom.holes[0].radius
        assert abs(total - expect) < _tol(ctx, 16)


def test_flower_normals_and_speed(flower_domain):
    """Normal is unit, perpendicular to the FD tangent, and points into
    the hole (stepping along it leaves the domain)."""
    dom = flower_domain
    ctx = dom.ctx
    samples = th.sample_boundary(dom, 24)
    counts = sample_counts(samples, dom.hole_count)
    with ctx.working():
        h = mpfr(2) ** (-ctx.bits // 4)
        eps = ctx.real("0.001")
        for s in samples[::5]:
            hole = dom.holes[s.hole_index]
            dtheta = 2 * gmpy2.const_pi() / counts[s.hole_index]
            assert abs(abs(s.normal) - 1) < _tol(ctx, 16)
            pp, _, _ = hole.boundary_point(s.theta + h)
            pm, _, _ = hole.boundary_point(s.theta - h)
            tangent = (pp - pm) / (2 * h)
            # weight = |gamma'| dtheta
            assert abs(abs(tangent) - s.weight / dtheta) < h * h * 1000
            inner = s.normal.real * tangent.real + s.normal.imag * tangent.imag
            assert abs(inner) < h * h * 1000
            assert not th.contains(dom, s.point + eps * s.normal)
            assert th.contains(dom, s.point - eps * s.normal)


def test_flower_perimeter_against_refined_weights(flower_domain):
    dom = flower_domain
    ctx = dom.ctx
    with ctx.working():
        per = dom.holes[0].perimeter()
        samples = th.sample_boundary(dom, 512, counts=[256, 256])
        w0 = sum((s.weight for s in samples if s.hole_index == 0), mpfr(0))
        # trapezoid on a smooth closed curve converges spectrally; the
        # integrand's analyticity strip puts 256 points far below 1e-15
        assert abs(w0 - per) < mpfr("1e-15")


def test_apportionment_proportional(two_hole_domain):
    # equal radii: equal split
    counts = sample_counts(th.sample_boundary(two_hole_domain, 40), 2)
    assert counts == [20, 20]


def test_apportionment_respects_floor(square_lattice):
    ctx = square_lattice.ctx
    holes = [th.Hole(ctx.complex("0", "0"), radius=ctx.real("0.5")),
             th.Hole(ctx.complex("0.9", "0.9"), radius=ctx.real("0.01"))]
    dom = th.Domain(square_lattice, holes)
    counts = sample_counts(th.sample_boundary(dom, 64), 2)
    assert sum(counts) == 64
    assert counts[1] >= 8
    assert counts[0] > counts[1]


def test_sample_boundary_rejects_small_S(two_hole_domain):
    with pytest.raises(GeometryError):
        th.sample_boundary(two_hole_domain, 10)


def test_doubling_nests_circle_angles(one_hole_domain):
    samples = th.sample_boundary(one_hole_domain, 16)
    doubled = th.double_samples(one_hole_domain, samples)
    assert len(doubled) == 32
    for i, s in enumerate(samples):
        assert doubled[2 * i].theta == s.theta


def test_contains_basics(one_hole_domain):
    dom = one_hole_domain
    ctx = dom.ctx
    assert not th.contains(dom, ctx.complex("0", "0"))          # center
    assert not th.contains(dom, ctx.complex("0.4", "0"))        # boundary
    assert not th.contains(dom, ctx.complex("0.39", "0"))       # inside hole
    assert th.contains(dom, ctx.complex("0.41", "0"))           # just outside
    assert th.contains(dom, ctx.complex("0.9", "0.9"))          # far corner
    # periodic image of the hole interior
    assert not th.contains(dom, ctx.complex("2.1", "0.05"))


def test_random_interior_points_deterministic(one_hole_domain):
    a = th.random_interior_points(one_hole_domain, 25, 42)
    b = th.random_interior_points(one_hole_domain, 25, 42)
    c = th.random_interior_points(one_hole_domain, 25, 43)
    assert len(a) == 25
    assert all(x == y for x, y in zip(a, b))
    assert any(x != y for x, y in zip(a, c))
    assert all(th.contains(one_hole_domain, z) for z in a)


def test_random_interior_points_validation(one_hole_domain):
    with pytest.raises(GeometryError):
        th.random_interior_points(one_hole_domain, 0, 1)
