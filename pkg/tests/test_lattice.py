"""Lattice invariants against symmetry oracles and direct lattice sums."""

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, strategies as st

import torusharmonics as th
from torusharmonics.errors import ConditioningError, GeometryError


def _tol(ctx, shift=32):
    return mpfr(2) ** (-ctx.bits + shift)


def test_square_lattice_oracles(square_lattice):
    """Square symmetry forces g3 = 0, gamma2 = 0 and eta1 = pi/(4 omega1^2) * omega1."""
    lat = square_lattice
    ctx = lat.ctx
    with ctx.working():
        scale = max(abs(lat.g2), mpfr(1))
        assert abs(lat.g3) < _tol(ctx) * scale
        assert abs(lat.gamma2) < _tol(ctx)
        assert abs(lat.eta1 - ctx.pi() / 4) < _tol(ctx)
        assert abs(lat.area - 4) < _tol(ctx)


def test_equilateral_lattice_g2_vanishes(equilateral_lattice):
    lat = equilateral_lattice
    ctx = lat.ctx
    with ctx.working():
        scale = max(abs(lat.g3), mpfr(1))
        assert abs(lat.g2) < _tol(ctx) * scale


def test_legendre_identity(square_lattice, equilateral_lattice, generic_lattice):
    for lat in (square_lattice, equilateral_lattice, generic_lattice):
        assert lat.legendre_residual() < _tol(lat.ctx)


def test_tau_orientation_normalized(ctx192):
    # swapping to a clockwise pair still yields Im tau > 0
    lat = th.lattice_invariants(ctx192.real("1"), ctx192.complex("0", "-1"),
                                ctx192)
    assert lat.tau.imag > 0


def test_collinear_periods_rejected(ctx192):
    with pytest.raises(GeometryError):
        th.lattice_invariants(ctx192.real("1"), ctx192.real("-2"), ctx192)


def test_extreme_aspect_rejected(ctx192):
    with pytest.raises(ConditioningError):
        th.lattice_invariants(ctx192.real("1"), ctx192.complex("0", "0.00001"),
                              ctx192)


def test_eisenstein_direct_validation(ctx128):
    w = (ctx128.real("1"), ctx128.complex("0", "1"))
    with pytest.raises(ValueError):
        th.eisenstein_direct(w, 1, 50)
    with pytest.raises(ValueError):
        th.eisenstein_direct(w, 2, 5)


def test_eisenstein_direct_tail_bound_honest(ctx128):
    """|sum(R=40) - sum(R=160)| must sit inside the reported R=40 bound."""
    ctx = ctx128
    w = (ctx.real("1"), ctx.complex("0", "1"))
    v40, b40 = th.eisenstein_direct(w, 2, 40)
    v160, b160 = th.eisenstein_direct(w, 2, 160)
    assert abs(v40 - v160) <= b40
    assert b160 < b40


def test_g2_g3_match_direct_sums(generic_lattice):
    """q-series invariants vs truncated lattice sums, within the tail bound."""
    lat = generic_lattice
    ctx = lat.ctx
    w = (lat.omega1, lat.omega2)
    g4, b4 = th.eisenstein_direct(w, 2, 60)
    g6, b6 = th.eisenstein_direct(w, 3, 60)
    with ctx.working():
        assert abs(lat.g2 - 60 * g4) <= 60 * b4 + _tol(ctx) * abs(lat.g2)
        assert abs(lat.g3 - 140 * g6) <= 140 * b6 + _tol(ctx) * abs(lat.g3)


@given(st.sampled_from(["2", "0.4", "1.7"]),
       st.sampled_from(["0", "0.3", "-0.2"]))
def test_homogeneity(re, im):
    """g2, g3, eta1 scale like lambda^-4, lambda^-6, lambda^-1."""
    ctx = th.PrecisionContext(160)
    lam = ctx.complex(re, im)
    base = th.lattice_invariants(ctx.real("1"), ctx.complex("0.31", "1.2"), ctx)
    with ctx.working():
        scaled = th.lattice_invariants(lam * base.omega1, lam * base.omega2, ctx)
        tol = mpfr(2) ** (-ctx.bits + 40)
        assert abs(scaled.g2 - base.g2 / lam ** 4) <= tol * abs(base.g2)
        assert abs(scaled.g3 - base.g3 / lam ** 6) <= tol * max(abs(base.g3), mpfr(1))
        assert abs(scaled.eta1 - base.eta1 / lam) <= tol * abs(base.eta1)


def test_context_attached(square_lattice, ctx192):
    assert square_lattice.ctx == ctx192
    assert square_lattice.tol == mpfr(2) ** (-ctx192.bits + 32)
