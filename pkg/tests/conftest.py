import gmpy2
import pytest
from hypothesis import HealthCheck, settings

import torusharmonics as th

settings.register_profile(
    "mp", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("mp")


@pytest.fixture(scope="session")
def ctx128():
    return th.PrecisionContext(128)


@pytest.fixture(scope="session")
def ctx192():
    return th.PrecisionContext(192)


@pytest.fixture(scope="session")
def ctx256():
    return th.PrecisionContext(256)


@pytest.fixture(scope="session")
def square_lattice(ctx192):
    """Half-periods (1, i): the fundamental cell is [-1, 1]^2."""
    return th.lattice_invariants(ctx192.real("1"), ctx192.complex("0", "1"),
                                 ctx192)


@pytest.fixture(scope="session")
def square_lattice_128(ctx128):
    return th.lattice_invariants(ctx128.real("1"), ctx128.complex("0", "1"),
                                 ctx128)


@pytest.fixture(scope="session")
def equilateral_lattice(ctx192):
    ctx = ctx192
    with ctx.working():
        w2 = ctx.complex("0.5", "0") + ctx.complex("0", "0.5") * gmpy2.sqrt(ctx.real(3))
    return th.lattice_invariants(ctx.real("1"), w2, ctx)


@pytest.fixture(scope="session")
def generic_lattice(ctx192):
    return th.lattice_invariants(ctx192.complex("1.1", "0.2"),
                                 ctx192.complex("-0.3", "0.9"), ctx192)


@pytest.fixture(scope="session")
def one_hole_domain(square_lattice):
    ctx = square_lattice.ctx
    hole = th.Hole(ctx.complex("0", "0"), radius=ctx.real("0.4"))
    return th.Domain(square_lattice, [hole])


@pytest.fixture(scope="session")
def two_hole_domain(square_lattice):
    ctx = square_lattice.ctx
    holes = [th.Hole(ctx.complex("0.4", "0"), radius=ctx.real("0.2")),
             th.Hole(ctx.complex("-0.4", "-0.4"), radius=ctx.real("0.2"))]
    return th.Domain(square_lattice, holes)


@pytest.fixture(scope="session")
def flower_domain(square_lattice):
    """Two perturbed-circle holes rho(t) = 0.3 + 0.1 cos 3t."""
    ctx = square_lattice.ctx
    coeffs = [ctx.real("0.3"), ctx.real("0"), ctx.real("0"), ctx.real("0.1")]
    with ctx.working():
        third_pi = ctx.pi() / 3
    holes = [th.Hole(ctx.complex("0.4", "0.4"), rho_cos_coeffs=coeffs,
                     phase=ctx.real("0")),
             th.Hole(ctx.complex("-0.4", "-0.4"), rho_cos_coeffs=coeffs,
                     phase=third_pi)]
    return th.Domain(square_lattice, holes)


def as_float(x):
    return float(x)


def tol_bits(ctx, shift):
    """2^(-bits + shift) as mpfr."""
    with ctx.working():
        return gmpy2.mpfr(2) ** (-ctx.bits + shift)
