"""Dirichlet problem on a punctured torus by boundary collocation.

The trial space is a BasisSpec; the Dirichlet data is prescribed per
hole as a truncated Fourier series in the boundary parameter theta.
Collocation at an oversampled set of boundary nodes gives a tall least
squares system B v = f, solved by column-pivoted QR after equilibrating
the columns of B.  The returned solution carries a certified residual:
the sup of |u - f| over a boundary sampling twice as fine as the
collocation set (collocation nodes plus midpoints).
"""

import os

import gmpy2
from gmpy2 import mpfr

from .basis import BasisSpec, CoefficientVector, _value_row
from .errors import GeometryError
from .geometry import contains, double_samples, sample_boundary
from .linalg import DenseMatrix, dot, least_squares
from .precision import format_decimal


class BoundaryData:
    """Per-hole Dirichlet values f_j(theta) = a0 + sum ak cos k theta + bk sin k theta."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms):
        """terms[j] = (a0, [(k, ak, bk), ...]) with positive integer modes k."""
        self.ctx = ctx
        clean = []
        for a0, modes in terms:
            cmodes = []
            for k, ak, bk in modes:
                k = int(k)
                if k <= 0:
                    raise ValueError("Fourier mode index must be positive")
                cmodes.append((k, ctx.real(ak), ctx.real(bk)))
            clean.append((ctx.real(a0), tuple(cmodes)))
        self.terms = tuple(clean)

    @classmethod
    def constant(cls, ctx, values):
        return cls(ctx, [(v, []) for v in values])

    @property
    def hole_count(self):
        return len(self.terms)

    def value(self, hole_index, theta):
        a0, modes = self.terms[hole_index]
        with self.ctx.working():
            acc = mpfr(a0)
            for k, ak, bk in modes:
                kt = k * theta
                if ak != 0:
                    acc += ak * gmpy2.cos(kt)
                if bk != 0:
                    acc += bk * gmpy2.sin(kt)
            return acc


class LaplaceSolution:
    """Collocation solution with its doubled-sampling residual certificate."""

    __slots__ = ("spec", "coefficients", "boundary_sup_error", "samples_used",
                 "data")

    def __init__(self, spec, coefficients, boundary_sup_error, samples_used, data):
        self.spec = spec
        self.coefficients = coefficients
        # sup of |u - f| over the doubled boundary node set; a node
        # quantity, not a true sup, but the maximum principle transfers
        # it to the interior up to the sampling resolution
        self.boundary_sup_error = boundary_sup_error
        self.samples_used = samples_used
        self.data = data


def assemble_dirichlet(spec, samples, data):
    """Value-collocation matrix and right-hand side for Dirichlet data."""
    if data.hole_count != len(spec.domain.holes):
        raise GeometryError("boundary data does not match the number of holes")
    ctx = spec.ctx
    with ctx.working():
        rows = []
        rhs = []
        for s in samples:
            rows.append(_value_row(spec, s.point))
            rhs.append(data.value(s.hole_index, s.theta))
        return DenseMatrix(rows, ctx), rhs


def _column_scales(M):
    """Per-column sup norms, zero columns mapped to 1."""
    scales = [mpfr(0)] * M.cols
    for row in M.data:
        for j, v in enumerate(row):
            a = abs(v)
            if a > scales[j]:
                scales[j] = a
    return [s if s != 0 else mpfr(1) for s in scales]


def _scale_columns(M, scales):
    data = [[v / s for v, s in zip(row, scales)] for row in M.data]
    return DenseMatrix(data, M.ctx)


def solve_laplace(domain, data, k_max, oversample=3, scaling=True,
                  normal_equations=False):
    """Solve the Dirichlet problem and certify the boundary residual.

    Collocation uses oversample * dim(basis) boundary nodes apportioned
    by perimeter; the residual is measured on the doubled node set.
    """
    ctx = domain.lattice.ctx
    spec = BasisSpec(domain, k_max)
    b = len(domain.holes)
    S = max(int(oversample) * spec.m, 8 * b)
    samples = sample_boundary(domain, S)
    B, rhs = assemble_dirichlet(spec, samples, data)
    with ctx.working():
        if scaling:
            scales = _column_scales(B)
            v = least_squares(_scale_columns(B, scales), rhs,
                              normal_equations=normal_equations)
            v = [w / s for w, s in zip(v, scales)]
        else:
            v = least_squares(B, rhs, normal_equations=normal_equations)
        doubled = double_samples(domain, samples)
        sup = mpfr(0)
        for s in doubled:
            u = dot(_value_row(spec, s.point), v)
            err = abs(u - data.value(s.hole_index, s.theta))
            if err > sup:
                sup = err
    return LaplaceSolution(spec, CoefficientVector(spec, v), sup,
                           len(samples), data)


def eval_solution(sol, z):
    """Evaluate the solution at a point of the closed domain."""
    spec = sol.spec
    spec._require_evaluable(z)
    with spec.ctx.working():
        return dot(_value_row(spec, z), sol.coefficients.values)


def _export_grid(spec, values, path, grid_n):
    """Write 'x,y,u' CSV over a grid_n x grid_n grid of the fundamental cell.

    Grid points are z = (i/grid_n) p1 + (j/grid_n) p2 over the half-open
    unit square in lattice coordinates; points inside a hole emit 'nan'.
    The file is written atomically (temp file + rename).
    """
    if grid_n < 1:
        raise ValueError("grid_n must be positive")
    ctx = spec.ctx
    lat = spec.domain.lattice
    lines = ["x,y,u"]
    with ctx.working():
        p1 = 2 * lat.omega1
        p2 = 2 * lat.omega2
        n = mpfr(grid_n)
        for i in range(grid_n):
            for j in range(grid_n):
                z = (i / n) * p1 + (j / n) * p2
                x = format_decimal(z.real, ctx)
                y = format_decimal(z.imag, ctx)
                if contains(spec.domain, z):
                    u = dot(_value_row(spec, z), values)
                    lines.append(f"{x},{y},{format_decimal(u, ctx)}")
                else:
                    lines.append(f"{x},{y},nan")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def export_field(sol, path, grid_n=64):
    _export_grid(sol.spec, sol.coefficients.values, path, grid_n)
