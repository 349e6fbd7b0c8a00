"""Steklov eigenvalues on a punctured torus by residual minimization.

For each trial sigma the defect matrix D(sigma) = (A - sigma B)^t
(A - sigma B) is formed from the normal-derivative rows A and value rows
B of the basis at the boundary nodes.  Its smallest generalized
eigenvalue s(sigma) against the interior Gram pencil C^t C is a smooth
nonnegative function whose local minima mark Steklov eigenvalues; the
minimizing eigenvector holds the expansion coefficients of the
eigenfunction.

SigmaPencil precomputes the congruence-transformed quadratic pencil
P0 - sigma P1 + sigma^2 P2 so a sigma sweep costs one Cholesky-sized
solve per point instead of a fresh Gram assembly.  The sweep scans a
uniform grid, refines each bracketed minimum by golden-section search to
tol_sigma, and classifies double eigenvalues by comparing the second
reduced eigenvalue against the geometric mean of the floor and the
bracket shoulder.
"""

import gmpy2
from gmpy2 import mpfr

from .basis import BasisSpec, CoefficientVector, _value_row, rows_at_sample
from .errors import DegenerateCandidateError, ReductionError
from .geometry import double_samples, random_interior_points, sample_boundary
from .laplace import _column_scales, _export_grid, _scale_columns
from .linalg import DenseMatrix, PencilReducer, cross_gram_sym, dot, gram

_INVPHI = "0.61803398874989484820458683436563811772"


class SteklovConfig:
    """Sweep settings; decimal strings keep the config precision-neutral."""

    __slots__ = ("k_max", "interior_points", "seed", "sigma_lo", "sigma_hi",
                 "delta_sigma", "tol_sigma", "oversample", "scaling",
                 "normal_equations")

    def __init__(self, k_max, interior_points=50, seed=1, sigma_lo=None,
                 sigma_hi="25", delta_sigma="0.05", tol_sigma="1e-40",
                 oversample=3, scaling=True, normal_equations=False):
        self.k_max = int(k_max)
        self.interior_points = int(interior_points)
        self.seed = int(seed)
        self.sigma_lo = sigma_lo          # None: -tol_sigma
        self.sigma_hi = sigma_hi
        self.delta_sigma = delta_sigma
        self.tol_sigma = tol_sigma
        self.oversample = int(oversample)
        self.scaling = bool(scaling)
        self.normal_equations = bool(normal_equations)


class SteklovCandidate:
    """One located minimum of s(sigma).

    multiplicity is 2 when the second reduced eigenvalue also collapses
    to the floor at the minimum (double eigenvalue); the candidate list
    then contains two entries at the same sigma with independent
    eigenvectors.  near_degenerate marks distinct minima closer than
    10 tol_sigma to a neighbor.
    """

    __slots__ = ("sigma", "s_value", "bracket", "multiplicity",
                 "near_degenerate", "vector", "lambda2", "spec",
                 "coefficients", "residual_l2")

    def __init__(self, sigma, s_value, bracket, multiplicity, vector, lambda2):
        self.sigma = sigma
        self.s_value = s_value
        self.bracket = bracket
        self.multiplicity = multiplicity
        self.near_degenerate = False
        self.vector = vector
        self.lambda2 = lambda2
        self.spec = None
        self.coefficients = None
        self.residual_l2 = None


def assemble_steklov(spec, samples, interior):
    """(A, B, C): normal-derivative rows, value rows, interior value rows."""
    ctx = spec.ctx
    with ctx.working():
        arows = []
        brows = []
        for s in samples:
            vrow, arow = rows_at_sample(spec, s)
            brows.append(vrow)
            arows.append(arow)
        crows = [_value_row(spec, z) for z in interior]
        return (DenseMatrix(arows, ctx), DenseMatrix(brows, ctx),
                DenseMatrix(crows, ctx))


class SigmaPencil:
    """Quadratic pencil Q^t (A - s B)^t (A - s B) Q, precomputed once."""

    def __init__(self, A, B, C):
        self.ctx = A.ctx
        self.m = A.cols
        self.reducer = PencilReducer(C)
        with self.ctx.working():
            self.P0 = self.reducer.transform(gram(A)).data
            self.P1 = self.reducer.transform(cross_gram_sym(A, B)).data
            self.P2 = self.reducer.transform(gram(B)).data

    def s_at(self, sigma, n_vectors=0):
        """(s, lambda2, vectors) at this sigma; s clamped at zero.

        lambda2 is the second smallest reduced eigenvalue (None when the
        reduced dimension is 1); vectors are lifted to the basis
        coefficient space of A and B.
        """
        ctx = self.ctx
        with ctx.working():
            sigma = mpfr(sigma)
            s2 = sigma * sigma
            m = self.m
            data = [[self.P0[i][j] - sigma * self.P1[i][j] + s2 * self.P2[i][j]
                     for j in range(m)] for i in range(m)]
            (lam1, lam2), vectors = self.reducer.solve_transformed(
                DenseMatrix(data, ctx), n_vectors=n_vectors)
            floor = -(mpfr(2) ** (-ctx.bits // 2))
            if lam1 < floor:
                raise ReductionError(
                    "defect pencil produced a significantly negative eigenvalue")
            return max(lam1, mpfr(0)), lam2, vectors


def _retrying(fn, sigma, bits):
    """Evaluate fn at sigma, nudging by 2^-(bits/4) on reduction failure."""
    nudge = mpfr(2) ** (-(bits // 4))
    last = None
    for shift in (mpfr(0), nudge, -nudge):
        try:
            return fn(sigma + shift)
        except ReductionError as e:
            last = e
    raise last


def s_of_sigma(A, B, C, sigma):
    """Smallest defect eigenvalue at one sigma, assembled directly.

    Builds the rows of A - sigma B, their Gram matrix, and one reduction
    against C^t C.  Intended for spot checks; sweeps should use
    SigmaPencil.  Retries at sigma +- 2^-(bits/4) if the reduction hits
    a singular kernel block.
    """
    ctx = A.ctx
    reducer = PencilReducer(C)

    def attempt(sig):
        with ctx.working():
            rows = [[a - sig * b for a, b in zip(ar, br)]
                    for ar, br in zip(A.data, B.data)]
            D = gram(DenseMatrix(rows, ctx))
            (lam1, _), _ = reducer.solve_transformed(reducer.transform(D))
            floor = -(mpfr(2) ** (-ctx.bits // 2))
            if lam1 < floor:
                raise ReductionError(
                    "defect pencil produced a significantly negative eigenvalue")
            return max(lam1, mpfr(0))

    with ctx.working():
        return _retrying(attempt, mpfr(sigma), ctx.bits)


def _golden_refine(f, a, b, tol):
    """Golden-section minimum of f on [a, b] to width tol; (x, fx, f_edge).

    Runs a fixed, deterministic iteration count derived from the bracket
    width.  f_edge is the smaller of the two shoulder values, used by
    the multiplicity classifier.
    """
    invphi = mpfr(_INVPHI)
    invphi2 = 1 - invphi
    h = b - a
    f_edge = min(f(a), f(b))
    if h <= tol:
        x = (a + b) / 2
        return x, f(x), f_edge
    n = int(gmpy2.ceil(gmpy2.log(h / tol) / gmpy2.log(1 / invphi)))
    c = a + invphi2 * h
    d = a + invphi * h
    yc = f(c)
    yd = f(d)
    for _ in range(n):
        if yc < yd:
            b, d, yd = d, c, yc
            h = invphi * h
            c = a + invphi2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = invphi * h
            d = a + invphi * h
            yd = f(d)
    if yc < yd:
        return c, yc, f_edge
    return d, yd, f_edge


def scan_and_refine(A, B, C, cfg):
    """Locate all minima of s(sigma) on the configured range.

    Scans a uniform grid of spacing <= delta_sigma, brackets strict local
    minima (and decreasing endpoints), refines each by golden section to
    tol_sigma, and classifies multiplicity.  Returns SteklovCandidate
    objects sorted by sigma; double eigenvalues appear twice with
    independent eigenvectors.
    """
    ctx = A.ctx
    pencil = SigmaPencil(A, B, C)
    return _sweep(pencil, cfg, ctx)


def _sweep(pencil, cfg, ctx):
    with ctx.working():
        tol = mpfr(cfg.tol_sigma)
        if tol <= 0:
            raise ValueError("tol_sigma must be positive")
        lo = mpfr(cfg.sigma_lo) if cfg.sigma_lo is not None else -tol
        hi = mpfr(cfg.sigma_hi)
        delta = mpfr(cfg.delta_sigma)
        if hi <= lo or delta <= 0:
            raise ValueError("empty or invalid sigma range")
        nsteps = max(int(gmpy2.ceil((hi - lo) / delta)), 2)

        def f(sig):
            return _retrying(lambda s: pencil.s_at(s)[0], sig, ctx.bits)

        grid = [lo + (hi - lo) * i / nsteps for i in range(nsteps + 1)]
        svals = [f(s) for s in grid]

        brackets = []
        if svals[0] < svals[1]:
            brackets.append((grid[0], grid[1]))
        for i in range(1, nsteps):
            if svals[i] < svals[i - 1] and svals[i] < svals[i + 1]:
                brackets.append((grid[i - 1], grid[i + 1]))
        if svals[nsteps] < svals[nsteps - 1]:
            brackets.append((grid[nsteps - 1], grid[nsteps]))

        candidates = []
        for a, b in brackets:
            x, fx, f_edge = _golden_refine(f, a, b, tol)
            lam1, lam2, vectors = _retrying(
                lambda s: pencil.s_at(s, n_vectors=2), x, ctx.bits)
            # double eigenvalue: lambda2 collapses to the floor as well;
            # the geometric mean of the floor estimate and the bracket
            # shoulder separates the two regimes by many orders
            lam1_eff = max(lam1, tol * tol)
            is_double = (lam2 is not None and f_edge > 0
                         and lam2 < gmpy2.sqrt(lam1_eff * f_edge))
            mult = 2 if is_double else 1
            candidates.append(SteklovCandidate(
                x, lam1, (a, b), mult, vectors[0],
                lam2))
            if is_double and len(vectors) > 1:
                candidates.append(SteklovCandidate(
                    x, lam1, (a, b), mult, vectors[1], lam2))

        candidates.sort(key=lambda c: c.sigma)
        for u, v in zip(candidates, candidates[1:]):
            if v.sigma is not u.sigma and abs(v.sigma - u.sigma) < 10 * tol:
                u.near_degenerate = True
                v.near_degenerate = True
        return candidates


def aposteriori_residual(candidate, samples):
    """Relative boundary defect ||du/dn - sigma u|| / ||u|| in L2(dOmega).

    Both norms use the trapezoid quadrature carried by the samples;
    callers pass a sampling finer than the collocation nodes.  A zero
    eigenfunction norm raises DegenerateCandidateError.
    """
    spec = candidate.spec
    if spec is None or candidate.coefficients is None:
        raise DegenerateCandidateError("candidate carries no eigenfunction")
    ctx = spec.ctx
    v = candidate.coefficients.values
    with ctx.working():
        sigma = mpfr(candidate.sigma)
        num = mpfr(0)
        den = mpfr(0)
        wsum = mpfr(0)
        for s in samples:
            vrow, arow = rows_at_sample(spec, s)
            u = dot(vrow, v)
            g = dot(arow, v) - sigma * u
            num += s.weight * g * g
            den += s.weight * u * u
            wsum += s.weight
        if den <= wsum * mpfr(2) ** (-2 * ctx.bits):
            raise DegenerateCandidateError(
                "eigenfunction has numerically zero boundary norm")
        return gmpy2.sqrt(num / den)


def solve_steklov(domain, cfg):
    """Full sweep on a domain: assemble, scan, refine, certify.

    Returns candidates sorted by sigma, each carrying unit-norm basis
    coefficients and the a posteriori relative residual measured on the
    doubled boundary sampling.
    """
    ctx = domain.lattice.ctx
    spec = BasisSpec(domain, cfg.k_max)
    b = len(domain.holes)
    S = max(cfg.oversample * spec.m, 8 * b)
    samples = sample_boundary(domain, S)
    interior = random_interior_points(domain, cfg.interior_points, cfg.seed)
    A, B, C = assemble_steklov(spec, samples, interior)
    with ctx.working():
        if cfg.scaling:
            scales = _column_scales(B)
            A = _scale_columns(A, scales)
            B = _scale_columns(B, scales)
            C = _scale_columns(C, scales)
        else:
            scales = None
        candidates = scan_and_refine(A, B, C, cfg)
        doubled = double_samples(domain, samples)
        for cand in candidates:
            w = cand.vector
            if scales is not None:
                w = [wi / si for wi, si in zip(w, scales)]
            nrm = gmpy2.sqrt(dot(w, w))
            if nrm == 0:
                raise DegenerateCandidateError("zero eigenvector")
            w = [wi / nrm for wi in w]
            cand.spec = spec
            cand.coefficients = CoefficientVector(spec, w)
            cand.residual_l2 = aposteriori_residual(cand, doubled)
    return candidates


def export_eigenfunction(candidate, path, grid_n=64):
    """CSV field export of one eigenfunction over the fundamental cell."""
    if candidate.spec is None or candidate.coefficients is None:
        raise DegenerateCandidateError("candidate carries no eigenfunction")
    _export_grid(candidate.spec, candidate.coefficients.values, path, grid_n)
