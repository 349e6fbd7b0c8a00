"""Dense solvers: least squares, Cholesky, pencil reduction, Jacobi SVD."""

import random

import gmpy2
import mpmath
import pytest
from gmpy2 import mpfr

from torusharmonics.errors import RankDeficiencyError, ReductionError
from torusharmonics.linalg import (
    DenseMatrix,
    PencilReducer,
    cholesky,
    condition_report,
    cross_gram_sym,
    dot,
    gram,
    least_squares,
    matmul,
    matvec,
    matvec_t,
    norm2,
    smallest_genpair,
)


def _rand_matrix(rows, cols, ctx, seed, lo=-20, hi=20, den=16):
    """Random matrix of exact binary fractions (representable in both
    gmpy2 and mpmath, so oracles share the same inputs bit for bit)."""
    rng = random.Random(seed)
    data = [[mpfr(rng.randrange(lo, hi + 1)) / den for _ in range(cols)]
            for _ in range(rows)]
    return DenseMatrix(data, ctx)


def _to_mp_exact(M):
    # entries are exact small binary fractions: float round-trip is exact
    return mpmath.matrix([[float(v) for v in row] for row in M.data])


def _mpf(x):
    """Lossless mpfr -> mpmath conversion through a decimal string."""
    d, e, _ = x.digits(10)
    if d.startswith("-"):
        return mpmath.mpf("-0." + d[1:] + "e" + str(e))
    return mpmath.mpf("0." + d + "e" + str(e))


def _genpair_oracle(D, C):
    """min of x'Dx / |Cx|^2 over Cx != 0, by an independent route:
    diagonalize G = C'C, Schur-complement away its kernel eigendirections,
    then whiten by the positive eigenvalues and take the smallest
    eigenvalue of the reduced symmetric matrix."""
    saved = mpmath.mp.prec
    mpmath.mp.prec = 340
    try:
        Dm = _to_mp_exact(D)
        Cm = _to_mp_exact(C)
        G = Cm.T * Cm
        E, U = mpmath.eigsy(G)
        n = D.cols
        cut = mpmath.mpf("1e-40")
        ran = [i for i in range(n) if E[i] > cut]
        ker = [i for i in range(n) if E[i] <= cut]
        Dp = U.T * Dm * U

        def block(rows, cols):
            M = mpmath.matrix(len(rows), len(cols))
            for a, i in enumerate(rows):
                for b, j in enumerate(cols):
                    M[a, b] = Dp[i, j]
            return M

        S = block(ran, ran)
        if ker:
            Drk = block(ran, ker)
            Dkk = block(ker, ker)
            S = S - Drk * (Dkk ** -1) * Drk.T
        r = len(ran)
        W = mpmath.matrix(r, r)
        for a in range(r):
            for b in range(r):
                W[a, b] = S[a, b] / mpmath.sqrt(E[ran[a]] * E[ran[b]])
        return min(mpmath.eigsy(W, eigvals_only=True))
    finally:
        mpmath.mp.prec = saved


def _spd(n, ctx, seed, shift=1):
    R = _rand_matrix(n, n, ctx, seed)
    G = gram(R)
    for i in range(n):
        G.data[i][i] += shift
    return G, R


def test_dense_matrix_validation(ctx192):
    with pytest.raises(ValueError):
        DenseMatrix([], ctx192)
    with pytest.raises(ValueError):
        DenseMatrix([[mpfr(1)], [mpfr(1), mpfr(2)]], ctx192)
    with pytest.raises(ValueError):
        DenseMatrix([[mpfr("inf")]], ctx192)
    M = DenseMatrix.identity(3, ctx192)
    assert M.column(1) == [0, 1, 0]
    assert M.transpose().data == M.data


def test_matvec_and_gram(ctx192):
    M = _rand_matrix(5, 3, ctx192, 7)
    x = [mpfr(1), mpfr(-2), mpfr(3)]
    with ctx192.working():
        y = matvec(M, x)
        assert len(y) == 5
        # columns route equals rows route
        z = matvec_t(M, y)
        G = gram(M)
        w = matvec(G, x)
        for a, b in zip(z, w):
            assert abs(a - b) < mpfr(2) ** (-ctx192.bits + 16)
        S = cross_gram_sym(M, M)
        for i in range(3):
            for j in range(3):
                assert abs(S.data[i][j] - 2 * G.data[i][j]) < \
                    mpfr(2) ** (-ctx192.bits + 16)


def test_matmul_identity(ctx192):
    M = _rand_matrix(4, 4, ctx192, 3)
    P = matmul(M, DenseMatrix.identity(4, ctx192))
    assert P.data == M.data


def test_least_squares_orthonormal_columns(ctx192):
    half = mpfr(1) / 2
    data = [[half, half], [half, -half], [half, half], [half, -half]]
    M = DenseMatrix(data, ctx192)
    rhs = [mpfr(3), mpfr(-1), mpfr(2), mpfr(5)]
    v = least_squares(M, rhs)
    with ctx192.working():
        expect = matvec_t(M, rhs)
        for a, b in zip(v, expect):
            assert abs(a - b) < mpfr(2) ** (-ctx192.bits + 32)


def test_square_solve_recovers_solution(ctx256):
    n = 6
    M = _rand_matrix(n, n, ctx256, 11)
    for i in range(n):
        M.data[i][i] += 8
    x = [mpfr(i) - 2 for i in range(n)]
    with ctx256.working():
        rhs = matvec(M, x)
    v = least_squares(M, rhs)
    for a, b in zip(v, x):
        assert abs(a - b) < mpfr(2) ** (-ctx256.bits + 32)


def test_residual_orthogonal_to_range(ctx192):
    M = _rand_matrix(20, 6, ctx192, 19)
    rng = random.Random(5)
    rhs = [mpfr(rng.randrange(-50, 50)) / 8 for _ in range(20)]
    v = least_squares(M, rhs)
    with ctx192.working():
        r = [a - b for a, b in zip(matvec(M, v), rhs)]
        g = matvec_t(M, r)
        scale = norm2(rhs) * max(norm2(M.column(j)) for j in range(6))
        assert norm2(g) < scale * mpfr(2) ** (-ctx192.bits + 48)


def test_qr_matches_normal_equations(ctx192):
    M = _rand_matrix(15, 5, ctx192, 23)
    rng = random.Random(9)
    rhs = [mpfr(rng.randrange(-50, 50)) / 8 for _ in range(15)]
    a = least_squares(M, rhs)
    b = least_squares(M, rhs, normal_equations=True)
    for x, y in zip(a, b):
        assert abs(x - y) < mpfr(2) ** (-ctx192.bits // 2)


def test_least_squares_validation(ctx192):
    M = _rand_matrix(3, 5, ctx192, 1)
    with pytest.raises(ValueError):
        least_squares(M, [mpfr(0)] * 3)
    M = _rand_matrix(5, 3, ctx192, 1)
    with pytest.raises(ValueError):
        least_squares(M, [mpfr(0)] * 4)


def test_rank_deficiency_names_dependent_column(ctx192):
    M = _rand_matrix(8, 4, ctx192, 31)
    for i in range(8):
        M.data[i][2] = 2 * M.data[i][0]
    with pytest.raises(RankDeficiencyError) as e:
        least_squares(M, [mpfr(1)] * 8)
    assert e.value.column in (0, 2)


def test_cholesky_roundtrip_and_rejection(ctx192):
    G, _ = _spd(5, ctx192, 43)
    L = cholesky(G)
    with ctx192.working():
        P = matmul(L, L.transpose())
        scale = max(abs(G.data[i][i]) for i in range(5))
        for i in range(5):
            for j in range(5):
                assert abs(P.data[i][j] - G.data[i][j]) < \
                    scale * mpfr(2) ** (-ctx192.bits + 32)
    bad = DenseMatrix([[mpfr(1), mpfr(2)], [mpfr(2), mpfr(1)]], ctx192)
    with pytest.raises(ReductionError):
        cholesky(bad)


def test_genpair_diagonal(ctx192):
    D = DenseMatrix([[mpfr(3), mpfr(0), mpfr(0)],
                     [mpfr(0), mpfr(1), mpfr(0)],
                     [mpfr(0), mpfr(0), mpfr(2)]], ctx192)
    C = DenseMatrix.identity(3, ctx192)
    s, x = smallest_genpair(D, C)
    tol = mpfr(2) ** (-ctx192.bits + 32)
    assert abs(s - 1) < tol
    assert abs(abs(x[1]) - 1) < tol
    assert abs(x[0]) < tol and abs(x[2]) < tol
    assert abs(norm2(x) - 1) < tol


def test_genpair_equal_matrices(ctx192):
    # D = C^t C makes every generalized eigenvalue exactly 1
    C = _rand_matrix(4, 4, ctx192, 29)
    D = gram(C)
    s, x = smallest_genpair(D, C)
    assert abs(s - 1) < mpfr(2) ** (-ctx192.bits // 2)


def test_genpair_vs_mpmath_wide_C(ctx192):
    """Random 10-dim PSD pencil with a 7-row C: the kernel of C is
    3-dimensional, so the Schur path is exercised."""
    n, r = 10, 7
    R = _rand_matrix(n, n, ctx192, 101)
    D = gram(R)
    C = _rand_matrix(r, n, ctx192, 103)
    s, x = smallest_genpair(D, C)
    with ctx192.working():
        # Rayleigh quotient of the returned vector matches s
        num = dot(x, matvec(D, x))
        cx = matvec(C, x)
        den = dot(cx, cx)
        assert abs(num / den - s) < mpfr(2) ** (-ctx192.bits // 2)
    mpmath.mp.prec = 340
    try:
        assert abs(_mpf(s) - _genpair_oracle(D, C)) < mpmath.mpf("1e-25")
    finally:
        mpmath.mp.prec = 53


def test_genpair_rank_deficient_C(ctx192):
    """C with a dependent row: reducer rank drops and the answer still
    matches the independent oracle."""
    n = 6
    R = _rand_matrix(n, n, ctx192, 201)
    D = gram(R)
    rng = random.Random(7)
    r1 = [mpfr(rng.randrange(-20, 21)) / 16 for _ in range(n)]
    r2 = [mpfr(rng.randrange(-20, 21)) / 16 for _ in range(n)]
    r3 = [a + b for a, b in zip(r1, r2)]
    C = DenseMatrix([r1, r2, r3], ctx192)
    red = PencilReducer(C)
    assert red.rank == 2
    s, x = smallest_genpair(D, C)
    with ctx192.working():
        num = dot(x, matvec(D, x))
        cx = matvec(C, x)
        assert abs(num / dot(cx, cx) - s) < mpfr(2) ** (-ctx192.bits // 2)
    mpmath.mp.prec = 340
    try:
        assert abs(_mpf(s) - _genpair_oracle(D, C)) < mpmath.mpf("1e-25")
    finally:
        mpmath.mp.prec = 53


def test_genpair_scaling_invariance(ctx192):
    n = 8
    R = _rand_matrix(n, n, ctx192, 301)
    D = gram(R)
    C = _rand_matrix(5, n, ctx192, 303)
    s0, _ = smallest_genpair(D, C)
    scale = [mpfr(2) ** (3 - i) for i in range(n)]
    D2 = DenseMatrix([[D.data[i][j] * scale[i] * scale[j]
                       for j in range(n)] for i in range(n)], ctx192)
    C2 = DenseMatrix([[C.data[i][j] * scale[j] for j in range(n)]
                      for i in range(5)], ctx192)
    s1, _ = smallest_genpair(D2, C2)
    assert abs(s0 - s1) < (1 + s0) * mpfr(2) ** (-ctx192.bits // 2)


def test_pencil_reducer_rejects_zero(ctx192):
    C = DenseMatrix.zeros(4, 6, ctx192)
    with pytest.raises(ReductionError):
        PencilReducer(C)


def test_genpair_dimension_mismatch(ctx192):
    D = DenseMatrix.identity(4, ctx192)
    C = DenseMatrix.identity(3, ctx192)
    with pytest.raises(ValueError):
        smallest_genpair(D, C)


def test_condition_identity(ctx192):
    cond, svals = condition_report(DenseMatrix.identity(4, ctx192))
    tol = mpfr(2) ** (-ctx192.bits + 16)
    assert abs(cond - 1) < tol
    assert len(svals) == 4
    for s in svals:
        assert abs(s - 1) < tol


def test_condition_diagonal_gap(ctx192):
    tiny = mpfr(2) ** (-100)
    M = DenseMatrix([[mpfr(1), mpfr(0)], [mpfr(0), tiny]], ctx192)
    cond, svals = condition_report(M)
    tol = mpfr(2) ** (-ctx192.bits + 32)
    assert abs(cond - mpfr(2) ** 100) < mpfr(2) ** 100 * tol
    assert abs(svals[0] - 1) < tol
    assert abs(svals[1] - tiny) < tiny * tol


def test_jacobi_singular_values_vs_mpmath(ctx192):
    M = _rand_matrix(8, 5, ctx192, 401)
    _, svals = condition_report(M)
    assert all(svals[i] >= svals[i + 1] for i in range(4))
    mpmath.mp.prec = 260
    try:
        G = _to_mp_exact(gram(M))
        eigs = mpmath.eigsy(G, eigvals_only=True)
        expect = sorted((mpmath.sqrt(e) for e in eigs), reverse=True)
        for a, b in zip(svals, expect):
            assert abs(_mpf(a) - b) < mpmath.mpf("1e-30") * (1 + b)
    finally:
        mpmath.mp.prec = 53


@pytest.mark.acceptance
def test_condition_growth_two_flower_domain():
    """cond(B^tB) on the two-flower domain explodes with the cutoff.

    Raw value-collocation columns: high-order lattice-function derivatives
    dwarf the low-order columns, so the Gram's condition number must grow
    by many decades per cutoff step.  512 bits keeps the smallest singular
    value (observed O(10)) far above the Jacobi quantization floor even at
    the top cutoff, where cond is around 1e145.
    """
    import torusharmonics as th
    from torusharmonics.basis import BasisSpec, rows_at_sample
    from torusharmonics.geometry import sample_boundary

    ctx = th.PrecisionContext(512)
    lat = th.lattice_invariants(ctx.real("1"), ctx.complex("0", "1"), ctx)
    coeffs = [ctx.real("0.3"), ctx.real("0"), ctx.real("0"), ctx.real("0.1")]
    with ctx.working():
        third_pi = ctx.pi() / 3
    dom = th.Domain(lat, [
        th.Hole(ctx.complex("0.4", "0.4"), rho_cos_coeffs=list(coeffs),
                phase=ctx.real("0")),
        th.Hole(ctx.complex("-0.4", "-0.4"), rho_cos_coeffs=list(coeffs),
                phase=third_pi),
    ])
    log10_conds = []
    for k in (10, 20, 30, 40):
        spec = BasisSpec(dom, k)
        samples = sample_boundary(dom, 2 * spec.m)
        with ctx.working():
            B = DenseMatrix([rows_at_sample(spec, s)[0] for s in samples],
                            ctx)
            cond = condition_report(gram(B))[0]
            log10_conds.append(float(gmpy2.log10(cond)))
    assert log10_conds[0] > 20
    for lo, hi in zip(log10_conds, log10_conds[1:]):
        # exponential growth: tens of decades per ten-step cutoff increment
        assert hi > lo + 10
