import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cmat
from ncmart.matcore import (
    INF,
    DomainError,
    InputError,
    ShapeError,
    Side,
    conjugate,
    jacobi_singular_values,
    modulus,
    parse_exponent,
    schatten_norm,
    singular_values,
    sq_fn_norm,
    weak_l1_norm,
)
from ncmart.triproj import column_parts, hilbert_matrix

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 7)
exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, INF])


def _charpoly_fractions(a):
    """Faddeev-LeVerrier in exact rational arithmetic: coefficients of det(tI - a)."""
    n = len(a)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    m = [[Fraction(0)] * n for _ in range(n)]
    coeffs = [Fraction(1)]
    for k in range(1, n + 1):
        am = [[sum(a[i][l] * m[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        m = [[am[i][j] + coeffs[-1] * ident[i][j] for j in range(n)] for i in range(n)]
        amk = [[sum(a[i][l] * m[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(amk[i][i] for i in range(n)) / k)
    return coeffs


def test_identity_and_diagonal_spectra():
    assert np.allclose(singular_values(np.eye(3)), [1, 1, 1])
    assert np.allclose(singular_values(np.diag([3.0, 4.0])), [4, 3])


def test_hilbert4_spectrum_against_characteristic_polynomial():
    n = 4
    h = [[Fraction(0) if i == j else Fraction(1, j - i) for j in range(n)] for i in range(n)]
    hth = [[sum(h[k][i] * h[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    coeffs = _charpoly_fractions(hth)
    # h is antisymmetric, so each eigenvalue of h*h is double and the
    # characteristic polynomial is (t^2 - s t + q)^2 with rational s, q
    s = -coeffs[1] / 2
    q = (coeffs[2] - s * s) / 2
    assert coeffs[3] == -2 * s * q and coeffs[4] == q * q
    disc = math.sqrt(float(s * s - 4 * q))
    lam = [(float(s) + disc) / 2, (float(s) - disc) / 2]
    sv_oracle = [math.sqrt(v) for v in lam]
    sv = singular_values(hilbert_matrix(4))
    assert np.allclose(sv[::2], sv_oracle, rtol=1e-10)
    assert np.allclose(sv[1::2], sv_oracle, rtol=1e-10)
    # recorded values
    assert sv[0] == pytest.approx(1.8027756377319946, rel=1e-10)


def test_hilbert3_norm_closed_form():
    # antisymmetric 3x3: eigenvalues 0, +-i sqrt(sum of squared upper entries)
    assert schatten_norm(hilbert_matrix(3), INF) == pytest.approx(1.5, rel=1e-14)


def test_nonfinite_input_rejected():
    with pytest.raises(InputError):
        singular_values(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(ShapeError):
        singular_values(np.zeros(3))


def test_modulus_examples(rng):
    assert np.allclose(modulus(np.diag([-2.0, 5.0])), np.diag([2.0, 5.0]))
    q, _ = np.linalg.qr(cmat(rng, 4))
    assert np.allclose(modulus(q), np.eye(4), atol=1e-10)
    a = cmat(rng, 3)
    m = modulus(a)
    assert np.max(np.abs(m @ m - a.conj().T @ a)) <= 1e-9
    with pytest.raises(ShapeError):
        modulus(np.ones((2, 3)))


def test_schatten_examples():
    assert schatten_norm(np.eye(3), 1) == pytest.approx(3.0)
    assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0)
    h64 = schatten_norm(hilbert_matrix(64), INF)
    assert h64 == pytest.approx(singular_values(hilbert_matrix(64))[0])
    assert h64 <= 3.2
    with pytest.raises(DomainError):
        schatten_norm(np.eye(2), 0.5)


def test_exponent_parsing():
    assert parse_exponent("inf") == INF
    assert parse_exponent("INFINITY") == INF
    assert parse_exponent("4/3") == pytest.approx(4 / 3)
    assert conjugate(1) == INF and conjugate(INF) == 1.0
    assert conjugate(4) == pytest.approx(4 / 3)
    with pytest.raises(DomainError):
        parse_exponent("0.9")


def test_weak_l1_examples(rng):
    assert weak_l1_norm(np.diag([1, 1 / 2, 1 / 3])) == pytest.approx(1.0)
    u, v = cmat(rng, 5, 1), cmat(rng, 1, 5)
    r1 = u @ v
    assert weak_l1_norm(r1) == pytest.approx(singular_values(r1)[0])
    a = cmat(rng, 8)
    assert weak_l1_norm(a) < schatten_norm(a, 1)


def test_square_function_examples(rng):
    a = cmat(rng, 4)
    for p in (1, 2, 3, INF):
        assert sq_fn_norm([a], p, Side.COLUMN) == pytest.approx(schatten_norm(a, p), rel=1e-10)
        assert sq_fn_norm([a], p, Side.ROW) == pytest.approx(schatten_norm(a, p), rel=1e-10)
    b = cmat(rng, 4)
    hs = math.hypot(schatten_norm(a, 2), schatten_norm(b, 2))
    assert sq_fn_norm([a, b], 2) == pytest.approx(hs, rel=1e-12)
    rows = column_parts(hilbert_matrix(16)).b_parts
    expected = math.sqrt(sum(1 / j**2 for j in range(1, 16)))
    assert sq_fn_norm(rows, INF, Side.ROW) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ShapeError):
        sq_fn_norm([np.eye(2), np.eye(3)], 2)


@given(seeds, sizes)
def test_jacobi_matches_lapack(seed, n):
    rng = np.random.default_rng(seed)
    a = cmat(rng, n)
    s_lapack = singular_values(a)
    s_jacobi = jacobi_singular_values(a)
    assert np.allclose(s_jacobi, s_lapack, rtol=1e-10, atol=1e-12 * s_lapack[0])


def test_jacobi_rectangular_and_real(rng):
    a = rng.standard_normal((6, 3))
    assert np.allclose(jacobi_singular_values(a), singular_values(a), rtol=1e-10)
    assert np.allclose(jacobi_singular_values(a.T), singular_values(a.T), rtol=1e-10)


@given(seeds, sizes, exponents)
def test_norm_axioms(seed, n, p):
    rng = np.random.default_rng(seed)
    a, b = cmat(rng, n), cmat(rng, n)
    c = float(rng.uniform(-3, 3))
    assert schatten_norm(a + b, p) <= schatten_norm(a, p) + schatten_norm(b, p) + 1e-9
    assert schatten_norm(c * a, p) == pytest.approx(abs(c) * schatten_norm(a, p), rel=1e-9)
    assert schatten_norm(a, p) > 0


@given(seeds, sizes, st.sampled_from([1.0, 1.5, 2.0, 4.0, INF]))
def test_holder(seed, n, p):
    rng = np.random.default_rng(seed)
    a, b = cmat(rng, n), cmat(rng, n)
    lhs = abs(np.trace(a @ b))
    assert lhs <= schatten_norm(a, p) * schatten_norm(b, conjugate(p)) * (1 + 1e-10)


@given(seeds, sizes)
def test_weak_l1_quasi_norm(seed, n):
    rng = np.random.default_rng(seed)
    a, b = cmat(rng, n), cmat(rng, n)
    assert weak_l1_norm(a) <= schatten_norm(a, 1) * (1 + 1e-12)
    assert weak_l1_norm(a + b) <= 2 * (weak_l1_norm(a) + weak_l1_norm(b))


@given(seeds, sizes, st.integers(1, 5))
def test_square_function_hs_symmetry(seed, n, k):
    rng = np.random.default_rng(seed)
    xs = [cmat(rng, n) for _ in range(k)]
    assert sq_fn_norm(xs, 2, Side.COLUMN) == pytest.approx(sq_fn_norm(xs, 2, Side.ROW), rel=1e-10)


@given(seeds, sizes)
def test_modulus_psd(seed, n):
    rng = np.random.default_rng(seed)
    a = cmat(rng, n)
    m = modulus(a)
    assert np.allclose(m, m.conj().T)
    assert np.linalg.eigvalsh(m)[0] >= -1e-10 * schatten_norm(a, INF)
