import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cmat
from ncmart.filtration import (
    FiltrationSpec,
    Kind,
    augmented_expectation,
    corner_expectation,
    expectation,
    increments,
    martingale_from_increments,
    transform,
)
from ncmart.matcore import INF, ShapeError, Side, schatten_norm, sq_fn_norm

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 6)
kinds = st.sampled_from([Kind.CORNER, Kind.AUGMENTED])


def _unit(n, i, j):
    e = np.zeros((n, n))
    e[i - 1, j - 1] = 1.0
    return e


def test_corner_examples(rng):
    out = corner_expectation(np.ones((3, 3)), 2)
    assert np.array_equal(out, np.pad(np.ones((2, 2)), ((0, 1), (0, 1))))
    a = cmat(rng, 4)
    assert np.array_equal(corner_expectation(a, 4), a)
    b = cmat(rng, 4)
    lhs = np.trace(corner_expectation(a, 2) @ b)
    rhs = np.trace(a @ corner_expectation(b, 2))
    assert lhs == pytest.approx(rhs, abs=1e-12)
    with pytest.raises(IndexError):
        corner_expectation(a, 5)
    with pytest.raises(IndexError):
        corner_expectation(a, 0)


def test_augmented_examples(rng):
    out = augmented_expectation(np.ones((3, 3)), 2)
    expected = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1.0]])
    assert np.array_equal(out, expected)
    d = np.diag(rng.standard_normal(5))
    for k in range(1, 6):
        assert np.array_equal(augmented_expectation(d, k), d)
    a = cmat(rng, 4)
    for k in range(1, 5):
        assert np.trace(augmented_expectation(a, k)) == pytest.approx(np.trace(a), abs=1e-12)
    with pytest.raises(IndexError):
        augmented_expectation(a, 9)


def test_increment_examples(rng):
    e13 = _unit(3, 1, 3)
    m = increments(e13, FiltrationSpec(3, Kind.CORNER))
    assert np.array_equal(m.increments[2], e13)
    assert not m.increments[0].any() and not m.increments[1].any()

    a = cmat(rng, 4)
    dc = increments(a, FiltrationSpec(4, Kind.CORNER)).increments
    da = increments(a, FiltrationSpec(4, Kind.AUGMENTED)).increments
    tail = np.diag(np.concatenate([[0], np.diag(a)[1:]]))
    assert np.allclose(da[0], dc[0] + tail, atol=1e-15)
    for k in range(2, 5):
        assert np.allclose(da[k - 1], dc[k - 1] - a[k - 1, k - 1] * _unit(4, k, k), atol=1e-15)

    b = cmat(rng, 8)
    for kind in Kind:
        m = increments(b, FiltrationSpec(8, kind))
        assert np.max(np.abs(sum(m.increments) - b)) <= 1e-12
    with pytest.raises(ShapeError):
        increments(b, FiltrationSpec(4))


def test_martingale_from_increments_checks_support(rng):
    spec = FiltrationSpec(3, Kind.CORNER)
    m = increments(cmat(rng, 3), spec)
    assert martingale_from_increments(m.increments, spec) == m
    bad = list(m.increments)
    bad[0] = np.ones((3, 3))
    with pytest.raises(ValueError):
        martingale_from_increments(bad, spec)


def test_partial_sums_are_expectations(rng):
    a = cmat(rng, 5)
    for kind in Kind:
        m = increments(a, FiltrationSpec(5, kind))
        for k, s in enumerate(m.partial_sums(), start=1):
            assert np.allclose(s, expectation(a, k, kind))


def test_transform_examples(rng):
    a = cmat(rng, 4)
    m = increments(a, FiltrationSpec(4))
    assert np.allclose(transform(m, [1, 1, 1, 1]), a)
    d = np.diag([1.0, 2.0, 3.0, 4.0])
    md = increments(d, FiltrationSpec(4, Kind.CORNER))
    assert np.allclose(transform(md, [1, -1, 1, -1]), np.diag([1.0, -2.0, 3.0, -4.0]))
    eps = rng.choice([-1, 1], size=4)
    assert schatten_norm(transform(m, eps), 2) == pytest.approx(schatten_norm(a, 2), rel=1e-12)
    with pytest.raises(ShapeError):
        transform(m, [1, 1])


@given(seeds, sizes, kinds)
def test_tower_law(seed, n, kind):
    a = cmat(np.random.default_rng(seed), n)
    for k in range(1, n + 1):
        for j in range(1, n + 1):
            lhs = expectation(expectation(a, j, kind), k, kind)
            assert np.array_equal(lhs, expectation(a, min(j, k), kind))


@given(seeds, sizes, kinds, st.sampled_from([1.0, 2.0, 4.0, INF]))
def test_contraction(seed, n, kind, p):
    a = cmat(np.random.default_rng(seed), n)
    for k in range(1, n + 1):
        assert schatten_norm(expectation(a, k, kind), p) <= schatten_norm(a, p) * (1 + 1e-12)


@given(seeds, sizes)
def test_positivity(seed, n):
    g = cmat(np.random.default_rng(seed), n)
    a = g @ g.conj().T
    for k in range(1, n + 1):
        lam = np.linalg.eigvalsh(augmented_expectation(a, k))
        assert lam[0] >= -1e-10 * schatten_norm(a, INF)


@given(seeds, sizes)
def test_kadison_schwarz(seed, n):
    a = cmat(np.random.default_rng(seed), n)
    for k in range(1, n + 1):
        ek = corner_expectation(a, k)
        diff = corner_expectation(a.conj().T @ a, k) - ek.conj().T @ ek
        assert np.linalg.eigvalsh(diff)[0] >= -1e-10 * schatten_norm(a, INF) ** 2


@given(seeds, st.integers(1, 8), st.sampled_from([1.0, 2.0, 4.0, INF]))
def test_augmented_corner_square_function_equivalence(seed, n, p):
    a = cmat(np.random.default_rng(seed), n)
    c = sq_fn_norm(increments(a, FiltrationSpec(n, Kind.CORNER)).increments, p, Side.COLUMN)
    t = sq_fn_norm(increments(a, FiltrationSpec(n, Kind.AUGMENTED)).increments, p, Side.COLUMN)
    assert c / 3 <= t <= 3 * c
