"""Triangular projection, the Hilbert matrix and estimation of t_{p,n}.

t_{p,n} = ||T : S^p_n -> S^p_n|| is estimated from below by a nonlinear
power iteration.  With J_p the duality map of S^p (J_p(a) has unit S^{p'}
norm and <J_p(a), a> = ||a||_p) one step is

    g = J_p(T x),    x <- J_{p'}(T g).

T is selfadjoint for the trace pairing, so Hölder gives
||T x_new||_p >= <g, T x_new> = ||T g||_{p'} >= ||T x||_p / ||x||_p; the ratio
never decreases.  For p = inf the update x <- polar(T g) lands on a unitary,
an extreme point of the operator-norm ball.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimate import ConstantEstimate, SolverOptions, options_to_meta, split_seeds
from .filtration import FiltrationSpec, Kind, increments
from .matcore import INF, as_matrix, check_exponent, conjugate, schatten_norm

__all__ = [
    "HookParts",
    "column_parts",
    "duality_map",
    "hilbert_matrix",
    "triangular",
    "triproj_norm_estimate",
    "triproj_ratio",
]


def triangular(a) -> np.ndarray:
    """Keep a_ij with i <= j, zero the strictly lower part."""
    return np.triu(as_matrix(a, square=True))


def hilbert_matrix(n: int) -> np.ndarray:
    """h_ij = 1/(j - i) off the diagonal, 0 on it."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = np.arange(n)
    diff = (idx[None, :] - idx[:, None]).astype(float)
    h = np.zeros((n, n))
    off = diff != 0
    h[off] = 1.0 / diff[off]
    return h


@dataclass(frozen=True)
class HookParts:
    a_parts: tuple
    b_parts: tuple


def column_parts(x) -> HookParts:
    """Split each corner increment d_k x into its column and row parts.

    a_k holds column k of d_k x (rows 1..k, diagonal included), b_k holds row
    k strictly left of the diagonal, so a_k + b_k = d_k x and a_k = d_k(T x).
    """
    x = as_matrix(x, square=True)
    n = x.shape[0]
    m = increments(x, FiltrationSpec(n, Kind.CORNER))
    a_parts, b_parts = [], []
    for k, d in enumerate(m.increments):
        a = np.zeros_like(d)
        b = np.zeros_like(d)
        a[: k + 1, k] = d[: k + 1, k]
        b[k, :k] = d[k, :k]
        a_parts.append(a)
        b_parts.append(b)
    return HookParts(tuple(a_parts), tuple(b_parts))


def duality_map(a: np.ndarray, p: float) -> np.ndarray:
    """Norming functional of a in S^p: unit S^{p'} norm, pairs to ||a||_p."""
    u, s, vh = np.linalg.svd(a)
    if s[0] == 0.0:
        return np.zeros_like(a)
    if p == INF:
        return np.outer(u[:, 0], vh[0])
    if p == 1.0:
        return u @ vh
    w = (s / s[0]) ** (p - 1.0)
    w /= np.sum((s / s[0]) ** p) ** ((p - 1.0) / p)
    return (u * w) @ vh


def triproj_ratio(x, p: float) -> float:
    x = as_matrix(x, square=True)
    return schatten_norm(triangular(x), p) / schatten_norm(x, p)


def _power_run(x0: np.ndarray, p: float, max_iter: int, tol: float):
    q = conjugate(p)
    x = duality_map(x0, q)
    best_val, best_x = triproj_ratio(x, p), x
    prev = best_val
    gap = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        g = duality_map(np.triu(x), p)
        x = duality_map(np.triu(g), q)
        val = triproj_ratio(x, p)
        if val > best_val:
            best_val, best_x = val, x
        gap = abs(val - prev) / max(val, 1e-300)
        prev = val
        if gap <= tol:
            break
    return best_val, best_x, it, gap <= tol, gap


def triproj_norm_estimate(n: int, p: float, opts: SolverOptions | None = None) -> ConstantEstimate:
    """Certified lower bound on t_{p,n} with the attaining witness.

    Starting set: the matrix unit e_11 (ratio 1 for every p), the Hilbert
    matrix, then ``opts.restarts`` complex Gaussian matrices.
    """
    opts = opts or SolverOptions(restarts=16)
    p = check_exponent(p)
    unit = np.zeros((n, n), dtype=complex)
    unit[0, 0] = 1.0
    starts = [unit, hilbert_matrix(n).astype(complex)]
    for s in split_seeds(opts.seed, opts.restarts):
        rng = np.random.default_rng(s)
        starts.append(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))

    best = (triproj_ratio(unit, p), unit, 0, True, 0.0)
    total = 0
    for x0 in starts[1:]:
        val, x, it, ok, gap = _power_run(x0, p, opts.max_iterations, opts.tolerance)
        total += it
        if val > best[0]:
            best = (val, x, it, ok, gap)
    val, x, _, ok, gap = best
    return ConstantEstimate(
        kind="TRIPROJ",
        n=n,
        p=p,
        lower_bound=triproj_ratio(x, p),
        witness={"x": x},
        iterations=total,
        seed=opts.seed,
        converged=ok,
        certified=True,
        gap=gap,
        meta={"solver": options_to_meta(opts)},
    )
