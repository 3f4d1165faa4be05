"""Hardy-space norms of matrix martingales.

p >= 2:  ||x||_{H^p} = max(column square function, row square function).
p <  2:  ||x||_{H^p} = inf over x = y + z of  col(y) + row(z).

The p < 2 infimum is a convex problem in z.  It is solved numerically, so the
returned value is an upper bound on the true norm, attained by the returned
decomposition.  The same holds for the positive-sequence H^p_max norm
    inf { ||y||_p : y >= x_k for all k }.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .estimate import SolverOptions, split_seeds
from .filtration import (
    FiltrationSpec,
    Kind,
    MartingaleSeq,
    expectation,
    increment_masks,
    increments,
)
from .matcore import (
    INF,
    DomainError,
    InputError,
    ShapeError,
    Side,
    as_matrix,
    check_exponent,
    schatten_norm,
    sq_fn_norm,
)

__all__ = [
    "Decomposition",
    "LowNormResult",
    "MaxCertificate",
    "conditioned_bracket",
    "hardy_max_norm_pos",
    "hardy_norm",
    "hardy_norm_high",
    "hardy_norm_low",
    "triangular_decomposition",
]

# smoothing schedule for singular values, relative to the problem scale
_EPS_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-9)


@dataclass(frozen=True)
class Decomposition:
    spec: FiltrationSpec
    y_increments: tuple
    z_increments: tuple

    def value(self, p: float) -> float:
        return sq_fn_norm(self.y_increments, p, Side.COLUMN) + sq_fn_norm(
            self.z_increments, p, Side.ROW
        )

    @classmethod
    def from_z(cls, x: np.ndarray, z: np.ndarray, spec: FiltrationSpec) -> "Decomposition":
        y = increments(x - z, spec).increments
        return cls(spec, y, increments(z, spec).increments)


class LowNormResult(NamedTuple):
    value: float
    decomposition: Decomposition
    converged: bool


@dataclass(frozen=True)
class MaxCertificate:
    dominant: np.ndarray
    value: float
    converged: bool = True


def hardy_norm_high(m: MartingaleSeq, p: float) -> float:
    p = check_exponent(p)
    if p < 2:
        raise DomainError("hardy_norm_high needs p >= 2; use hardy_norm_low")
    return max(
        sq_fn_norm(m.increments, p, Side.COLUMN),
        sq_fn_norm(m.increments, p, Side.ROW),
    )


def hardy_norm(m: MartingaleSeq, p: float, opts: SolverOptions | None = None) -> float:
    if check_exponent(p) >= 2:
        return hardy_norm_high(m, p)
    return hardy_norm_low(m, p, opts).value


# ---------------------------------------------------------------------------
# p < 2: convex minimisation over z


def _gram(d: np.ndarray, side: Side) -> np.ndarray:
    if side is Side.COLUMN:
        g = np.einsum("kji,kjl->il", d.conj(), d)
    else:
        g = np.einsum("kij,klj->il", d, d.conj())
    return 0.5 * (g + g.conj().T)


def _side_value(d: np.ndarray, p: float, side: Side) -> float:
    lam = np.clip(np.linalg.eigvalsh(_gram(d, side)), 0.0, None)
    return float(np.sum(lam ** (p / 2.0)) ** (1.0 / p))


def _side_smooth(d: np.ndarray, p: float, side: Side, delta: float):
    """Smoothed square-function norm and its gradient w.r.t. each d_k."""
    lam, q = np.linalg.eigh(_gram(d, side))
    lam = np.clip(lam, 0.0, None) + delta
    phi = float(np.sum(lam ** (p / 2.0)) ** (1.0 / p))
    weight = (q * lam ** (p / 2.0 - 1.0)) @ q.conj().T
    scale = phi ** (1.0 - p)
    if side is Side.COLUMN:
        grad = scale * (d @ weight)
    else:
        grad = scale * (weight @ d)
    return phi, grad


class _LowProblem:
    def __init__(self, x: np.ndarray, spec: FiltrationSpec, p: float, real: bool):
        self.x = x
        self.p = p
        self.real = real
        self.masks = increment_masks(spec)
        self.shape = x.shape
        self.dtype = np.float64 if real else np.complex128

    def unpack(self, v: np.ndarray) -> np.ndarray:
        if self.real:
            return v.reshape(self.shape)
        half = v.size // 2
        return (v[:half] + 1j * v[half:]).reshape(self.shape)

    def pack(self, z: np.ndarray) -> np.ndarray:
        if self.real:
            return np.asarray(z, dtype=float).ravel().copy()
        return np.concatenate([z.real.ravel(), z.imag.ravel()])

    def split(self, z: np.ndarray):
        return self.masks * (self.x - z)[None], self.masks * z[None]

    def exact(self, z: np.ndarray) -> float:
        dy, dz = self.split(z)
        return _side_value(dy, self.p, Side.COLUMN) + _side_value(dz, self.p, Side.ROW)

    def smooth(self, v: np.ndarray, delta: float):
        z = self.unpack(v)
        dy, dz = self.split(z)
        fy, gy = _side_smooth(dy, self.p, Side.COLUMN, delta)
        fz, gz = _side_smooth(dz, self.p, Side.ROW, delta)
        grad = (self.masks * (gz - gy)).sum(axis=0)
        return fy + fz, self.pack(grad)


def _triangular_z(x: np.ndarray) -> np.ndarray:
    return np.triu(x)


def hardy_norm_low(
    m: MartingaleSeq,
    p: float,
    opts: SolverOptions | None = None,
    fix: Side | None = None,
) -> LowNormResult:
    """Upper bound on ||x||_{H^p}, 1 <= p < 2, with the achieving x = y + z.

    ``fix=Side.COLUMN`` forces z = 0 and ``fix=Side.ROW`` forces y = 0.
    Otherwise L-BFGS runs on a smoothed objective (smoothing driven to 1e-9
    times the scale) from z = 0, z = x, z = T x and ``opts.restarts`` random
    points; the best exact objective over all iterates is returned.
    """
    p = check_exponent(p)
    if p >= 2:
        raise DomainError("hardy_norm_low needs 1 <= p < 2")
    opts = opts or SolverOptions()
    spec = m.spec
    x = m.final()
    if fix is not None:
        z = np.zeros_like(x) if Side(fix) is Side.COLUMN else x.copy()
        dec = Decomposition.from_z(x, z, spec)
        return LowNormResult(dec.value(p), dec, True)

    scale = float(np.linalg.norm(x))
    if scale == 0.0:
        dec = Decomposition.from_z(x, np.zeros_like(x), spec)
        return LowNormResult(0.0, dec, True)
    real = not np.iscomplexobj(x)
    prob = _LowProblem(x / scale, spec, p, real)
    xs = prob.x

    starts = [np.zeros_like(xs), xs.copy(), _triangular_z(xs)]
    for s in split_seeds(opts.seed, opts.restarts):
        rng = np.random.default_rng(s)
        g = rng.standard_normal(xs.shape)
        if not real:
            g = g + 1j * rng.standard_normal(xs.shape)
        starts.append(0.5 * xs + 0.5 * g / max(np.linalg.norm(g), 1e-300))

    best_val, best_z = math.inf, None
    converged = False
    for z0 in starts:
        val0 = prob.exact(z0)
        if val0 < best_val:
            best_val, best_z = val0, z0
    for z0 in starts:
        v = prob.pack(z0)
        prev = prob.exact(z0)
        run_best, run_z = prev, z0
        change = math.inf
        for eps in _EPS_SCHEDULE:
            res = minimize(
                prob.smooth,
                v,
                args=(eps * eps,),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": opts.max_iterations, "gtol": 1e-12, "ftol": 1e-15},
            )
            v = res.x
            z = prob.unpack(v)
            val = prob.exact(z)
            change = abs(prev - val) / max(val, 1e-300)
            prev = val
            if val < run_best:
                run_best, run_z = val, z
        if run_best < best_val:
            best_val, best_z = run_best, run_z
            converged = change <= max(opts.tolerance, 1e-6)

    dec = Decomposition.from_z(x, best_z * scale, spec)
    return LowNormResult(dec.value(p), dec, converged)


def triangular_decomposition(x) -> Decomposition:
    """y = strictly lower part (column side), z = T x (row side), corner filtration.

    Its H^1 value is ||x - T x||_1 + ||T x||_1 <= (1 + 2 t_{1,n}) ||x||_1.
    """
    x = as_matrix(x, square=True)
    spec = FiltrationSpec(x.shape[0], Kind.CORNER)
    return Decomposition.from_z(x, np.triu(x), spec)


def conditioned_bracket(m: MartingaleSeq) -> np.ndarray:
    """sum_k E_{k-1}(d_k x (d_k x)*) with E_0 = 0 (corner filtration)."""
    if m.spec.kind is not Kind.CORNER:
        raise InputError("conditioned_bracket is defined for the CORNER filtration")
    out = np.zeros_like(m.increments[0])
    for k, d in enumerate(m.increments, start=1):
        out = out + expectation(d @ d.conj().T, k - 1, Kind.CORNER)
    return 0.5 * (out + out.conj().T)


# ---------------------------------------------------------------------------
# H^p_max for positive sequences


class _HermParam:
    def __init__(self, n: int, real: bool):
        self.n = n
        self.real = real
        self.iu = np.triu_indices(n, 1)
        self.m = len(self.iu[0])

    def unpack(self, v: np.ndarray) -> np.ndarray:
        n, m = self.n, self.m
        y = np.zeros((n, n), dtype=float if self.real else complex)
        y[np.diag_indices(n)] = v[:n]
        off = v[n : n + m] if self.real else v[n : n + m] + 1j * v[n + m :]
        y[self.iu] = off
        y[(self.iu[1], self.iu[0])] = np.conj(off)
        return y

    def pack(self, y: np.ndarray) -> np.ndarray:
        parts = [np.diag(y).real, y[self.iu].real]
        if not self.real:
            parts.append(y[self.iu].imag)
        return np.concatenate(parts)

    def pack_grad(self, g: np.ndarray) -> np.ndarray:
        parts = [np.diag(g).real, 2.0 * g[self.iu].real]
        if not self.real:
            parts.append(2.0 * g[self.iu].imag)
        return np.concatenate(parts)


def _positive_part(a: np.ndarray) -> np.ndarray:
    w, q = np.linalg.eigh(a)
    w = np.clip(w, 0.0, None)
    return (q * w) @ q.conj().T


def _max_violation(xs: np.ndarray, y: np.ndarray) -> float:
    return max(0.0, max(float(np.linalg.eigvalsh(x - y)[-1]) for x in xs))


def _herm_norm(y: np.ndarray, p: float) -> float:
    return schatten_norm(0.5 * (y + y.conj().T), p)


def hardy_max_norm_pos(
    xs: Sequence[np.ndarray], p: float, opts: SolverOptions | None = None
) -> MaxCertificate:
    """Feasible y >= x_k (all k) with small ||y||_p; an upper bound on H^p_max.

    Penalty method: minimise a smoothed ||y||_p + rho * sum_k ||(x_k - y)_+||_F^2
    with rho raised geometrically, then shift by lambda * I so that every
    constraint holds exactly.  sum_k x_k and max_k ||x_k||_inf * I are kept as
    feasible fall-backs.
    """
    p = check_exponent(p)
    opts = opts or SolverOptions()
    mats = [as_matrix(x, square=True) for x in xs]
    if not mats:
        raise ShapeError("empty sequence")
    if any(x.shape != mats[0].shape for x in mats):
        raise ShapeError("all matrices must share one shape")
    for x in mats:
        if np.linalg.norm(x - x.conj().T) > 1e-10 * max(np.linalg.norm(x), 1.0):
            raise InputError("hardy_max_norm_pos needs Hermitian PSD matrices")
    n = mats[0].shape[0]
    real = not any(np.iscomplexobj(x) for x in mats)
    stack = np.stack([0.5 * (x + x.conj().T) for x in mats])
    scale = max(float(np.linalg.norm(x)) for x in stack)
    if scale == 0.0:
        return MaxCertificate(np.zeros((n, n)), 0.0)
    xsn = stack / scale
    par = _HermParam(n, real)
    eye = np.eye(n)

    candidates = [xsn.sum(axis=0), max(float(np.linalg.eigvalsh(x)[-1]) for x in xsn) * eye]
    if len(xsn) == 1:
        candidates.append(xsn[0].copy())

    def objective(v, rho, delta):
        y = par.unpack(v)
        lam, q = np.linalg.eigh(y)
        t = lam * lam + delta
        if p == INF:
            # soft maximum of |lambda| through a large finite exponent
            r = 64.0
        else:
            r = p
        phi = float(np.sum(t ** (r / 2.0)) ** (1.0 / r))
        g = phi ** (1.0 - r) * (q * (lam * t ** (r / 2.0 - 1.0))) @ q.conj().T
        pen = 0.0
        for x in xsn:
            pos = _positive_part(x - y)
            pen += float(np.sum(np.abs(pos) ** 2))
            g = g - 2.0 * rho * pos
        return phi + rho * pen, par.pack_grad(g)

    starts = [xsn.sum(axis=0)]
    for s in split_seeds(opts.seed, max(opts.restarts // 4, 1)):
        rng = np.random.default_rng(s)
        g = rng.standard_normal((n, n))
        if not real:
            g = g + 1j * rng.standard_normal((n, n))
        starts.append(0.5 * (g + g.conj().T) / n + xsn.mean(axis=0))

    converged = []
    for y0 in starts:
        v = par.pack(y0)
        for j, rho in enumerate(10.0 ** np.arange(1, 9)):
            delta = max(1e-2 * 10.0 ** (-1.5 * j), 1e-14)
            res = minimize(
                objective,
                v,
                args=(rho, delta),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": opts.max_iterations, "gtol": 1e-12, "ftol": 1e-15},
            )
            v = res.x
        y = par.unpack(v)
        y = y + _max_violation(xsn, y) * eye
        candidates.append(y)
        converged.append(bool(res.success))

    feasible = []
    for y in candidates:
        y = y + _max_violation(xsn, y) * eye
        feasible.append((_herm_norm(y, p), y))
    value, y = min(feasible, key=lambda t: t[0])
    y = y * scale
    # recompute on the unscaled problem so the shift is exact there too
    y = y + _max_violation(stack, y) * eye
    return MaxCertificate(y, _herm_norm(y, p), any(converged))
