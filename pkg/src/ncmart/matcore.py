"""Dense matrix kernel: singular values, modulus, Schatten and weak-L1 norms,
and column/row square-function norms.

Matrices are plain 2-D numpy arrays (float64 or complex128).  The exponent
``p`` is a float with ``1 <= p``; ``INF`` (IEEE infinity, not a large float)
selects the operator norm.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

INF = math.inf

__all__ = [
    "INF",
    "DomainError",
    "InputError",
    "ShapeError",
    "Side",
    "as_matrix",
    "check_exponent",
    "conjugate",
    "jacobi_singular_values",
    "modulus",
    "parse_exponent",
    "psd_power_norm",
    "schatten_norm",
    "singular_values",
    "sq_fn_norm",
    "weak_l1_norm",
]


class InputError(ValueError):
    """Malformed input (non-finite entries, wrong kind of object)."""


class ShapeError(InputError):
    pass


class DomainError(InputError):
    """Parameter outside the admissible range, e.g. ``p < 1``."""


class Side(str, enum.Enum):
    COLUMN = "COLUMN"
    ROW = "ROW"


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Validate and return ``a`` as a 2-D float64/complex128 array."""
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def check_exponent(p, minimum: float = 1.0) -> float:
    p = float(p)
    if math.isnan(p) or p < minimum:
        raise DomainError(f"exponent p={p} must satisfy p >= {minimum}")
    return p


def parse_exponent(text) -> float:
    """Parse ``'inf'``, ``'INFINITY'``, ``'4/3'`` or a plain number."""
    if isinstance(text, (int, float)):
        return check_exponent(text)
    s = str(text).strip()
    if s.upper() in {"INF", "INFINITY", "∞"}:
        return INF
    if "/" in s:
        num, den = s.split("/", 1)
        return check_exponent(float(num) / float(den))
    return check_exponent(float(s))


def conjugate(p: float) -> float:
    """Hölder conjugate exponent, with 1 <-> INF."""
    p = check_exponent(p)
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def singular_values(a, method: str = "lapack") -> np.ndarray:
    """Singular values of ``a`` in descending order.

    ``method="jacobi"`` runs the in-module one-sided Jacobi iteration instead
    of LAPACK; it is slower but independent of the BLAS build.
    """
    a = as_matrix(a)
    if method == "lapack":
        s = np.linalg.svd(a, compute_uv=False)
    elif method == "jacobi":
        s = jacobi_singular_values(a)
    else:
        raise InputError(f"unknown SVD method {method!r}")
    return np.sort(np.abs(s))[::-1]


def jacobi_singular_values(a, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """One-sided (Hestenes) Jacobi SVD, cyclic-by-row sweep order.

    Stops once every column pair satisfies |<c_i, c_j>| <= tol * |c_i| |c_j|.
    """
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    u = np.array(a, dtype=np.complex128)
    n = u.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci, cj = u[:, i], u[:, j]
                alpha = np.vdot(ci, ci).real
                beta = np.vdot(cj, cj).real
                gamma = np.vdot(ci, cj)
                g = abs(gamma)
                if g == 0.0 or g <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * ci - s * np.conj(phase) * cj
                new_j = s * phase * ci + c * cj
                u[:, i], u[:, j] = new_i, new_j
        if not rotated:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def modulus(a) -> np.ndarray:
    """|a| = (a* a)^{1/2}, the positive square root."""
    a = as_matrix(a, square=True)
    w, q = np.linalg.eigh(a.conj().T @ a)
    w = np.sqrt(np.clip(w, 0.0, None))
    out = (q * w) @ q.conj().T
    return 0.5 * (out + out.conj().T)


def _lp(values: np.ndarray, p: float) -> float:
    if values.size == 0:
        return 0.0
    top = float(np.max(values))
    if p == INF or top == 0.0:
        return top
    return top * float(np.sum((values / top) ** p)) ** (1.0 / p)


def schatten_norm(a, p: float) -> float:
    p = check_exponent(p)
    return _lp(singular_values(a), p)


def weak_l1_norm(a) -> float:
    """max_k k * s_k over descending singular values (non-normalized trace)."""
    s = singular_values(a)
    return float(np.max(np.arange(1, s.size + 1) * s))


def psd_power_norm(s: np.ndarray, r: float) -> float:
    """(sum lam^r)^{1/r} for a PSD matrix ``s``; quasi-norm when r < 1."""
    lam = np.clip(np.linalg.eigvalsh(s), 0.0, None)
    return _lp(lam, r)


def _stack_gram(xs: Sequence[np.ndarray], side: Side) -> np.ndarray:
    if len(xs) == 0:
        raise ShapeError("empty matrix list")
    mats = [as_matrix(x, square=True) for x in xs]
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise ShapeError("all matrices must share one square shape")
    stack = np.stack(mats)
    if Side(side) is Side.COLUMN:
        g = np.einsum("kji,kjl->il", stack.conj(), stack)
    else:
        g = np.einsum("kij,klj->il", stack, stack.conj())
    return 0.5 * (g + g.conj().T)


def sq_fn_norm(xs: Sequence[np.ndarray], p: float, side: Side = Side.COLUMN) -> float:
    """||(sum x_k* x_k)^{1/2}||_p (COLUMN) or ||(sum x_k x_k*)^{1/2}||_p (ROW).

    Evaluated as ||sum x_k* x_k||_{p/2}^{1/2} on the PSD Gram matrix.
    """
    p = check_exponent(p)
    gram = _stack_gram(xs, side)
    lam = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
    return math.sqrt(_lp(lam, p / 2.0))
