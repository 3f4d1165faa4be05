"""Canonical filtration of the n x n matrices.

CORNER:     E_k(a) = e_k a e_k, the top-left k x k block.
AUGMENTED:  E~_k(a) = E_k(a) + the diagonal entries a_ii with i > k, which
            makes every E~_k faithful on M_n.

Both families are coordinate projections, so each difference operator d_k
keeps a fixed set of entries and the n sets partition the index grid.
Indices k are 1-based throughout, matching the usual martingale notation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .matcore import InputError, ShapeError, as_matrix

__all__ = [
    "Kind",
    "FiltrationSpec",
    "MartingaleSeq",
    "augmented_expectation",
    "corner_expectation",
    "expectation",
    "increment_masks",
    "increments",
    "martingale_from_increments",
    "transform",
]


class Kind(str, enum.Enum):
    CORNER = "CORNER"
    AUGMENTED = "AUGMENTED"


@dataclass(frozen=True)
class FiltrationSpec:
    ambient_n: int
    kind: Kind = Kind.AUGMENTED

    def __post_init__(self):
        if int(self.ambient_n) < 1:
            raise InputError("ambient_n must be >= 1")
        object.__setattr__(self, "ambient_n", int(self.ambient_n))
        object.__setattr__(self, "kind", Kind(self.kind))


def _check_index(n: int, k: int, allow_zero: bool = False) -> int:
    lo = 0 if allow_zero else 1
    if not (lo <= k <= n):
        raise IndexError(f"filtration index k={k} outside [{lo}, {n}]")
    return k


def corner_expectation(a, k: int) -> np.ndarray:
    a = as_matrix(a, square=True)
    _check_index(a.shape[0], k)
    out = np.zeros_like(a)
    out[:k, :k] = a[:k, :k]
    return out


def augmented_expectation(a, k: int) -> np.ndarray:
    a = as_matrix(a, square=True)
    _check_index(a.shape[0], k)
    out = corner_expectation(a, k)
    idx = np.arange(k, a.shape[0])
    out[idx, idx] = a[idx, idx]
    return out


def expectation(a, k: int, kind: Kind = Kind.AUGMENTED) -> np.ndarray:
    """E_k or E~_k; ``k = 0`` gives the zero map."""
    a = as_matrix(a, square=True)
    if _check_index(a.shape[0], k, allow_zero=True) == 0:
        return np.zeros_like(a)
    if Kind(kind) is Kind.CORNER:
        return corner_expectation(a, k)
    return augmented_expectation(a, k)


@lru_cache(maxsize=64)
def _masks(n: int, kind: Kind) -> np.ndarray:
    masks = np.zeros((n, n, n), dtype=bool)
    for k in range(1, n + 1):
        masks[k - 1, :k, :k] = True
        masks[k - 1, : k - 1, : k - 1] = False
    if kind is Kind.AUGMENTED:
        diag = np.arange(n)
        masks[:, diag, diag] = False
        masks[0, diag, diag] = True
    masks.setflags(write=False)
    return masks


def increment_masks(spec: FiltrationSpec) -> np.ndarray:
    """Boolean array of shape (n, n, n); slice k-1 is the support of d_k."""
    return _masks(spec.ambient_n, Kind(spec.kind))


@dataclass(frozen=True)
class MartingaleSeq:
    spec: FiltrationSpec
    increments: tuple = field(repr=False)

    def __post_init__(self):
        incs = tuple(as_matrix(d, square=True) for d in self.increments)
        n = self.spec.ambient_n
        if len(incs) != n or any(d.shape != (n, n) for d in incs):
            raise ShapeError(f"need {n} increments of shape ({n}, {n})")
        object.__setattr__(self, "increments", incs)

    @property
    def n(self) -> int:
        return self.spec.ambient_n

    def partial_sums(self) -> list[np.ndarray]:
        return list(np.cumsum(np.stack(self.increments), axis=0))

    def final(self) -> np.ndarray:
        return np.sum(np.stack(self.increments), axis=0)

    def with_signs(self, signs: Sequence[int]) -> "MartingaleSeq":
        eps = _check_signs(signs, self.n)
        return MartingaleSeq(self.spec, tuple(e * d for e, d in zip(eps, self.increments)))


def increments(a, spec: FiltrationSpec) -> MartingaleSeq:
    """Martingale differences (d_k a)_k, or (d~_k a)_k for AUGMENTED."""
    a = as_matrix(a, square=True)
    if a.shape[0] != spec.ambient_n:
        raise ShapeError(f"matrix is {a.shape}, filtration expects n={spec.ambient_n}")
    masks = increment_masks(spec)
    return MartingaleSeq(spec, tuple(np.where(m, a, 0) for m in masks))


def martingale_from_increments(incs: Sequence[np.ndarray], spec: FiltrationSpec) -> MartingaleSeq:
    """Wrap an increment list after checking d_k(incs[k]) == incs[k]."""
    masks = increment_masks(spec)
    m = MartingaleSeq(spec, tuple(incs))
    for mask, d in zip(masks, m.increments):
        if np.any(d[~mask] != 0):
            raise InputError("increment has entries outside its filtration level")
    return m


def _check_signs(signs, n: int) -> np.ndarray:
    eps = np.asarray(signs)
    if eps.shape != (n,):
        raise ShapeError(f"need {n} signs, got shape {eps.shape}")
    if not np.all(np.isin(eps, (-1, 1))):
        raise InputError("signs must be +1 or -1")
    return eps.astype(int)


def transform(m: MartingaleSeq, eps: Sequence[int]) -> np.ndarray:
    """sum_k eps_k d_k x."""
    signs = _check_signs(eps, m.n)
    return np.tensordot(signs.astype(float), np.stack(m.increments), axes=1)
