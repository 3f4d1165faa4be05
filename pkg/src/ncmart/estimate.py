"""Solver options and the ConstantEstimate record shared by the search code."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np

from .matcore import InputError

__all__ = [
    "SolverOptions",
    "ConstantEstimate",
    "format_exponent",
    "format_number",
    "decode_matrix",
    "encode_matrix",
    "options_from_meta",
    "options_to_meta",
    "split_seeds",
]


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 200
    tolerance: float = 1e-9
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1 or self.restarts < 0 or self.tolerance <= 0:
            raise InputError(f"invalid solver options {self}")

    def with_(self, **kw) -> "SolverOptions":
        return replace(self, **kw)


def split_seeds(seed: int, count: int) -> list[int]:
    """Deterministic child seeds, independent of scheduling order."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [int(c.generate_state(1)[0]) for c in children]


def format_number(x: float) -> str:
    return format(float(x), ".17g")


def format_exponent(p: float) -> str:
    return "inf" if p == math.inf else format_number(p)


def encode_matrix(a: np.ndarray) -> dict:
    a = np.asarray(a)
    flat = a.ravel()
    if np.iscomplexobj(a):
        entries = [[float(z.real), float(z.imag)] for z in flat]
    else:
        entries = [float(z) for z in flat]
    return {"shape": list(a.shape), "complex": bool(np.iscomplexobj(a)), "entries": entries}


def decode_matrix(obj: dict) -> np.ndarray:
    shape = tuple(obj["shape"])
    if obj["complex"]:
        vals = np.array([complex(re, im) for re, im in obj["entries"]], dtype=np.complex128)
    else:
        vals = np.array(obj["entries"], dtype=np.float64)
    return vals.reshape(shape)


def _encode(value: Any):
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return {"matrix": encode_matrix(value)}
        return {"array": value.tolist()}
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], np.ndarray):
        return {"matrices": [encode_matrix(v) for v in value]}
    return {"value": value}


def _decode(obj: dict):
    if "matrix" in obj:
        return decode_matrix(obj["matrix"])
    if "matrices" in obj:
        return [decode_matrix(m) for m in obj["matrices"]]
    if "array" in obj:
        return np.array(obj["array"])
    return obj["value"]


@dataclass
class ConstantEstimate:
    """Certified (or flagged) lower bound on a best constant.

    ``witness`` maps names to the exact input that attains ``lower_bound``
    (matrices, matrix lists, sign vectors, scalars); ``meta`` carries the
    filtration, solver options and anything else replay needs.
    """

    kind: str
    n: int
    p: float
    lower_bound: float
    witness: dict = field(repr=False)
    iterations: int = 0
    seed: int = 0
    converged: bool = True
    certified: bool = True
    gap: float = 0.0
    meta: dict = field(default_factory=dict)

    def to_record(self) -> str:
        rec = {
            "kind": self.kind,
            "n": self.n,
            "p": format_exponent(self.p),
            "bound": format_number(self.lower_bound),
            "iterations": self.iterations,
            "seed": self.seed,
            "converged": self.converged,
            "certified": self.certified,
            "gap": format_number(self.gap),
            "meta": self.meta,
            "witness": {k: _encode(v) for k, v in self.witness.items()},
        }
        return json.dumps(rec, sort_keys=True)

    @classmethod
    def from_record(cls, text: str) -> "ConstantEstimate":
        rec = json.loads(text)
        p = math.inf if rec["p"] == "inf" else float(rec["p"])
        return cls(
            kind=rec["kind"],
            n=int(rec["n"]),
            p=p,
            lower_bound=float(rec["bound"]),
            witness={k: _decode(v) for k, v in rec["witness"].items()},
            iterations=int(rec["iterations"]),
            seed=int(rec["seed"]),
            converged=bool(rec["converged"]),
            certified=bool(rec["certified"]),
            gap=float(rec["gap"]),
            meta=rec["meta"],
        )


def options_to_meta(opts: SolverOptions) -> dict:
    return asdict(opts)


def options_from_meta(meta: dict) -> SolverOptions:
    return SolverOptions(**meta)
