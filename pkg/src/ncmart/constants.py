"""Ratio functionals for the martingale inequalities, explicit Hilbert-matrix
witnesses, adversarial search for lower bounds and growth-rate fits.

Every reported constant is a lower bound obtained by evaluating a ratio on a
concrete input.  Ratios whose numerator comes from a minimisation (H^p for
p < 2, H^p_max) are only estimates; such results carry ``certified=False``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .estimate import (
    ConstantEstimate,
    SolverOptions,
    options_from_meta,
    options_to_meta,
    split_seeds,
)
from .filtration import (
    FiltrationSpec,
    Kind,
    MartingaleSeq,
    augmented_expectation,
    expectation,
    increments,
    transform,
)
from .hardy import hardy_max_norm_pos, hardy_norm, hardy_norm_low, triangular_decomposition
from .matcore import (
    INF,
    DomainError,
    InputError,
    Side,
    as_matrix,
    check_exponent,
    conjugate,
    schatten_norm,
    sq_fn_norm,
    weak_l1_norm,
)
from .triproj import hilbert_matrix, triproj_ratio

__all__ = [
    "InequalityKind",
    "GapInput",
    "GrowthFit",
    "MatrixSequence",
    "SignedMartingale",
    "FitError",
    "UndefinedRatioError",
    "adversarial_search",
    "growth_fit",
    "hilbert_witness",
    "ratio",
    "replay",
]


class InequalityKind(str, enum.Enum):
    BG_LOWER = "BG_LOWER"
    BG_UPPER = "BG_UPPER"
    STEIN = "STEIN"
    DOOB_DUAL = "DOOB_DUAL"
    TRANSFORM = "TRANSFORM"
    TRANSFORM_WEAK = "TRANSFORM_WEAK"
    HMAX_GAP = "HMAX_GAP"


WITNESS_KINDS = {
    InequalityKind.BG_LOWER,
    InequalityKind.STEIN,
    InequalityKind.DOOB_DUAL,
    InequalityKind.HMAX_GAP,
}


class UndefinedRatioError(ArithmeticError):
    pass


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixSequence:
    """(a_k)_{k=1..n} for the Stein and dual Doob inequalities."""

    spec: FiltrationSpec
    mats: tuple

    def __post_init__(self):
        mats = tuple(as_matrix(a, square=True) for a in self.mats)
        n = self.spec.ambient_n
        if len(mats) != n or any(a.shape != (n, n) for a in mats):
            raise InputError(f"need {n} matrices of shape ({n}, {n})")
        object.__setattr__(self, "mats", mats)


@dataclass(frozen=True)
class SignedMartingale:
    martingale: MartingaleSeq
    signs: tuple


@dataclass(frozen=True)
class GapInput:
    """Martingale of a PSD matrix for the H^1_max / H^1 comparison.

    With ``dual`` (PSD matrices W_k) the numerator is the certified lower bound
    sum_k Tr(E~_k(x) W_k) / ||sum_k W_k||_{p'} on ||x||_{H^p_max}; without it
    the numerator is the penalty solver's (upper-bound) value.  ``solve``
    controls whether the H^p denominator also tries the convex solver on top
    of the explicit triangular split.
    """

    martingale: MartingaleSeq
    dual: tuple | None = None
    solve: bool = True


def _div(num: float, den: float) -> float:
    if den == 0.0 or not math.isfinite(den):
        raise UndefinedRatioError("zero denominator")
    return num / den


def _is_psd(a: np.ndarray, tol: float = 1e-10) -> bool:
    scale = max(float(np.linalg.norm(a)), 1.0)
    if np.linalg.norm(a - a.conj().T) > tol * scale:
        return False
    return float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]) >= -tol * scale


def _hmax_dual_bound(x: np.ndarray, dual: Sequence[np.ndarray], p: float) -> float:
    n = x.shape[0]
    num = sum(
        float(np.trace(augmented_expectation(x, k) @ w).real) for k, w in zip(range(1, n + 1), dual)
    )
    return _div(num, schatten_norm(sum(dual), conjugate(p)))


def _h_upper(m: MartingaleSeq, p: float, opts: SolverOptions, solve: bool) -> float:
    if p >= 2:
        return hardy_norm(m, p)
    vals = []
    if m.spec.kind is Kind.CORNER:
        vals.append(triangular_decomposition(m.final()).value(p))
    if solve or not vals:
        vals.append(hardy_norm_low(m, p, opts).value)
    return min(vals)


def ratio(kind, inp, p: float, opts: SolverOptions | None = None) -> float:
    """Evaluate the inequality ratio for ``kind`` on ``inp`` at exponent p."""
    kind = InequalityKind(kind)
    p = check_exponent(p)
    opts = opts or SolverOptions()
    if kind in (InequalityKind.BG_LOWER, InequalityKind.BG_UPPER):
        if not isinstance(inp, MartingaleSeq):
            raise InputError(f"{kind.value} needs a MartingaleSeq")
        h = hardy_norm(inp, p, opts)
        x = schatten_norm(inp.final(), p)
        return _div(h, x) if kind is InequalityKind.BG_LOWER else _div(x, h)
    if kind is InequalityKind.STEIN:
        if not isinstance(inp, MatrixSequence):
            raise InputError("STEIN needs a MatrixSequence")
        cond = [expectation(a, k, inp.spec.kind) for k, a in enumerate(inp.mats, start=1)]
        return _div(sq_fn_norm(cond, p, Side.COLUMN), sq_fn_norm(inp.mats, p, Side.COLUMN))
    if kind is InequalityKind.DOOB_DUAL:
        if not isinstance(inp, MatrixSequence):
            raise InputError("DOOB_DUAL needs a MatrixSequence")
        if not all(_is_psd(a) for a in inp.mats):
            raise InputError("DOOB_DUAL needs positive semidefinite matrices")
        cond = sum(expectation(a, k, inp.spec.kind) for k, a in enumerate(inp.mats, start=1))
        return _div(schatten_norm(cond, p), schatten_norm(sum(inp.mats), p))
    if kind in (InequalityKind.TRANSFORM, InequalityKind.TRANSFORM_WEAK):
        if not isinstance(inp, SignedMartingale):
            raise InputError(f"{kind.value} needs a SignedMartingale")
        y = transform(inp.martingale, inp.signs)
        x = inp.martingale.final()
        if kind is InequalityKind.TRANSFORM_WEAK:
            return _div(weak_l1_norm(y), schatten_norm(x, 1.0))
        return _div(schatten_norm(y, p), schatten_norm(x, p))
    if kind is InequalityKind.HMAX_GAP:
        if not isinstance(inp, GapInput):
            raise InputError("HMAX_GAP needs a GapInput")
        m = inp.martingale
        x = m.final()
        if not _is_psd(x):
            raise InputError("HMAX_GAP needs a positive semidefinite matrix")
        if inp.dual is not None:
            num = _hmax_dual_bound(x, inp.dual, p)
        else:
            seq = [augmented_expectation(x, k) for k in range(1, m.n + 1)]
            num = hardy_max_norm_pos(seq, p, opts).value
        return _div(num, _h_upper(m, p, opts, inp.solve))
    raise InputError(f"unsupported kind {kind}")


def _certified(kind: InequalityKind, p: float, inp) -> bool:
    if kind is InequalityKind.BG_LOWER:
        return p >= 2
    if kind is InequalityKind.HMAX_GAP:
        return isinstance(inp, GapInput) and inp.dual is not None
    return True


# ---------------------------------------------------------------------------
# inputs <-> witness dictionaries


def _build_input(kind: InequalityKind, witness: dict, meta: dict):
    spec = FiltrationSpec(int(meta["n"]), Kind(meta["filtration"]))
    if kind in (InequalityKind.BG_LOWER, InequalityKind.BG_UPPER):
        return increments(witness["x"], spec)
    if kind in (InequalityKind.STEIN, InequalityKind.DOOB_DUAL):
        return MatrixSequence(spec, tuple(witness["mats"]))
    if kind in (InequalityKind.TRANSFORM, InequalityKind.TRANSFORM_WEAK):
        signs = tuple(int(s) for s in np.asarray(witness["signs"]).ravel())
        return SignedMartingale(increments(witness["x"], spec), signs)
    if kind is InequalityKind.HMAX_GAP:
        dual = witness.get("dual")
        return GapInput(
            increments(witness["x"], spec),
            tuple(dual) if dual is not None else None,
            bool(meta.get("solve", True)),
        )
    raise InputError(f"unsupported kind {kind}")


def _estimate(kind, n, p, witness, meta, opts, iterations=0, converged=True, gap=0.0):
    kind = InequalityKind(kind)
    meta = dict(meta, n=n, solver=options_to_meta(opts))
    inp = _build_input(kind, witness, meta)
    return ConstantEstimate(
        kind=kind.value,
        n=n,
        p=p,
        lower_bound=ratio(kind, inp, p, opts),
        witness=witness,
        iterations=iterations,
        seed=opts.seed,
        converged=converged,
        certified=_certified(kind, p, inp),
        gap=gap,
        meta=meta,
    )


def replay(est: ConstantEstimate) -> float:
    """Re-evaluate an estimate's ratio from its stored witness alone."""
    if est.kind == "TRIPROJ":
        return triproj_ratio(est.witness["x"], est.p)
    opts = options_from_meta(est.meta["solver"])
    kind = InequalityKind(est.kind)
    return ratio(kind, _build_input(kind, est.witness, est.meta), est.p, opts)


# ---------------------------------------------------------------------------
# explicit witnesses


def _columns(a: np.ndarray) -> list[np.ndarray]:
    out = []
    for k in range(a.shape[1]):
        c = np.zeros_like(a)
        c[:, k] = a[:, k]
        out.append(c)
    return out


def _rows(a: np.ndarray) -> list[np.ndarray]:
    out = []
    for k in range(a.shape[0]):
        r = np.zeros_like(a)
        r[k, :] = a[k, :]
        out.append(r)
    return out


def stein_sequence(a) -> list[np.ndarray]:
    """k-th row matrices of a*: the conditioned column square function is
    ||T a||_p and the unconditioned one is ||a||_p."""
    return _rows(as_matrix(a, square=True).conj().T)


def doob_sequence(a) -> list[np.ndarray]:
    """b_k = a_k a_k* with a_k the k-th column matrix of a."""
    return [c @ c.conj().T for c in _columns(as_matrix(a, square=True))]


def hilbert_witness(kind, n: int, p: float, opts: SolverOptions | None = None) -> ConstantEstimate:
    """Evaluate the explicit Hilbert-matrix construction for ``kind``.

    DOOB_DUAL is evaluated at exponent p/2 (the returned estimate's ``p``).
    HMAX_GAP is evaluated at p = 1 on x = v v*, v the top left singular vector
    of T h, with the dual certificate b_k = a_k a_k*.
    """
    kind = InequalityKind(kind)
    p = check_exponent(p)
    opts = opts or SolverOptions(restarts=0)
    h = hilbert_matrix(n)
    meta = {"filtration": Kind.CORNER.value, "source": "hilbert"}
    if kind is InequalityKind.BG_LOWER:
        return _estimate(kind, n, p, {"x": h}, meta, opts)
    if kind is InequalityKind.STEIN:
        return _estimate(kind, n, p, {"mats": stein_sequence(h)}, meta, opts)
    if kind is InequalityKind.DOOB_DUAL:
        meta["source_p"] = "inf" if p == INF else p
        return _estimate(kind, n, p / 2.0, {"mats": doob_sequence(h)}, meta, opts)
    if kind is InequalityKind.HMAX_GAP:
        if p != 1.0:
            raise DomainError("the HMAX_GAP witness is defined at p = 1")
        u, _, _ = np.linalg.svd(np.triu(h))
        v = u[:, 0]
        x = np.outer(v, v.conj())
        meta["solve"] = n <= 16
        return _estimate(kind, n, 1.0, {"x": x, "dual": doob_sequence(h)}, meta, opts)
    raise InputError(f"no Hilbert witness for {kind.value}")


# ---------------------------------------------------------------------------
# adversarial search


def _default_filtration(kind: InequalityKind) -> Kind:
    return Kind.CORNER if kind in WITNESS_KINDS else Kind.AUGMENTED


def _random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class _Search:
    """Maps a list of free complex matrices to a witness and its ratio."""

    def __init__(self, kind: InequalityKind, n: int, p: float, filtration: Kind, opts):
        self.kind, self.n, self.p, self.opts = kind, n, p, opts
        self.spec = FiltrationSpec(n, filtration)
        self.signs = np.ones(n, dtype=int)
        # ratios without an inner optimisation are cheap enough for polishing
        self.cheap = not (
            kind is InequalityKind.HMAX_GAP
            or (kind in (InequalityKind.BG_LOWER, InequalityKind.BG_UPPER) and p < 2)
        )

    def witness(self, params: list[np.ndarray]) -> dict:
        k = self.kind
        if k in (InequalityKind.BG_LOWER, InequalityKind.BG_UPPER):
            return {"x": params[0]}
        if k is InequalityKind.STEIN:
            return {"mats": list(params)}
        if k is InequalityKind.DOOB_DUAL:
            return {"mats": [g @ g.conj().T for g in params]}
        if k in (InequalityKind.TRANSFORM, InequalityKind.TRANSFORM_WEAK):
            return {"x": params[0], "signs": self.signs.copy()}
        g = params[0]
        return {"x": g @ g.conj().T}

    def params_from_witness(self, w: dict) -> list[np.ndarray]:
        k = self.kind
        if k in (InequalityKind.STEIN,):
            return [np.asarray(a, dtype=complex) for a in w["mats"]]
        if k is InequalityKind.DOOB_DUAL:
            return [_psd_root(a) for a in w["mats"]]
        if k is InequalityKind.HMAX_GAP:
            return [_psd_root(w["x"])]
        if "signs" in w:
            self.signs = np.asarray(w["signs"], dtype=int).ravel()
        return [np.asarray(w["x"], dtype=complex)]

    def random_params(self, rng) -> list[np.ndarray]:
        count = self.n if self.kind in (InequalityKind.STEIN, InequalityKind.DOOB_DUAL) else 1
        return [_random_matrix(rng, self.n) for _ in range(count)]

    def value(self, params) -> float:
        meta = {"n": self.n, "filtration": self.spec.kind.value, "solve": True}
        try:
            inp = _build_input(self.kind, self.witness(params), meta)
            return ratio(self.kind, inp, self.p, self.opts)
        except UndefinedRatioError:
            return -math.inf

    def optimise_signs(self, params, exhaustive: bool) -> float:
        """Best sign pattern for fixed x (sign of eps_1 fixed: eps and -eps tie)."""
        if self.kind not in (InequalityKind.TRANSFORM, InequalityKind.TRANSFORM_WEAK):
            return self.value(params)
        n = self.n
        if exhaustive and n <= 16:
            best_val, best = -math.inf, self.signs
            for tail in itertools.product((1, -1), repeat=n - 1):
                self.signs = np.array((1,) + tail)
                v = self.value(params)
                if v > best_val:
                    best_val, best = v, self.signs.copy()
            self.signs = best
            return best_val
        best_val = self.value(params)
        improved = True
        while improved:
            improved = False
            for i in range(n):
                self.signs[i] *= -1
                v = self.value(params)
                if v > best_val + 1e-15:
                    best_val, improved = v, True
                else:
                    self.signs[i] *= -1
        return best_val


_POLISH_DIM = 600


def _polish(s: "_Search", params, val, max_iterations):
    """L-BFGS with finite-difference gradients on -ratio; small problems only.

    The ratio is nonsmooth at singular-value crossings, so this only polishes
    the hill-climbing result; the exact ratio of the final point is kept only
    if it improves.
    """
    shapes = len(params)
    n = s.n

    def unpack(v):
        z = v[: v.size // 2] + 1j * v[v.size // 2 :]
        return list(z.reshape(shapes, n, n))

    v0 = np.concatenate([np.stack(params).real.ravel(), np.stack(params).imag.ravel()])
    count = [0]

    def f(v):
        count[0] += 1
        r = s.value(unpack(v))
        return -r if math.isfinite(r) else 0.0

    res = minimize(f, v0, method="L-BFGS-B", options={"maxiter": max_iterations})
    cand = unpack(res.x)
    cv = s.value(cand)
    if cv > val:
        return cand, cv, count[0]
    return params, val, count[0]


def _psd_root(a) -> np.ndarray:
    w, q = np.linalg.eigh(0.5 * (a + np.conj(a).T))
    return (q * np.sqrt(np.clip(w, 0, None))) @ q.conj().T


def embed(est: ConstantEstimate, n: int) -> dict:
    """Zero-pad a witness from est.n to size n; ratios are unchanged."""
    m = est.n
    if n < m:
        raise InputError("can only embed into a larger size")

    def pad(a):
        out = np.zeros((n, n), dtype=np.asarray(a).dtype)
        out[:m, :m] = a
        return out

    w = {}
    for key, val in est.witness.items():
        if isinstance(val, list):
            w[key] = [pad(a) for a in val] + [np.zeros((n, n)) for _ in range(n - m)]
        elif key == "signs":
            w[key] = np.concatenate([np.asarray(val).ravel(), np.ones(n - m, dtype=int)])
        else:
            w[key] = pad(val)
    return w


def adversarial_search(
    kind,
    n: int,
    p: float,
    opts: SolverOptions | None = None,
    filtration: Kind | None = None,
    warm_start: ConstantEstimate | None = None,
    inner_opts: SolverOptions | None = None,
) -> ConstantEstimate:
    """Random restarts plus multiplicative-step hill climbing on the ratio.

    The Hilbert witness (when ``kind`` has one) and an embedded ``warm_start``
    join the starting set, so the result is never below either of them.
    ``inner_opts`` configures the H^p / H^p_max solvers inside the ratio.
    """
    kind = InequalityKind(kind)
    p = check_exponent(p)
    opts = opts or SolverOptions(restarts=4, max_iterations=200)
    inner = inner_opts or SolverOptions(restarts=0, max_iterations=100, seed=opts.seed)
    filtration = Kind(filtration) if filtration is not None else _default_filtration(kind)
    s = _Search(kind, n, p, filtration, inner)

    starts: list[tuple[list, np.ndarray | None]] = []
    if kind in WITNESS_KINDS and filtration is Kind.CORNER:
        wp = 1.0 if kind is InequalityKind.HMAX_GAP else p
        hw = hilbert_witness(kind, n, 2 * wp if kind is InequalityKind.DOOB_DUAL else wp)
        if hw.p == p:
            starts.append((s.params_from_witness(hw.witness), None))
    if kind in (InequalityKind.STEIN, InequalityKind.DOOB_DUAL):
        # a_1 = e_11 alone: fixed by every expectation, ratio exactly 1
        unit = [np.zeros((n, n), dtype=complex) for _ in range(n)]
        unit[0][0, 0] = 1.0
        starts.append((unit, None))
    if warm_start is not None:
        starts.append((s.params_from_witness(embed(warm_start, n)), s.signs.copy()))
    for sd in split_seeds(opts.seed, max(opts.restarts, 1)):
        rng = np.random.default_rng(sd)
        starts.append((s.random_params(rng), None))

    best_val, best_w = -math.inf, None
    evaluations = 0
    last_gap = 0.0
    for i, (params, signs) in enumerate(starts):
        rng = np.random.default_rng(split_seeds(opts.seed + 1, len(starts))[i])
        s.signs = signs if signs is not None else np.ones(n, dtype=int)
        val = s.optimise_signs(params, exhaustive=False)
        step = 0.3
        for _ in range(opts.max_iterations):
            if step < 1e-7:
                break
            scale = math.sqrt(sum(float(np.linalg.norm(a)) ** 2 for a in params)) or 1.0
            noise = [_random_matrix(rng, n) for _ in params]
            nrm = math.sqrt(sum(float(np.linalg.norm(g)) ** 2 for g in noise))
            trial = [a + step * scale * g / nrm for a, g in zip(params, noise)]
            tv = s.value(trial)
            evaluations += 1
            if tv > val:
                last_gap = (tv - val) / max(abs(tv), 1e-300)
                params, val = trial, tv
                step *= 1.5
            else:
                step *= 0.7
        if s.cheap and 2 * n * n * len(params) <= _POLISH_DIM:
            params, val, used = _polish(s, params, val, opts.max_iterations)
            evaluations += used
        val = max(val, s.optimise_signs(params, exhaustive=n <= 16))
        if val > best_val:
            best_val, best_w = val, s.witness(params)

    meta = {"filtration": filtration.value, "source": "search", "solve": True}
    est = _estimate(
        kind,
        n,
        p,
        best_w,
        meta,
        inner,
        iterations=evaluations,
        converged=last_gap <= max(opts.tolerance, 1e-6),
        gap=last_gap,
    )
    est.seed = opts.seed
    return est


# ---------------------------------------------------------------------------
# growth fits


class Model(str, enum.Enum):
    LOG_POWER = "LOG_POWER"
    P_POWER = "P_POWER"


@dataclass(frozen=True)
class GrowthFit:
    coefficient: float
    exponent: float
    r_squared: float
    model: Model
    points: tuple = field(default=(), repr=False)

    def predict(self, t: float) -> float:
        base = math.log(t + 1.0) if self.model is Model.LOG_POWER else t
        return self.coefficient * base**self.exponent


def growth_fit(points: Sequence[tuple[float, float]], model=Model.LOG_POWER) -> GrowthFit:
    """Least-squares fit of v = c * (log(n+1))^q or v = c * p^q in log-log form."""
    model = Model(model)
    pts = [(float(a), float(v)) for a, v in points]
    if len(pts) < 4:
        raise FitError("need at least 4 points")
    t = np.array([a for a, _ in pts])
    v = np.array([b for _, b in pts])
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise FitError("values must be positive and finite")
    base = np.log(t + 1.0) if model is Model.LOG_POWER else t
    if np.any(base <= 0) or np.unique(base).size < 2:
        raise FitError("degenerate abscissae")
    xs, ys = np.log(base), np.log(v)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return GrowthFit(math.exp(intercept), float(slope), r2, model, tuple(pts))
