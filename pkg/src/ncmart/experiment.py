"""Config-driven sweeps over (kind, n, p) with deterministic CSV/JSON output.

A config file has one section per experiment::

    [stein_inf]
    kind = STEIN
    mode = search            ; witness | search
    n_grid = 4, 8
    p_grid = inf
    restarts = 2
    max_iterations = 60
    seed = 7
    output = out/stein

Cells sharing (kind, p) are processed in ascending n, each search warm-started
from the previous witness (embedded by zero padding), so search bounds are
nondecreasing in n.  Those chains are the unit of parallel work; the results
are collected in grid order, so the emitted files do not depend on scheduling.
The CSV's ``seconds`` column is left empty to keep reruns byte-identical;
wall times go to a ``timings.csv`` sidecar.
"""

from __future__ import annotations

import configparser
import csv
import enum
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .constants import (
    GrowthFit,
    InequalityKind,
    Model,
    adversarial_search,
    growth_fit,
    hilbert_witness,
    replay,
)
from .estimate import ConstantEstimate, SolverOptions, format_exponent, format_number, split_seeds
from .matcore import InputError, parse_exponent
from .triproj import triproj_norm_estimate

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "ExperimentConfig",
    "ReportFormat",
    "ResultRow",
    "emit_report",
    "load_config",
    "read_results",
    "run_experiment",
    "verify_results",
]

CSV_HEADER = "kind,n,p,bound,seconds,iterations,witness_ref"
TRIPROJ = "TRIPROJ"
KINDS = {k.value for k in InequalityKind} | {TRIPROJ}


class ConfigError(InputError):
    pass


class ReportFormat(str, enum.Enum):
    CSV = "CSV"
    JSON = "JSON"
    PLOTDATA = "PLOTDATA"


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    n_grid: tuple
    p_grid: tuple
    solver: SolverOptions = field(default_factory=SolverOptions)
    seed: int = 0
    output: Path = Path("out")
    mode: str = "witness"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}")
        if not self.n_grid:
            raise ConfigError("n_grid is empty")
        if not self.p_grid:
            raise ConfigError("p_grid is empty")
        if list(self.n_grid) != sorted(set(self.n_grid)) or self.n_grid[0] < 1:
            raise ConfigError("n_grid must be positive and strictly ascending")
        if self.mode not in ("witness", "search"):
            raise ConfigError(f"mode must be witness or search, not {self.mode!r}")
        if self.kind == TRIPROJ and self.mode != "search":
            object.__setattr__(self, "mode", "search")

    def override(self, *, seed=None, out=None, max_n=None, restarts=None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=seed, solver=cfg.solver.with_(seed=seed))
        if out is not None:
            cfg = replace(cfg, output=Path(out))
        if max_n is not None:
            cfg = replace(cfg, n_grid=tuple(n for n in cfg.n_grid if n <= max_n))
        if restarts is not None:
            cfg = replace(cfg, solver=cfg.solver.with_(restarts=restarts))
        return cfg


def _split_list(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.replace(";", ",").split(",")) if t]


def load_config(path) -> list[ExperimentConfig]:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not parser.sections():
        raise ConfigError(f"{path}: no experiment sections")
    base = Path(path).parent
    out = []
    for name in parser.sections():
        sec = parser[name]
        try:
            seed = sec.getint("seed", 0)
            solver = SolverOptions(
                max_iterations=sec.getint("max_iterations", 200),
                tolerance=sec.getfloat("tolerance", 1e-9),
                restarts=sec.getint("restarts", 8),
                seed=seed,
            )
            out.append(
                ExperimentConfig(
                    name=name,
                    kind=sec.get("kind", "").strip().upper(),
                    n_grid=tuple(int(v) for v in _split_list(sec.get("n_grid", ""))),
                    p_grid=tuple(parse_exponent(v) for v in _split_list(sec.get("p_grid", ""))),
                    solver=solver,
                    seed=seed,
                    output=base / sec.get("output", f"out/{name}"),
                    mode=sec.get("mode", "witness").strip().lower(),
                )
            )
        except ConfigError:
            raise
        except (ValueError, InputError) as exc:
            raise ConfigError(f"section [{name}]: {exc}") from exc
    return out


@dataclass
class ResultRow:
    kind: str
    n: int
    p: float
    bound: float
    witness_ref: str
    seconds: float = 0.0
    iterations: int = 0
    converged: bool = True
    certified: bool = True

    def csv_fields(self) -> list[str]:
        return [
            self.kind,
            str(self.n),
            format_exponent(self.p),
            format_number(self.bound),
            "",
            str(self.iterations),
            self.witness_ref,
        ]

    def to_json(self) -> dict:
        d = asdict(self)
        d["p"] = format_exponent(self.p)
        d["bound"] = format_number(self.bound)
        d["seconds"] = format_number(self.seconds)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ResultRow":
        return cls(
            kind=d["kind"],
            n=int(d["n"]),
            p=parse_exponent(d["p"]),
            bound=float(d["bound"]),
            witness_ref=d["witness_ref"],
            seconds=float(d["seconds"]),
            iterations=int(d["iterations"]),
            converged=bool(d["converged"]),
            certified=bool(d["certified"]),
        )


def _chain(args) -> list[tuple[ConstantEstimate, float]]:
    """All n for one (kind, p): sequential so each search can warm-start."""
    cfg, p, seed = args
    opts = cfg.solver.with_(seed=seed)
    out = []
    prev = None
    for n in cfg.n_grid:
        t0 = time.perf_counter()
        if cfg.kind == TRIPROJ:
            est = triproj_norm_estimate(n, p, opts)
        elif cfg.mode == "witness":
            est = hilbert_witness(cfg.kind, n, p)
        else:
            est = adversarial_search(cfg.kind, n, p, opts, warm_start=prev)
        prev = est
        out.append((est, time.perf_counter() - t0))
    return out


def _witness_name(cfg: ExperimentConfig, n: int, p: float) -> str:
    return f"witnesses/{cfg.kind.lower()}_n{n}_p{format_exponent(p).replace('/', '_')}.json"


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[ResultRow]:
    """Run every cell, write results.csv, timings.csv and witnesses/*.json."""
    out = Path(cfg.output)
    (out / "witnesses").mkdir(parents=True, exist_ok=True)
    seeds = split_seeds(cfg.seed, len(cfg.p_grid))
    tasks = [(cfg, p, s) for p, s in zip(cfg.p_grid, seeds)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chains = list(pool.map(_chain, tasks))
    else:
        chains = [_chain(t) for t in tasks]

    rows = []
    with open(out / "results.csv", "w", newline="") as fh, open(out / "timings.csv", "w") as th:
        fh.write(CSV_HEADER + "\n")
        th.write("kind,n,p,seconds\n")
        writer = csv.writer(fh, lineterminator="\n")
        for p, chain in zip(cfg.p_grid, chains):
            for est, secs in chain:
                ref = _witness_name(cfg, est.n, p)
                (out / ref).write_text(est.to_record() + "\n")
                row = ResultRow(
                    kind=cfg.kind,
                    n=est.n,
                    p=est.p,
                    bound=est.lower_bound,
                    witness_ref=ref,
                    seconds=secs,
                    iterations=est.iterations,
                    converged=est.converged,
                    certified=est.certified,
                )
                writer.writerow(row.csv_fields())
                fh.flush()
                th.write(f"{row.kind},{row.n},{format_exponent(row.p)},{secs:.6f}\n")
                rows.append(row)
    return rows


def read_results(path) -> list[ResultRow]:
    path = Path(path)
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise InputError(f"{path}: unexpected header {header!r}")
        rows = []
        for rec in csv.reader(fh):
            if not rec:
                continue
            kind, n, p, bound, secs, its, ref = rec
            rows.append(
                ResultRow(kind, int(n), parse_exponent(p), float(bound), ref, float(secs or 0), int(its))
            )
    return rows


def verify_results(path, rel_tol: float = 1e-8) -> list[tuple[ResultRow, float]]:
    """Replay each witness; return the rows whose bound is not reproduced."""
    path = Path(path)
    bad = []
    for row in read_results(path):
        est = ConstantEstimate.from_record((path.parent / row.witness_ref).read_text())
        value = replay(est)
        if not math.isclose(value, row.bound, rel_tol=rel_tol, abs_tol=0.0):
            bad.append((row, value))
    return bad


def fit_rows(rows: list[ResultRow], model=Model.LOG_POWER) -> list[tuple[str, GrowthFit]]:
    """Fit every group with >= 4 points: by (kind, p) over n, or (kind, n) over p."""
    model = Model(model)
    groups: dict[tuple, list] = {}
    for r in rows:
        if model is Model.LOG_POWER:
            groups.setdefault((r.kind, format_exponent(r.p)), []).append((r.n, r.bound))
        elif math.isfinite(r.p):
            groups.setdefault((r.kind, f"n{r.n}"), []).append((r.p, r.bound))
    fits = []
    for (kind, tag), pts in groups.items():
        if len(pts) >= 4:
            fits.append((f"{kind}/{tag}", growth_fit(sorted(pts), model)))
    return fits


def fit_summary(label: str, fit: GrowthFit) -> str:
    return (
        f"{label} {fit.model.value}: coefficient={fit.coefficient:.6g} "
        f"exponent={fit.exponent:.6g} r2={fit.r_squared:.6g}"
    )


def emit_report(rows, fits, fmt, out_dir) -> list[Path]:
    """Write rows (and labelled fits) in the requested format; return the paths."""
    if not rows:
        raise InputError("no rows to report")
    try:
        fmt = ReportFormat(str(fmt.value if isinstance(fmt, enum.Enum) else fmt).upper())
    except ValueError as exc:
        raise InputError(f"unknown report format {fmt!r}") from exc
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fits = [(f"fit{i}", f) if isinstance(f, GrowthFit) else f for i, f in enumerate(fits)]
    if fmt is ReportFormat.CSV:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        w = csv.writer(buf, lineterminator="\n")
        for r in rows:
            w.writerow(r.csv_fields())
        path = out / "report.csv"
        path.write_text(buf.getvalue())
        return [path]
    if fmt is ReportFormat.JSON:
        doc = {
            "rows": [r.to_json() for r in rows],
            "fits": [
                {
                    "label": label,
                    "model": f.model.value,
                    "coefficient": format_number(f.coefficient),
                    "exponent": format_number(f.exponent),
                    "r_squared": format_number(f.r_squared),
                    "points": [[format_number(a), format_number(b)] for a, b in f.points],
                }
                for label, f in fits
            ],
        }
        path = out / "report.json"
        path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        return [path]
    paths = []
    groups: dict[tuple, list] = {}
    for r in rows:
        groups.setdefault((r.kind, format_exponent(r.p)), []).append((r.n, r.bound))
    for (kind, p), pts in groups.items():
        path = out / f"{kind.lower()}_p{p}.dat"
        lines = [f"# n {kind} p={p}"] + [f"{n} {format_number(v)}" for n, v in sorted(pts)]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    if fits:
        path = out / "fits.txt"
        path.write_text("".join(fit_summary(label, f) + "\n" for label, f in fits))
        paths.append(path)
    return paths


def read_json_report(path) -> list[ResultRow]:
    doc = json.loads(Path(path).read_text())
    return [ResultRow.from_json(d) for d in doc["rows"]]
