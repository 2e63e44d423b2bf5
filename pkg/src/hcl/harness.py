"""Experiment harness: config parsing, deterministic sweeps, CSV and SVG output.

A sweep is a grid over (n, p, k) at fixed d.  Each replicate's seed is
mix64(master_seed, grid_index, rep); rows aggregate in (grid point, rep) order,
so for a fixed spec the CSV bytes are identical for any worker count.  Wall
time is recorded only when include_timing is set (it breaks byte-stability).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

import numpy as np

from .combinat import binom
from .detect import DetectionConfig, run_test, threshold
from .errors import MemoryCapError
from .model import (
    ModelParams,
    null_mean_offdiag,
    project,
    sample_hpc,
    write_hypergraph,
    write_matrix,
)
from .recover import (
    evaluate_recovery,
    proxy_diagnostics,
    recovery_scale,
    spectral_recover,
)
from .seeding import mix64, ordered_map

CSV_HEADER = "rep,n,d,k,p,seed,stat,threshold,reject,exact,overlap,alpha_n,beta_n,wall_ms"

MODES = ("detect", "recover", "calibrate", "phase", "sample", "project", "selftest")

# desk-scale caps; keep exact integer arithmetic comfortable everywhere
MAX_N = 1000
MAX_D = 8


@dataclass(frozen=True)
class KSpec:
    kind: str    # "abs" | "mult"
    value: float

    @classmethod
    def parse(cls, token):
        token = str(token).strip()
        if token.startswith("x"):
            return cls("mult", float(token[1:]))
        return cls("abs", float(token))

    def resolve(self, n, d, p, mode, C):
        if self.kind == "abs":
            k = int(round(self.value))
        else:
            if mode == "detect":
                from .detect import k0_formula

                scale = k0_formula(n, d, p, C if C else 1.0)
            else:
                scale = recovery_scale(n, d, p)
            k = int(math.ceil(self.value * scale))
        return k

    def label(self):
        if self.kind == "abs":
            return str(int(round(self.value)))
        return f"x{self.value:g}"


@dataclass(frozen=True)
class ExperimentSpec:
    mode: str
    d: int
    n_grid: tuple
    k_grid: tuple          # of KSpec
    p_grid: tuple
    reps: int = 1
    master_seed: int = 0
    C: float | None = None
    alpha: float = 0.05
    tol: float = 1e-7
    max_iter: int = 200_000
    workers: int = 1
    out_dir: str | None = None
    include_timing: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; one of {MODES}")
        if not self.n_grid or not self.p_grid or not self.k_grid:
            raise ValueError("all grids must be nonempty")
        if self.reps < 1:
            raise ValueError(f"need reps >= 1, got {self.reps}")
        if not 3 <= self.d <= MAX_D:
            raise ValueError(f"need 3 <= d <= {MAX_D}, got d={self.d}")
        if self.workers < 1:
            raise ValueError(f"need workers >= 1, got {self.workers}")
        for n in self.n_grid:
            if not self.d <= n <= MAX_N:
                raise ValueError(f"need d <= n <= {MAX_N}, got n={n}")
        for p in self.p_grid:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"need 0 <= p <= 1, got p={p}")


@dataclass(frozen=True)
class GridPoint:
    index: int
    n: int
    d: int
    k: int
    p: float
    k_label: str


@dataclass(frozen=True)
class TrialRecord:
    grid_index: int
    rep: int
    n: int
    d: int
    k: int
    p: float
    seed: int
    stat: float | None = None
    threshold: float | None = None
    reject: bool | None = None
    exact: bool | None = None
    overlap: float | None = None
    alpha_n: float | None = None
    beta_n: float | None = None
    wall_ms: float | None = None
    status: str = "ok"


def parse_config(text):
    """Flat `key = value` lines; '#' starts a comment; grids are comma lists."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ValueError(f"config line {lineno}: empty key or value in {raw!r}")
        out[key] = value
    return out


_CONFIG_KEYS = {
    "mode", "d", "n", "k", "p", "reps", "seed", "C", "alpha",
    "tol", "max_iter", "workers", "out", "include_timing",
}


def build_spec(options):
    """ExperimentSpec from a dict of config/CLI string or native values."""
    unknown = set(options) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    def grid(key, conv):
        raw = options[key]
        if isinstance(raw, (list, tuple)):
            return tuple(conv(str(v)) for v in raw)
        return tuple(conv(tok.strip()) for tok in str(raw).split(",") if tok.strip())

    if "mode" not in options:
        raise ValueError("config needs a mode")
    for key in ("d", "n", "p", "k"):
        if key not in options:
            raise ValueError(f"config needs {key}")
    return ExperimentSpec(
        mode=str(options["mode"]),
        d=int(options["d"]),
        n_grid=grid("n", int),
        k_grid=grid("k", KSpec.parse),
        p_grid=grid("p", float),
        reps=int(options.get("reps", 1)),
        master_seed=int(options.get("seed", 0)),
        C=None if options.get("C") in (None, "") else float(options["C"]),
        alpha=float(options.get("alpha", 0.05)),
        tol=float(options.get("tol", 1e-7)),
        max_iter=int(options.get("max_iter", 200_000)),
        workers=int(options.get("workers", 1)),
        out_dir=options.get("out"),
        include_timing=str(options.get("include_timing", "0")).lower() in ("1", "true", "yes"),
    )


def resolve_grid(spec):
    """Materialize grid points in (n, p, k) order; every k is validated <= n."""
    points = []
    mode = spec.mode
    for n, p, kspec in product(spec.n_grid, spec.p_grid, spec.k_grid):
        if mode == "calibrate":
            k = 0
        else:
            k = kspec.resolve(n, spec.d, p, mode, spec.C)
        if not 0 <= k <= n:
            raise ValueError(
                f"grid point n={n}, p={p}, k-spec {kspec.label()} resolves to k={k} outside [0, {n}]"
            )
        if mode in ("recover", "phase") and k < 1:
            raise ValueError(f"{mode} mode needs k >= 1, got k={k} at n={n}, p={p}")
        points.append(GridPoint(len(points), n, spec.d, k, float(p), kspec.label()))
    return points


def _run_replicate(spec, pt, rep, seed):
    params = ModelParams(pt.n, pt.d, pt.k, pt.p)
    base = dict(
        grid_index=pt.index, rep=rep, n=pt.n, d=pt.d, k=pt.k, p=pt.p, seed=seed
    )
    sample = sample_hpc(params, seed)
    solver_seed = mix64(seed, 0x736F6C)

    if spec.mode == "detect":
        cfg = DetectionConfig(params, C=spec.C if spec.C else 1.0,
                              alpha=spec.alpha, tol=spec.tol, max_iter=spec.max_iter)
        out = run_test(project(sample), cfg, solver_seed)
        return TrialRecord(**base, stat=out.statistic, threshold=out.threshold,
                           reject=out.reject)

    if spec.mode == "calibrate":
        from .spectral import CenteredOperator, spectral_norm

        op = CenteredOperator.from_sample(sample)
        denom = math.sqrt(pt.n * binom(pt.n - 2, pt.d - 2) * pt.p)
        stat = spectral_norm(op, spec.tol, spec.max_iter, solver_seed) / denom
        return TrialRecord(**base, stat=stat)

    if spec.mode in ("recover", "phase"):
        A = project(sample)
        outcome = spectral_recover(A, pt.k, pt.d, pt.p, spec.tol, spec.max_iter, solver_seed)
        outcome = evaluate_recovery(outcome, sample.S)
        alpha_n = beta_n = None
        if pt.k >= pt.d and pt.p < 1.0:
            prox = proxy_diagnostics(A, sample.S, pt.d, pt.p, spec.tol,
                                     spec.max_iter, mix64(seed, 0x70727879))
            alpha_n, beta_n = prox.alpha_n, prox.beta_n
        return TrialRecord(**base, stat=outcome.eigenvalue, exact=outcome.exact,
                           overlap=outcome.overlap, alpha_n=alpha_n, beta_n=beta_n)

    if spec.mode in ("sample", "project"):
        out = Path(spec.out_dir or ".")
        out.mkdir(parents=True, exist_ok=True)
        stem = f"n{pt.n}_d{pt.d}_k{pt.k}_g{pt.index}_r{rep}"
        write_hypergraph(sample, out / f"hypergraph_{stem}.txt")
        if spec.mode == "project":
            write_matrix(project(sample), out / f"matrix_{stem}.txt")
        return TrialRecord(**base)

    raise ValueError(f"mode {spec.mode} is not replicate-based")


def run_experiment(spec):
    """Run the sweep; returns (records, extras).

    extras: calibrate -> {"C": value}; phase -> {"phase": (n_values, k_labels, rates)}.
    Memory-cap refusals become rows with status='skipped' rather than aborting.
    """
    points = resolve_grid(spec)
    tasks = [(pt, rep) for pt in points for rep in range(spec.reps)]

    def run_one(task):
        pt, rep = task
        seed = mix64(spec.master_seed, pt.index, rep)
        t0 = time.perf_counter()
        try:
            rec = _run_replicate(spec, pt, rep, seed)
        except MemoryCapError:
            return TrialRecord(grid_index=pt.index, rep=rep, n=pt.n, d=pt.d,
                               k=pt.k, p=pt.p, seed=seed, status="skipped")
        if spec.include_timing:
            rec = replace(rec, wall_ms=(time.perf_counter() - t0) * 1e3)
        return rec

    records = ordered_map(run_one, tasks, spec.workers)

    extras = {}
    if spec.mode == "calibrate":
        stats = np.sort([r.stat for r in records if r.status == "ok"])
        if len(stats) == 0:
            raise MemoryCapError("every calibration replicate was skipped")
        rank = min(math.ceil((1 - spec.alpha) * len(stats)), len(stats))
        extras["C"] = float(stats[rank - 1])
    if spec.mode == "phase":
        n_values = list(spec.n_grid)
        k_labels = [ks.label() for ks in spec.k_grid]
        rates = np.full((len(n_values), len(k_labels)), np.nan)
        for pt in points:
            ok = [r for r in records if r.grid_index == pt.index and r.status == "ok"]
            if ok:
                rate = sum(1 for r in ok if r.exact) / len(ok)
                i = n_values.index(pt.n)
                j = k_labels.index(pt.k_label)
                rates[i, j] = rate
        extras["phase"] = (n_values, k_labels, rates)
    return records, extras


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def emit_csv(records, path=None):
    """Serialize records (sorted by grid point then rep) to the fixed schema.

    Decimal fields use 12 significant digits; absent fields are empty; skipped
    rows carry the literal 'skipped' in the stat column.
    """
    rows = [CSV_HEADER]
    for r in sorted(records, key=lambda r: (r.grid_index, r.rep)):
        if r.status == "skipped":
            fields = [r.rep, r.n, r.d, r.k, r.p, r.seed]
            rows.append(",".join(_fmt(x) for x in fields) + ",skipped,,,,,,,")
            continue
        fields = [r.rep, r.n, r.d, r.k, r.p, r.seed, r.stat, r.threshold,
                  r.reject, r.exact, r.overlap, r.alpha_n, r.beta_n, r.wall_ms]
        rows.append(",".join(_fmt(x) for x in fields))
    text = "\n".join(rows) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_csv(text):
    """Read emit_csv output back into TrialRecords (grid_index not recoverable: set to 0)."""
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 14:
            raise ValueError(f"expected 14 fields, got {len(parts)}: {line!r}")
        rep, n, d, k, p, seed = parts[:6]
        if parts[6] == "skipped":
            out.append(TrialRecord(0, int(rep), int(n), int(d), int(k), float(p),
                                   int(seed), status="skipped"))
            continue

        def opt(v, conv=float):
            return None if v == "" else conv(v)

        out.append(TrialRecord(
            0, int(rep), int(n), int(d), int(k), float(p), int(seed),
            stat=opt(parts[6]), threshold=opt(parts[7]),
            reject=opt(parts[8], lambda v: v == "1"),
            exact=opt(parts[9], lambda v: v == "1"),
            overlap=opt(parts[10]), alpha_n=opt(parts[11]), beta_n=opt(parts[12]),
            wall_ms=opt(parts[13]),
        ))
    return out


def _shade(rate):
    g = int(round(255 * rate))
    return f"#{g:02x}{g:02x}{g:02x}"


def emit_svg_heatmap(n_values, k_labels, rates, path=None, title="exact recovery rate"):
    """Self-contained SVG heatmap: rows = n, columns = k grid, cells shaded by
    rate (0 = dark, 1 = light) and labeled with the rate to 3 decimals."""
    rates = np.asarray(rates, dtype=np.float64)
    rows, cols = len(n_values), len(k_labels)
    if rates.shape != (rows, cols):
        raise ValueError(f"rates shape {rates.shape} != ({rows}, {cols})")
    cell, left, top, bottom = 72, 86, 46, 58
    width = left + cols * cell + 24
    height = top + rows * cell + bottom
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{left}" y="24" font-family="monospace" font-size="15">{title}</text>',
    ]
    for i, n in enumerate(n_values):
        y = top + i * cell
        parts.append(
            f'<text x="{left - 10}" y="{y + cell / 2 + 5}" text-anchor="end" '
            f'font-family="monospace" font-size="13">n={n}</text>'
        )
        for j, lab in enumerate(k_labels):
            x = left + j * cell
            r = float(rates[i, j])
            if math.isnan(r):
                parts.append(
                    f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                    f'fill="#ffffff" stroke="#999999"/>'
                )
                continue
            txt = "#ffffff" if r < 0.5 else "#000000"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{_shade(r)}" stroke="#555555"/>'
            )
            parts.append(
                f'<text x="{x + cell / 2}" y="{y + cell / 2 + 5}" text-anchor="middle" '
                f'font-family="monospace" font-size="14" fill="{txt}">{r:.3f}</text>'
            )
    for j, lab in enumerate(k_labels):
        x = left + j * cell
        parts.append(
            f'<text x="{x + cell / 2}" y="{top + rows * cell + 22}" text-anchor="middle" '
            f'font-family="monospace" font-size="13">k={lab}</text>'
        )
    parts.append(
        f'<text x="{left + cols * cell / 2}" y="{height - 10}" text-anchor="middle" '
        f'font-family="monospace" font-size="13">k grid (absolute or x scale)</text>'
    )
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
