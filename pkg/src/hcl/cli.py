"""Command-line front end.

Subcommands: sample, project, detect, recover, calibrate, phase, selftest.
Exit codes: 0 success, 1 usage/validation error, 2 runtime failure
(non-convergence, memory cap, I/O), 3 self-test failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ConvergenceError, MemoryCapError
from .harness import build_spec, emit_csv, emit_svg_heatmap, parse_config, run_experiment
from .model import project, read_hypergraph, write_matrix


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse.error() calls sys.exit(2); we want exit code 1 for usage problems
    def error(self, message):
        raise UsageError(message)


def _add_common(sub, need_model=True):
    sub.add_argument("--config", type=Path, help="key = value config file; flags override it")
    if need_model:
        sub.add_argument("--n", help="comma list of vertex counts")
        sub.add_argument("--d", type=int, help="hyperedge size (>= 3)")
        sub.add_argument("--k", help="comma list of clique sizes; 'x1.5' means 1.5x the scale")
        sub.add_argument("--p", help="comma list of background rates")
        sub.add_argument("--reps", type=int, help="replicates per grid point")
        sub.add_argument("--c-const", type=float, dest="c_const",
                         help="threshold constant C")
        sub.add_argument("--alpha", type=float, help="target level for calibration")
        sub.add_argument("--tol", type=float, help="eigensolver residual tolerance")
        sub.add_argument("--max-iter", type=int, dest="max_iter",
                         help="eigensolver iteration cap")
        sub.add_argument("--include-timing", action="store_true",
                         help="record wall_ms (breaks byte-identical CSV)")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--out", type=Path, help="output directory")
    sub.add_argument("--workers", type=int,
                     help="parallel workers (default $HCL_WORKERS or 1)")


def _build_parser():
    parser = _Parser(prog="hcl", description=__doc__.strip().splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    for name, desc in (
        ("sample", "draw hypergraph samples and write them to files"),
        ("detect", "run the spectral test over a parameter grid"),
        ("recover", "run spectral support recovery over a parameter grid"),
        ("calibrate", "estimate the threshold constant C from null replicates"),
        ("phase", "exact-recovery rate heatmap over an (n, k) grid"),
    ):
        _add_common(subs.add_parser(name, help=desc))

    proj = subs.add_parser("project", help="project hypergraphs to pair-count matrices")
    proj.add_argument("input", nargs="?", type=Path,
                      help="hypergraph file to project (otherwise sample fresh ones)")
    _add_common(proj)

    self_p = subs.add_parser("selftest", help="run the internal identity/bound battery")
    self_p.add_argument("--quick", action="store_true", help="smaller replicate counts")
    _add_common(self_p, need_model=False)
    return parser


_FLAG_TO_KEY = {
    "n": "n", "d": "d", "k": "k", "p": "p", "reps": "reps", "seed": "seed",
    "c_const": "C", "alpha": "alpha", "tol": "tol", "max_iter": "max_iter",
    "workers": "workers", "include_timing": "include_timing",
}


def _collect_options(args):
    options = {}
    if args.config is not None:
        options.update(parse_config(args.config.read_text()))
    for flag, key in _FLAG_TO_KEY.items():
        value = getattr(args, flag, None)
        if value is not None and value is not False:
            options[key] = value
    if "workers" not in options:
        options["workers"] = int(os.environ.get("HCL_WORKERS", "1"))
    if getattr(args, "out", None) is not None:
        options["out"] = str(args.out)
    options["mode"] = args.command
    return options


def _project_file(args):
    p_opt = getattr(args, "p", None)
    p = float(str(p_opt).split(",")[0]) if p_opt else 0.0
    sample = read_hypergraph(args.input, p=p)
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    dest = out_dir / (args.input.stem + "_matrix.txt")
    write_matrix(project(sample), dest)
    print(dest)
    return 0


def _run_sweep(args):
    spec = build_spec(_collect_options(args))
    records, extras = run_experiment(spec)
    out_dir = Path(spec.out_dir) if spec.out_dir else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)

    if spec.mode in ("detect", "recover", "calibrate", "phase"):
        dest = out_dir / "trials.csv"
        emit_csv(records, dest)
        print(dest)
    if spec.mode == "calibrate":
        dest = out_dir / "calibration.txt"
        dest.write_text(f"C = {extras['C']:.12g}\nalpha = {spec.alpha:.12g}\n"
                        f"reps = {len(records)}\n")
        print(dest)
        print(f"C = {extras['C']:.12g}")
    if spec.mode == "phase":
        n_values, k_labels, rates = extras["phase"]
        svg = out_dir / "phase.svg"
        emit_svg_heatmap(n_values, k_labels, rates, svg)
        summary = out_dir / "phase_summary.csv"
        lines = ["n,k_label,rate"]
        for i, n in enumerate(n_values):
            for j, lab in enumerate(k_labels):
                lines.append(f"{n},{lab},{rates[i, j]:.6g}")
        summary.write_text("\n".join(lines) + "\n")
        print(svg)
        print(summary)
    if spec.mode in ("sample", "project"):
        n_ok = sum(1 for r in records if r.status == "ok")
        print(f"wrote {n_ok} sample file set(s) to {out_dir}")
    skipped = sum(1 for r in records if r.status == "skipped")
    if skipped:
        print(f"warning: {skipped} replicate(s) skipped by the memory cap", file=sys.stderr)
    return 0


def _run_selftest(args):
    from .diagnostics import run_selftest

    out_dir = Path(args.out) if args.out else None
    seed = args.seed if args.seed is not None else 20260825
    results = run_selftest(seed=seed, out_dir=out_dir, quick=args.quick)
    failed = [r for r in results if r.status == "fail"]
    for r in results:
        print(f"[{r.status:>5}] {r.name}: {r.detail}")
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "selftest":
            return _run_selftest(args)
        if args.command == "project" and args.input is not None:
            return _project_file(args)
        return _run_sweep(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, MemoryCapError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
