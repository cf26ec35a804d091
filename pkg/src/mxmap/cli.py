"""Command-line interface: generate, discover, evaluate, grid search, sweeps, benchmarks.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .discovery import MXMapConfig, discover
from .embedding import Dataset, EmbedParams
from .errors import DataError, DegenerateInputError, GenerationError, MXMapError, ParameterError
from .graph import CausalGraph
from .gridsearch import admissible_thresholds, case_results, cases_from_graph, default_thresholds, pcm_grid, threshold_sweep
from .metrics import evaluate
from .pcm import CONDITIONING_MODES, COMPOSE
from .simgen import NoiseConfig, chain_preset, generate, get_preset, mirage_subsequences, presets

log = logging.getLogger("mxmap")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

PROFILES = {
    "simulated": dict(tau=1, dim=3, knn=None, gamma_star=0.45),
    "appendixB": dict(tau=1, dim=7, knn=None, gamma_star=0.45),
    "table2": dict(tau=2, dim=6, knn=10, gamma_star=0.6),
}


# --- I/O helpers -----------------------------------------------------------

def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def dataset_to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(data.names)
    for row in data.to_array():
        w.writerow(repr(float(v)) for v in row)
    return buf.getvalue()


def read_dataset(path: str | Path) -> Dataset:
    """Parse a header-plus-rows CSV; errors name the first offending line."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    header = [h.strip() for h in header]
    if not header or any(not h for h in header):
        raise DataError(f"{path}: line 1: header must name every column")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise DataError(f"{path}: line {lineno}: non-numeric value in {row}") from None
        if not all(math.isfinite(v) for v in vals):
            raise DataError(f"{path}: line {lineno}: non-finite value in {row}")
        rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset.from_array(np.array(rows), header)


def read_graph(path: str | Path) -> CausalGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return CausalGraph.load(text)


# --- argument helpers ------------------------------------------------------

def _add_embed_args(p: argparse.ArgumentParser, with_profile: bool = True) -> None:
    if with_profile:
        p.add_argument("--profile", choices=sorted(PROFILES), default="simulated",
                       help="named parameter set; explicit flags override it")
    p.add_argument("--tau", type=int, help="delay lag")
    p.add_argument("--dim", type=int, help="embedding dimension")
    p.add_argument("--knn", type=int, help="neighbor count (default dim + 1)")


def _embed_params(args) -> EmbedParams:
    prof = PROFILES[getattr(args, "profile", "simulated")]
    tau = args.tau if args.tau is not None else prof["tau"]
    dim = args.dim if args.dim is not None else prof["dim"]
    k = args.knn if args.knn is not None else prof["knn"]
    return EmbedParams(tau, dim, k)


def _gamma_star(args) -> float:
    if args.gamma_star is not None:
        return args.gamma_star
    return PROFILES[getattr(args, "profile", "simulated")]["gamma_star"]


def _noise(args) -> NoiseConfig:
    return NoiseConfig(eps_std=args.noise_std)


# --- commands --------------------------------------------------------------

def cmd_gen(args) -> int:
    preset = get_preset(args.preset)
    data = generate(preset, args.length, _noise(args), args.seed)
    _emit(dataset_to_csv(data), args.out)
    if args.truth:
        atomic_write(args.truth, preset.truth.export(args.format))
    return EXIT_OK


def cmd_presets(args) -> int:
    for name, p in sorted(presets().items()):
        edges = ", ".join(f"{p.names[i]}->{p.names[j]}" for i, j in p.edges)
        print(f"{name:14s} K={p.K}  {edges}")
    print("NV_chain       K=N  v0->v1->...->v{N-1} (built on demand)")
    return EXIT_OK


def cmd_discover(args) -> int:
    cfg = MXMapConfig(
        embed=_embed_params(args),
        ccm_threshold=args.ccm_thres,
        gamma_star=_gamma_star(args),
        tie_epsilon=args.tie_epsilon,
        gate=args.gate,
        conditioning=args.conditioning,
        threads=args.threads,
    )
    data = read_dataset(args.input)
    report = discover(data, cfg)
    _emit(report.final_graph.export(args.format), args.out)
    if args.report:
        atomic_write(args.report, json.dumps(report.to_dict(), indent=2) + "\n")
    for (i, j), err in report.pair_errors.items():
        print(f"warning: pair {data.names[i]}/{data.names[j]} skipped: {err}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    truth, pred = read_graph(args.truth), read_graph(args.pred)
    rep = evaluate(truth, pred)
    _emit(rep.to_json() + "\n" if args.json else rep.to_table(), args.out)
    return EXIT_OK


def cmd_grid(args) -> int:
    data = read_dataset(args.input)
    conds = args.conds or [n for n in data.names if n not in (args.cause, args.effect)]
    res = pcm_grid(data, args.cause, args.effect, conds,
                   range(1, args.tau_max + 1), range(1, args.dim_max + 1),
                   threshold=args.gamma_star, k=args.knn, conditioning=args.conditioning)
    case = args.case or f"{args.cause}_{args.effect}"
    paths = res.write_csv(args.outdir, case)
    labels = res.label_surface
    print("tau\\dim " + " ".join(f"{e:>4d}" for e in res.dim_range))
    for tau, row in zip(res.tau_range, labels):
        print(f"{tau:>7d} " + " ".join(f"{(lab.value[0] if lab else '-'):>4s}" for lab in row))
    for (tau, dim), err in sorted(res.errors.items()):
        print(f"warning: cell tau={tau} dim={dim} failed: {err}", file=sys.stderr)
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    names = args.presets or sorted(presets())
    cases = []
    for name in names:
        pre = get_preset(name)
        data = generate(pre, args.length, _noise(args), args.seed)
        cases += cases_from_graph(data, pre.truth, name)
    results = case_results(cases, EmbedParams(args.tau, args.dim, args.knn), args.conditioning)
    sweep = threshold_sweep(cases, default_thresholds(), results=results, min_rho_all=args.min_rho_all)
    adm = admissible_thresholds(sweep, args.tolerance)
    kept = [c for c, r in zip(cases, results) if r.rho_all >= args.min_rho_all]
    scenarios = sorted({c.scenario for c in kept})
    out = {
        "n_cases": {s: sum(c.scenario == s for c in kept) for s in scenarios},
        "n_excluded": len(cases) - len(kept),
        "mistakes": {f"{th:.2f}": counts for th, counts in sweep.items()},
        "admissible": adm,
    }
    if args.json:
        _emit(json.dumps(out, indent=2) + "\n", args.out)
    else:
        lines = ["threshold " + " ".join(f"{s:>9s}" for s in scenarios)]
        for th, counts in sweep.items():
            lines.append(f"{th:>9.2f} " + " ".join(f"{counts[s]:>9d}" for s in scenarios))
        lines.append("admissible (all): " + ", ".join(f"{t:.2f}" for t in adm["all"]))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_mirage(args) -> int:
    if args.input:
        data = read_dataset(args.input)
    else:
        data = generate(get_preset(args.preset), args.length, _noise(args), args.seed)
    windows = mirage_subsequences(data, args.window, args.n, args.seed)
    pairs = list(windows[0]["correlations"])
    summary = {}
    for a, b in pairs:
        vals = [w["correlations"][(a, b)] for w in windows if w["correlations"][(a, b)] is not None]
        summary[f"{a}-{b}"] = {
            "min": min(vals) if vals else None,
            "max": max(vals) if vals else None,
            "sign_flip": bool(vals) and min(vals) < -args.level and max(vals) > args.level,
        }
    out = {"windows": [{"start": w["start"], "correlations": {f"{a}-{b}": r for (a, b), r in w["correlations"].items()}}
                       for w in windows],
           "summary": summary}
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def loglog_slope(ks, seconds) -> float | None:
    """Least-squares slope of ``log(seconds)`` against ``log(K)``; ``None`` if undefined."""
    ks = np.asarray(ks, dtype=float)
    secs = np.asarray(seconds, dtype=float)
    if np.unique(ks).size < 2 or np.any(secs <= 0):
        return None
    return float(np.polyfit(np.log(ks), np.log(secs), 1)[0])


def bench_runtime(min_k: int, max_k: int, length: int, seed: int, cfg: MXMapConfig, repeat: int = 1):
    """Wall time of :func:`discover` on chain presets, best of ``repeat`` runs."""
    rows = []
    for K in range(min_k, max_k + 1):
        data = generate(chain_preset(K, seed), length, seed=seed)
        best = math.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            discover(data, cfg)
            best = min(best, time.perf_counter() - t0)
        rows.append((K, best))
    return rows, loglog_slope([r[0] for r in rows], [r[1] for r in rows])


def cmd_bench_runtime(args) -> int:
    if args.max_k < 3:
        raise ParameterError(f"--max-k must be >= 3, got {args.max_k}")
    min_k = args.min_k if args.min_k is not None else 3
    if not 2 <= min_k <= args.max_k:
        raise ParameterError(f"--min-k must lie in [2, {args.max_k}], got {min_k}")
    cfg = MXMapConfig(embed=_embed_params(args), threads=args.threads)
    rows, slope = bench_runtime(min_k, args.max_k, args.length, args.seed, cfg, args.repeat)
    if args.json:
        text = json.dumps({"runs": [{"K": k, "seconds": s} for k, s in rows], "slope": slope}, indent=2) + "\n"
    else:
        text = "K seconds\n" + "".join(f"{k} {s:.4f}\n" for k, s in rows)
        text += f"slope {'undefined' if slope is None else f'{slope:.3f}'}\n"
    _emit(text, args.out)
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mxmap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_gen(p):
        p.add_argument("--length", type=int, default=3500)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--noise-std", type=float, default=0.0, help="additive Gaussian noise std")

    p = sub.add_parser("gen", help="simulate a preset system to CSV")
    p.add_argument("preset")
    common_gen(p)
    p.add_argument("-o", "--out", help="output CSV (default stdout)")
    p.add_argument("--truth", help="also write the ground-truth graph here")
    p.add_argument("--format", choices=("dot", "json", "csv"), default="json", help="ground-truth graph format")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("presets", help="list available presets")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("discover", help="infer a causal graph from a CSV dataset")
    p.add_argument("input")
    _add_embed_args(p)
    p.add_argument("--ccm-thres", type=float, default=0.5)
    p.add_argument("--gamma-star", type=float, default=None, help="ratio threshold (profile default 0.45)")
    p.add_argument("--tie-epsilon", type=float, default=0.0)
    p.add_argument("--gate", choices=("either", "both"), default="either")
    p.add_argument("--conditioning", choices=CONDITIONING_MODES, default=COMPOSE)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("dot", "json", "csv"), default="json")
    p.add_argument("-o", "--out", help="graph output (default stdout)")
    p.add_argument("--report", help="write the full JSON report here")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("eval", help="compare a predicted graph with the truth")
    p.add_argument("truth")
    p.add_argument("pred")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="partial cross mapping over a (tau, dim) grid")
    p.add_argument("input")
    p.add_argument("--cause", required=True)
    p.add_argument("--effect", required=True)
    p.add_argument("--conds", nargs="*", help="condition variables (default: all others)")
    p.add_argument("--tau-max", type=int, default=8)
    p.add_argument("--dim-max", type=int, default=8)
    p.add_argument("--knn", type=int)
    p.add_argument("--gamma-star", type=float, default=0.45)
    p.add_argument("--conditioning", choices=CONDITIONING_MODES, default=COMPOSE)
    p.add_argument("--outdir", default=".")
    p.add_argument("--case")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("sweep", help="ratio-threshold sweep over labelled preset cases")
    p.add_argument("--presets", nargs="*")
    common_gen(p)
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--dim", type=int, default=7)
    p.add_argument("--knn", type=int)
    p.add_argument("--tolerance", type=int, default=2)
    p.add_argument("--min-rho-all", type=float, default=0.5,
                   help="skip cases whose apparent cross-map skill is below this (as pruning never sees them)")
    p.add_argument("--conditioning", choices=CONDITIONING_MODES, default=COMPOSE)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mirage", help="windowed correlations of a dataset or preset")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input")
    src.add_argument("--preset", default="4V_chain")
    common_gen(p)
    p.add_argument("--window", type=int, default=25)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--level", type=float, default=0.3)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_mirage)

    p = sub.add_parser("bench-runtime", help="discovery wall time on growing chains")
    p.add_argument("--max-k", type=int, default=8)
    p.add_argument("--min-k", type=int)
    p.add_argument("--length", type=int, default=3500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=3, help="best-of-N timing per K")
    p.add_argument("--threads", type=int, default=1)
    _add_embed_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_bench_runtime)
    return parser


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (DegenerateInputError, GenerationError)):
        return EXIT_NUMERIC
    if isinstance(exc, DataError):
        return EXIT_DATA
    if isinstance(exc, ParameterError):
        return EXIT_USAGE
    return EXIT_DATA


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MXMapError as exc:
        print(f"mxmap {args.command}: error: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
