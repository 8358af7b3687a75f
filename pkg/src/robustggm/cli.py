"""Command-line surface: fit CSV data, run ROC benchmarks, emit CSV/JSON.

Every command resolves its flags into a flat config dict, runs a pure
function of that config, and writes the outputs plus a manifest sidecar
(``<output>.manifest.json``). Re-running a manifest with the ``replay``
command reproduces the output files byte for byte; only the sidecar's
wall-clock duration differs between runs.

Numbers are serialized with 17 significant digits so every float
round-trips exactly. CSV output is RFC-4180 style (UTF-8, comma, CRLF).

Penalty units: ``--rho`` and ``--rho-grid`` are per-entry soft-threshold
levels as used by the glasso; t-model fits rescale internally to the
equivalent full-likelihood penalty, so the same value is comparable
across methods.

The ``roc`` command runs its replicates concurrently; the ROBUSTGGM_THREADS
environment variable caps the worker count (default: machine parallelism).
Replicates draw from independent per-index streams, so results are
identical regardless of scheduling.

Exit codes: 0 success, 2 bad input (flags or CSV), 3 non-convergence
(partial results are still written, flagged in the JSON).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import (
    InfeasibleError,
    InvalidScenarioError,
    NonConvergenceError,
    RobustGgmError,
)
from .glasso import PenaltySpec, glasso_fit
from .alt_tmodel import McmcConfig, alt_tlasso_fit
from .simbench import (
    GraphSpec,
    ScenarioSpec,
    average_roc,
    default_rho_grid,
    edges_from_theta,
    empirical_covariance,
    generate_scenario,
    random_concentration,
    roc_curve,
    top_k_edges,
)
from .tlasso import TlassoConfig, tlasso_fit

SCHEMA_VERSION = "1"
CLI_METHODS = ("glasso", "tlasso", "alt-tlasso")
KINDS = ("gaussian", "student_t", "contaminated_fixed", "contaminated_blocks")

EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3

# The stochastic E-step keeps precision changes at the Monte-Carlo noise
# floor (~1e-2 at the default cycle count), so the alternative fit uses a
# plateau-level stopping tolerance unless one is given explicitly.
ALT_DEFAULT_EM_TOL = 0.02


class UsageError(Exception):
    """Invalid flags or malformed input files; maps to exit code 2."""


# ---------------------------------------------------------------------------
# deterministic serialization


def format_number(x) -> str:
    """Serialize a number with 17 significant digits (floats) for exact round-trips."""
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return f"{x:.17g}"


def dumps_json(obj) -> str:
    """Deterministic JSON text: insertion-ordered keys, 17-digit floats."""
    out = io.StringIO()
    _write_json(obj, out, 0)
    out.write("\n")
    return out.getvalue()


def _write_json(obj, out, level) -> None:
    pad = "  " * level
    inner = "  " * (level + 1)
    if obj is None:
        out.write("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, float, np.integer, np.floating)):
        out.write(format_number(obj))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.write(f"{inner}{json.dumps(str(key))}: ")
            _write_json(value, out, level + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.write("[]")
            return
        out.write("[\n")
        for i, value in enumerate(items):
            out.write(inner)
            _write_json(value, out, level + 1)
            out.write(",\n" if i < len(items) - 1 else "\n")
        out.write(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_text(rows) -> str:
    """RFC-4180-style CSV (CRLF line endings) from rows of already-formatted cells."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerows(rows)
    return buf.getvalue()


def _write_outputs(outputs: dict) -> None:
    for path, text in outputs.items():
        with open(path, "wb") as fh:
            fh.write(text.encode("utf-8"))


_PATH_KEYS = ("input", "out", "out_data", "out_truth")


def _manifest(command: str, config: dict, duration: float | None = None,
              embedded: bool = False) -> dict:
    # the copy embedded in result files omits file paths (and never holds a
    # duration) so that replaying into a different directory reproduces the
    # result bytes exactly; the sidecar keeps everything
    cfg = {k: v for k, v in config.items() if not (embedded and k in _PATH_KEYS)}
    m = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg,
        "library_version": __version__,
    }
    if duration is not None:
        m["duration_seconds"] = duration
    return m


# ---------------------------------------------------------------------------
# CSV input


def read_csv_matrix(path: str) -> np.ndarray:
    """Parse a CSV of observations (rows) by variables (columns).

    A header row is auto-detected: if any cell on the first line fails to
    parse as a number, the line is skipped. Every other cell must be a
    finite number; missing values, ragged rows, and malformed cells raise
    UsageError naming the 1-based file row (and column).
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh)]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    while rows and not rows[-1]:
        rows.pop()
    if not rows:
        raise UsageError(f"{path}: empty CSV")

    def parse(cell: str) -> float:
        value = float(cell)
        if not math.isfinite(value):
            raise ValueError("non-finite")
        return value

    start = 0
    try:
        [parse(cell) for cell in rows[0]]
    except ValueError:
        start = 1
    if start == len(rows):
        raise UsageError(f"{path}: no data rows after the header")

    ncol = len(rows[start])
    data = []
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if len(row) != ncol:
            raise UsageError(
                f"{path}: row {line_no}: expected {ncol} columns, found {len(row)}"
            )
        values = []
        for col_no, cell in enumerate(row, start=1):
            if cell.strip() == "":
                raise UsageError(
                    f"{path}: row {line_no}, column {col_no}: missing value "
                    "(missing data is not supported)"
                )
            try:
                values.append(parse(cell))
            except ValueError:
                raise UsageError(
                    f"{path}: row {line_no}, column {col_no}: cannot parse {cell!r} as a number"
                ) from None
        data.append(values)
    matrix = np.asarray(data, dtype=float)
    if matrix.shape[0] < 2:
        raise UsageError(f"{path}: at least two data rows are required")
    return matrix


# ---------------------------------------------------------------------------
# fit


def _resolved_fit_config(args) -> dict:
    em_tol = args.em_tol
    if em_tol is None:
        em_tol = ALT_DEFAULT_EM_TOL if args.method == "alt-tlasso" else 1e-5
    return {
        "input": args.input,
        "method": args.method,
        "rho": args.rho,
        "nu": args.nu,
        "em_tol": em_tol,
        "max_em_iter": args.max_em_iter,
        "glasso_tol": args.glasso_tol,
        "max_sweeps": args.max_sweeps,
        "penalize_diagonal": bool(args.penalize_diagonal),
        "k_samples": args.k_samples,
        "burn_in": args.burn_in,
        "seed": args.seed,
        "full_tau": bool(args.full_tau),
        "out": args.out,
    }


def _edge_rows(theta: np.ndarray) -> list:
    edges = edges_from_theta(theta)
    return [[i, j, float(abs(theta[i, j]))] for i, j in sorted(edges.edges)]


def run_fit(config: dict) -> tuple[dict, int]:
    data = read_csv_matrix(config["input"])
    n, p = data.shape
    method = config["method"]
    rho = config["rho"]
    if rho < 0:
        raise UsageError("--rho must be nonnegative")

    failure = None
    weights = None
    tau_full = None
    if method == "glasso":
        s = empirical_covariance(data)
        try:
            res = glasso_fit(
                s,
                PenaltySpec(rho=rho, penalize_diagonal=config["penalize_diagonal"]),
                tol=config["glasso_tol"],
                max_sweeps=config["max_sweeps"],
            )
        except NonConvergenceError as exc:
            if exc.result is None:
                raise
            res, failure = exc.result, str(exc)
        mu_hat = data.mean(axis=0)
        theta, psi = res.theta_hat, res.sigma_hat
        trace = res.objective_trace
        iterations, converged = res.iterations, res.converged
    else:
        cfg = TlassoConfig(
            rho=rho * n,
            nu=config["nu"],
            em_tol=config["em_tol"],
            max_em_iter=config["max_em_iter"],
            glasso_tol=config["glasso_tol"],
        )
        try:
            if method == "tlasso":
                fit = tlasso_fit(data, cfg)
            else:
                fit = alt_tlasso_fit(
                    data,
                    cfg,
                    McmcConfig(
                        k_samples=config["k_samples"],
                        burn_in=config["burn_in"],
                        seed=config["seed"],
                    ),
                )
        except NonConvergenceError as exc:
            fit, failure = exc.result, str(exc)
        mu_hat, theta, psi = fit.mu_hat, fit.theta_hat, fit.psi_hat
        trace = fit.penalized_loglik_trace if method == "tlasso" else fit.theta_change_trace
        iterations, converged = fit.em_iterations, fit.converged
        weights = fit.weights
        if method == "alt-tlasso" and config["full_tau"] and fit.tau_stats is not None:
            tau_full = [m.ravel() for m in fit.tau_stats.root_outer]

    doc = {
        "schema_version": SCHEMA_VERSION,
        "method": method,
        "n": n,
        "p": p,
        "mu_hat": mu_hat,
        "theta_hat": theta.ravel(),
        "psi_hat": psi.ravel(),
        "edges": _edge_rows(theta),
        "weights": weights,
        "tau_full": tau_full,
        "objective_trace": list(trace),
        "iterations": iterations,
        "converged": bool(converged),
        "nonconvergence": failure,
        "manifest": _manifest("fit", config, embedded=True),
    }
    outputs = {config["out"]: dumps_json(doc)}
    return outputs, (EXIT_NONCONVERGENCE if failure else 0)


# ---------------------------------------------------------------------------
# roc


def _scenario_from_config(config: dict) -> ScenarioSpec:
    return ScenarioSpec(
        kind=config["kind"],
        n=config["n"],
        nu=config["nu"],
        contam_nodes=config["contam_nodes"],
        contam_rows=config["contam_rows"],
        mean_multiplier=config["mean_multiplier"],
        block_size=config["block_size"],
    )


def _roc_replicate(job) -> dict:
    """One replicate: simulate from a per-replicate stream, fit every method."""
    config, rep, grid = job
    rng = np.random.default_rng(np.random.SeedSequence([config["seed"], rep]))
    graph = random_concentration(
        GraphSpec(p=config["p"], edge_prob=config["edge_prob"]), rng=rng
    )
    data = generate_scenario(graph, _scenario_from_config(config), rng)
    tcfg = TlassoConfig(
        rho=0.0,
        nu=config["nu"],
        em_tol=config["em_tol"],
        max_em_iter=config["max_em_iter"],
    )
    mcmc = McmcConfig(
        k_samples=config["k_samples"], burn_in=config["burn_in"],
        seed=int(np.random.SeedSequence([config["seed"], rep, 1]).generate_state(1, np.uint64)[0]),
    )
    curves = {}
    for method in config["methods"]:
        key = method.replace("-", "_")
        curves[method] = roc_curve(key, data, graph[1], grid, tcfg, mcmc)
    return curves


def _replicate_grid(config: dict) -> list:
    """Shared penalty grid: explicit when given, else derived from replicate 0."""
    if config["rho_grid"] is not None:
        return [float(r) for r in config["rho_grid"]]
    rng = np.random.default_rng(np.random.SeedSequence([config["seed"], 0]))
    graph = random_concentration(
        GraphSpec(p=config["p"], edge_prob=config["edge_prob"]), rng=rng
    )
    data = generate_scenario(graph, _scenario_from_config(config), rng)
    return [float(r) for r in default_rho_grid(data, size=config["grid_size"])]


def _worker_count(reps: int) -> int:
    env = os.environ.get("ROBUSTGGM_THREADS", "")
    if env.strip():
        try:
            workers = int(env)
        except ValueError:
            raise UsageError(f"ROBUSTGGM_THREADS must be an integer, got {env!r}") from None
    else:
        workers = os.cpu_count() or 1
    return max(1, min(workers, reps))


def run_roc(config: dict) -> tuple[dict, int]:
    grid = _replicate_grid(config)
    jobs = [(config, rep, grid) for rep in range(config["reps"])]
    workers = _worker_count(config["reps"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_roc_replicate, jobs))
    else:
        results = [_roc_replicate(job) for job in jobs]

    rows = [["record", "method", "rho", "mean_fpr", "mean_tpr", "auc"]]
    for method in config["methods"]:
        avg = average_roc([res[method] for res in results])
        for rho, fpr, tpr in avg.points:
            rows.append(
                ["point", method, format_number(rho), format_number(fpr), format_number(tpr), ""]
            )
        rows.append(["auc", method, "", "", "", format_number(avg.auc)])
    outputs = {config["out"]: csv_text(rows)}
    return outputs, 0


# ---------------------------------------------------------------------------
# topk


def run_topk(config: dict) -> tuple[dict, int]:
    data = read_csv_matrix(config["input"])
    p = data.shape[1]
    max_edges = p * (p - 1) // 2
    if not 0 <= config["k"] <= max_edges:
        raise UsageError(f"--k must lie in [0, {max_edges}] for {p} variables")
    method = config["method"].replace("-", "_")
    tcfg = TlassoConfig(
        rho=0.0,
        nu=config["nu"],
        em_tol=config["em_tol"],
        max_em_iter=config["max_em_iter"],
    )
    mcmc = McmcConfig(
        k_samples=config["k_samples"], burn_in=config["burn_in"], seed=config["seed"]
    )
    try:
        result = top_k_edges(method, data, config["k"], tcfg, mcmc)
    except InfeasibleError as exc:
        raise UsageError(str(exc)) from exc
    doc = {
        "schema_version": SCHEMA_VERSION,
        "method": config["method"],
        "k": config["k"],
        "rho": result.rho,
        "tie_broken": result.tie_broken,
        "edges": [[i, j, result.magnitudes[(i, j)]] for i, j in sorted(result.edges.edges)],
        "manifest": _manifest("topk", config, embedded=True),
    }
    outputs = {config["out"]: dumps_json(doc)}
    return outputs, 0


# ---------------------------------------------------------------------------
# simulate


def run_simulate(config: dict) -> tuple[dict, int]:
    rng = np.random.default_rng(np.random.SeedSequence([config["seed"]]))
    graph_spec = GraphSpec(p=config["p"], edge_prob=config["edge_prob"])
    theta, truth = random_concentration(graph_spec, rng=rng)
    data = generate_scenario((theta, truth), _scenario_from_config(config), rng)
    data_rows = [[format_number(x) for x in row] for row in data]
    truth_doc = {
        "schema_version": SCHEMA_VERSION,
        "p": config["p"],
        "edges": [[i, j] for i, j in sorted(truth.edges)],
        "theta_true": theta.ravel(),
        "manifest": _manifest("simulate", config, embedded=True),
    }
    outputs = {
        config["out_data"]: csv_text(data_rows),
        config["out_truth"]: dumps_json(truth_doc),
    }
    return outputs, 0


# ---------------------------------------------------------------------------
# command plumbing

_RUNNERS = {
    "fit": run_fit,
    "roc": run_roc,
    "topk": run_topk,
    "simulate": run_simulate,
}


def _execute(command: str, config: dict) -> int:
    start = time.monotonic()
    outputs, code = _RUNNERS[command](config)
    _write_outputs(outputs)
    duration = time.monotonic() - start
    sidecar = _manifest(command, config, duration=duration)
    primary = next(iter(outputs))
    with open(primary + ".manifest.json", "wb") as fh:
        fh.write(dumps_json(sidecar).encode("utf-8"))
    return code


def run_replay(args) -> int:
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from exc
    command = manifest.get("command")
    config = manifest.get("config")
    if command not in _RUNNERS or not isinstance(config, dict):
        raise UsageError(f"{args.manifest} is not a robustggm manifest")
    if args.outdir:
        os.makedirs(args.outdir, exist_ok=True)
        for key in ("out", "out_data", "out_truth"):
            if key in config:
                config[key] = os.path.join(args.outdir, os.path.basename(config[key]))
    return _execute(command, config)


def _add_mcmc_flags(sub) -> None:
    sub.add_argument("--k-samples", type=int, default=50,
                     help="retained MCMC cycles per E-step (alt-tlasso)")
    sub.add_argument("--burn-in", type=int, default=20,
                     help="discarded MCMC cycles per E-step (alt-tlasso)")


def _add_em_flags(sub) -> None:
    sub.add_argument("--nu", type=float, default=3.0, help="degrees of freedom (t methods)")
    sub.add_argument("--em-tol", type=float, default=None,
                     help="EM stopping tolerance (default 1e-5; 0.02 for alt-tlasso)")
    sub.add_argument("--max-em-iter", type=int, default=200, help="EM iteration budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustggm",
        description="Robust sparse graph-structure estimation (glasso / tlasso / alt-tlasso).",
    )
    parser.add_argument("--version", action="version", version=f"robustggm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one model to a CSV of observations")
    fit.add_argument("input", help="CSV file, rows = observations, columns = variables")
    fit.add_argument("--method", choices=CLI_METHODS, default="glasso")
    fit.add_argument("--rho", type=float, required=True,
                     help="penalty (per-entry soft-threshold level)")
    _add_em_flags(fit)
    fit.add_argument("--glasso-tol", type=float, default=1e-7)
    fit.add_argument("--max-sweeps", type=int, default=200)
    fit.add_argument("--penalize-diagonal", action="store_true")
    _add_mcmc_flags(fit)
    fit.add_argument("--seed", type=int, default=0, help="MCMC seed (alt-tlasso)")
    fit.add_argument("--full-tau", action="store_true",
                     help="export full per-observation tau matrices (alt-tlasso)")
    fit.add_argument("--out", default="fit.json")

    roc = sub.add_parser("roc", help="averaged ROC curves over simulated replicates")
    roc.add_argument("--p", type=int, required=True)
    roc.add_argument("--n", type=int, required=True)
    roc.add_argument("--edge-prob", type=float, required=True)
    roc.add_argument("--kind", choices=KINDS, default="gaussian")
    roc.add_argument("--reps", type=int, default=50)
    roc.add_argument("--methods", default="glasso,tlasso",
                     help="comma-separated subset of glasso,tlasso,alt-tlasso")
    roc.add_argument("--rho-grid", default=None,
                     help="comma-separated penalty values; default: derived from replicate 0")
    roc.add_argument("--grid-size", type=int, default=30)
    _add_em_flags(roc)
    roc.add_argument("--contam-nodes", type=int, default=0)
    roc.add_argument("--contam-rows", type=int, default=0)
    roc.add_argument("--mean-multiplier", type=float, default=0.0)
    roc.add_argument("--block-size", type=int, default=0)
    _add_mcmc_flags(roc)
    roc.add_argument("--seed", type=int, default=0)
    roc.add_argument("--out", default="roc.csv")

    topk = sub.add_parser("topk", help="tune the penalty to recover exactly k edges")
    topk.add_argument("input")
    topk.add_argument("--method", choices=CLI_METHODS, default="glasso")
    topk.add_argument("--k", type=int, required=True)
    _add_em_flags(topk)
    _add_mcmc_flags(topk)
    topk.add_argument("--seed", type=int, default=0)
    topk.add_argument("--out", default="topk.json")

    sim = sub.add_parser("simulate", help="write a synthetic dataset and its true edges")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--edge-prob", type=float, required=True)
    sim.add_argument("--kind", choices=KINDS, default="gaussian")
    sim.add_argument("--nu", type=float, default=3.0)
    sim.add_argument("--contam-nodes", type=int, default=0)
    sim.add_argument("--contam-rows", type=int, default=0)
    sim.add_argument("--mean-multiplier", type=float, default=0.0)
    sim.add_argument("--block-size", type=int, default=0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out-data", default="data.csv")
    sim.add_argument("--out-truth", default="truth.json")

    replay = sub.add_parser("replay", help="re-run a recorded manifest")
    replay.add_argument("manifest")
    replay.add_argument("--outdir", default=None,
                        help="redirect output files into this directory")

    return parser


def _config_from_args(args) -> dict:
    if args.command == "fit":
        return _resolved_fit_config(args)
    if args.command == "roc":
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        if not methods or any(m not in CLI_METHODS for m in methods):
            raise UsageError(f"--methods must be a subset of {', '.join(CLI_METHODS)}")
        grid = None
        if args.rho_grid is not None:
            try:
                grid = [float(v) for v in args.rho_grid.split(",") if v.strip()]
            except ValueError:
                raise UsageError("--rho-grid must be comma-separated numbers") from None
            if not grid or any(v <= 0 for v in grid):
                raise UsageError("--rho-grid values must be positive")
        em_tol = args.em_tol
        if em_tol is None:
            em_tol = ALT_DEFAULT_EM_TOL if "alt-tlasso" in methods else 1e-5
        return {
            "p": args.p,
            "n": args.n,
            "edge_prob": args.edge_prob,
            "kind": args.kind,
            "nu": args.nu,
            "reps": args.reps,
            "methods": list(methods),
            "rho_grid": grid,
            "grid_size": args.grid_size,
            "em_tol": em_tol,
            "max_em_iter": args.max_em_iter,
            "contam_nodes": args.contam_nodes,
            "contam_rows": args.contam_rows,
            "mean_multiplier": args.mean_multiplier,
            "block_size": args.block_size,
            "k_samples": args.k_samples,
            "burn_in": args.burn_in,
            "seed": args.seed,
            "out": args.out,
        }
    if args.command == "topk":
        em_tol = args.em_tol if args.em_tol is not None else (
            ALT_DEFAULT_EM_TOL if args.method == "alt-tlasso" else 1e-5
        )
        return {
            "input": args.input,
            "method": args.method,
            "k": args.k,
            "nu": args.nu,
            "em_tol": em_tol,
            "max_em_iter": args.max_em_iter,
            "k_samples": args.k_samples,
            "burn_in": args.burn_in,
            "seed": args.seed,
            "out": args.out,
        }
    if args.command == "simulate":
        return {
            "p": args.p,
            "n": args.n,
            "edge_prob": args.edge_prob,
            "kind": args.kind,
            "nu": args.nu,
            "contam_nodes": args.contam_nodes,
            "contam_rows": args.contam_rows,
            "mean_multiplier": args.mean_multiplier,
            "block_size": args.block_size,
            "seed": args.seed,
            "out_data": args.out_data,
            "out_truth": args.out_truth,
        }
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return run_replay(args)
        config = _config_from_args(args)
        return _execute(args.command, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except RobustGgmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
