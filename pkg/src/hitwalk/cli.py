"""Command-line front end.

Exit codes: 0 success, 2 validation/usage error, 3 runtime failure,
4 acceptance-flag failure in `selftest`.  Every subcommand that writes into an
output directory drops a manifest.json there with the fully-resolved config,
the artifact version, and wall time.  `HITWALK_SEED` provides the master seed
when --seed is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter

import numpy as np

from . import __version__, acceptance, harness, moments, spectra, ustat
from .combinatorics import bound_ratio_scan, weighted_config_sum
from .graphs import (
    ConnectivityError,
    read_edge_file,
    sample_connected_er,
    sample_er,
    to_edge_text,
    write_edge_file,
)

__all__ = ["main", "RunConfig"]


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved parameters of one invocation, serialized for provenance."""

    subcommand: str
    params: dict

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, **self.params}


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("HITWALK_SEED")
    return int(env) if env else 0


def _config_of(args: argparse.Namespace) -> RunConfig:
    params = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")
    }
    return RunConfig(subcommand=params.pop("command"), params=params)


def _write_manifest(out_dir: Path, config: RunConfig, wall_seconds: float) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": config.to_dict(),
        "version": __version__,
        "wall_seconds": wall_seconds,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_sample_graph(args: argparse.Namespace) -> int:
    start = perf_counter()
    seed = _resolve_seed(args.seed)
    if args.connected:
        g = sample_connected_er(args.n_plus_1, args.p, seed, max_attempts=args.max_attempts)
    else:
        g = sample_er(args.n_plus_1, args.p, seed)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = Path(args.out) if args.out else out_dir / "graph.edges"
        write_edge_file(g, path)
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    elif args.out:
        write_edge_file(g, args.out)
        path = Path(args.out)
    else:
        sys.stdout.write(to_edge_text(g))
        return 0
    _emit({
        "path": str(path),
        "n_plus_1": g.n_plus_1,
        "edge_count": g.edge_count,
        "connected": g.connected,
        "attempts": g.attempts,
    })
    return 0


def _cmd_hitting(args: argparse.Namespace) -> int:
    start = perf_counter()
    g = read_edge_file(args.edges)
    if not g.connected:
        raise ConnectivityError(f"graph in {args.edges} is not connected")
    out: dict = {"n_plus_1": g.n_plus_1, "method": args.method}
    matrices = {}
    if args.method in ("exact", "both"):
        matrices["exact"] = spectra.hitting_matrix_exact(g)
        per_vertex, scalar = spectra.avg_starting_hitting(
            g, "exact-definition", hitting=matrices["exact"]
        )
        out["h_i_exact_definition"] = scalar
        out["h_j_target"] = list(spectra.avg_target_hitting(g, matrices["exact"]))
    if args.method in ("spectral", "both"):
        matrices["spectral"] = spectra.hitting_matrix_spectral(g)
        out["h_i_spectral_scalar"] = spectra.avg_starting_scalar(g)
    if args.method == "both":
        diff = np.abs(matrices["spectral"].matrix - matrices["exact"].matrix)
        off = ~np.eye(g.n_plus_1, dtype=bool)
        out["max_entry_rel_diff"] = float(
            np.max(diff[off] / np.abs(matrices["exact"].matrix[off]))
        )
    out["h_i"] = out.get("h_i_spectral_scalar", out.get("h_i_exact_definition"))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, hm in matrices.items():
            spectra.dump_matrix_csv(out_dir / f"hitting_{name}.csv", hm.matrix)
        spec = spectra.spectrum(spectra.normalized_adjacency(g))
        spectra.dump_matrix_csv(out_dir / "eigenvalues.csv", spec.eigenvalues[None, :])
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    _emit(out)
    return 0


def _cmd_moments(args: argparse.Namespace) -> int:
    start = perf_counter()
    mom = moments.moment_set(args.n, args.p)
    _emit(mom.to_dict())
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "moments.json").write_text(json.dumps(mom.to_dict(), indent=2) + "\n")
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    return 0


def _cmd_ustat(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    if args.edges:
        g = read_edge_file(args.edges)
    else:
        if args.n is None or args.p is None:
            raise ValueError("ustat needs --edges or both --n and --p")
        g = sample_connected_er(args.n + 1, args.p, seed, max_attempts=args.max_attempts)
    mom = moments.moment_set(g.n_plus_1 - 1, g.p)
    un = ustat.statistic_un(g, mom)
    sv = ustat.standardized_hitting(g, mom, mode=args.mode if args.mode != "both" else "exact")
    payload = {
        "n": g.n_plus_1 - 1,
        "p": g.p,
        "seed": seed,
        "un": un.value,
        **sv.components,
    }
    _emit(payload)
    if args.out_dir:
        start = perf_counter()
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "ustat.json").write_text(json.dumps(payload, indent=2) + "\n")
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    return 0


def _cmd_clt_run(args: argparse.Namespace) -> int:
    start = perf_counter()
    seed = _resolve_seed(args.seed)
    plan = harness.TrialPlan(
        n=args.n,
        p=args.p,
        m_trials=args.m,
        master_seed=seed,
        workers=args.workers,
        max_attempts=args.max_attempts,
    )
    batch = harness.run_trials(plan)
    out_dir = Path(args.out_dir or f"clt-run-n{args.n}-p{args.p}-m{args.m}-seed{seed}")
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_trials_csv(batch, out_dir / "trials.csv")
    modes = ("exact", "truncated") if args.mode == "both" else (args.mode,)
    printed = {}
    for mode in modes:
        summary = harness.empirical_summary(batch, args.p_star, mode=mode)
        suffix = f"_{mode}" if len(modes) > 1 else ""
        harness.write_summary_json(summary, out_dir / f"summary{suffix}.json")
        values = [
            r.statistic_exact if mode == "exact" else r.statistic_truncated
            for r in batch.records
        ]
        harness.write_histogram_csv(values, out_dir / f"histogram{suffix}.csv", bins=args.bins)
        printed[mode] = summary.to_dict()
    _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    _emit(printed if len(modes) > 1 else printed[modes[0]])
    return 0


def _cmd_diag_conditions(args: argparse.Namespace) -> int:
    start = perf_counter()
    seed = _resolve_seed(args.seed)
    rows = []
    for n in args.n_list:
        mom = moments.moment_set(n, args.p)
        diag = ustat.condition_diagnostics(
            n, args.p, mom, eps=args.eps, mc_samples=args.mc_samples, seed=seed
        )
        rows.append(diag.to_dict())
        print(json.dumps(rows[-1]))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "conditions.jsonl").write_text(
            "".join(json.dumps(r) + "\n" for r in rows)
        )
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    return 0


def _cmd_appendix_scan(args: argparse.Namespace) -> int:
    start = perf_counter()
    lines = ["n_plus_1,k,p,ordered,value,config_count,ratio"]
    scan = bound_ratio_scan(args.k, args.sizes, args.p, ordered=args.ordered)
    for np1, ratio in zip(scan.n_plus_1_list, scan.ratios):
        cs = weighted_config_sum(np1, args.k, args.p, ordered=args.ordered)
        lines.append(
            f"{np1},{args.k},{args.p:.17g},{int(args.ordered)},"
            f"{cs.value:.17g},{cs.config_count},{ratio:.17g}"
        )
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "appendix_scan.csv").write_text(text)
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    start = perf_counter()
    indices = args.criteria if args.criteria else None
    results = acceptance.run_criteria(indices, workers=args.workers, verbose=True)
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = [
            {"index": r.index, "name": r.name, "passed": r.passed,
             "seconds": r.seconds, "details": r.details}
            for r in results
        ]
        (out_dir / "selftest.json").write_text(json.dumps(payload, indent=2, default=str) + "\n")
        _write_manifest(out_dir, _config_of(args), perf_counter() - start)
    failed = [r.index for r in results if not r.passed]
    if failed:
        print(f"FAILED criteria: {failed}", flush=True)
        return 4
    print("all criteria passed", flush=True)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="hitwalk",
        description="Hitting-time statistics of random walks on Erdos-Renyi graphs.",
    )
    parser.add_argument("--version", action="version", version=f"hitwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON file with default parameter values; explicit flags win")
        sp.add_argument("--out-dir", type=str, default=None)
        subparsers[name] = sp
        return sp

    sp = add("sample-graph", _cmd_sample_graph, "sample one G(n+1, p) realization")
    sp.add_argument("--n-plus-1", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--connected", action="store_true")
    sp.add_argument("--max-attempts", type=int, default=1000)
    sp.add_argument("--out", type=str, default=None, help="edge-file path")

    sp = add("hitting", _cmd_hitting, "hitting matrices and average hitting times")
    sp.add_argument("--edges", type=str, required=True)
    sp.add_argument("--method", choices=("exact", "spectral", "both"), default="both")

    sp = add("moments", _cmd_moments, "print the MomentSet of (n, p) as JSON")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)

    sp = add("ustat", _cmd_ustat, "pair statistic and standardized hitting statistic")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--edges", type=str, default=None)
    sp.add_argument("--mode", choices=("exact", "truncated", "both"), default="both")
    sp.add_argument("--max-attempts", type=int, default=1000)

    sp = add("clt-run", _cmd_clt_run, "Monte Carlo batch of hitting-time trials")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--p-star", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--mode", choices=("exact", "truncated", "both"), default="exact")
    sp.add_argument("--bins", type=int, default=40)
    sp.add_argument("--max-attempts", type=int, default=1000)

    sp = add("diag-conditions", _cmd_diag_conditions, "CLT condition diagnostics scan")
    sp.add_argument("--n", dest="n_list", type=_int_list, required=True,
                    help="comma-separated list of n values")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--mc-samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=None)

    sp = add("appendix-scan", _cmd_appendix_scan, "stone-placement enumeration scan")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--sizes", type=_int_list, required=True,
                    help="comma-separated list of n_plus_1 values")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--ordered", action="store_true")

    sp = add("selftest", _cmd_selftest, "run the acceptance criteria")
    sp.add_argument("--criteria", type=_int_list, default=None)
    sp.add_argument("--workers", type=int, default=1)

    return parser, subparsers


def _parse(argv: list[str] | None) -> argparse.Namespace:
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    config_path = getattr(args, "config", None)
    if config_path:
        data = json.loads(Path(config_path).read_text())
        if not isinstance(data, dict):
            raise ValueError(f"config file {config_path} must hold a JSON object")
        sp = subparsers[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)} for {args.command}")
        fresh_parser, fresh_subparsers = build_parser()
        fresh_sp = fresh_subparsers[args.command]
        for action in fresh_sp._actions:
            if action.dest in data:
                action.required = False
        fresh_sp.set_defaults(**data)
        args = fresh_parser.parse_args(argv)
    return args


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parse(argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConnectivityError, RuntimeError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
