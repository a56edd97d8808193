"""Command-line entry point.

Subcommands: reproduce (full study plus pass/fail checks), simulate (study
without gating), analyze (recompute a summary from a replication CSV),
blocks (print a blocking scheme with diagnostics), verify (oracle and
calibration suites).  Exit codes: 0 success, 1 statistical check or suite
failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .blocks import build_diverging_blocks, build_fixed_lag_blocks, diagnose_conditions
from .checks import reproduction_checks
from .io import SchemaError, read_records
from .simulate import DEFAULT_SEED, SimConfig, run_study
from .summary import build_summary, summary_json

CONFIG_KEYS = (
    "seed",
    "reps",
    "T",
    "workers",
    "theta0",
    "theta1",
    "switch_count",
    "base_prob",
    "low_prob",
)


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read config file {path}: {exc}")
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise SystemExit(f"error: unknown config keys {sorted(unknown)}")
    return data


def _effective_config(args) -> SimConfig:
    file_cfg = _load_config_file(getattr(args, "config", None))

    def pick(flag_name, file_name, default):
        v = getattr(args, flag_name, None)
        if v is not None:
            return v
        if file_name in file_cfg:
            return file_cfg[file_name]
        return default

    return SimConfig(
        T=int(pick("T", "T", 100_000)),
        reps=int(pick("reps", "reps", 10_000)),
        master_seed=int(pick("seed", "seed", DEFAULT_SEED)),
        theta0=float(pick("theta0", "theta0", 2.0)),
        theta1=float(pick("theta1", "theta1", 3.0)),
        switch_count=int(pick("switch_count", "switch_count", 100)),
        base_prob=float(pick("base_prob", "base_prob", 0.5)),
        low_prob=float(pick("low_prob", "low_prob", 0.1)),
        workers=pick("workers", "workers", None),
    )


def _write_manifest(out_dir: Path, config: SimConfig, outputs: dict, checks, ok: bool,
                    elapsed: float) -> None:
    manifest = {
        "tool": "lagmart",
        "version": __version__,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "master_seed": config.master_seed,
        "elapsed_seconds": elapsed,
        "config": asdict(config),
        "outputs": outputs,
        "checks": [
            {"name": c.name, "status": c.status, "detail": c.detail} for c in (checks or [])
        ],
        "ok": ok,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_study_command(args, gate: bool) -> int:
    config = _effective_config(args)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 2
    csv_path = out_dir / "replications.csv"
    summary_path = out_dir / "summary.json"
    try:
        print(
            f"running {config.reps} replicates at T={config.T} "
            f"(seed {config.master_seed}, {config.resolve_workers()} workers)",
            flush=True,
        )
        t0 = time.time()
        records, summary = run_study(config, csv_path=csv_path, progress=True)
        elapsed = time.time() - t0
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(summary_json(summary))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    checks = reproduction_checks(summary) if gate else []
    ok = all(c.status != "fail" for c in checks)
    outputs = {
        "replications_csv": str(csv_path),
        "summary_json": str(summary_path),
    }
    _write_manifest(out_dir, config, outputs, checks, ok, elapsed)
    print(f"finished in {elapsed:.1f}s; wrote {csv_path} and {summary_path}")
    for c in checks:
        print(f"check {c.name}: {c.status.upper()} ({c.detail})")
        if c.status == "skipped":
            print(f"warning: {c.name} skipped: {c.detail}", file=sys.stderr)
    if gate and not ok:
        return 1
    return 0


def cmd_reproduce(args) -> int:
    return _run_study_command(args, gate=True)


def cmd_simulate(args) -> int:
    return _run_study_command(args, gate=False)


def cmd_analyze(args) -> int:
    try:
        records = read_records(args.input_csv)
    except SchemaError as exc:
        print(f"error: schema mismatch: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    summary = build_summary(records)
    text = summary_json(summary)
    try:
        if args.out is None:
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        if args.psi_out is not None:
            _write_psi_matrices(Path(args.psi_out), records, summary)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _write_psi_matrices(out_dir: Path, records, summary) -> None:
    """Group-mean variance estimates in the matrix CSV format (row,col,value)."""
    import numpy as np

    from .variance import PsiEstimate, psi_matrix_csv

    out_dir.mkdir(parents=True, exist_ok=True)
    k_n = summary.T if summary.T is not None else 0
    groups = {"all": [r.psi_bar for r in records]}
    for name, g in summary.groups.items():
        if g.count > 0:
            groups[name] = [r.psi_bar for r in records if r.parity_group == name]
    for name, values in groups.items():
        est = PsiEstimate(
            matrix=np.array([[float(np.mean(values))]]), kind="full", k_n=k_n
        )
        with open(out_dir / f"psi_{name}.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(psi_matrix_csv(est))


def cmd_blocks(args) -> int:
    try:
        if args.diverging:
            scheme = build_diverging_blocks(
                A=args.A, B=args.B, alpha=args.alpha, beta=args.beta, s=args.s, k_max=args.kmax
            )
        else:
            s = args.s if args.s is not None else args.p + 1
            scheme = build_fixed_lag_blocks(
                p=args.p,
                s=s,
                k_max=args.kmax,
                growth_B=args.growth_B,
                growth_beta=args.growth_beta,
            )
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("j,b_j,a_j,c_j,d_j")
    for j, b, a, c, d in scheme.rows():
        print(f"{j},{b},{a},{c},{d}")
    if scheme.n_blocks > 2:
        rep = diagnose_conditions(scheme, J=max(2, scheme.n_blocks - 1))
        print(f"# CN minor fraction at J={rep.J}: {rep.cn[-1]:.6g}")
        print(f"# DN max-block fraction at J={rep.J}: {rep.dn[-1]:.6g}")
        lag_note = rep.lag_ok_from if rep.lag_ok_from is not None else "not within horizon"
        coverage = "" if rep.lag_checked_through == rep.J else (
            f" (scan covered blocks 1..{rep.lag_checked_through})"
        )
        print(f"# structural lag condition holds from block: {lag_note}{coverage}")
        print(f"# major lengths grow over horizon: {rep.d_grows}")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all_suites

    results = run_all_suites()
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"suite {r.name}: {status} [{r.checked} checks] {r.detail}")
        ok = ok and r.passed
    return 0 if ok else 1


def _add_study_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="64-bit master seed")
    p.add_argument("--reps", type=int, default=None, help="number of replicates")
    p.add_argument("--T", type=int, default=None, dest="T", help="time steps per replicate")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: LAGMART_WORKERS or CPU count)")
    p.add_argument("--out", type=str, default="out", help="output directory")
    p.add_argument("--config", type=str, default=None, help="JSON config file")
    p.add_argument("--theta0", type=float, default=None, help=argparse.SUPPRESS)
    p.add_argument("--theta1", type=float, default=None, help=argparse.SUPPRESS)
    p.add_argument("--switch-count", type=int, default=None, dest="switch_count",
                   help=argparse.SUPPRESS)
    p.add_argument("--base-prob", type=float, default=None, dest="base_prob",
                   help=argparse.SUPPRESS)
    p.add_argument("--low-prob", type=float, default=None, dest="low_prob",
                   help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagmart",
        description="Simulation and inference engine for lag martingale difference processes",
    )
    parser.add_argument("--version", action="version", version=f"lagmart {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="run the full study and gate on reproduction checks")
    _add_study_flags(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("simulate", help="run a study without pass/fail gating")
    _add_study_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="recompute the summary from a replication CSV")
    p.add_argument("input_csv", type=str)
    p.add_argument("--out", type=str, default=None, help="summary JSON path (default: stdout)")
    p.add_argument("--psi-out", type=str, default=None, dest="psi_out",
                   help="directory for variance-estimate matrices (row,col,value CSVs)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("blocks", help="print a blocking scheme as CSV with diagnostics")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--diverging", action="store_true")
    kind.add_argument("--fixed", action="store_true")
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--kmax", type=int, default=100)
    p.add_argument("--growth-B", type=float, default=1.0, dest="growth_B")
    p.add_argument("--growth-beta", type=float, default=0.5, dest="growth_beta")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("verify", help="run the oracle-equivalence and calibration suites")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "blocks" and args.diverging and args.s is None:
        args.s = 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
