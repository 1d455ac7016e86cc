"""Command-line front end.

Three subcommands: ``find-support`` (extract an IS or UBS from a DIMACS
file), ``count`` (exact or PAC counting, optionally over a computed
support), and ``bench`` (family generators and the IS/UBS comparison
harness).

Output modes: ``human`` prints one ``key=value`` pair per line; ``json``
prints a single JSON object whose fields are deterministic for a fixed
seed (wall-clock timings appear only in human output and in results
files, never in the structured object, so fixed-seed runs are
byte-identical).

Exit codes: 0 success, 1 usage error, 2 parse error, 3 support deadline
expired (fallback result still printed), 4 counting timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .cnf import DimacsParseError, Formula, ProjectionSet, emit_dimacs, parse_dimacs
from .counting import (
    DEFAULT_DELTA,
    DEFAULT_EPSILON,
    DEFAULT_TIMEOUT_S,
    CountJobConfig,
    UnknownCountError,
    approx_count,
    count_exact_projected,
)
from .engine import DEFAULT_CONFLICT_LIMIT, SolverConfig
from .support import VarOrderStrategy, find_is, find_ubs

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_PRE_TIMEOUT = 3
EXIT_COUNT_TIMEOUT = 4

# Single source of truth for defaults; --help renders these values.
DEFAULTS = {
    "epsilon": DEFAULT_EPSILON,
    "delta": DEFAULT_DELTA,
    "seed": 0,
    "timeout_pre": DEFAULT_TIMEOUT_S,
    "timeout_count": DEFAULT_TIMEOUT_S,
    "conflict_limit": DEFAULT_CONFLICT_LIMIT,
    "strategy": VarOrderStrategy.NON_PROJECTION_FIRST.value,
    "format": "human",
}

_STRATEGIES = {s.value: s for s in VarOrderStrategy}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser, *, counting: bool) -> None:
    p.add_argument(
        "--conflict-limit",
        type=int,
        default=DEFAULTS["conflict_limit"],
        help=f"conflict budget per definability query (default {DEFAULTS['conflict_limit']})",
    )
    p.add_argument(
        "--strategy",
        choices=sorted(_STRATEGIES),
        default=DEFAULTS["strategy"],
        help=f"elimination order for UBS extraction (default {DEFAULTS['strategy']})",
    )
    p.add_argument(
        "--timeout-pre",
        type=float,
        default=DEFAULTS["timeout_pre"],
        metavar="S",
        help=f"support extraction deadline in seconds (default {DEFAULTS['timeout_pre']})",
    )
    p.add_argument(
        "--format",
        choices=["human", "json"],
        default=DEFAULTS["format"],
        help=f"output format (default {DEFAULTS['format']})",
    )
    if counting:
        p.add_argument(
            "--epsilon",
            type=float,
            default=DEFAULTS["epsilon"],
            help=f"multiplicative tolerance (default {DEFAULTS['epsilon']})",
        )
        p.add_argument(
            "--delta",
            type=float,
            default=DEFAULTS["delta"],
            help=f"failure probability (default {DEFAULTS['delta']})",
        )
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help=f"RNG seed; required with --format json (default {DEFAULTS['seed']})",
        )
        p.add_argument(
            "--timeout-count",
            type=float,
            default=DEFAULTS["timeout_count"],
            metavar="S",
            help=f"counting deadline in seconds (default {DEFAULTS['timeout_count']})",
        )


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="ubcount", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    fs = sub.add_parser("find-support", help="compute an IS or UBS for a DIMACS file")
    fs.add_argument("cnf", help="DIMACS CNF file with c ind lines (or use --proj)")
    fs.add_argument("--mode", choices=["is", "ubs"], default="ubs")
    fs.add_argument("--proj", metavar="FILE", help="projection variables, whitespace separated")
    _add_common(fs, counting=False)

    ct = sub.add_parser("count", help="count models projected onto the projection set")
    ct.add_argument("cnf", help="DIMACS CNF file with c ind lines (or use --proj)")
    ct.add_argument("--mode", choices=["is", "ubs", "none"], default="ubs")
    ct.add_argument("--exact", action="store_true", help="exact enumeration instead of PAC counting")
    ct.add_argument("--proj", metavar="FILE", help="projection variables, whitespace separated")
    _add_common(ct, counting=True)

    be = sub.add_parser("bench", help="run the builtin family suite or emit family files")
    be.add_argument("--gen-theorem1", type=int, metavar="N", help="write the hidden-index family instance for N")
    be.add_argument("--gen-theorem2", type=int, metavar="N", help="write the one-hot family instance for N")
    be.add_argument("--max-n", type=int, default=16, help="largest family size in the builtin suite (default 16)")
    be.add_argument("--workers", type=int, default=1, help="instance-level worker threads (default 1)")
    be.add_argument("--out", metavar="DIR", default=".", help="output directory (default .)")
    _add_common(be, counting=True)

    return top


def _emit(pairs: list[tuple[str, object]], fmt: str) -> None:
    if fmt == "json":
        obj = {k: v for k, v in pairs}
        sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        for k, v in pairs:
            if isinstance(v, (list, tuple)):
                v = " ".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            sys.stdout.write(f"{k}={v}\n")


def _load_instance(args) -> tuple[Formula, ProjectionSet]:
    try:
        text = Path(args.cnf).read_bytes()
    except OSError as e:
        print(f"ubcount: cannot read {args.cnf}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    try:
        formula, proj = parse_dimacs(text)
    except DimacsParseError as e:
        print(f"ubcount: parse error in {args.cnf}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    if args.proj:
        try:
            toks = Path(args.proj).read_text().split()
        except OSError as e:
            print(f"ubcount: cannot read {args.proj}: {e}", file=sys.stderr)
            raise SystemExit(EXIT_PARSE)
        try:
            vars = [int(t) for t in toks]
        except ValueError:
            print(f"ubcount: non-integer token in {args.proj}", file=sys.stderr)
            raise SystemExit(EXIT_PARSE)
        vars = [v for v in vars if v != 0]  # tolerate a DIMACS-style trailing 0
        if any(v < 0 or v > formula.num_vars for v in vars):
            print(f"ubcount: projection variable out of range in {args.proj}", file=sys.stderr)
            raise SystemExit(EXIT_PARSE)
        proj = ProjectionSet.of(vars)
    if proj is None:
        print(
            "ubcount: no projection set: the file has no 'c ind' lines and no --proj was given",
            file=sys.stderr,
        )
        raise SystemExit(EXIT_USAGE)
    return formula, proj


def _seed_for(args) -> int:
    if args.seed is None:
        if args.format == "json":
            print(
                "ubcount: --seed is required with --format json "
                "(structured results must be replayable)",
                file=sys.stderr,
            )
            raise SystemExit(EXIT_USAGE)
        return DEFAULTS["seed"]
    return args.seed


def cmd_find_support(args) -> int:
    formula, proj = _load_instance(args)
    cfg = SolverConfig(conflict_limit=args.conflict_limit)
    t0 = time.monotonic()
    if args.mode == "is":
        support = find_is(formula, proj, cfg=cfg, deadline=args.timeout_pre)
    else:
        support = find_ubs(
            formula,
            proj,
            strategy=_STRATEGIES[args.strategy],
            cfg=cfg,
            deadline=args.timeout_pre,
        )
    pre_time = time.monotonic() - t0
    budget_kept = sum(1 for v in support.stats.values() if v == "budget-kept")
    pairs: list[tuple[str, object]] = [
        ("kind", support.kind.value),
        ("size", support.size),
        ("vars", list(support.vars)),
        ("minimal", support.minimal),
        ("budget_kept", budget_kept),
        ("strategy", args.strategy if args.mode == "ubs" else "proj-only"),
        ("conflict_limit", args.conflict_limit),
        ("deadline_hit", support.deadline_hit),
    ]
    if args.format == "human":
        pairs.append(("pre_time_s", f"{pre_time:.3f}"))
    _emit(pairs, args.format)
    return EXIT_PRE_TIMEOUT if support.deadline_hit else EXIT_OK


def cmd_count(args) -> int:
    formula, proj = _load_instance(args)
    seed = _seed_for(args)
    try:  # CountJobConfig owns the parameter invariants
        CountJobConfig(
            tau_pre=args.timeout_pre,
            tau_count=args.timeout_count,
            seed=seed,
            epsilon=args.epsilon,
            delta=args.delta,
        )
    except ValueError as e:
        print(f"ubcount: {e}", file=sys.stderr)
        return EXIT_USAGE
    solver_cfg = SolverConfig(conflict_limit=args.conflict_limit)
    strategy = _STRATEGIES[args.strategy]
    exit_code = EXIT_OK

    support = None
    support_vars = proj.vars
    if args.mode == "is":
        support = find_is(formula, proj, cfg=solver_cfg, deadline=args.timeout_pre)
        support_vars = support.vars
        if support.deadline_hit:
            exit_code = EXIT_PRE_TIMEOUT
    elif args.mode == "ubs":
        support = find_ubs(
            formula, proj, strategy=strategy, cfg=solver_cfg, deadline=args.timeout_pre
        )
        if support.deadline_hit:
            support_vars = proj.vars
            exit_code = EXIT_PRE_TIMEOUT
        else:
            support_vars = support.vars

    pairs: list[tuple[str, object]] = []
    try:
        if args.exact:
            exact = count_exact_projected(formula, support_vars)
            mantissa, exponent = exact.value, 0
        else:
            count = approx_count(
                formula,
                support_vars,
                args.epsilon,
                args.delta,
                np.random.default_rng(seed),
                deadline=args.timeout_count,
                support_used=support,
            )
            mantissa, exponent = count.mantissa, count.exponent
        pairs.append(("status", "ok"))
        pairs.append(("count", f"{mantissa}*2^{exponent}"))
        pairs.append(("mantissa", mantissa))
        pairs.append(("exponent", exponent))
    except UnknownCountError as e:
        pairs.append(("status", "unknown"))
        pairs.append(("reason", e.reason))
        exit_code = EXIT_COUNT_TIMEOUT

    pairs.extend(
        [
            ("exact", bool(args.exact)),
            ("epsilon", args.epsilon),
            ("delta", args.delta),
            ("seed", seed),
            ("mode", args.mode),
            ("support_size", len(support_vars)),
            ("support_minimal", support.minimal if support else None),
            ("deadline_hit", bool(support.deadline_hit) if support else False),
        ]
    )
    _emit(pairs, args.format)
    return exit_code


def cmd_bench(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.gen_theorem1 is not None or args.gen_theorem2 is not None:
        written = []
        try:
            if args.gen_theorem1 is not None:
                inst = bench_mod.gen_theorem1(args.gen_theorem1)
                path = out_dir / f"{inst.name}.cnf"
                path.write_text(emit_dimacs(inst.formula, inst.projection))
                written.append(str(path))
            if args.gen_theorem2 is not None:
                inst = bench_mod.gen_theorem2(args.gen_theorem2)
                path = out_dir / f"{inst.name}.cnf"
                path.write_text(emit_dimacs(inst.formula, inst.projection))
                written.append(str(path))
        except ValueError as e:
            print(f"ubcount: {e}", file=sys.stderr)
            return EXIT_USAGE
        _emit([("written", written)], args.format)
        return EXIT_OK

    seed = _seed_for(args)
    job = CountJobConfig(
        tau_pre=args.timeout_pre,
        tau_count=args.timeout_count,
        seed=seed,
        epsilon=args.epsilon,
        delta=args.delta,
    )
    instances = bench_mod.builtin_suite(args.max_n)
    records = bench_mod.compare_run(
        instances,
        job,
        strategy=_STRATEGIES[args.strategy],
        solver_cfg=SolverConfig(conflict_limit=args.conflict_limit),
        workers=args.workers,
    )
    records_path = out_dir / "records.jsonl"
    csv_path = out_dir / "summary.csv"
    bench_mod.write_records(records, str(records_path))
    csv_path.write_text(bench_mod.records_to_csv(records))

    finite_errors = [
        r.error for r in records if r.error is not None and abs(r.error) != float("inf")
    ]
    pairs: list[tuple[str, object]] = [
        ("instances", len(instances)),
        ("records", len(records)),
        ("records_file", str(records_path)),
        ("csv_file", str(csv_path)),
        ("solved", sum(1 for r in records if r.status == "solved")),
        ("seed", seed),
    ]
    if finite_errors:
        # both aggregation conventions, labelled: the geometric mean of
        # |log2 ratio| and the plain signed mean of log2 ratios
        gm, subs = bench_mod.geomean_abs(finite_errors)
        pairs.append(("geomean_abs_error", round(gm, 9)))
        pairs.append(("geomean_zero_substitutions", subs))
        pairs.append(("mean_signed_error", round(sum(finite_errors) / len(finite_errors), 9)))
    if args.format == "human":
        timeout = max(args.timeout_pre, args.timeout_count)
        pairs.append(("par2_s", f"{bench_mod.par2(records, timeout):.3f}"))
    _emit(pairs, args.format)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "find-support":
        code = cmd_find_support(args)
    elif args.command == "count":
        code = cmd_count(args)
    else:
        code = cmd_bench(args)
    return code


if __name__ == "__main__":
    sys.exit(main())
