#!/usr/bin/env python3
"""Compare the compiled and interpreted solver kernels on one workload.

Runs the same mix of decision, enumeration, and support-extraction calls
twice in subprocesses: once with numba enabled and once with
``UBCOUNT_NO_JIT=1``, then prints both timings and the speedup.

    python3 benchmarks/compare_jit.py [--scale N]

``--mode current`` runs the workload in-process and prints its timing
(used internally by the subprocess driver; handy for profiling too).
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload(scale: int) -> dict:
    from ubcount import SolverConfig, find_ubs, solve
    from ubcount.engine import Solver
    from ubcount.bench import gen_random, gen_theorem1

    cfg = SolverConfig(conflict_limit=None)
    # warm-up outside the timed region (JIT compilation or no-op)
    solve(gen_random(4, 6, 3, 0.5, seed=0)[0], cfg=cfg)

    # instance generation is Python-side noise; keep it out of the timings
    decide_instances = [gen_random(20, 85, 3, 0.5, seed=s)[0] for s in range(10 * scale)]
    enum_instances = [gen_random(14, 35, 3, 0.7, seed=s) for s in range(10 * scale)]

    timings = {}
    checksum = 0

    t0 = time.perf_counter()
    for f in decide_instances:
        out = solve(f, cfg=cfg)  # phase-transition density: real search work
        checksum += out.conflicts_used + (1 if out.is_sat else 0)
    timings["decide_hard_20var"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for f, p in enum_instances:
        s = Solver(f, cfg)
        cnt, _, _, _ = s.count_projections(p.vars, bound=1 << 30)
        checksum += cnt
    timings["enumerate_14var"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    inst = gen_theorem1(16)
    for _ in range(scale):
        support = find_ubs(inst.formula, inst.projection)
        checksum += support.size
    timings["find_ubs_family16"] = time.perf_counter() - t0

    timings["total"] = sum(timings.values())
    return {"timings": timings, "checksum": checksum}


def run_mode(disable_jit: bool, scale: int) -> dict:
    env = dict(os.environ)
    env.pop("NUMBA_DISABLE_JIT", None)
    if disable_jit:
        env["UBCOUNT_NO_JIT"] = "1"
    else:
        env.pop("UBCOUNT_NO_JIT", None)
    r = subprocess.run(
        [sys.executable, __file__, "--mode", "current", "--scale", str(scale)],
        capture_output=True,
        text=True,
        env=env,
    )
    if r.returncode != 0:
        print(r.stderr, file=sys.stderr)
        raise SystemExit(1)
    return json.loads(r.stdout)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=1, help="workload multiplier (default 1)")
    ap.add_argument("--mode", choices=["compare", "current"], default="compare")
    args = ap.parse_args()

    if args.mode == "current":
        print(json.dumps(workload(args.scale)))
        return 0

    print(f"workload scale {args.scale}; timing both kernel modes...")
    jit = run_mode(disable_jit=False, scale=args.scale)
    plain = run_mode(disable_jit=True, scale=args.scale)
    if jit["checksum"] != plain["checksum"]:
        print("ERROR: modes disagree on results", file=sys.stderr)
        return 1

    print(f"{'section':<22} {'numba (s)':>12} {'python (s)':>12} {'speedup':>9}")
    for key in jit["timings"]:
        a = jit["timings"][key]
        b = plain["timings"][key]
        print(f"{key:<22} {a:>12.3f} {b:>12.3f} {b / a:>8.1f}x")
    print(f"checksums match ({jit['checksum']})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
