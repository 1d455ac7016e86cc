"""Benchmark families, random instances, evaluation metrics, and the
IS-versus-UBS comparison harness.

Results persist as line-delimited JSON records (one run per line) plus a
CSV summary; both schemas are frozen in the README.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .cnf import Formula, ProjectionSet
from .counting import (
    ApproxCount,
    CountJobConfig,
    UnknownCountError,
    approx_count,
)
from .engine import SolverConfig
from .support import VarOrderStrategy, find_is, find_ubs

GEOMEAN_ZERO_FLOOR = 2.0 ** -10


@dataclass(frozen=True)
class FamilyInstance:
    """A generated formula family member with its known ground truths."""

    name: str
    formula: Formula
    projection: ProjectionSet
    expected_ubs_size: int
    expected_is_size: int
    expected_projected_count: int


def _check_power_of_two(n: int, minimum: int) -> int:
    if n < minimum or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two >= {minimum}, got {n}")
    return int(math.log2(n))


def gen_theorem1(n: int) -> FamilyInstance:
    """Hidden-index family: n models, each identified by a log2(n)-bit tag.

    Variables x_1..x_{n-1} (the projection set) followed by tag bits
    y_1..y_{log2 n} (y_1 most significant).  Model i (1 <= i <= n-1) sets
    exactly x_i and encodes i in the tag bits; the all-zero assignment is
    the n-th model.  Encoded as x_i <-> (tag == i), one equivalence per i.

    The tag bits alone pin down every model, so the smallest upper bound
    support has size log2(n), while no proper subset of the projection set
    works: the smallest independent support is all of x_1..x_{n-1}.
    """
    k = _check_power_of_two(n, 2)
    nx = n - 1
    y = [nx + j for j in range(1, k + 1)]  # y[0] is the most significant bit

    def bit(i: int, j: int) -> int:
        return (i >> (k - 1 - j)) & 1

    clauses: list[tuple[int, ...]] = []
    for i in range(1, n):
        xi = i
        for j in range(k):
            clauses.append((-xi, y[j] if bit(i, j) else -y[j]))
        clauses.append(tuple([xi] + [-y[j] if bit(i, j) else y[j] for j in range(k)]))
    formula = Formula.of(nx + k, clauses)
    return FamilyInstance(
        name=f"theorem1_n{n}",
        formula=formula,
        projection=ProjectionSet.of(range(1, n)),
        expected_ubs_size=k,
        expected_is_size=nx,
        expected_projected_count=n,
    )


def gen_theorem2(n: int) -> FamilyInstance:
    """One-hot family over the same variable layout.

    All tag bits are forced to zero and the x-block is at-most-one, so the
    models are the all-zero assignment plus the n-1 one-hots.  The
    projection set drops x_1, x_2, x_4, ..., x_{n/2} (the powers of two);
    on this family nothing outside the remaining projection variables can
    replace any of them, so they are exactly the smallest upper bound
    support of themselves.
    """
    k = _check_power_of_two(n, 4)
    nx = n - 1
    y = [nx + j for j in range(1, k + 1)]
    clauses: list[tuple[int, ...]] = [(-yj,) for yj in y]
    for i in range(1, nx + 1):
        for j in range(i + 1, nx + 1):
            clauses.append((-i, -j))
    removed = {1 << e for e in range(k)}
    proj = [i for i in range(1, nx + 1) if i not in removed]
    formula = Formula.of(nx + k, clauses)
    return FamilyInstance(
        name=f"theorem2_n{n}",
        formula=formula,
        projection=ProjectionSet.of(proj),
        expected_ubs_size=len(proj),
        expected_is_size=len(proj),
        expected_projected_count=len(proj) + 1,
    )


def gen_random(
    num_vars: int,
    num_clauses: int,
    clause_width: int,
    proj_fraction: float,
    seed: int,
) -> tuple[Formula, ProjectionSet]:
    """Uniform random CNF with a random projection set, deterministic per seed."""
    if num_vars < 1:
        raise ValueError("num_vars must be positive")
    if not (0.0 <= proj_fraction <= 1.0):
        raise ValueError("proj_fraction must be in [0, 1]")
    rng = np.random.default_rng(seed)
    width = min(clause_width, num_vars)
    clauses = []
    for _ in range(num_clauses):
        vs = rng.choice(num_vars, size=width, replace=False) + 1
        signs = rng.integers(0, 2, size=width)
        clauses.append(tuple(int(v) if s else -int(v) for v, s in zip(vs, signs)))
    n_proj = math.ceil(proj_fraction * num_vars)
    proj = rng.choice(num_vars, size=n_proj, replace=False) + 1
    return Formula.of(num_vars, clauses), ProjectionSet.of(int(v) for v in proj)


def error_metric(c_ubs: ApproxCount, c_is: ApproxCount) -> float:
    """log2 of the ratio between the two reported counts.

    A zero count yields a signed infinity marker (excluded from
    aggregates); two zero counts compare equal.
    """
    zu = c_ubs.mantissa == 0
    zi = c_is.mantissa == 0
    if zu and zi:
        return 0.0
    if zu:
        return float("-inf")
    if zi:
        return float("inf")
    return c_ubs.log2() - c_is.log2()


def par2(records: Sequence["RunRecord"], timeout: float) -> float:
    """Mean runtime charging twice the timeout for unsolved records."""
    if not records:
        raise ValueError("PAR-2 of an empty record set is undefined")
    total = 0.0
    for r in records:
        if r.status == "solved":
            total += r.pre_time_s + r.count_time_s
        else:
            total += 2.0 * timeout
    return total / len(records)


def geomean_abs(errors: Sequence[float]) -> tuple[float, int]:
    """Geometric mean of |errors| with zeros floored at 2^-10.

    Returns (mean, number of floored entries).  Non-finite entries must be
    filtered out by the caller (they are excluded from aggregates).
    """
    if not errors:
        raise ValueError("geomean of an empty sequence is undefined")
    substituted = 0
    acc = 0.0
    for e in errors:
        if not math.isfinite(e):
            raise ValueError("non-finite error passed to geomean_abs")
        a = abs(e)
        if a == 0.0:
            a = GEOMEAN_ZERO_FLOOR
            substituted += 1
        acc += math.log(a)
    return math.exp(acc / len(errors)), substituted


@dataclass(frozen=True)
class RunRecord:
    """One pipeline execution on one instance."""

    instance: str
    mode: str  # "is" | "ubs" | "none"
    support_size: int
    pre_time_s: float
    count_time_s: float
    status: str  # "solved" | "timeout" | "memout"
    mantissa: int | None
    exponent: int | None
    epsilon: float
    delta: float
    seed: int
    error: float | None = None

    def to_json(self) -> str:
        d = asdict(self)
        if d["error"] is not None and not math.isfinite(d["error"]):
            d["error"] = str(d["error"])  # inf markers survive the round trip
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        if isinstance(d.get("error"), str):
            d["error"] = float(d["error"])
        return cls(**d)


def run_record_from_cli(line: str, instance: str = "cli") -> RunRecord:
    """Adapt one ``ubcount count --format json`` object into a RunRecord.

    The CLI object deliberately omits wall-clock fields (its structured
    output is byte-stable for a fixed seed), so times come back as zero.
    """
    d = json.loads(line)
    solved = d.get("status") == "ok"
    return RunRecord(
        instance=instance,
        mode=d["mode"],
        support_size=d["support_size"],
        pre_time_s=0.0,
        count_time_s=0.0,
        status="solved" if solved else "timeout",
        mantissa=d.get("mantissa"),
        exponent=d.get("exponent"),
        epsilon=d["epsilon"],
        delta=d["delta"],
        seed=d["seed"],
    )


def write_records(records: Iterable[RunRecord], path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_records(path: str) -> list[RunRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(RunRecord.from_json(line))
    return out


CSV_COLUMNS = [
    "instance",
    "mode",
    "support_size",
    "pre_time_s",
    "count_time_s",
    "status",
    "mantissa",
    "exponent",
    "error",
]


def records_to_csv(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(
            [
                r.instance,
                r.mode,
                r.support_size,
                f"{r.pre_time_s:.6f}",
                f"{r.count_time_s:.6f}",
                r.status,
                "" if r.mantissa is None else r.mantissa,
                "" if r.exponent is None else r.exponent,
                "" if r.error is None else repr(r.error),
            ]
        )
    return buf.getvalue()


def _run_one(
    name: str,
    formula: Formula,
    projection: ProjectionSet,
    mode: str,
    cfg: CountJobConfig,
    strategy: VarOrderStrategy,
    solver_cfg: SolverConfig,
) -> RunRecord:
    t0 = time.monotonic()
    if mode == "is":
        support = find_is(formula, projection, cfg=solver_cfg, deadline=cfg.tau_pre)
        support_vars = support.vars
    elif mode == "ubs":
        support = find_ubs(
            formula, projection, strategy=strategy, cfg=solver_cfg, deadline=cfg.tau_pre
        )
        if support.deadline_hit:
            support_vars = projection.vars
        else:
            support_vars = support.vars
    else:
        support = None
        support_vars = projection.vars
    pre_time = time.monotonic() - t0

    t1 = time.monotonic()
    try:
        count = approx_count(
            formula,
            support_vars,
            cfg.epsilon,
            cfg.delta,
            np.random.default_rng(cfg.seed),
            deadline=cfg.tau_count,
            support_used=support,
        )
        status = "solved"
        mantissa, exponent = count.mantissa, count.exponent
    except UnknownCountError:
        status = "timeout"
        mantissa = exponent = None
    count_time = time.monotonic() - t1

    return RunRecord(
        instance=name,
        mode=mode,
        support_size=len(support_vars),
        pre_time_s=pre_time,
        count_time_s=count_time,
        status=status,
        mantissa=mantissa,
        exponent=exponent,
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        seed=cfg.seed,
    )


def compare_run(
    instances: Sequence[tuple[str, Formula, ProjectionSet]],
    cfg: CountJobConfig,
    strategy: VarOrderStrategy = VarOrderStrategy.NON_PROJECTION_FIRST,
    solver_cfg: SolverConfig | None = None,
    workers: int = 1,
) -> list[RunRecord]:
    """Run the IS and UBS pipelines on every instance.

    Produces two records per instance; the UBS record carries the log-ratio
    error against the paired IS count when both solved.  Instances are
    independent, so they may run on a thread pool; records are merged in
    instance order regardless of schedule.
    """
    solver_cfg = solver_cfg or SolverConfig()

    def run_pair(item: tuple[str, Formula, ProjectionSet]) -> list[RunRecord]:
        name, formula, projection = item
        rec_is = _run_one(name, formula, projection, "is", cfg, strategy, solver_cfg)
        rec_ubs = _run_one(name, formula, projection, "ubs", cfg, strategy, solver_cfg)
        if rec_is.status == "solved" and rec_ubs.status == "solved":
            err = error_metric(
                ApproxCount(rec_ubs.mantissa, rec_ubs.exponent, cfg.epsilon, cfg.delta),
                ApproxCount(rec_is.mantissa, rec_is.exponent, cfg.epsilon, cfg.delta),
            )
            rec_ubs = RunRecord(**{**asdict(rec_ubs), "error": err})
        return [rec_is, rec_ubs]

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run_pair, instances))
    else:
        batches = [run_pair(item) for item in instances]
    return [rec for batch in batches for rec in batch]


def builtin_suite(max_n: int = 16) -> list[tuple[str, Formula, ProjectionSet]]:
    """The default bench workload: both families at small power-of-two sizes."""
    out = []
    n = 4
    while n <= max_n:
        inst1 = gen_theorem1(n)
        out.append((inst1.name, inst1.formula, inst1.projection))
        inst2 = gen_theorem2(n)
        out.append((inst2.name, inst2.formula, inst2.projection))
        n *= 2
    return out
