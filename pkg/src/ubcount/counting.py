"""Projected model counting: exact, approximate, and the upper-bound pipeline.

The approximate counter is a standard hashing counter: random parity
constraints over the counting support halve the projected solution space
until a cell is small enough to enumerate, the cell count scaled by the
number of constraints gives a round estimate, and the median over many
independent rounds gives the reported count with the usual PAC guarantee

    Pr[ true/(1+eps) <= c <= (1+eps)*true ] >= 1 - delta.

:func:`ubcount` composes support extraction with the counter: it counts
over an upper bound support instead of the projection set, which preserves
the one-sided guarantee Pr[ true <= (1+eps)*c ] >= 1 - delta while
typically shrinking the parity constraints.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .cnf import Formula, ProjectionSet, Var, XorClause
from .engine import Solver, SolverConfig, blast_xor
from .support import SupportKind, SupportSet, VarOrderStrategy, find_ubs

DEFAULT_EPSILON = 0.8
DEFAULT_DELTA = 0.2
DEFAULT_TIMEOUT_S = 5000.0


class UnknownCountError(RuntimeError):
    """A count could not be produced within its budget.

    ``reason`` is "deadline" or "conflict-budget"; ``support_used`` is
    attached by the upper-bound pipeline so callers can still report it.
    """

    def __init__(self, reason: str, support_used: SupportSet | None = None):
        super().__init__(f"count unknown: {reason}")
        self.reason = reason
        self.support_used = support_used


@dataclass(frozen=True)
class ExactCount:
    """Exact projected count; ``is_lower_bound`` marks an early stop."""

    value: int
    is_lower_bound: bool = False

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class ApproxCount:
    """Approximate count reported as mantissa * 2^exponent."""

    mantissa: int
    exponent: int
    epsilon: float
    delta: float
    support_used: SupportSet | None = None

    @property
    def value(self) -> int:
        return self.mantissa << self.exponent

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"

    def log2(self) -> float:
        if self.mantissa == 0:
            return float("-inf")
        return math.log2(self.mantissa) + self.exponent


@dataclass(frozen=True)
class CountJobConfig:
    """Budgets and parameters for the upper-bound pipeline.

    ``tau_pre`` bounds support extraction, ``tau_count`` bounds counting
    (both wall-clock seconds; 0 forces the corresponding fallback).
    """

    tau_pre: float
    tau_count: float
    seed: int
    epsilon: float = DEFAULT_EPSILON
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.tau_pre < 0 or self.tau_count < 0:
            raise ValueError("timeouts must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not (0 < self.delta <= 1):
            raise ValueError("delta must be in (0, 1]")


def pivot_for(epsilon: float) -> int:
    """Cell-size threshold of the hashing counter."""
    return math.ceil(9.84 * (1 + epsilon / (1 + epsilon)) * (1 + 1 / epsilon) ** 2)


def rounds_for(delta: float) -> int:
    """Number of independent median rounds."""
    return math.ceil(17 * math.log2(3 / delta))


def count_exact_projected(
    f: Formula,
    s: Iterable[Var],
    limit: int | None = None,
    cfg: SolverConfig | None = None,
) -> ExactCount:
    """Exact |models projected onto s| by solve-and-block enumeration.

    Stops early once ``limit`` distinct projections are found, returning a
    lower-bound marker.  A conflict budget in ``cfg`` that runs out raises
    :class:`UnknownCountError` (the default config here is unlimited).
    """
    svars = sorted(set(s))
    if any(v < 1 or v > f.num_vars for v in svars):
        raise ValueError("projection variable out of range")
    solver = Solver(blast_xor(f), cfg or SolverConfig(conflict_limit=None))
    bound = (1 << 62) if limit is None else int(limit) + 1
    conflict_limit = None if cfg is None else cfg.conflict_limit
    count, complete, unknown, _ = solver.count_projections(
        svars, bound=bound, conflict_limit=conflict_limit
    )
    if unknown:
        raise UnknownCountError("conflict-budget")
    if not complete and limit is not None and count > limit:
        return ExactCount(count, is_lower_bound=True)
    return ExactCount(count)


def sample_xor(s: Iterable[Var], rng: np.random.Generator) -> XorClause:
    """Draw one random parity constraint over ``s``.

    Each variable is included independently with probability 1/2 and the
    parity target is uniform, so the expected constraint size is |s|/2.
    Deterministic given the generator state.
    """
    svars = sorted(set(s))
    if not svars:
        raise ValueError("cannot sample a parity constraint over an empty set")
    include = rng.integers(0, 2, size=len(svars))
    rhs = bool(rng.integers(0, 2))
    return XorClause.of([v for v, bit in zip(svars, include) if bit], rhs)


def _xor_clauses_for(
    x: XorClause, next_aux: int, chunk_width: int = 4
) -> tuple[list[tuple[int, ...]], int]:
    """CNF clauses for one parity constraint with aux vars above next_aux."""
    blasted = blast_xor(Formula(max(next_aux, x.max_var()), (), (x,)), chunk_width)
    return [c.lits for c in blasted.clauses], blasted.num_vars


def approx_count(
    f: Formula,
    s: Iterable[Var],
    epsilon: float = DEFAULT_EPSILON,
    delta: float = DEFAULT_DELTA,
    rng: np.random.Generator | int | None = None,
    *,
    deadline: float | None = None,
    support_used: SupportSet | None = None,
    solver_cfg: SolverConfig | None = None,
) -> ApproxCount:
    """PAC estimate of the model count projected onto ``s``.

    Counts below the pivot are returned exactly (zero parity constraints).
    Otherwise each round stacks random parity constraints over ``s``,
    searches for the first depth whose cell holds at most pivot projected
    models (cell sizes shrink monotonically along one stack, and the search
    starts from the previous round's depth), and estimates cell * 2^depth;
    the median round estimate is reported.  Fixed seeds give bit-identical
    results.  ``deadline`` (seconds) is checked between solver calls;
    expiry raises :class:`UnknownCountError`.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not (0 < delta <= 1):
        raise ValueError("delta must be in (0, 1]")
    svars = sorted(set(s))
    if any(v < 1 or v > f.num_vars for v in svars):
        raise ValueError("projection variable out of range")
    rng = np.random.default_rng(rng)
    start = time.monotonic()

    def check_deadline():
        if deadline is not None and time.monotonic() - start >= deadline:
            raise UnknownCountError("deadline", support_used)

    pivot = pivot_for(epsilon)
    cfg = solver_cfg or SolverConfig(conflict_limit=None)
    solver = Solver(blast_xor(f), cfg)
    base_mark = solver.mark()

    def bounded(bound: int) -> int:
        check_deadline()
        count, _complete, unknown, _ = solver.count_projections(
            svars, bound=bound, conflict_limit=cfg.conflict_limit
        )
        if unknown:
            raise UnknownCountError("conflict-budget", support_used)
        return count

    base = bounded(pivot + 1)
    if base <= pivot:
        return ApproxCount(base, 0, epsilon, delta, support_used)

    t = rounds_for(delta)
    m = len(svars)
    round_seeds = rng.integers(0, 1 << 62, size=t)
    estimates: list[tuple[int, int]] = []  # (cell count, depth)
    prev_depth = 1
    for r in range(t):
        rng_r = np.random.default_rng(int(round_seeds[r]))
        xors = [sample_xor(svars, rng_r) for _ in range(m)]

        depth = 0  # constraints currently on the solver
        cell: dict[int, int] = {}

        def cell_at(i: int) -> int:
            nonlocal depth
            if i in cell:
                return cell[i]
            if i < depth:
                solver.truncate(base_mark)
                depth = 0
            while depth < i:
                clauses, new_top = _xor_clauses_for(xors[depth], solver.num_vars)
                solver.ensure_vars(new_top)
                solver.add_clauses(clauses)
                depth += 1
            cell[i] = bounded(pivot + 1)
            return cell[i]

        # walk from the previous round's depth to the first small cell
        i = min(max(prev_depth, 1), m)
        if cell_at(i) <= pivot:
            while i > 1 and cell_at(i - 1) <= pivot:
                i -= 1
        else:
            i += 1
            while i <= m and cell_at(i) > pivot:
                i += 1
        saturated = i > m
        cell_count = 0 if saturated else cell[i]
        solver.truncate(base_mark)
        if saturated:
            continue  # every depth stayed above the pivot, no estimate
        estimates.append((cell_count, i))
        prev_depth = i

    if not estimates:
        raise UnknownCountError("hash-saturation", support_used)
    ordered = sorted(estimates, key=lambda e: (e[0] << e[1], e[1]))
    mid = ordered[len(ordered) // 2]
    return ApproxCount(mid[0], mid[1], epsilon, delta, support_used)


def ubcount(
    f: Formula,
    p: ProjectionSet | Iterable[Var],
    cfg: CountJobConfig,
    strategy: VarOrderStrategy = VarOrderStrategy.NON_PROJECTION_FIRST,
    solver_cfg: SolverConfig | None = None,
) -> ApproxCount:
    """Upper-bound projected counting pipeline.

    Extracts an upper bound support under ``tau_pre``; if that times out
    the projection set itself is used (always a valid upper bound support
    of itself).  Then runs the PAC counter over the chosen support under
    ``tau_count``.  Guarantee: with probability at least 1 - delta the true
    projected count is at most (1 + epsilon) times the result.
    """
    pvars = tuple(sorted(set(p)))
    pre_cfg = solver_cfg or SolverConfig()
    support = find_ubs(f, pvars, strategy=strategy, cfg=pre_cfg, deadline=cfg.tau_pre)
    if support.deadline_hit:
        support = SupportSet(
            vars=pvars,
            kind=SupportKind.UBS,
            minimal=False,
            stats={v: "fallback" for v in pvars},
            deadline_hit=True,
        )
    rng = np.random.default_rng(cfg.seed)
    return approx_count(
        f,
        support.vars,
        cfg.epsilon,
        cfg.delta,
        rng,
        deadline=cfg.tau_count,
        support_used=support,
    )
