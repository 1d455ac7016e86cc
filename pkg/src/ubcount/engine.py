"""SAT decision engine: budgeted CDCL solving and XOR-to-CNF blasting.

The engine is complete modulo its conflict budget and fully deterministic:
identical (formula, assumptions, config) inputs produce identical verdicts
and, when satisfiable, identical models.  A :class:`Solver` instance is
single-threaded; separate instances may run concurrently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernel
from .cnf import Clause, Formula, Lit, Var

DEFAULT_CONFLICT_LIMIT = 100_000
_UNLIMITED = 1 << 62

XOR_CHUNK_WIDTH = 4


@dataclass(frozen=True)
class SolverConfig:
    """Engine knobs.

    ``conflict_limit`` is the per-call budget (``None`` for unlimited); the
    default matches the 100k-conflict regime used for definability queries.
    ``seed`` is carried for reproducibility bookkeeping; the default engine
    uses no randomness, so it does not influence the search.
    """

    conflict_limit: int | None = DEFAULT_CONFLICT_LIMIT
    seed: int = 0
    restart_base: int = 100
    restart_mult: float = 1.5
    var_decay: float = 0.95

    def __post_init__(self):
        if self.conflict_limit is not None and self.conflict_limit < 0:
            raise ValueError("conflict_limit must be nonnegative or None")
        if self.restart_base <= 0 or self.restart_mult < 1.0:
            raise ValueError("invalid restart parameters")
        if not (0.0 < self.var_decay <= 1.0):
            raise ValueError("var_decay must be in (0, 1]")


class Verdict(enum.Enum):
    SATISFIABLE = "sat"
    UNSATISFIABLE = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveOutcome:
    verdict: Verdict
    model: dict[Var, bool] | None
    conflicts_used: int

    @property
    def is_sat(self) -> bool:
        return self.verdict is Verdict.SATISFIABLE

    @property
    def is_unsat(self) -> bool:
        return self.verdict is Verdict.UNSATISFIABLE

    @property
    def is_unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN


class Solver:
    """Incremental clause container around the search kernel.

    Clauses can be appended (amortized) and truncated back to a mark, which
    is how the counting layer pushes and pops XOR constraint levels.  Each
    ``solve``/``count_projections`` call runs the kernel from scratch over
    the current clause set; learned clauses do not persist between calls.
    """

    def __init__(self, formula: Formula | None = None, cfg: SolverConfig | None = None):
        self.cfg = cfg or SolverConfig()
        self.num_vars = 0
        self._flat = np.empty(1024, dtype=np.int32)
        self._bounds = np.empty(256, dtype=np.int64)
        self._bounds[0] = 0
        self._flat_used = 0
        self._n_clauses = 0
        if formula is not None:
            if formula.xors:
                raise ValueError(
                    "native XOR constraints must be blasted first (see blast_xor)"
                )
            self.ensure_vars(formula.num_vars)
            for c in formula.clauses:
                if c.is_tautology:
                    continue  # always satisfied, irrelevant to the search
                self.add_clause(c.lits)

    def ensure_vars(self, n: int) -> None:
        if n > self.num_vars:
            self.num_vars = int(n)

    def add_clause(self, lits: Sequence[Lit]) -> None:
        """Append a clause of distinct literals (callers keep them normalized)."""
        n = len(lits)
        if self._flat_used + n > self._flat.size:
            self._flat = np.resize(self._flat, max(self._flat.size * 2, self._flat_used + n))
        for i, l in enumerate(lits):
            v = abs(l)
            if v == 0:
                raise ValueError("literal 0 in clause")
            if v > self.num_vars:
                self.ensure_vars(v)
            self._flat[self._flat_used + i] = l
        self._flat_used += n
        if self._n_clauses + 2 > self._bounds.size:
            self._bounds = np.resize(self._bounds, self._bounds.size * 2)
        self._n_clauses += 1
        self._bounds[self._n_clauses] = self._flat_used

    def add_clauses(self, clauses: Iterable[Sequence[Lit]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def mark(self) -> tuple[int, int, int]:
        """Snapshot of (clause count, literal count, num_vars) for truncation."""
        return (self._n_clauses, self._flat_used, self.num_vars)

    def truncate(self, mark: tuple[int, int, int]) -> None:
        n_clauses, flat_used, num_vars = mark
        if n_clauses > self._n_clauses or flat_used > self._flat_used:
            raise ValueError("cannot truncate forward")
        self._n_clauses = n_clauses
        self._flat_used = flat_used
        self.num_vars = num_vars

    def _kernel_args(self, assumptions: Sequence[Lit]):
        for l in assumptions:
            if abs(l) == 0 or abs(l) > self.num_vars:
                raise ValueError(f"assumption literal {l} out of range")
        return (
            np.asarray(self._flat[: self._flat_used], dtype=np.int32),
            np.asarray(self._bounds[: self._n_clauses + 1], dtype=np.int64),
            np.asarray(list(assumptions), dtype=np.int32),
        )

    def solve(self, assumptions: Sequence[Lit] = ()) -> SolveOutcome:
        """Decide the current clause set under ``assumptions``.

        Uses the config's conflict budget; an exhausted budget yields the
        UNKNOWN verdict, never an error.
        """
        conflict_limit = self.cfg.conflict_limit
        flat, bounds, assume = self._kernel_args(assumptions)
        model_out = np.zeros(self.num_vars + 1, dtype=np.int8)
        status, _count, conflicts = _kernel.run_solver(
            self.num_vars,
            flat,
            bounds,
            assume,
            0,
            np.empty(0, dtype=np.int32),
            0,
            _UNLIMITED if conflict_limit is None else int(conflict_limit),
            self.cfg.restart_base,
            self.cfg.restart_mult,
            self.cfg.var_decay,
            model_out,
        )
        if status == _kernel.STATUS_SAT:
            model = {v: bool(model_out[v]) for v in range(1, self.num_vars + 1)}
            return SolveOutcome(Verdict.SATISFIABLE, model, int(conflicts))
        if status == _kernel.STATUS_UNSAT:
            return SolveOutcome(Verdict.UNSATISFIABLE, None, int(conflicts))
        return SolveOutcome(Verdict.UNKNOWN, None, int(conflicts))

    def count_projections(
        self,
        proj: Sequence[Var],
        bound: int,
        conflict_limit: int | None = None,
    ) -> tuple[int, bool, bool, int]:
        """Enumerate distinct projections onto ``proj`` up to ``bound``.

        ``conflict_limit`` is a total budget across the enumeration and
        defaults to unlimited (counting queries, unlike definability
        queries, are exact by default).  Returns (count, complete, unknown,
        conflicts_used): ``complete`` means the enumeration finished below
        the bound; ``unknown`` means the budget ran out first.
        """
        if bound < 1:
            raise ValueError("bound must be >= 1")
        proj_arr = np.asarray(sorted(set(int(v) for v in proj)), dtype=np.int32)
        if proj_arr.size and (proj_arr[0] < 1 or proj_arr[-1] > self.num_vars):
            raise ValueError("projection variable out of range")
        flat, bounds, assume = self._kernel_args(())
        model_out = np.zeros(1, dtype=np.int8)
        status, count, conflicts = _kernel.run_solver(
            self.num_vars,
            flat,
            bounds,
            assume,
            1,
            proj_arr,
            int(bound),
            _UNLIMITED if conflict_limit is None else int(conflict_limit),
            self.cfg.restart_base,
            self.cfg.restart_mult,
            self.cfg.var_decay,
            model_out,
        )
        complete = status == _kernel.STATUS_ENUM_DONE
        unknown = status == _kernel.STATUS_UNKNOWN
        return int(count), complete, unknown, int(conflicts)


def solve(
    f: Formula, assumptions: Sequence[Lit] = (), cfg: SolverConfig | None = None
) -> SolveOutcome:
    """Decide ``f`` under ``assumptions`` with the config's conflict budget.

    ``f`` must be pure CNF; blast native XOR constraints first.
    """
    return Solver(f, cfg or SolverConfig()).solve(assumptions)


def _encode_parity(lits_vars: Sequence[Var], rhs: bool) -> list[tuple[Lit, ...]]:
    """Direct CNF encoding of XOR(vars) = rhs: 2^(k-1) clauses of width k."""
    k = len(lits_vars)
    out = []
    for mask in range(1 << k):
        ones = bin(mask).count("1")
        if (ones & 1) != (1 if rhs else 0):
            # this sign pattern violates the parity; forbid the assignment
            # where exactly the mask-selected vars are true
            clause = tuple(
                -lits_vars[i] if (mask >> i) & 1 else lits_vars[i] for i in range(k)
            )
            out.append(clause)
    return out


def blast_xor(f: Formula, chunk_width: int = XOR_CHUNK_WIDTH) -> Formula:
    """Replace native XOR constraints with an equisatisfiable CNF encoding.

    Long parities are cut into chains of width <= ``chunk_width`` linked by
    fresh auxiliary variables above ``f.num_vars``; every auxiliary is
    functionally determined, so projected model counts over the original
    variables are preserved.
    """
    if chunk_width < 2:
        raise ValueError("chunk_width must be >= 2")
    if not f.xors:
        return Formula(f.num_vars, f.clauses, ())
    clauses: list[Clause] = list(f.clauses)
    next_var = f.num_vars
    for x in f.xors:
        vs = list(x.vars)
        rhs = x.rhs
        if not vs:
            if rhs:
                clauses.append(Clause(()))  # unsatisfiable parity
            continue
        while len(vs) > chunk_width:
            head, vs = vs[: chunk_width - 1], vs[chunk_width - 1 :]
            next_var += 1
            aux = next_var
            # aux := XOR(head)  <=>  XOR(head + [aux]) = 0
            for cl in _encode_parity(head + [aux], False):
                clauses.append(Clause(cl))
            vs.insert(0, aux)
        for cl in _encode_parity(vs, rhs):
            clauses.append(Clause(cl))
    return Formula(next_var, tuple(clauses), ())
