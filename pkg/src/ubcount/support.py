"""Support-set extraction via SAT definability checks.

Two related pipelines:

* :func:`find_ubs` runs the iterative two-copy elimination loop.  At each
  step a candidate variable z is tested with the formula built by
  :func:`build_xi`; an UNSAT verdict proves z redundant for preserving
  projections, so z is dropped, otherwise z is kept.  The kept set is an
  upper bound support: agreement on it forces agreement on the projection
  set, so counting over it can only overcount.

* :func:`find_is` greedily shrinks the projection set itself using the
  classic Padoa definability check (:func:`build_padoa`), yielding an
  independent support (a subset of the projection set).

Both loops are budgeted: a solver verdict of UNKNOWN keeps the candidate
(always sound, supersets of a valid support stay valid) and marks the
result non-minimal; an expired deadline returns the current kept set plus
every untested candidate, which the loop invariant keeps valid.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from . import bruteforce
from .cnf import Clause, Formula, ProjectionSet, Var, rename_apart
from .engine import SolverConfig, blast_xor, solve

# Canonical unsatisfiable-by-construction formula, returned by build_xi when
# the projection intersects neither the dropped set nor the candidate: the
# empty disjunction is false.
UNSAT_MARKER = Formula(0, (Clause(()),))


class SupportKind(enum.Enum):
    IS = "is"
    UBS = "ubs"


class VarOrderStrategy(enum.Enum):
    """Order in which candidates are *tested for elimination*.

    Variables tested early are eliminated preferentially (the shared copy
    is largest then), so the strategy name describes which variables the
    resulting support is biased toward retaining:

    * NON_PROJECTION_FIRST: projection variables are tested first, leaving
      a support biased toward non-projection variables (the default).
    * PROJECTION_ONLY: non-projection variables are eliminated up front
      (each is a free drop), so the result is a subset of the projection
      set and therefore an independent support.
    * INDEX_ORDER: plain ascending variable index.
    * OCCURRENCE_ASCENDING: rarest variables first, ties by index.
    """

    NON_PROJECTION_FIRST = "nonproj-first"
    PROJECTION_ONLY = "proj-only"
    INDEX_ORDER = "index"
    OCCURRENCE_ASCENDING = "occ-asc"


@dataclass(frozen=True)
class SupportSet:
    """A computed support with provenance.

    ``stats`` records one verdict per considered variable: "kept",
    "dropped", "budget-kept" (solver budget ran out), "deadline-kept"
    (untested when the deadline expired) or "dropped-unused" (variable
    occurs nowhere and is outside the projection set).
    """

    vars: tuple[Var, ...]
    kind: SupportKind
    minimal: bool
    stats: Mapping[Var, str] = field(default_factory=dict)
    deadline_hit: bool = False

    @property
    def size(self) -> int:
        return len(self.vars)

    def __iter__(self):
        return iter(self.vars)

    def __len__(self) -> int:
        return len(self.vars)


def build_xi(
    f: Formula,
    p: ProjectionSet | Iterable[Var],
    j: Iterable[Var],
    q_minus_z: Iterable[Var],
    d: Iterable[Var],
    z: Var,
) -> Formula:
    """Two-copy check formula for dropping candidate ``z``.

    The second copy shares the variables in ``j`` and ``q_minus_z`` and
    renames ``d`` and ``z`` apart; on top, at least one projection variable
    among the renamed ones must disagree between the copies (one selector
    variable per disagreement, plus a clause forcing some selector).  If
    the result is unsatisfiable, every model's projection is pinned down by
    the shared variables alone and ``z`` can be dropped.

    When no projection variable is renamed the disagreement disjunction is
    empty, hence false: the canonical UNSAT marker formula is returned.
    """
    j = set(j)
    q_minus_z = set(q_minus_z)
    d = set(d)
    pvars = set(p)
    if z in j or z in q_minus_z or z in d:
        raise ValueError("z must be disjoint from the J/Q/D parts")
    if (j & q_minus_z) or (j & d) or (q_minus_z & d):
        raise ValueError("J, Q\\z and D must be pairwise disjoint")
    missing = f.support() - (j | q_minus_z | d | {z})
    if missing:
        raise ValueError(f"partition does not cover occurring variables: {sorted(missing)}")

    renamed_p = sorted(pvars & (d | {z}))
    if not renamed_p:
        return UNSAT_MARKER

    copy, vmap = rename_apart(f, f.num_vars, keep=j | q_minus_z)
    clauses = list(f.clauses) + list(copy.clauses)
    xors = tuple(f.xors) + tuple(copy.xors)
    sel = copy.num_vars
    selectors = []
    for v in renamed_p:
        v2 = vmap[v]
        sel += 1
        selectors.append(sel)
        clauses.append(Clause((-sel, v, v2)))
        clauses.append(Clause((-sel, -v, -v2)))
    clauses.append(Clause(tuple(selectors)))
    return Formula(sel, tuple(clauses), xors)


def build_padoa(f: Formula, s: Iterable[Var], i: Var) -> Formula:
    """Padoa definability check: is ``i`` a function of ``s - {i}``?

    Builds two copies of ``f`` sharing exactly ``s - {i}`` (variables
    outside ``s`` are renamed apart with no linking constraints) and asserts
    ``i`` true in one copy and false in the other.  Unsatisfiable iff the
    shared variables functionally determine ``i`` over the models.
    """
    s = set(s)
    if i not in s:
        raise ValueError(f"variable {i} must belong to the candidate support")
    copy, vmap = rename_apart(f, f.num_vars, keep=s - {i})
    clauses = list(f.clauses) + list(copy.clauses)
    clauses.append(Clause((i,)))
    clauses.append(Clause((-vmap[i],)))
    return Formula(copy.num_vars, tuple(clauses), tuple(f.xors) + tuple(copy.xors))


def _ordered_candidates(
    f: Formula, pvars: set[Var], strategy: VarOrderStrategy
) -> tuple[list[Var], list[Var]]:
    """(candidates in elimination-test order, unused non-projection vars)."""
    occ = f.occurrence_counts()
    support = set(occ)
    universe = sorted(support | (pvars & set(range(1, f.num_vars + 1))))
    unused_nonproj = [
        v for v in range(1, f.num_vars + 1) if v not in support and v not in pvars
    ]

    def by_occ(vs: Iterable[Var]) -> list[Var]:
        return sorted(vs, key=lambda v: (occ.get(v, 0), v))

    if strategy is VarOrderStrategy.INDEX_ORDER:
        order = list(universe)
    elif strategy is VarOrderStrategy.OCCURRENCE_ASCENDING:
        order = by_occ(universe)
    elif strategy is VarOrderStrategy.NON_PROJECTION_FIRST:
        order = by_occ(v for v in universe if v in pvars) + by_occ(
            v for v in universe if v not in pvars
        )
    elif strategy is VarOrderStrategy.PROJECTION_ONLY:
        order = by_occ(v for v in universe if v not in pvars) + by_occ(
            v for v in universe if v in pvars
        )
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unknown strategy {strategy}")
    return order, unused_nonproj


def find_ubs(
    f: Formula,
    p: ProjectionSet | Iterable[Var],
    strategy: VarOrderStrategy = VarOrderStrategy.NON_PROJECTION_FIRST,
    cfg: SolverConfig | None = None,
    deadline: float | None = None,
    snapshot_hook: Callable[[set[Var], list[Var], set[Var]], None] | None = None,
) -> SupportSet:
    """Compute an upper bound support of ``p`` in ``f``.

    Runs the elimination loop to completion unless ``deadline`` (seconds)
    expires, in which case the kept set plus all untested candidates is
    returned, flagged non-minimal.  ``snapshot_hook``, when given, is
    called with (kept, untested, dropped) at every loop head; tests use it
    to check the loop invariant.
    """
    cfg = cfg or SolverConfig()
    pvars = set(p)
    if any(v < 1 or v > f.num_vars for v in pvars):
        raise ValueError("projection variable out of range")
    order, unused_nonproj = _ordered_candidates(f, pvars, strategy)

    start = time.monotonic()
    kept: set[Var] = set()
    dropped: set[Var] = set()
    stats: dict[Var, str] = {v: "dropped-unused" for v in unused_nonproj}
    queue = list(order)
    had_unknown = False
    deadline_hit = False

    while queue:
        if snapshot_hook is not None:
            snapshot_hook(set(kept), list(queue), set(dropped))
        if deadline is not None and time.monotonic() - start >= deadline:
            deadline_hit = True
            break
        z = queue.pop(0)
        xi = build_xi(f, pvars, kept, set(queue), dropped, z)
        outcome = solve(blast_xor(xi), cfg=cfg)
        if outcome.is_unsat:
            dropped.add(z)
            stats[z] = "dropped"
        elif outcome.is_sat:
            kept.add(z)
            stats[z] = "kept"
        else:
            kept.add(z)
            stats[z] = "budget-kept"
            had_unknown = True
    if snapshot_hook is not None and not deadline_hit:
        snapshot_hook(set(kept), list(queue), set(dropped))

    if deadline_hit:
        for v in queue:
            stats[v] = "deadline-kept"
        result = sorted(kept | set(queue))
    else:
        result = sorted(kept)
    return SupportSet(
        vars=tuple(result),
        kind=SupportKind.UBS,
        minimal=not had_unknown and not deadline_hit,
        stats=stats,
        deadline_hit=deadline_hit,
    )


def find_is(
    f: Formula,
    p: ProjectionSet | Iterable[Var],
    cfg: SolverConfig | None = None,
    deadline: float | None = None,
) -> SupportSet:
    """Greedy Padoa elimination over the projection set.

    Tests each projection variable (rarest first, ties by index) for
    definability from the rest of the current support and drops it when the
    check is UNSAT.  The result is an independent support; it is minimal in
    the no-single-removal sense when no budget verdict occurred.
    """
    cfg = cfg or SolverConfig()
    pvars = sorted(set(p))
    if any(v < 1 or v > f.num_vars for v in pvars):
        raise ValueError("projection variable out of range")
    occ = f.occurrence_counts()
    order = sorted(pvars, key=lambda v: (occ.get(v, 0), v))

    start = time.monotonic()
    support: set[Var] = set(pvars)
    stats: dict[Var, str] = {}
    had_unknown = False
    deadline_hit = False
    for idx, z in enumerate(order):
        if deadline is not None and time.monotonic() - start >= deadline:
            deadline_hit = True
            for v in order[idx:]:
                stats[v] = "deadline-kept"
            break
        psi = build_padoa(f, support, z)
        outcome = solve(blast_xor(psi), cfg=cfg)
        if outcome.is_unsat:
            support.discard(z)
            stats[z] = "dropped"
        elif outcome.is_sat:
            stats[z] = "kept"
        else:
            stats[z] = "budget-kept"
            had_unknown = True
    return SupportSet(
        vars=tuple(sorted(support)),
        kind=SupportKind.IS,
        minimal=not had_unknown and not deadline_hit,
        stats=stats,
        deadline_hit=deadline_hit,
    )


def verify_ubs_bruteforce(
    f: Formula, p: ProjectionSet | Iterable[Var], u: Iterable[Var]
) -> bool:
    """Definitional check by full enumeration: no two models agree on ``u``
    yet differ on ``p``.  Oracle scale only (<= 24 variables)."""
    return bruteforce.is_ubs(f, set(p), set(u))


def verify_is_bruteforce(
    f: Formula, p: ProjectionSet | Iterable[Var], s: Iterable[Var]
) -> bool:
    """Like :func:`verify_ubs_bruteforce` but additionally requires the
    candidate to be a subset of the projection set."""
    pvars = set(p)
    svars = set(s)
    if not svars <= pvars:
        return False
    return bruteforce.is_ubs(f, pvars, svars)
