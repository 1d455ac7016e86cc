"""Truth-table oracles for small formulas.

Everything here enumerates the full assignment space with vectorized
bit arithmetic and serves as the independent reference for the solver,
the support algorithms, and the counters.  Capped at 24 variables.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .cnf import Formula, Var

MAX_ORACLE_VARS = 24


def model_codes(f: Formula) -> np.ndarray:
    """All models of ``f`` as assignment bitmasks (bit v-1 = value of var v)."""
    n = f.num_vars
    if n > MAX_ORACLE_VARS:
        raise ValueError(f"formula too large for enumeration ({n} > {MAX_ORACLE_VARS} vars)")
    codes = np.arange(1 << n, dtype=np.uint32)
    ok = np.ones(codes.size, dtype=bool)
    for c in f.clauses:
        sat = np.zeros(codes.size, dtype=bool)
        for l in c.lits:
            bit = (codes >> (abs(l) - 1)) & 1
            sat |= bit == (1 if l > 0 else 0)
        ok &= sat
    for x in f.xors:
        parity = np.zeros(codes.size, dtype=np.uint32)
        for v in x.vars:
            parity ^= (codes >> (v - 1)) & 1
        ok &= parity == (1 if x.rhs else 0)
    return codes[ok]


def pack_bits(codes: np.ndarray, vars: Sequence[Var]) -> np.ndarray:
    """Project assignment bitmasks onto ``vars`` (sorted), repacked densely."""
    out = np.zeros(codes.size, dtype=np.int64)
    for i, v in enumerate(sorted(vars)):
        out |= ((codes >> (v - 1)) & 1).astype(np.int64) << i
    return out


def count_projected(f: Formula, s: Iterable[Var]) -> int:
    """Exact projected model count by exhaustive enumeration."""
    codes = model_codes(f)
    if codes.size == 0:
        return 0
    return int(np.unique(pack_bits(codes, tuple(s))).size)


def _agreement_implies(codes: np.ndarray, a: Sequence[Var], b: Sequence[Var]) -> bool:
    """True iff agreement on ``a`` forces agreement on ``b`` over the models."""
    if codes.size == 0:
        return True
    ka = pack_bits(codes, a)
    kb = pack_bits(codes, b)
    pairs = np.unique(ka << np.int64(MAX_ORACLE_VARS) | kb)
    return pairs.size == np.unique(ka).size


def is_ubs(f: Formula, p: Iterable[Var], u: Iterable[Var]) -> bool:
    return _agreement_implies(model_codes(f), tuple(u), tuple(p))


def is_lbs(f: Formula, p: Iterable[Var], s: Iterable[Var]) -> bool:
    return _agreement_implies(model_codes(f), tuple(p), tuple(s))


def is_gis(f: Formula, p: Iterable[Var], s: Iterable[Var]) -> bool:
    codes = model_codes(f)
    return _agreement_implies(codes, tuple(s), tuple(p)) and _agreement_implies(
        codes, tuple(p), tuple(s)
    )


def _subset_search_universe(f: Formula, p: Iterable[Var]) -> tuple[Var, ...]:
    return tuple(sorted(f.support() | set(p)))


def min_support_size(f: Formula, p: Iterable[Var], kind: str) -> int:
    """Smallest support cardinality of the given kind, by subset search.

    ``kind`` is one of ``"ubs"``, ``"gis"``, ``"is"``.  Exponential in the
    candidate universe; intended for <= ~16 candidate variables.
    """
    p = tuple(sorted(set(p)))
    codes = model_codes(f)
    if kind == "is":
        universe = p
    else:
        universe = _subset_search_universe(f, p)
    for k in range(len(universe) + 1):
        for sub in combinations(universe, k):
            if _agreement_implies(codes, sub, p) and (
                kind != "gis" or _agreement_implies(codes, p, sub)
            ):
                return k
    raise AssertionError("the full universe is always a valid support")


def all_inclusion_minimal_ubs(
    f: Formula, p: Iterable[Var], universe: Iterable[Var] | None = None
) -> list[frozenset[Var]]:
    """Every UBS from which no single variable can be removed.

    Subset enumeration over ``universe`` (default: occurring variables plus
    the projection set); intended for small instances only.
    """
    p = tuple(sorted(set(p)))
    codes = model_codes(f)
    uni = tuple(sorted(set(universe))) if universe is not None else _subset_search_universe(f, p)
    ubs_flags: dict[frozenset[Var], bool] = {}

    def check(sub: frozenset[Var]) -> bool:
        if sub not in ubs_flags:
            ubs_flags[sub] = _agreement_implies(codes, tuple(sub), p)
        return ubs_flags[sub]

    out = []
    for k in range(len(uni) + 1):
        for sub in combinations(uni, k):
            fs = frozenset(sub)
            if check(fs) and all(not check(fs - {v}) for v in fs):
                out.append(fs)
    return out
