"""Upper-bound projected model counting for CNF formulas.

Core pieces: a CNF/DIMACS data model (:mod:`ubcount.cnf`), a budgeted CDCL
engine (:mod:`ubcount.engine`), SAT-based support-set extraction
(:mod:`ubcount.support`), exact and hashing-based projected counters
(:mod:`ubcount.counting`), and benchmark generators plus evaluation
metrics (:mod:`ubcount.bench`).
"""

from .cnf import (
    Clause,
    DimacsParseError,
    Formula,
    ProjectionSet,
    XorClause,
    emit_dimacs,
    evaluate,
    parse_dimacs,
    project,
    rename_apart,
)
from .engine import SolveOutcome, Solver, SolverConfig, Verdict, blast_xor, solve
from .support import (
    SupportKind,
    SupportSet,
    VarOrderStrategy,
    build_padoa,
    build_xi,
    find_is,
    find_ubs,
    verify_is_bruteforce,
    verify_ubs_bruteforce,
)
from .counting import (
    ApproxCount,
    CountJobConfig,
    ExactCount,
    UnknownCountError,
    approx_count,
    count_exact_projected,
    sample_xor,
    ubcount,
)
from .bench import (
    FamilyInstance,
    RunRecord,
    compare_run,
    error_metric,
    gen_random,
    gen_theorem1,
    gen_theorem2,
    geomean_abs,
    par2,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxCount",
    "Clause",
    "CountJobConfig",
    "DimacsParseError",
    "ExactCount",
    "FamilyInstance",
    "Formula",
    "ProjectionSet",
    "RunRecord",
    "SolveOutcome",
    "Solver",
    "SolverConfig",
    "SupportKind",
    "SupportSet",
    "UnknownCountError",
    "VarOrderStrategy",
    "Verdict",
    "XorClause",
    "approx_count",
    "blast_xor",
    "build_padoa",
    "build_xi",
    "compare_run",
    "count_exact_projected",
    "emit_dimacs",
    "error_metric",
    "evaluate",
    "find_is",
    "find_ubs",
    "gen_random",
    "gen_theorem1",
    "gen_theorem2",
    "geomean_abs",
    "par2",
    "parse_dimacs",
    "project",
    "rename_apart",
    "sample_xor",
    "solve",
    "ubcount",
    "verify_is_bruteforce",
    "verify_ubs_bruteforce",
]
