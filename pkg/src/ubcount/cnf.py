"""CNF formulas, projections, assignments, and DIMACS I/O.

Literals use the DIMACS convention throughout: a literal is a nonzero
signed integer, ``-v`` is the negation of variable ``v``, variables are
1-based.  All container types are immutable after construction and can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

Var = int
Lit = int
Assignment = Mapping[Var, bool]


class DimacsParseError(ValueError):
    """Raised on malformed DIMACS input; carries the offending line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def var_of(lit: Lit) -> Var:
    return abs(lit)


def neg(lit: Lit) -> Lit:
    return -lit


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals, duplicate-free after normalization."""

    lits: tuple[Lit, ...]

    @classmethod
    def of(cls, lits: Iterable[Lit]) -> "Clause":
        """Build a clause, dropping duplicate literals (first occurrence wins)."""
        seen: set[Lit] = set()
        out: list[Lit] = []
        for l in lits:
            l = int(l)
            if l == 0:
                raise ValueError("literal 0 is not allowed inside a clause")
            if l not in seen:
                seen.add(l)
                out.append(l)
        return cls(tuple(out))

    @property
    def is_tautology(self) -> bool:
        pos = {l for l in self.lits if l > 0}
        return any(-l in pos for l in self.lits if l < 0)

    def max_var(self) -> Var:
        return max((abs(l) for l in self.lits), default=0)

    def __iter__(self) -> Iterator[Lit]:
        return iter(self.lits)

    def __len__(self) -> int:
        return len(self.lits)


@dataclass(frozen=True)
class XorClause:
    """A parity constraint: XOR of ``vars`` must equal ``rhs``.

    ``vars`` is kept sorted and duplicate-free; duplicate pairs cancel
    (x xor x = 0).  An empty constraint with ``rhs=True`` is unsatisfiable,
    with ``rhs=False`` vacuous.
    """

    vars: tuple[Var, ...]
    rhs: bool

    @classmethod
    def of(cls, vars: Iterable[Var], rhs: bool) -> "XorClause":
        counts: dict[Var, int] = {}
        for v in vars:
            v = int(v)
            if v <= 0:
                raise ValueError("XOR constraints range over positive variable ids")
            counts[v] = counts.get(v, 0) + 1
        kept = tuple(sorted(v for v, c in counts.items() if c % 2 == 1))
        return cls(kept, bool(rhs))

    def max_var(self) -> Var:
        return max(self.vars, default=0)

    def __len__(self) -> int:
        return len(self.vars)


@dataclass(frozen=True)
class Formula:
    """A CNF formula with optional native XOR constraints.

    ``num_vars`` may exceed the number of occurring variables (gap
    variables are allowed, matching DIMACS practice).
    """

    num_vars: int
    clauses: tuple[Clause, ...] = ()
    xors: tuple[XorClause, ...] = ()

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        top = 0
        for c in self.clauses:
            top = max(top, c.max_var())
        for x in self.xors:
            top = max(top, x.max_var())
        if top > self.num_vars:
            raise ValueError(
                f"variable {top} exceeds declared num_vars={self.num_vars}"
            )

    @classmethod
    def of(
        cls,
        num_vars: int,
        clauses: Iterable[Iterable[Lit]] = (),
        xors: Iterable[XorClause] = (),
    ) -> "Formula":
        return cls(num_vars, tuple(Clause.of(c) for c in clauses), tuple(xors))

    def support(self) -> frozenset[Var]:
        """Variables that actually occur in clauses or XOR constraints."""
        occ: set[Var] = set()
        for c in self.clauses:
            occ.update(abs(l) for l in c.lits)
        for x in self.xors:
            occ.update(x.vars)
        return frozenset(occ)

    def occurrence_counts(self) -> dict[Var, int]:
        occ: dict[Var, int] = {}
        for c in self.clauses:
            for l in c.lits:
                occ[abs(l)] = occ.get(abs(l), 0) + 1
        for x in self.xors:
            for v in x.vars:
                occ[v] = occ.get(v, 0) + 1
        return occ


@dataclass(frozen=True)
class ProjectionSet:
    """The sorted, duplicate-free set of variables counting projects onto."""

    vars: tuple[Var, ...]

    @classmethod
    def of(cls, vars: Iterable[Var]) -> "ProjectionSet":
        vs = sorted({int(v) for v in vars})
        if vs and vs[0] <= 0:
            raise ValueError("projection variables must be positive")
        return cls(tuple(vs))

    def __iter__(self) -> Iterator[Var]:
        return iter(self.vars)

    def __len__(self) -> int:
        return len(self.vars)

    def __contains__(self, v: object) -> bool:
        return v in self.vars


def parse_dimacs(text: str | bytes) -> tuple[Formula, ProjectionSet | None]:
    """Parse a DIMACS CNF document.

    Projection variables are read from ``c ind v1 ... vk 0`` comment lines;
    multiple lines union.  Returns the projection as ``None`` when no such
    line is present.  Clauses may span lines; each must terminate with 0.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")

    num_vars: int | None = None
    declared_clauses = 0
    clauses: list[Clause] = []
    proj: set[Var] = set()
    saw_ind = False
    pending: list[Lit] = []
    pending_line = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s:
            continue
        if s == "%":
            break  # SATLIB-style trailer
        if s.startswith("c"):
            fields = s.split()
            if len(fields) >= 2 and fields[0] == "c" and fields[1] == "ind":
                saw_ind = True
                toks = fields[2:]
                if not toks or toks[-1] != "0":
                    raise DimacsParseError(
                        "projection line missing terminating 0", line_no
                    )
                for t in toks[:-1]:
                    try:
                        v = int(t)
                    except ValueError:
                        raise DimacsParseError(
                            f"non-integer token {t!r} in projection line", line_no
                        ) from None
                    if v <= 0:
                        raise DimacsParseError(
                            f"invalid projection variable {v}", line_no
                        )
                    proj.add(v)
            continue
        if s.startswith("p"):
            if num_vars is not None:
                raise DimacsParseError("duplicate problem header", line_no)
            fields = s.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsParseError(f"malformed header {s!r}", line_no)
            try:
                num_vars = int(fields[2])
                declared_clauses = int(fields[3])
            except ValueError:
                raise DimacsParseError(f"malformed header {s!r}", line_no) from None
            if num_vars < 0 or declared_clauses < 0:
                raise DimacsParseError("negative counts in header", line_no)
            continue
        if num_vars is None:
            raise DimacsParseError("clause data before problem header", line_no)
        if not pending:
            pending_line = line_no
        for t in s.split():
            try:
                l = int(t)
            except ValueError:
                raise DimacsParseError(f"non-integer token {t!r}", line_no) from None
            if l == 0:
                clauses.append(Clause.of(pending))
                pending = []
            else:
                if abs(l) > num_vars:
                    raise DimacsParseError(
                        f"literal {l} exceeds declared {num_vars} variables", line_no
                    )
                pending.append(l)
                pending_line = line_no

    if pending:
        raise DimacsParseError("clause missing terminating 0", pending_line)
    if num_vars is None:
        raise DimacsParseError("missing problem header", 1)
    for v in proj:
        if v > num_vars:
            raise DimacsParseError(
                f"projection variable {v} exceeds declared {num_vars} variables", 1
            )

    formula = Formula(num_vars, tuple(clauses))
    projection = ProjectionSet.of(proj) if saw_ind else None
    return formula, projection


def emit_dimacs(
    f: Formula, p: ProjectionSet | None = None, *, blast_xors: bool = False
) -> str:
    """Serialize a formula (and optional projection) to DIMACS text.

    Output is byte-deterministic: LF line endings, single spaces, clauses
    in stored order.  Native XOR constraints have no DIMACS syntax here;
    they are either blasted to CNF first (``blast_xors=True``) or rejected.
    """
    if f.xors:
        if not blast_xors:
            raise ValueError(
                "formula contains XOR constraints; pass blast_xors=True "
                "or blast explicitly before emitting"
            )
        from .engine import blast_xor

        f = blast_xor(f)

    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    if p is not None:
        lines.append("c ind " + " ".join(str(v) for v in p.vars + (0,)))
    for c in f.clauses:
        lines.append(" ".join(str(l) for l in c.lits) + " 0")
    return "\n".join(lines) + "\n"


def evaluate(f: Formula, assignment: Assignment) -> bool:
    """Truth of ``f`` under a total assignment over 1..num_vars."""
    for v in range(1, f.num_vars + 1):
        if v not in assignment:
            raise ValueError(f"assignment is not total: variable {v} missing")
    for c in f.clauses:
        if not any(assignment[abs(l)] == (l > 0) for l in c.lits):
            return False
    for x in f.xors:
        parity = False
        for v in x.vars:
            parity ^= assignment[v]
        if parity != x.rhs:
            return False
    return True


def project(assignment: Assignment, s: Iterable[Var]) -> dict[Var, bool]:
    """Restrict an assignment to the variable set ``s`` (domain equals s)."""
    out: dict[Var, bool] = {}
    for v in s:
        if v not in assignment:
            raise ValueError(f"variable {v} not in assignment domain")
        out[v] = assignment[v]
    return out


def rename_apart(
    f: Formula, base: int, keep: Iterable[Var]
) -> tuple[Formula, dict[Var, Var]]:
    """Rename every variable outside ``keep`` to a fresh index above ``base``.

    Fresh indices are assigned in ascending order of the original index,
    starting at ``base + 1``.  Returns the renamed formula together with
    the mapping for the renamed variables.
    """
    if base < f.num_vars:
        raise ValueError(f"base {base} must be >= num_vars {f.num_vars}")
    keep_set = set(keep)
    mapping: dict[Var, Var] = {}
    nxt = base + 1
    for v in range(1, f.num_vars + 1):
        if v not in keep_set:
            mapping[v] = nxt
            nxt += 1

    def m(v: Var) -> Var:
        return mapping.get(v, v)

    clauses = tuple(
        Clause(tuple((1 if l > 0 else -1) * m(abs(l)) for l in c.lits))
        for c in f.clauses
    )
    xors = tuple(
        XorClause(tuple(sorted(m(v) for v in x.vars)), x.rhs) for x in f.xors
    )
    return Formula(nxt - 1 if mapping else f.num_vars, clauses, xors), mapping
