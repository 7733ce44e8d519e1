"""Satisfiability of path conditions over bounded domains.

Every symbol ranges over a finite domain (bool, ranged int, enum), so a
backtracking search is complete: given enough budget the answer is
always Sat or Unsat, never a wrong verdict.  The search is canonical --
symbols are assigned in first-occurrence order and values tried
ascending by ordinal -- which makes results deterministic and gives
don't-care symbols the first value of their domain.

Before searching, domains are pruned by unit propagation over the
single-symbol equality/ordinal-comparison conjuncts; Select terms are
resolved by the enumeration itself (the bounded index symbol is just
another search variable).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .lang import BoolV, EnumV, IntV, Value, domain_size, value_at
from .symexpr import (
    PathCondition,
    SBinary,
    SConst,
    SIte,
    SSelect,
    SUnary,
    Sym,
    SymbolId,
    SymExpr,
    pc_symbols,
)

DEFAULT_BUDGET_MS = 100.0

Assignment = dict[SymbolId, Value]


class MissingSymbolError(KeyError):
    """eval_under was handed an assignment missing a referenced symbol."""


@dataclass
class SolveResult:
    """Verdict of one query: 'sat' (with assignment), 'unsat', or 'timeout'."""

    status: str
    assignment: Assignment | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


SAT = "sat"
UNSAT = "unsat"
TIMEOUT = "timeout"


@dataclass
class SolverStats:
    """Query statistics; merged, never shared mutable state."""

    queries: int = 0
    timeouts: int = 0
    max_query_micros: int = 0

    def record(self, micros: int, timed_out: bool) -> None:
        self.queries += 1
        if timed_out:
            self.timeouts += 1
        self.max_query_micros = max(self.max_query_micros, micros)

    def merge(self, other: "SolverStats") -> "SolverStats":
        return SolverStats(
            queries=self.queries + other.queries,
            timeouts=self.timeouts + other.timeouts,
            max_query_micros=max(self.max_query_micros, other.max_query_micros),
        )

    def to_json(self) -> dict:
        return {
            "queries": self.queries,
            "timeouts": self.timeouts,
            "max_query_micros": self.max_query_micros,
        }


def eval_under(assignment: Assignment, e: SymExpr) -> Value:
    """Big-step evaluation of ``e`` under a total assignment."""
    if isinstance(e, SConst):
        return e.value
    if isinstance(e, Sym):
        try:
            return assignment[e.sid]
        except KeyError as exc:
            raise MissingSymbolError(e.sid.render()) from exc
    if isinstance(e, SUnary):
        v = eval_under(assignment, e.operand)
        if e.op == "!":
            assert isinstance(v, BoolV)
            return BoolV(not v.value)
        assert isinstance(v, IntV)
        return IntV(-v.value)
    if isinstance(e, SBinary):
        if e.op == "&&":
            lv = eval_under(assignment, e.left)
            assert isinstance(lv, BoolV)
            return eval_under(assignment, e.right) if lv.value else BoolV(False)
        if e.op == "||":
            lv = eval_under(assignment, e.left)
            assert isinstance(lv, BoolV)
            return BoolV(True) if lv.value else eval_under(assignment, e.right)
        lv = eval_under(assignment, e.left)
        rv = eval_under(assignment, e.right)
        if e.op in ("==", "!="):
            eq = _values_eq(lv, rv)
            return BoolV(eq if e.op == "==" else not eq)
        if e.op in ("<", "<=", ">", ">="):
            assert isinstance(lv, IntV) and isinstance(rv, IntV)
            a, b = lv.value, rv.value
            return BoolV({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op])
        assert isinstance(lv, IntV) and isinstance(rv, IntV)
        if e.op == "+":
            return IntV(lv.value + rv.value)
        if e.op == "-":
            return IntV(lv.value - rv.value)
        return IntV(lv.value * rv.value)
    if isinstance(e, SIte):
        c = eval_under(assignment, e.cond)
        assert isinstance(c, BoolV)
        return eval_under(assignment, e.then if c.value else e.orelse)
    if isinstance(e, SSelect):
        idx = eval_under(assignment, e.index)
        assert isinstance(idx, IntV)
        return eval_under(assignment, e.elems[idx.value])
    raise TypeError(f"unknown symbolic expression {e!r}")


def _values_eq(a: Value, b: Value) -> bool:
    if isinstance(a, BoolV) and isinstance(b, BoolV):
        return a.value == b.value
    if isinstance(a, IntV) and isinstance(b, IntV):
        return a.value == b.value
    if isinstance(a, EnumV) and isinstance(b, EnumV):
        return a.ordinal == b.ordinal
    raise TypeError(f"incomparable values {a!r} and {b!r}")


# -- three-valued partial evaluation ----------------------------------------
#
# _partial returns True/False only when the verdict holds under every
# extension of the partial assignment, else None ("unknown").


def _partial(assignment: Assignment, e: SymExpr):
    if isinstance(e, SConst):
        return e.value
    if isinstance(e, Sym):
        return assignment.get(e.sid)
    if isinstance(e, SUnary):
        v = _partial(assignment, e.operand)
        if v is None:
            return None
        if e.op == "!":
            return BoolV(not v.value)
        return IntV(-v.value)
    if isinstance(e, SBinary):
        if e.op in ("&&", "||"):
            lv = _partial(assignment, e.left)
            rv = _partial(assignment, e.right)
            if e.op == "&&":
                if (lv is not None and not lv.value) or (rv is not None and not rv.value):
                    return BoolV(False)
                if lv is not None and rv is not None:
                    return BoolV(True)
                return None
            if (lv is not None and lv.value) or (rv is not None and rv.value):
                return BoolV(True)
            if lv is not None and rv is not None:
                return BoolV(False)
            return None
        lv = _partial(assignment, e.left)
        if lv is None:
            return None
        rv = _partial(assignment, e.right)
        if rv is None:
            return None
        if e.op in ("==", "!="):
            eq = _values_eq(lv, rv)
            return BoolV(eq if e.op == "==" else not eq)
        if e.op in ("<", "<=", ">", ">="):
            a, b = lv.value, rv.value
            return BoolV({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op])
        if e.op == "+":
            return IntV(lv.value + rv.value)
        if e.op == "-":
            return IntV(lv.value - rv.value)
        return IntV(lv.value * rv.value)
    if isinstance(e, SIte):
        c = _partial(assignment, e.cond)
        if c is None:
            tv = _partial(assignment, e.then)
            ev = _partial(assignment, e.orelse)
            if tv is not None and ev is not None and _values_eq(tv, ev):
                return tv
            return None
        return _partial(assignment, e.then if c.value else e.orelse)
    if isinstance(e, SSelect):
        idx = _partial(assignment, e.index)
        if idx is None:
            return None
        return _partial(assignment, e.elems[idx.value])
    raise TypeError(f"unknown symbolic expression {e!r}")


# -- unit propagation ---------------------------------------------------------


def _prune_domains(pc: PathCondition, syms: list[Sym]) -> dict[SymbolId, list[Value]] | None:
    """Per-symbol candidate domains after propagating single-symbol atoms.

    Only removes values that cannot occur in any satisfying assignment,
    so the lexicographically-minimal solution is preserved.  Returns None
    when some domain empties (proves Unsat).
    """
    domains = {s.sid: [value_at(s.ty, i) for i in range(domain_size(s.ty))] for s in syms}

    def single_symbol_atom(e: SymExpr) -> Sym | None:
        found: Sym | None = None
        stack = [e]
        while stack:
            node = stack.pop()
            if isinstance(node, Sym):
                if found is not None and node.sid != found.sid:
                    return None
                found = node
            elif isinstance(node, SUnary):
                stack.append(node.operand)
            elif isinstance(node, SBinary):
                stack.append(node.left)
                stack.append(node.right)
            elif isinstance(node, (SIte, SSelect)):
                return None  # too structured for cheap propagation
        return found

    for conjunct in pc:
        s = single_symbol_atom(conjunct)
        if s is None:
            continue
        keep = [v for v in domains[s.sid] if _partial({s.sid: v}, conjunct).value]
        if not keep:
            return None
        domains[s.sid] = keep
    return domains


def solve(
    pc: PathCondition,
    budget_ms: float = DEFAULT_BUDGET_MS,
    stats: SolverStats | None = None,
) -> SolveResult:
    """Decide a path condition; complete on bounded domains given budget.

    Sat assignments are verified by re-evaluation before being returned
    and are total over the symbols occurring in the query.  Identical
    queries yield identical assignments (canonical search order).
    """
    start = time.perf_counter()
    deadline = start + budget_ms / 1000.0
    syms = pc_symbols(pc)
    result: SolveResult

    domains = _prune_domains(pc, syms)
    if domains is None:
        result = SolveResult(UNSAT)
        _record(stats, start, False)
        return result

    assignment: Assignment = {}
    order = [s.sid for s in syms]
    pending = list(pc)
    tick = 0

    def search(depth: int) -> str:
        nonlocal tick
        tick += 1
        if tick % 256 == 0 and time.perf_counter() > deadline:
            return TIMEOUT
        # evaluate conjuncts under the partial assignment
        all_true = True
        for conjunct in pending:
            v = _partial(assignment, conjunct)
            if v is None:
                all_true = False
            elif not v.value:
                return UNSAT
        if all_true:
            return SAT
        if depth == len(order):
            return UNSAT
        sid = order[depth]
        for v in domains[sid]:
            assignment[sid] = v
            verdict = search(depth + 1)
            if verdict in (SAT, TIMEOUT):
                return verdict
            del assignment[sid]
        return UNSAT

    verdict = search(0)
    if verdict == SAT:
        for s in syms:
            assignment.setdefault(s.sid, value_at(s.ty, 0))
        for conjunct in pc:
            check = eval_under(assignment, conjunct)
            assert isinstance(check, BoolV) and check.value, "solver produced a non-model"
        result = SolveResult(SAT, dict(assignment))
    elif verdict == UNSAT:
        result = SolveResult(UNSAT)
    else:
        result = SolveResult(TIMEOUT)
    _record(stats, start, verdict == TIMEOUT)
    return result


def _record(stats: SolverStats | None, start: float, timed_out: bool) -> None:
    if stats is not None:
        stats.record(int((time.perf_counter() - start) * 1e6), timed_out)
