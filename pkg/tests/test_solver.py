"""Bounded-domain solver: verdicts, canonical assignments, determinism."""

from __future__ import annotations

import itertools
import random

import pytest

from sspc_testgen.lang import BOOL, BoolV, EnumTy, EnumV, IntTy, IntV, domain_size, value_at
from sspc_testgen.solver import (
    MissingSymbolError,
    SolverStats,
    eval_under,
    solve,
)
from sspc_testgen.symexpr import (
    SBinary,
    SConst,
    SIte,
    SSelect,
    SUnary,
    Sym,
    SymbolId,
    pc_symbols,
)

LOCK = EnumTy("Lock", ("UNLOCKED", "LOCKED"))
MIRROR = EnumTy("MirrorState", ("OPEN", "CLOSED"))


def sym(path: str, ty) -> Sym:
    return Sym(SymbolId(path, "t", 1), ty)


def eq(a, b) -> SBinary:
    return SBinary("==", a, b, BOOL)


def const(v, ty) -> SConst:
    return SConst(v, ty)


def brute_force(pc) -> dict | None:
    """Independent enumeration in the solver's canonical order."""
    syms = pc_symbols(pc)
    domains = [[value_at(s.ty, i) for i in range(domain_size(s.ty))] for s in syms]
    for combo in itertools.product(*domains):
        a = {s.sid: v for s, v in zip(syms, combo)}
        if all(eval_under(a, c).value for c in pc):
            return a
    return None


def test_single_equality_sat():
    ctrl = sym("ctrl", LOCK)
    res = solve((eq(ctrl, const(EnumV("Lock", 0), LOCK)),))
    assert res.is_sat
    assert res.assignment == {ctrl.sid: EnumV("Lock", 0)}


def test_contradiction_unsat():
    x = sym("x", IntTy(0, 9))
    pc = (eq(x, const(IntV(5), IntTy(5, 5))), eq(x, const(IntV(6), IntTy(6, 6))))
    assert solve(pc).status == "unsat"


def test_select_case_split_canonical_assignment():
    # frozen from the brute-force enumeration over 2*2*2 assignments
    m0, m1 = sym("m0", MIRROR), sym("m1", MIRROR)
    i = sym("i", IntTy(0, 1))
    closed = const(EnumV("MirrorState", 1), MIRROR)
    pc = (
        eq(SSelect((m0, m1), i, MIRROR), closed),
        eq(i, const(IntV(1), IntTy(1, 1))),
    )
    res = solve(pc)
    assert res.is_sat
    assert res.assignment == {
        m0.sid: EnumV("MirrorState", 0),  # don't-care: first value in canonical order
        m1.sid: EnumV("MirrorState", 1),
        i.sid: IntV(1),
    }
    assert brute_force(pc) == res.assignment


def test_determinism_identical_queries_identical_assignments():
    a, b = sym("a", IntTy(0, 5)), sym("b", IntTy(0, 5))
    pc = (SBinary("<", a, b, BOOL),)
    assert solve(pc).assignment == solve(pc).assignment


def test_monotone_budget():
    xs = [sym(f"x{i}", IntTy(0, 4)) for i in range(6)]
    total = xs[0]
    for x in xs[1:]:
        total = SBinary("+", total, x, IntTy(0, 24))
    pc = (eq(total, const(IntV(20), IntTy(20, 20))),)
    small = solve(pc, budget_ms=10_000)
    assert small.status in ("sat", "unsat")
    assert solve(pc, budget_ms=60_000).status == small.status


def test_timeout_reports_and_counts():
    xs = [sym(f"x{i}", IntTy(0, 9)) for i in range(18)]
    total = xs[0]
    for x in xs[1:]:
        total = SBinary("+", total, x, IntTy(0, 300))
    # unsatisfiable sum forces full search of a 10^18 space
    pc = (SBinary(">", total, const(IntV(500), IntTy(500, 500)), BOOL),)
    stats = SolverStats()
    res = solve(pc, budget_ms=5, stats=stats)
    assert res.status == "timeout"
    assert stats.timeouts == 1 and stats.queries == 1


def test_eval_under_examples():
    ctrl = sym("ctrl", LOCK)
    assert eval_under({ctrl.sid: EnumV("Lock", 1)}, ctrl) == EnumV("Lock", 1)

    auto = sym("auto", BOOL)
    m0 = sym("m0", MIRROR)
    closed = const(EnumV("MirrorState", 1), MIRROR)
    ite = SIte(auto, closed, m0, MIRROR)
    got = eval_under({auto.sid: BoolV(True), m0.sid: EnumV("MirrorState", 0)}, ite)
    assert got == EnumV("MirrorState", 1)

    m1 = sym("m1", MIRROR)
    sel = SSelect((m0, m1), const(IntV(0), IntTy(0, 0)), MIRROR)
    a = {m0.sid: EnumV("MirrorState", 0), m1.sid: EnumV("MirrorState", 1)}
    assert eval_under(a, sel) == EnumV("MirrorState", 0)


def test_eval_under_missing_symbol():
    with pytest.raises(MissingSymbolError):
        eval_under({}, sym("ghost", BOOL))


def test_sat_assignment_covers_all_query_symbols():
    a, b, c = sym("a", BOOL), sym("b", BOOL), sym("c", IntTy(0, 3))
    pc = (SBinary("||", a, SBinary("&&", b, eq(c, const(IntV(2), IntTy(2, 2))), BOOL), BOOL),)
    res = solve(pc)
    assert res.is_sat
    assert set(res.assignment) == {a.sid, b.sid, c.sid}


def test_random_queries_agree_with_enumeration():
    rng = random.Random(7)
    tys = [BOOL, IntTy(0, 3), LOCK]
    for _ in range(200):
        syms = [sym(f"v{i}", rng.choice(tys)) for i in range(rng.randint(1, 5))]
        pc = []
        for _ in range(rng.randint(1, 4)):
            s = rng.choice(syms)
            v = value_at(s.ty, rng.randrange(domain_size(s.ty)))
            atom = eq(s, const(v, s.ty))
            if rng.random() < 0.4:
                atom = SUnary("!", atom, BOOL)
            if rng.random() < 0.3:
                s2 = rng.choice(syms)
                v2 = value_at(s2.ty, rng.randrange(domain_size(s2.ty)))
                atom = SBinary(rng.choice(["&&", "||"]), atom, eq(s2, const(v2, s2.ty)), BOOL)
            pc.append(atom)
        res = solve(tuple(pc))
        expect = brute_force(tuple(pc))
        if expect is None:
            assert res.status == "unsat"
        else:
            assert res.is_sat
            assert all(eval_under(res.assignment, c).value for c in pc)
