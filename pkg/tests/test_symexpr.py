"""Symbolic expression construction, naming, and simplification."""

from __future__ import annotations

import random

from sspc_testgen.lang import BOOL, BoolV, EnumTy, EnumV, IntTy, IntV
from sspc_testgen.solver import eval_under
from sspc_testgen.symexpr import (
    FALSE,
    TRUE,
    SBinary,
    SConst,
    SIte,
    SSelect,
    SUnary,
    Sym,
    SymbolId,
    pc_symbols,
    simplify,
)

LOCK = EnumTy("Lock", ("UNLOCKED", "LOCKED"))


def sym(path: str, ty, seq: int = 1) -> Sym:
    return Sym(SymbolId(path, "t", seq), ty)


def test_symbol_name_rendering_matches_convention():
    sid = SymbolId("inC.ctrl", "enum Lock", 2)
    assert sid.render() == "field: inC.ctrl, type: enum Lock, sequence: 2"


def test_constant_equality_folds():
    e = SBinary("==", SConst(EnumV("Lock", 1), LOCK), SConst(EnumV("Lock", 1), LOCK), BOOL)
    assert simplify(e) == TRUE


def test_select_with_constant_index_projects():
    s0, s1 = sym("m0", LOCK), sym("m1", LOCK)
    e = SSelect((s0, s1), SConst(IntV(1), IntTy(1, 1)), LOCK)
    assert simplify(e) == s1


def test_ite_with_constant_condition_selects_branch():
    a, b = sym("a", LOCK), sym("b", LOCK)
    assert simplify(SIte(FALSE, a, b, LOCK)) == b
    assert simplify(SIte(TRUE, a, b, LOCK)) == a


def test_double_negation_removed():
    a = sym("a", BOOL)
    assert simplify(SUnary("!", SUnary("!", a, BOOL), BOOL)) == a


def test_boolean_identities():
    a = sym("a", BOOL)
    assert simplify(SBinary("&&", TRUE, a, BOOL)) == a
    assert simplify(SBinary("&&", a, FALSE, BOOL)) == FALSE
    assert simplify(SBinary("||", FALSE, a, BOOL)) == a
    assert simplify(SBinary("||", a, TRUE, BOOL)) == TRUE


def test_simplify_is_idempotent():
    a = sym("a", IntTy(0, 5))
    exprs = [
        SBinary("+", a, SConst(IntV(0), IntTy(0, 0)), IntTy(0, 5)),
        SUnary("!", SBinary("==", a, a, BOOL), BOOL),
        SSelect((a, SConst(IntV(1), IntTy(1, 1))), sym("i", IntTy(0, 1)), IntTy(0, 5)),
    ]
    for e in exprs:
        once = simplify(e)
        assert simplify(once) == once


def _random_expr(rng: random.Random, syms: list[Sym], depth: int = 0):
    ity = IntTy(0, 3)
    if depth >= 3 or rng.random() < 0.3:
        choice = rng.randrange(3)
        if choice == 0:
            return rng.choice(syms)
        if choice == 1:
            return SConst(IntV(rng.randint(0, 3)), ity)
        return SConst(BoolV(rng.random() < 0.5), BOOL)

    def int_arg():
        e = _random_expr(rng, syms, depth + 1)
        return e if isinstance(e.ty, IntTy) else SConst(IntV(rng.randint(0, 3)), ity)

    def bool_arg():
        e = _random_expr(rng, syms, depth + 1)
        return e if e.ty == BOOL else SBinary("==", e, SConst(IntV(1), ity), BOOL)

    op = rng.choice(["&&", "||", "!", "==", "<", "+", "ite", "select"])
    if op == "!":
        return SUnary("!", bool_arg(), BOOL)
    if op in ("&&", "||"):
        return SBinary(op, bool_arg(), bool_arg(), BOOL)
    if op in ("==", "<"):
        return SBinary(op, int_arg(), int_arg(), BOOL)
    if op == "+":
        return SBinary("+", int_arg(), int_arg(), IntTy(0, 6))
    if op == "ite":
        return SIte(bool_arg(), int_arg(), int_arg(), ity)
    return SSelect((int_arg(), int_arg()), rng.choice([s for s in syms if s.ty == IntTy(0, 1)]), ity)


def test_simplify_preserves_meaning_under_random_assignments():
    rng = random.Random(20240811)
    idx = Sym(SymbolId("i", "int 0..1", 1), IntTy(0, 1))
    val = Sym(SymbolId("v", "int 0..3", 1), IntTy(0, 3))
    syms = [idx, val]
    for _ in range(300):
        e = _random_expr(rng, syms)
        s = simplify(e)
        for i in range(2):
            for v in range(4):
                a = {idx.sid: IntV(i), val.sid: IntV(v)}
                assert eval_under(a, e) == eval_under(a, s)


def test_pc_symbols_first_occurrence_order():
    i = sym("i", IntTy(0, 1))
    m0, m1 = sym("m0", LOCK), sym("m1", LOCK)
    select = SSelect((m0, m1), i, LOCK)
    pc = (
        SBinary("==", select, SConst(EnumV("Lock", 1), LOCK), BOOL),
        SBinary("==", i, SConst(IntV(1), IntTy(1, 1)), BOOL),
    )
    assert [s.sid.field_path for s in pc_symbols(pc)] == ["m0", "m1", "i"]
