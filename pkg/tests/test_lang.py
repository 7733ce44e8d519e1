"""Types, values, leaf paths, guard atoms, and the structural validator."""

from __future__ import annotations

from sspc_testgen.lang import (
    BOOL,
    ArrayTy,
    ArrayV,
    Binary,
    BoolV,
    Const,
    EnumTy,
    EnumV,
    IntTy,
    IntV,
    InVar,
    RecordTy,
    RecordV,
    Unary,
    domain_size,
    first_value,
    flatten_value,
    guard_atoms,
    int_range,
    leaf_paths,
    render_value,
    scalar_domain,
    type_desc,
    unflatten_value,
)

LOCK = EnumTy("Lock", ("UNLOCKED", "LOCKED"))


def test_leaf_paths_unfold_records_and_arrays():
    rec = RecordTy("MirrorData", (("automaticControl", BOOL), ("mirrorState", ArrayTy(LOCK, 2))))
    paths = leaf_paths("mirrorData", rec)
    assert [p for p, _ in paths] == [
        "mirrorData.automaticControl",
        "mirrorData.mirrorState[0]",
        "mirrorData.mirrorState[1]",
    ]


def test_domain_sizes():
    assert domain_size(BOOL) == 2
    assert domain_size(IntTy(3, 7)) == 5
    assert domain_size(LOCK) == 2
    assert domain_size(ArrayTy(LOCK, 2)) == 4


def test_scalar_domain_order_and_first_value():
    assert scalar_domain(IntTy(3, 5)) == [IntV(3), IntV(4), IntV(5)]
    assert first_value(LOCK) == EnumV("Lock", 0)
    assert first_value(BOOL) == BoolV(False)


def test_type_desc_printable_names():
    assert type_desc(BOOL) == "boolean"
    assert type_desc(LOCK) == "enum Lock"
    assert type_desc(IntTy(0, 9)) == "int 0..9"


def test_render_value_scalars_bare_aggregates_tupled():
    arr = ArrayTy(LOCK, 2)
    assert render_value(LOCK, EnumV("Lock", 1)) == "LOCKED"
    assert render_value(BOOL, BoolV(True)) == "true"
    assert render_value(arr, ArrayV((EnumV("Lock", 0), EnumV("Lock", 1)))) == "{(UNLOCKED, LOCKED)}"


def test_flatten_unflatten_round_trip():
    rec = RecordTy("R", (("a", BOOL), ("xs", ArrayTy(IntTy(0, 3), 2))))
    value = RecordV((("a", BoolV(True)), ("xs", ArrayV((IntV(1), IntV(2))))))
    store = flatten_value("r", rec, value)
    assert store == {"r.a": BoolV(True), "r.xs[0]": IntV(1), "r.xs[1]": IntV(2)}
    assert unflatten_value("r", rec, store) == value


def test_int_range_interval_arithmetic():
    a = InVar("a", IntTy(0, 3))
    b = InVar("b", IntTy(1, 2))
    assert int_range(Binary("+", a, b, IntTy(0, 0))) == (1, 5)
    assert int_range(Binary("-", a, b, IntTy(0, 0))) == (-2, 2)
    assert int_range(Binary("*", a, b, IntTy(0, 0))) == (0, 6)
    assert int_range(Unary("neg", a, IntTy(0, 0))) == (-3, 0)


def test_guard_atoms_maximal_non_connective_subexpressions():
    a = InVar("a", BOOL)
    b = InVar("b", BOOL)
    c = InVar("c", BOOL)
    guard = Binary("&&", a, Binary("||", b, c, BOOL), BOOL)
    assert guard_atoms(guard) == [a, b, c]

    cmp = Binary("==", InVar("x", IntTy(0, 9)), Const(IntV(5), IntTy(5, 5)), BOOL)
    assert guard_atoms(Unary("!", cmp, BOOL)) == [cmp]

    # constants are not conditions
    assert guard_atoms(Const(BoolV(True), BOOL)) == []


def test_expression_equality_ignores_positions():
    from sspc_testgen.lang import Pos

    x1 = InVar("x", BOOL, Pos(1, 1))
    x2 = InVar("x", BOOL, Pos(9, 4))
    assert x1 == x2
    assert hash(x1) == hash(x2)
