"""Symbolic expression trees over bounded domains.

Leaves are either constants or fresh symbols; a symbol records which
input leaf it stands for and at which program call (sequence number) it
was instantiated, rendered exactly as
``field: <path>, type: <type>, sequence: <n>``.

Array reads with a symbolic index become :class:`Select` nodes over the
concrete fixed-length element list; the solver resolves them by
case-splitting on the bounded index domain, so no array theory is
needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .lang import (
    BOOL,
    BoolV,
    EnumTy,
    IntTy,
    IntV,
    Ty,
    Value,
    render_value,
)


@dataclass(frozen=True)
class SymbolId:
    """Identity of one fresh symbol: input leaf, printable type, call number."""

    field_path: str
    type_name: str
    sequence: int

    def render(self) -> str:
        return f"field: {self.field_path}, type: {self.type_name}, sequence: {self.sequence}"


class SymExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Sym(SymExpr):
    sid: SymbolId
    ty: Ty


@dataclass(frozen=True)
class SConst(SymExpr):
    value: Value
    ty: Ty


@dataclass(frozen=True)
class SUnary(SymExpr):
    op: str  # '!' | 'neg'
    operand: SymExpr
    ty: Ty


@dataclass(frozen=True)
class SBinary(SymExpr):
    op: str
    left: SymExpr
    right: SymExpr
    ty: Ty


@dataclass(frozen=True)
class SIte(SymExpr):
    cond: SymExpr
    then: SymExpr
    orelse: SymExpr
    ty: Ty


@dataclass(frozen=True)
class SSelect(SymExpr):
    """Read of a fixed-length array backbone at a (possibly symbolic) index."""

    elems: tuple[SymExpr, ...]
    index: SymExpr
    ty: Ty


# PathCondition: ordered conjunction; append-only along a path, conjunct
# order records branch order.
PathCondition = tuple[SymExpr, ...]


TRUE = SConst(BoolV(True), BOOL)
FALSE = SConst(BoolV(False), BOOL)


def sym_ty(e: SymExpr) -> Ty:
    return e.ty  # type: ignore[attr-defined]


def negate(e: SymExpr) -> SymExpr:
    return simplify(SUnary("!", e, BOOL))


def symbols_of(e: SymExpr) -> Iterator[Sym]:
    """Symbols in ``e``, in left-to-right first-occurrence order.

    Select nodes scan their element backbone before the index; the
    solver's canonical search order relies on this.
    """
    if isinstance(e, Sym):
        yield e
    elif isinstance(e, SUnary):
        yield from symbols_of(e.operand)
    elif isinstance(e, SBinary):
        yield from symbols_of(e.left)
        yield from symbols_of(e.right)
    elif isinstance(e, SIte):
        yield from symbols_of(e.cond)
        yield from symbols_of(e.then)
        yield from symbols_of(e.orelse)
    elif isinstance(e, SSelect):
        for elem in e.elems:
            yield from symbols_of(elem)
        yield from symbols_of(e.index)


def pc_symbols(pc: PathCondition) -> list[Sym]:
    """Distinct symbols of a path condition in first-occurrence order."""
    seen: dict[SymbolId, Sym] = {}
    for conjunct in pc:
        for s in symbols_of(conjunct):
            seen.setdefault(s.sid, s)
    return list(seen.values())


def _const_val(e: SymExpr) -> Value | None:
    return e.value if isinstance(e, SConst) else None


def _values_equal(a: Value, b: Value) -> bool:
    from .lang import EnumV

    if isinstance(a, BoolV) and isinstance(b, BoolV):
        return a.value == b.value
    if isinstance(a, IntV) and isinstance(b, IntV):
        return a.value == b.value
    if isinstance(a, EnumV) and isinstance(b, EnumV):
        return a.ordinal == b.ordinal
    return False


def simplify(e: SymExpr) -> SymExpr:
    """Semantics-preserving simplification; idempotent.

    Performs constant folding, double-negation removal, boolean
    identity/absorbing rules, Ite with constant condition, and Select
    with constant index.
    """
    if isinstance(e, (Sym, SConst)):
        return e
    if isinstance(e, SUnary):
        inner = simplify(e.operand)
        if e.op == "!":
            if isinstance(inner, SConst):
                assert isinstance(inner.value, BoolV)
                return SConst(BoolV(not inner.value.value), BOOL)
            if isinstance(inner, SUnary) and inner.op == "!":
                return inner.operand
            return SUnary("!", inner, BOOL)
        if isinstance(inner, SConst):
            assert isinstance(inner.value, IntV)
            return SConst(IntV(-inner.value.value), e.ty)
        return SUnary("neg", inner, e.ty)
    if isinstance(e, SBinary):
        left = simplify(e.left)
        right = simplify(e.right)
        lv, rv = _const_val(left), _const_val(right)
        if e.op == "&&":
            if lv is not None:
                return right if isinstance(lv, BoolV) and lv.value else FALSE
            if rv is not None:
                return left if isinstance(rv, BoolV) and rv.value else FALSE
        elif e.op == "||":
            if lv is not None:
                return TRUE if isinstance(lv, BoolV) and lv.value else right
            if rv is not None:
                return TRUE if isinstance(rv, BoolV) and rv.value else left
        elif lv is not None and rv is not None:
            if e.op == "==":
                return SConst(BoolV(_values_equal(lv, rv)), BOOL)
            if e.op == "!=":
                return SConst(BoolV(not _values_equal(lv, rv)), BOOL)
            if e.op in ("<", "<=", ">", ">="):
                assert isinstance(lv, IntV) and isinstance(rv, IntV)
                a, b = lv.value, rv.value
                return SConst(BoolV({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[e.op]), BOOL)
            assert isinstance(lv, IntV) and isinstance(rv, IntV)
            if e.op == "+":
                return SConst(IntV(lv.value + rv.value), e.ty)
            if e.op == "-":
                return SConst(IntV(lv.value - rv.value), e.ty)
            if e.op == "*":
                return SConst(IntV(lv.value * rv.value), e.ty)
        if e.op in ("==", "!=") and left == right:
            return TRUE if e.op == "==" else FALSE
        return SBinary(e.op, left, right, e.ty)
    if isinstance(e, SIte):
        cond = simplify(e.cond)
        if isinstance(cond, SConst):
            assert isinstance(cond.value, BoolV)
            return simplify(e.then if cond.value.value else e.orelse)
        then = simplify(e.then)
        orelse = simplify(e.orelse)
        if then == orelse:
            return then
        return SIte(cond, then, orelse, e.ty)
    if isinstance(e, SSelect):
        index = simplify(e.index)
        elems = tuple(simplify(x) for x in e.elems)
        if isinstance(index, SConst):
            assert isinstance(index.value, IntV)
            k = index.value.value
            if 0 <= k < len(elems):
                return elems[k]
        return SSelect(elems, index, e.ty)
    raise TypeError(f"unknown symbolic expression {e!r}")


def render_sym(e: SymExpr) -> str:
    """Debug rendering of a symbolic expression."""
    if isinstance(e, Sym):
        return f"{e.sid.field_path}@{e.sid.sequence}"
    if isinstance(e, SConst):
        return render_value(e.ty, e.value)
    if isinstance(e, SUnary):
        return ("!" if e.op == "!" else "-") + render_sym(e.operand)
    if isinstance(e, SBinary):
        return f"({render_sym(e.left)} {e.op} {render_sym(e.right)})"
    if isinstance(e, SIte):
        return f"ite({render_sym(e.cond)}, {render_sym(e.then)}, {render_sym(e.orelse)})"
    if isinstance(e, SSelect):
        return f"select([{', '.join(render_sym(x) for x in e.elems)}], {render_sym(e.index)})"
    raise TypeError(f"unknown symbolic expression {e!r}")
