"""Abstract syntax and static semantics of the state-machine modeling language.

A model is a flat, deterministic synchronous state machine over bounded
data domains: booleans, ranged integers, enumerations, fixed-length
arrays and non-recursive records.  Each execution cycle reads the
inputs, fires at most one transition (the first one in declaration
order whose guard holds) and computes the outputs from the equations of
the active state.  Everything here is immutable after construction and
safe to share across threads.

This module defines types (:class:`Ty`), runtime values
(:class:`Value`), resolved expressions and statements, the machine
structure (:class:`Model`), and :func:`validate`, the structural
checker that is the single authority on model well-formedness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

# ---------------------------------------------------------------------------
# Source positions and diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pos:
    """1-based line/column position in a model file."""

    line: int = 0
    col: int = 0


NO_POS = Pos()


@dataclass(frozen=True)
class Diagnostic:
    """A single problem found while parsing or validating a model."""

    pos: Pos
    message: str
    severity: str = "error"

    def render(self, filename: str = "<model>") -> str:
        return f"{filename}:{self.pos.line}:{self.pos.col}: {self.severity}: {self.message}"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class Ty:
    """Base class for model data types."""

    __slots__ = ()


@dataclass(frozen=True)
class BoolTy(Ty):
    pass


@dataclass(frozen=True)
class IntTy(Ty):
    """Ranged integer; both bounds are inclusive compile-time constants."""

    lo: int
    hi: int


@dataclass(frozen=True)
class EnumTy(Ty):
    """Enumeration; variant k has ordinal k, starting at 0."""

    name: str
    variants: tuple[str, ...]


@dataclass(frozen=True)
class ArrayTy(Ty):
    elem: Ty
    length: int


@dataclass(frozen=True)
class RecordTy(Ty):
    name: str
    fields: tuple[tuple[str, Ty], ...]


BOOL = BoolTy()

ScalarTy = Union[BoolTy, IntTy, EnumTy]


def is_scalar(ty: Ty) -> bool:
    return isinstance(ty, (BoolTy, IntTy, EnumTy))


def type_desc(ty: Ty) -> str:
    """Printable type descriptor used in symbol names and manifests."""
    if isinstance(ty, BoolTy):
        return "boolean"
    if isinstance(ty, IntTy):
        return f"int {ty.lo}..{ty.hi}"
    if isinstance(ty, EnumTy):
        return f"enum {ty.name}"
    if isinstance(ty, ArrayTy):
        return f"{type_desc(ty.elem)}[{ty.length}]"
    if isinstance(ty, RecordTy):
        return ty.name
    raise TypeError(f"unknown type {ty!r}")


def leaf_paths(prefix: str, ty: Ty) -> list[tuple[str, Ty]]:
    """All scalar leaf paths under ``prefix``, in canonical order.

    Records unfold field by field in declaration order (``a.b``), arrays
    element by element in ascending index order (``a[0]``).
    """
    if is_scalar(ty):
        return [(prefix, ty)]
    if isinstance(ty, ArrayTy):
        out: list[tuple[str, Ty]] = []
        for i in range(ty.length):
            out.extend(leaf_paths(f"{prefix}[{i}]", ty.elem))
        return out
    if isinstance(ty, RecordTy):
        out = []
        for name, fty in ty.fields:
            out.extend(leaf_paths(f"{prefix}.{name}", fty))
        return out
    raise TypeError(f"unknown type {ty!r}")


def domain_size(ty: Ty) -> int:
    """Number of distinct values of ``ty`` (finite for every model type)."""
    if isinstance(ty, BoolTy):
        return 2
    if isinstance(ty, IntTy):
        return ty.hi - ty.lo + 1
    if isinstance(ty, EnumTy):
        return len(ty.variants)
    if isinstance(ty, ArrayTy):
        return domain_size(ty.elem) ** ty.length
    if isinstance(ty, RecordTy):
        n = 1
        for _, fty in ty.fields:
            n *= domain_size(fty)
        return n
    raise TypeError(f"unknown type {ty!r}")


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


class Value:
    """Base class for runtime values; shape always mirrors a :class:`Ty`."""

    __slots__ = ()


@dataclass(frozen=True)
class BoolV(Value):
    value: bool


@dataclass(frozen=True)
class IntV(Value):
    value: int


@dataclass(frozen=True)
class EnumV(Value):
    enum: str
    ordinal: int


@dataclass(frozen=True)
class ArrayV(Value):
    elems: tuple[Value, ...]


@dataclass(frozen=True)
class RecordV(Value):
    fields: tuple[tuple[str, Value], ...]


def scalar_index(ty: Ty, v: Value) -> int:
    """Position of a scalar value within its domain (0-based)."""
    if isinstance(ty, BoolTy):
        assert isinstance(v, BoolV)
        return int(v.value)
    if isinstance(ty, IntTy):
        assert isinstance(v, IntV)
        return v.value - ty.lo
    if isinstance(ty, EnumTy):
        assert isinstance(v, EnumV)
        return v.ordinal
    raise TypeError(f"not a scalar type: {ty!r}")


def value_at(ty: Ty, index: int) -> Value:
    """Scalar value at a 0-based position of the type's domain."""
    if isinstance(ty, BoolTy):
        return BoolV(bool(index))
    if isinstance(ty, IntTy):
        return IntV(ty.lo + index)
    if isinstance(ty, EnumTy):
        return EnumV(ty.name, index)
    raise TypeError(f"not a scalar type: {ty!r}")


def scalar_domain(ty: Ty) -> list[Value]:
    """All values of a scalar type, ascending by ordinal."""
    return [value_at(ty, i) for i in range(domain_size(ty))]


def first_value(ty: Ty) -> Value:
    """Canonical first value of a scalar domain (false, lo, ordinal 0)."""
    return value_at(ty, 0)


def render_value(ty: Ty, v: Value) -> str:
    """Literal rendering: scalars bare, aggregates as ``{(v1, v2)}``."""
    if isinstance(ty, BoolTy):
        assert isinstance(v, BoolV)
        return "true" if v.value else "false"
    if isinstance(ty, IntTy):
        assert isinstance(v, IntV)
        return str(v.value)
    if isinstance(ty, EnumTy):
        assert isinstance(v, EnumV)
        return ty.variants[v.ordinal]
    if isinstance(ty, ArrayTy):
        assert isinstance(v, ArrayV)
        inner = ", ".join(render_value(ty.elem, e) for e in v.elems)
        return f"{{({inner})}}"
    if isinstance(ty, RecordTy):
        assert isinstance(v, RecordV)
        inner = ", ".join(render_value(fty, fv) for (_, fty), (_, fv) in zip(ty.fields, v.fields))
        return f"{{({inner})}}"
    raise TypeError(f"unknown type {ty!r}")


def flatten_value(prefix: str, ty: Ty, v: Value) -> dict[str, Value]:
    """Explode a structured value into a flat leaf-path store."""
    if is_scalar(ty):
        return {prefix: v}
    out: dict[str, Value] = {}
    if isinstance(ty, ArrayTy):
        assert isinstance(v, ArrayV)
        for i, e in enumerate(v.elems):
            out.update(flatten_value(f"{prefix}[{i}]", ty.elem, e))
        return out
    if isinstance(ty, RecordTy):
        assert isinstance(v, RecordV)
        for (name, fty), (_, fv) in zip(ty.fields, v.fields):
            out.update(flatten_value(f"{prefix}.{name}", fty, fv))
        return out
    raise TypeError(f"unknown type {ty!r}")


def unflatten_value(prefix: str, ty: Ty, store: dict[str, Value]) -> Value:
    """Rebuild a structured value from a flat leaf-path store."""
    if is_scalar(ty):
        return store[prefix]
    if isinstance(ty, ArrayTy):
        return ArrayV(tuple(unflatten_value(f"{prefix}[{i}]", ty.elem, store) for i in range(ty.length)))
    if isinstance(ty, RecordTy):
        return RecordV(tuple((name, unflatten_value(f"{prefix}.{name}", fty, store)) for name, fty in ty.fields))
    raise TypeError(f"unknown type {ty!r}")


# ---------------------------------------------------------------------------
# Expressions (resolved and typed)
# ---------------------------------------------------------------------------
#
# Positions are excluded from equality so that structurally identical
# expressions compare equal; guard-atom bookkeeping relies on this.


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: Value
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class InVar(Expr):
    """Reference to a declared input (possibly aggregate)."""

    name: str
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class OutVar(Expr):
    """Reference to a declared output.

    In guards this denotes the previous-cycle value; in equations it
    denotes the current, sequentially-updated value.
    """

    name: str
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class LoopVar(Expr):
    name: str
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class FieldGet(Expr):
    base: Expr
    fname: str
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class IndexGet(Expr):
    base: Expr
    index: Expr
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # '!' or 'neg'
    operand: Expr
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # && || == != < <= > >= + - *
    left: Expr
    right: Expr
    ty: Ty
    pos: Pos = field(default=NO_POS, compare=False)


BOOL_CONNECTIVES = ("&&", "||")
COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*")


def expr_ty(e: Expr) -> Ty:
    return e.ty  # type: ignore[attr-defined]


def render_expr(e: Expr) -> str:
    """Pretty-print an expression (fully parenthesized at binops)."""
    if isinstance(e, Const):
        return render_value(e.ty, e.value)
    if isinstance(e, (InVar, OutVar, LoopVar)):
        return e.name
    if isinstance(e, FieldGet):
        return f"{render_expr(e.base)}.{e.fname}"
    if isinstance(e, IndexGet):
        return f"{render_expr(e.base)}[{render_expr(e.index)}]"
    if isinstance(e, Unary):
        op = "!" if e.op == "!" else "-"
        return f"{op}{render_expr(e.operand)}"
    if isinstance(e, Binary):
        return f"({render_expr(e.left)} {e.op} {render_expr(e.right)})"
    raise TypeError(f"unknown expression {e!r}")


def int_range(e: Expr) -> tuple[int, int]:
    """Conservative value interval of an integer expression.

    This is the static-bounds analysis: array index expressions and loop
    bounds must stay provably in range by interval arithmetic alone.
    """
    if isinstance(e, Const):
        assert isinstance(e.value, IntV)
        return e.value.value, e.value.value
    ty = expr_ty(e)
    if isinstance(e, (InVar, OutVar, LoopVar, FieldGet, IndexGet)):
        assert isinstance(ty, IntTy)
        return ty.lo, ty.hi
    if isinstance(e, Unary) and e.op == "neg":
        lo, hi = int_range(e.operand)
        return -hi, -lo
    if isinstance(e, Binary) and e.op in ARITH_OPS:
        llo, lhi = int_range(e.left)
        rlo, rhi = int_range(e.right)
        if e.op == "+":
            return llo + rlo, lhi + rhi
        if e.op == "-":
            return llo - rhi, lhi - rlo
        corners = (llo * rlo, llo * rhi, lhi * rlo, lhi * rhi)
        return min(corners), max(corners)
    raise TypeError(f"not an integer expression: {e!r}")


def guard_atoms(guard: Expr) -> list[Expr]:
    """Atomic conditions of a boolean guard, in syntactic order.

    An atom is a maximal subexpression containing no boolean connective
    (``!``, ``&&``, ``||``).  Boolean constants are not conditions and
    are skipped.
    """
    atoms: list[Expr] = []

    def walk(e: Expr) -> None:
        if isinstance(e, Binary) and e.op in BOOL_CONNECTIVES:
            walk(e.left)
            walk(e.right)
        elif isinstance(e, Unary) and e.op == "!":
            walk(e.operand)
        elif isinstance(e, Const):
            return
        else:
            if e not in atoms:
                atoms.append(e)

    walk(guard)
    return atoms


def _repeated_guard_atoms(guard: Expr) -> list[Expr]:
    seen: list[Expr] = []
    repeats: list[Expr] = []

    def walk(e: Expr) -> None:
        if isinstance(e, Binary) and e.op in BOOL_CONNECTIVES:
            walk(e.left)
            walk(e.right)
        elif isinstance(e, Unary) and e.op == "!":
            walk(e.operand)
        elif isinstance(e, Const):
            return
        else:
            if e in seen and e not in repeats:
                repeats.append(e)
            seen.append(e)

    walk(guard)
    return repeats


def eval_guard_skeleton(guard: Expr, atom_values: dict[Expr, bool]) -> bool:
    """Evaluate a guard's boolean skeleton over given atom truth values."""
    if isinstance(guard, Binary) and guard.op == "&&":
        return eval_guard_skeleton(guard.left, atom_values) and eval_guard_skeleton(guard.right, atom_values)
    if isinstance(guard, Binary) and guard.op == "||":
        return eval_guard_skeleton(guard.left, atom_values) or eval_guard_skeleton(guard.right, atom_values)
    if isinstance(guard, Unary) and guard.op == "!":
        return not eval_guard_skeleton(guard.operand, atom_values)
    if isinstance(guard, Const):
        assert isinstance(guard.value, BoolV)
        return guard.value.value
    return atom_values[guard]


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


class Stmt:
    __slots__ = ()


@dataclass(frozen=True)
class Assign(Stmt):
    """Assignment to one output leaf (target is an lvalue chain)."""

    target: Expr
    value: Expr
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...]
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class For(Stmt):
    """Bounded loop ``for var in lo..hi`` (hi exclusive, both constant)."""

    var: str
    lo: int
    hi: int
    body: tuple[Stmt, ...]
    pos: Pos = field(default=NO_POS, compare=False)


# ---------------------------------------------------------------------------
# Machine structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class State:
    name: str
    body: tuple[Stmt, ...]
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Transition:
    """Guarded transition; priority is declaration order within the source."""

    source: str
    target: str
    kind: str  # 'strong' | 'weak'
    guard: Expr
    index: int
    pos: Pos = field(default=NO_POS, compare=False)


@dataclass(frozen=True)
class Model:
    name: str
    enums: tuple[EnumTy, ...]
    records: tuple[RecordTy, ...]
    inputs: tuple[tuple[str, Ty], ...]
    outputs: tuple[tuple[str, Ty, Value], ...]
    states: tuple[State, ...]
    initial: str
    transitions: tuple[Transition, ...]


def state_by_name(model: Model, name: str) -> State:
    for s in model.states:
        if s.name == name:
            return s
    raise KeyError(name)


def transitions_from(model: Model, state: str) -> list[Transition]:
    return [t for t in model.transitions if t.source == state]


def enum_by_name(model: Model, name: str) -> EnumTy:
    for e in model.enums:
        if e.name == name:
            return e
    raise KeyError(name)


def input_leaves(model: Model) -> list[tuple[str, Ty]]:
    out: list[tuple[str, Ty]] = []
    for name, ty in model.inputs:
        out.extend(leaf_paths(name, ty))
    return out


def output_leaves(model: Model) -> list[tuple[str, Ty]]:
    out: list[tuple[str, Ty]] = []
    for name, ty, _ in model.outputs:
        out.extend(leaf_paths(name, ty))
    return out


def input_domain_size(model: Model) -> int:
    n = 1
    for _, ty in model.inputs:
        n *= domain_size(ty)
    return n


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_type_wf(ty: Ty, seen: tuple[str, ...], diags: list[Diagnostic], pos: Pos) -> None:
    if isinstance(ty, IntTy):
        if ty.lo > ty.hi:
            diags.append(Diagnostic(pos, f"empty integer range {ty.lo}..{ty.hi}"))
    elif isinstance(ty, EnumTy):
        if not ty.variants:
            diags.append(Diagnostic(pos, f"enum {ty.name} has no variants"))
        if len(set(ty.variants)) != len(ty.variants):
            diags.append(Diagnostic(pos, f"duplicate variant in enum {ty.name}"))
    elif isinstance(ty, ArrayTy):
        if ty.length < 1:
            diags.append(Diagnostic(pos, "array length must be >= 1"))
        _check_type_wf(ty.elem, seen, diags, pos)
    elif isinstance(ty, RecordTy):
        if ty.name in seen:
            diags.append(Diagnostic(pos, f"recursive type {ty.name}"))
            return
        names = [n for n, _ in ty.fields]
        if len(set(names)) != len(names):
            diags.append(Diagnostic(pos, f"duplicate field name in record {ty.name}"))
        for _, fty in ty.fields:
            _check_type_wf(fty, seen + (ty.name,), diags, pos)


def _value_matches(ty: Ty, v: Value) -> bool:
    if isinstance(ty, BoolTy):
        return isinstance(v, BoolV)
    if isinstance(ty, IntTy):
        return isinstance(v, IntV) and ty.lo <= v.value <= ty.hi
    if isinstance(ty, EnumTy):
        return isinstance(v, EnumV) and v.enum == ty.name and 0 <= v.ordinal < len(ty.variants)
    if isinstance(ty, ArrayTy):
        return (
            isinstance(v, ArrayV)
            and len(v.elems) == ty.length
            and all(_value_matches(ty.elem, e) for e in v.elems)
        )
    if isinstance(ty, RecordTy):
        return (
            isinstance(v, RecordV)
            and len(v.fields) == len(ty.fields)
            and all(n == fn and _value_matches(fty, fv) for (fn, fty), (n, fv) in zip(ty.fields, v.fields))
        )
    return False


def _walk_exprs(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, FieldGet):
        yield from _walk_exprs(e.base)
    elif isinstance(e, IndexGet):
        yield from _walk_exprs(e.base)
        yield from _walk_exprs(e.index)
    elif isinstance(e, Unary):
        yield from _walk_exprs(e.operand)
    elif isinstance(e, Binary):
        yield from _walk_exprs(e.left)
        yield from _walk_exprs(e.right)


def _check_expr(e: Expr, diags: list[Diagnostic]) -> None:
    for node in _walk_exprs(e):
        if isinstance(node, IndexGet):
            base_ty = expr_ty(node.base)
            if not isinstance(base_ty, ArrayTy):
                diags.append(Diagnostic(node.pos, "indexing a non-array value"))
                continue
            idx_ty = expr_ty(node.index)
            if not isinstance(idx_ty, IntTy) and not isinstance(node.index, Const):
                diags.append(Diagnostic(node.pos, "array index must be an integer expression"))
                continue
            lo, hi = int_range(node.index)
            if lo < 0 or hi >= base_ty.length:
                diags.append(
                    Diagnostic(
                        node.pos,
                        f"array index may leave bounds: range {lo}..{hi} vs length {base_ty.length}",
                    )
                )
        elif isinstance(node, Binary):
            lt, rt = expr_ty(node.left), expr_ty(node.right)
            if node.op in BOOL_CONNECTIVES and (lt != BOOL or rt != BOOL):
                diags.append(Diagnostic(node.pos, f"operands of {node.op} must be boolean"))
            if node.op in COMPARISONS:
                ok = (
                    (isinstance(lt, IntTy) and isinstance(rt, IntTy))
                    or (isinstance(lt, BoolTy) and isinstance(rt, BoolTy) and node.op in ("==", "!="))
                    or (isinstance(lt, EnumTy) and isinstance(rt, EnumTy) and lt.name == rt.name and node.op in ("==", "!="))
                )
                if not ok:
                    diags.append(Diagnostic(node.pos, f"type mismatch in comparison {node.op}"))
            if node.op in ARITH_OPS and not (isinstance(lt, IntTy) and isinstance(rt, IntTy)):
                diags.append(Diagnostic(node.pos, f"operands of {node.op} must be integers"))


def _is_output_lvalue(e: Expr) -> bool:
    if isinstance(e, OutVar):
        return True
    if isinstance(e, (FieldGet, IndexGet)):
        return _is_output_lvalue(e.base)
    return False


def _check_stmts(stmts: tuple[Stmt, ...], diags: list[Diagnostic]) -> None:
    for st in stmts:
        if isinstance(st, Assign):
            if not _is_output_lvalue(st.target):
                diags.append(Diagnostic(st.pos, "assignment target must be an output leaf"))
            elif not is_scalar(expr_ty(st.target)):
                diags.append(Diagnostic(st.pos, "assignment target must be a scalar leaf"))
            elif expr_ty(st.target) != expr_ty(st.value) and not (
                isinstance(expr_ty(st.target), IntTy) and isinstance(expr_ty(st.value), IntTy)
            ):
                diags.append(Diagnostic(st.pos, "assignment type mismatch"))
            _check_expr(st.target, diags)
            _check_expr(st.value, diags)
        elif isinstance(st, If):
            if expr_ty(st.cond) != BOOL:
                diags.append(Diagnostic(st.pos, "if condition must be boolean"))
            _check_expr(st.cond, diags)
            _check_stmts(st.then, diags)
            _check_stmts(st.orelse, diags)
        elif isinstance(st, For):
            if st.lo > st.hi:
                diags.append(Diagnostic(st.pos, f"empty loop range {st.lo}..{st.hi}"))
            _check_stmts(st.body, diags)


def validate(model: Model) -> list[Diagnostic]:
    """Check every structural invariant; empty list means the model is valid."""
    diags: list[Diagnostic] = []

    for e in model.enums:
        _check_type_wf(e, (), diags, NO_POS)
    for r in model.records:
        _check_type_wf(r, (), diags, NO_POS)

    names = [n for n, _ in model.inputs] + [n for n, _, _ in model.outputs]
    if len(set(names)) != len(names):
        diags.append(Diagnostic(NO_POS, "duplicate input/output name"))
    variant_names = [v for e in model.enums for v in e.variants]
    if len(set(variant_names)) != len(variant_names):
        diags.append(Diagnostic(NO_POS, "enum variant name declared in more than one enum"))

    state_names = [s.name for s in model.states]
    if len(set(state_names)) != len(state_names):
        diags.append(Diagnostic(NO_POS, "duplicate state name"))
    if model.initial not in state_names:
        diags.append(Diagnostic(NO_POS, f"initial state {model.initial} is not declared"))

    for _, ty in model.inputs:
        _check_type_wf(ty, (), diags, NO_POS)
    for name, ty, default in model.outputs:
        _check_type_wf(ty, (), diags, NO_POS)
        if not _value_matches(ty, default):
            diags.append(Diagnostic(NO_POS, f"default value of output {name} does not fit its type"))

    for st in model.states:
        _check_stmts(st.body, diags)

    for t in model.transitions:
        if t.source not in state_names or t.target not in state_names:
            diags.append(Diagnostic(t.pos, f"transition endpoint not a declared state: {t.source} -> {t.target}"))
        if expr_ty(t.guard) != BOOL:
            diags.append(Diagnostic(t.pos, "transition guard must be boolean"))
        if t.kind not in ("weak", "strong"):
            diags.append(Diagnostic(t.pos, f"unknown transition kind {t.kind}"))
        _check_expr(t.guard, diags)
        for atom in _repeated_guard_atoms(t.guard):
            diags.append(Diagnostic(t.pos, f"condition repeated within one guard: {render_expr(atom)}"))

    return diags
