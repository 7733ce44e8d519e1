"""Concrete cycle interpreter: the semantic ground truth for a model.

One call to :func:`eval_cycle` is one synchronous execution cycle.
Transition guards are evaluated in declaration order over the inputs and
the previous cycle's outputs; the first true guard fires.  A strong fire
runs the target state's equations this cycle; a weak fire runs the
source's (the target's outputs become active one cycle later); when no
guard holds the machine self-loops and re-runs the current state's
equations.  Output leaves not assigned by the executed equations keep
their previous value.

Input/output stores are flat ``{leaf path: scalar Value}`` dicts; use
:func:`sspc_testgen.lang.flatten_value` / ``unflatten_value`` to convert
to structured values.
"""

from __future__ import annotations

import itertools
from typing import Iterator

from .lang import (
    Assign,
    Binary,
    BoolV,
    Const,
    EnumV,
    Expr,
    FieldGet,
    For,
    If,
    IndexGet,
    IntTy,
    IntV,
    InVar,
    LoopVar,
    Model,
    OutVar,
    Stmt,
    Unary,
    Value,
    domain_size,
    expr_ty,
    flatten_value,
    input_leaves,
    scalar_domain,
    state_by_name,
    transitions_from,
)

DEFAULT_ENUM_CAP = 10**6


class EvalError(Exception):
    """Runtime model fault (e.g. integer assignment out of range)."""


class DomainCapError(Exception):
    """Input domain larger than the enumeration cap."""


Store = dict[str, Value]


def default_values(model: Model) -> Store:
    """Declared default for every output leaf, as a flat store."""
    store: Store = {}
    for name, ty, default in model.outputs:
        store.update(flatten_value(name, ty, default))
    return store


class _Env:
    """Evaluation environment for one cycle."""

    __slots__ = ("inputs", "outputs", "loops", "steps")

    def __init__(self, inputs: Store, outputs: Store):
        self.inputs = inputs
        self.outputs = outputs
        self.loops: dict[str, int] = {}
        self.steps = 0


def _leaf_path(env: _Env, e: Expr) -> str:
    """Resolve an input/output reference chain to a flat leaf path."""
    if isinstance(e, (InVar, OutVar)):
        return e.name
    if isinstance(e, FieldGet):
        return f"{_leaf_path(env, e.base)}.{e.fname}"
    if isinstance(e, IndexGet):
        idx = _eval(env, e.index)
        assert isinstance(idx, IntV)
        return f"{_leaf_path(env, e.base)}[{idx.value}]"
    raise EvalError(f"not a storage reference: {e!r}")


def _root_is_input(e: Expr) -> bool:
    while isinstance(e, (FieldGet, IndexGet)):
        e = e.base
    return isinstance(e, InVar)


def _eval(env: _Env, e: Expr) -> Value:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, LoopVar):
        return IntV(env.loops[e.name])
    if isinstance(e, (InVar, OutVar, FieldGet, IndexGet)):
        path = _leaf_path(env, e)
        store = env.inputs if _root_is_input(e) else env.outputs
        return store[path]
    if isinstance(e, Unary):
        v = _eval(env, e.operand)
        if e.op == "!":
            assert isinstance(v, BoolV)
            return BoolV(not v.value)
        assert isinstance(v, IntV)
        return IntV(-v.value)
    if isinstance(e, Binary):
        if e.op == "&&":
            lv = _eval(env, e.left)
            assert isinstance(lv, BoolV)
            if not lv.value:
                return BoolV(False)
            return _eval(env, e.right)
        if e.op == "||":
            lv = _eval(env, e.left)
            assert isinstance(lv, BoolV)
            if lv.value:
                return BoolV(True)
            return _eval(env, e.right)
        lv = _eval(env, e.left)
        rv = _eval(env, e.right)
        if e.op in ("==", "!="):
            eq = _scalar_eq(lv, rv)
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
    raise EvalError(f"cannot evaluate {e!r}")


def _scalar_eq(a: Value, b: Value) -> bool:
    if isinstance(a, BoolV) and isinstance(b, BoolV):
        return a.value == b.value
    if isinstance(a, IntV) and isinstance(b, IntV):
        return a.value == b.value
    if isinstance(a, EnumV) and isinstance(b, EnumV):
        return a.ordinal == b.ordinal
    raise EvalError(f"incomparable values {a!r} and {b!r}")


def _exec_stmts(env: _Env, stmts: tuple[Stmt, ...]) -> None:
    for st in stmts:
        env.steps += 1
        if isinstance(st, Assign):
            value = _eval(env, st.value)
            path = _leaf_path(env, st.target)
            ty = expr_ty(st.target)
            if isinstance(ty, IntTy):
                assert isinstance(value, IntV)
                if not ty.lo <= value.value <= ty.hi:
                    raise EvalError(
                        f"integer assignment out of range: {path} := {value.value} outside {ty.lo}..{ty.hi}"
                    )
            env.outputs[path] = value
        elif isinstance(st, If):
            cond = _eval(env, st.cond)
            assert isinstance(cond, BoolV)
            _exec_stmts(env, st.then if cond.value else st.orelse)
        elif isinstance(st, For):
            saved = env.loops.get(st.var)
            for i in range(st.lo, st.hi):
                env.loops[st.var] = i
                _exec_stmts(env, st.body)
            if saved is None:
                env.loops.pop(st.var, None)
            else:
                env.loops[st.var] = saved


def static_stmt_bound(stmts: tuple[Stmt, ...]) -> int:
    """Upper bound on executed statements, with every loop fully unrolled."""

    def weight(st: Stmt) -> int:
        if isinstance(st, If):
            return 1 + sum(map(weight, st.then)) + sum(map(weight, st.orelse))
        if isinstance(st, For):
            return 1 + max(0, st.hi - st.lo) * sum(map(weight, st.body))
        return 1

    return sum(map(weight, stmts))


def eval_cycle(
    model: Model,
    state: str,
    inputs: Store,
    prev_outputs: Store,
) -> tuple[str, Store, int | None, bool]:
    """Run one cycle; returns (next state, outputs, fired transition, weak_fired).

    ``fired`` is the index of the fired transition in ``model.transitions``
    or None for a self-loop.  Deterministic and terminating for all inputs;
    an out-of-range integer assignment raises :class:`EvalError` (a model
    fault, never silent wraparound).
    """
    env = _Env(inputs, dict(prev_outputs))
    fired: int | None = None
    for t in transitions_from(model, state):
        g = _eval(env, t.guard)
        assert isinstance(g, BoolV)
        if g.value:
            fired = t.index
            break
    if fired is None:
        next_state = state
        exec_state = state
        weak_fired = False
    else:
        t = model.transitions[fired]
        next_state = t.target
        weak_fired = t.kind == "weak"
        exec_state = t.source if weak_fired else t.target
    body = state_by_name(model, exec_state).body
    _exec_stmts(env, body)
    assert env.steps <= static_stmt_bound(body), "interpreter exceeded static statement bound"
    return next_state, env.outputs, fired, weak_fired


def eval_expr(inputs: Store, prev_outputs: Store, e: Expr) -> Value:
    """Evaluate a single expression over one cycle's input/output stores."""
    return _eval(_Env(inputs, dict(prev_outputs)), e)


def enumerate_inputs(model: Model, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Store]:
    """Yield every concrete input valuation once, in canonical leaf order.

    The first leaf varies slowest.  Raises :class:`DomainCapError` when the
    total input-domain cardinality exceeds ``cap``.
    """
    leaves = input_leaves(model)
    total = 1
    for _, ty in leaves:
        total *= domain_size(ty)
    if total > cap:
        raise DomainCapError(f"input domain has {total} valuations, cap is {cap}")
    domains = [scalar_domain(ty) for _, ty in leaves]
    paths = [p for p, _ in leaves]
    for combo in itertools.product(*domains):
        yield dict(zip(paths, combo))
