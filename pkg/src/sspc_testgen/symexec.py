"""Symbolic counterpart of the cycle interpreter.

:func:`fresh_symbols` instantiates one fresh symbol per primitive input
leaf (records and arrays stay concrete containers).  :func:`sym_step`
executes one cycle symbolically and returns one successor per feasible
control path: it forks on every transition guard and on every internal
if-condition, appending the branch condition to the path condition, and
prunes branches whose path condition is unsatisfiable.  Guard priority
is encoded by conjoining the negations of all higher-priority guards,
so every branch's path condition is solvable in isolation.

Array reads with a symbolic index build Select terms; array writes with
a symbolic index fork one branch per in-range index value.  Bounded
loops are fully unrolled.  The machine state is concrete on every
branch; only data is symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lang import (
    BOOL,
    ArrayTy,
    Assign,
    Binary,
    BoolV,
    Const,
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
    expr_ty,
    input_leaves,
    state_by_name,
    transitions_from,
    type_desc,
)
from .solver import DEFAULT_BUDGET_MS, SolveResult, SolverStats, solve
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
    negate,
    simplify,
)

SymStore = dict[str, SymExpr]

INPUT_PREFIX = "inC."


@dataclass(frozen=True)
class SymState:
    """One symbolic configuration: concrete machine state, symbolic data."""

    state: str
    sym_inputs: SymStore
    sym_outputs: SymStore
    pc: PathCondition


@dataclass(frozen=True)
class SymSuccessor:
    state: "SymState"
    fired: int | None
    weak_fired: bool


@dataclass
class ExploreSession:
    """Shared solver configuration and statistics for one exploration."""

    budget_ms: float = DEFAULT_BUDGET_MS
    stats: SolverStats = field(default_factory=SolverStats)
    pessimistic_branches: int = 0

    def feasible(self, pc: PathCondition) -> bool:
        """Eager infeasibility pruning; timeouts keep the branch (sound)."""
        res: SolveResult = solve(pc, self.budget_ms, self.stats)
        if res.status == "timeout":
            self.pessimistic_branches += 1
            return True
        return res.is_sat


def fresh_symbols(model: Model, sequence: int) -> SymStore:
    """A fresh symbol for every primitive input leaf, keyed by leaf path.

    Symbol identities carry the dotted/indexed leaf path (prefixed with
    ``inC.``), the printable type, and the sequence number of the
    program call that instantiated them.
    """
    store: SymStore = {}
    for path, ty in input_leaves(model):
        sid = SymbolId(INPUT_PREFIX + path, type_desc(ty), sequence)
        store[path] = Sym(sid, ty)
    return store


class _SymBranch:
    """Mutable bookkeeping for one control path through a cycle."""

    __slots__ = ("outputs", "pc", "loops")

    def __init__(self, outputs: SymStore, pc: tuple[SymExpr, ...]):
        self.outputs = outputs
        self.pc = pc
        self.loops: dict[str, int] = {}

    def clone(self) -> "_SymBranch":
        b = _SymBranch(dict(self.outputs), self.pc)
        b.loops = dict(self.loops)
        return b


def _resolve_read(branch: _SymBranch, inputs: SymStore, e: Expr) -> SymExpr:
    """Translate a storage reference into a SymExpr, possibly a Select."""

    def leaves(node: Expr, suffix: str) -> SymExpr:
        # Build the expression for path(node)+suffix where suffix is the
        # already-resolved remainder (e.g. "[0].f"); symbolic indices fan
        # out into Select backbones.
        if isinstance(node, (InVar, OutVar)):
            path = node.name + suffix
            store = inputs if isinstance(node, InVar) else branch.outputs
            return store[path]
        if isinstance(node, FieldGet):
            return leaves(node.base, f".{node.fname}{suffix}")
        if isinstance(node, IndexGet):
            idx = _sym_eval(branch, inputs, node.index)
            base_ty = expr_ty(node.base)
            assert isinstance(base_ty, ArrayTy)
            if isinstance(idx, SConst):
                assert isinstance(idx.value, IntV)
                return leaves(node.base, f"[{idx.value.value}]{suffix}")
            elems = tuple(leaves(node.base, f"[{k}]{suffix}") for k in range(base_ty.length))
            elem_ty = expr_ty(e)
            return simplify(SSelect(elems, idx, elem_ty))
        raise TypeError(f"not a storage reference: {node!r}")

    return leaves(e, "")


def _sym_eval(branch: _SymBranch, inputs: SymStore, e: Expr) -> SymExpr:
    if isinstance(e, Const):
        return SConst(e.value, e.ty)
    if isinstance(e, LoopVar):
        v = branch.loops[e.name]
        return SConst(IntV(v), IntTy(v, v))
    if isinstance(e, (InVar, OutVar, FieldGet, IndexGet)):
        return _resolve_read(branch, inputs, e)
    if isinstance(e, Unary):
        return simplify(SUnary(e.op, _sym_eval(branch, inputs, e.operand), e.ty))
    if isinstance(e, Binary):
        left = _sym_eval(branch, inputs, e.left)
        right = _sym_eval(branch, inputs, e.right)
        return simplify(SBinary(e.op, left, right, e.ty))
    raise TypeError(f"cannot evaluate {e!r}")


def _target_leaf_paths(branch: _SymBranch, inputs: SymStore, target: Expr) -> list[tuple[str, SymExpr | None]]:
    """Resolve an lvalue chain to concrete leaf paths.

    Returns [(path, extra_pc)] pairs: one pair when all indices are
    concrete, else one per in-range value of the symbolic index with the
    equality constraint that selects it.
    """
    if isinstance(target, OutVar):
        return [(target.name, None)]
    if isinstance(target, FieldGet):
        return [(f"{p}.{target.fname}", c) for p, c in _target_leaf_paths(branch, inputs, target.base)]
    if isinstance(target, IndexGet):
        base = _target_leaf_paths(branch, inputs, target.base)
        idx = _sym_eval(branch, inputs, target.index)
        base_ty = expr_ty(target.base)
        assert isinstance(base_ty, ArrayTy)
        if isinstance(idx, SConst):
            assert isinstance(idx.value, IntV)
            return [(f"{p}[{idx.value.value}]", c) for p, c in base]
        out: list[tuple[str, SymExpr | None]] = []
        for k in range(base_ty.length):
            cond = simplify(SBinary("==", idx, SConst(IntV(k), IntTy(k, k)), BOOL))
            for p, c in base:
                joined = cond if c is None else simplify(SBinary("&&", c, cond, BOOL))
                out.append((f"{p}[{k}]", joined))
        return out
    raise TypeError(f"not an lvalue: {target!r}")


def _exec_stmts(
    branches: list[_SymBranch],
    inputs: SymStore,
    stmts: tuple[Stmt, ...],
    session: ExploreSession,
) -> list[_SymBranch]:
    for st in stmts:
        branches = [b for nb in (_exec_one(b, inputs, st, session) for b in branches) for b in nb]
    return branches


def _exec_one(
    branch: _SymBranch,
    inputs: SymStore,
    st: Stmt,
    session: ExploreSession,
) -> list[_SymBranch]:
    if isinstance(st, Assign):
        value = _sym_eval(branch, inputs, st.value)
        targets = _target_leaf_paths(branch, inputs, st.target)
        if len(targets) == 1 and targets[0][1] is None:
            branch.outputs[targets[0][0]] = value
            return [branch]
        # symbolic write index: one branch per in-range index value
        out: list[_SymBranch] = []
        for path, cond in targets:
            assert cond is not None
            pc = branch.pc + (cond,)
            if not session.feasible(pc):
                continue
            nb = branch.clone()
            nb.pc = pc
            nb.outputs[path] = value
            out.append(nb)
        return out
    if isinstance(st, If):
        cond = _sym_eval(branch, inputs, st.cond)
        if isinstance(cond, SConst):
            assert isinstance(cond.value, BoolV)
            return _exec_stmts([branch], inputs, st.then if cond.value.value else st.orelse, session)
        out = []
        then_pc = branch.pc + (cond,)
        if session.feasible(then_pc):
            tb = branch.clone()
            tb.pc = then_pc
            out.extend(_exec_stmts([tb], inputs, st.then, session))
        else_pc = branch.pc + (negate(cond),)
        if session.feasible(else_pc):
            eb = branch.clone()
            eb.pc = else_pc
            out.extend(_exec_stmts([eb], inputs, st.orelse, session))
        return out
    if isinstance(st, For):
        branches = [branch]
        for i in range(st.lo, st.hi):
            for b in branches:
                b.loops[st.var] = i
            branches = _exec_stmts(branches, inputs, st.body, session)
        for b in branches:
            b.loops.pop(st.var, None)
        return branches
    raise TypeError(f"unknown statement {st!r}")


def sym_step(model: Model, s: SymState, session: ExploreSession | None = None) -> list[SymSuccessor]:
    """One symbolic cycle: one successor per feasible control path.

    Successors are returned in canonical branch order: transitions in
    declaration order, then the self-loop; within each, internal forks
    in syntactic order with the true branch first and array-write splits
    ascending by index.
    """
    if session is None:
        session = ExploreSession()
    guard_branch = _SymBranch(dict(s.sym_outputs), s.pc)
    guards = [
        _sym_eval(guard_branch, s.sym_inputs, t.guard) for t in transitions_from(model, s.state)
    ]
    ts = transitions_from(model, s.state)

    successors: list[SymSuccessor] = []

    def run_equations(pc: PathCondition, exec_state: str, fired: int | None, weak: bool, next_state: str) -> None:
        root = _SymBranch(dict(s.sym_outputs), pc)
        done = _exec_stmts([root], s.sym_inputs, state_by_name(model, exec_state).body, session)
        for b in done:
            successors.append(
                SymSuccessor(
                    SymState(next_state, s.sym_inputs, b.outputs, b.pc),
                    fired,
                    weak,
                )
            )

    negations: list[SymExpr] = []
    for t, g in zip(ts, guards):
        pc = s.pc + tuple(negations) + (g,)
        if session.feasible(pc):
            weak = t.kind == "weak"
            exec_state = t.source if weak else t.target
            run_equations(pc, exec_state, t.index, weak, t.target)
        negations.append(negate(g))
    # self-loop: no guard held
    pc = s.pc + tuple(negations)
    if session.feasible(pc):
        run_equations(pc, s.state, None, False, s.state)
    return successors
