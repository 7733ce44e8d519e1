"""Independent brute-force oracles and random-model generation.

Everything here recomputes expected results from first principles (whole
input-domain enumeration through the concrete interpreter) and never
touches the symbolic machinery it is used to check.
"""

from __future__ import annotations

import random

from sspc_testgen.coverage import mcdc_oracle, objectives
from sspc_testgen.interp import default_values, enumerate_inputs, eval_cycle, eval_expr
from sspc_testgen.lang import (
    BOOL,
    Assign,
    Binary,
    BoolV,
    Const,
    EnumTy,
    EnumV,
    Expr,
    If,
    IntTy,
    IntV,
    InVar,
    Model,
    OutVar,
    State,
    Transition,
    Unary,
    guard_atoms,
    transitions_from,
    validate,
)

SequenceSet = frozenset[tuple[tuple[str, int | None], ...]]


def _freeze(store: dict) -> tuple:
    return tuple(sorted(store.items(), key=lambda kv: kv[0]))


def brute_force_sequences(model: Model, cap: int = 10**6) -> SequenceSet:
    """All (entry state, fired transition) driver sequences, by enumeration.

    Simulates every input sequence through the concrete interpreter with
    the driver's visited/stutter bookkeeping, deduplicating equivalent
    continuations, until every branch would re-enter a visited state.
    """
    all_inputs = list(enumerate_inputs(model, cap))
    memo: dict[tuple, SequenceSet] = {}

    def go(state: str, outputs: dict, visited: frozenset, stutter: bool) -> SequenceSet:
        if state in visited and not stutter:
            return frozenset({()})
        key = (state, _freeze(outputs), visited, stutter)
        if key in memo:
            return memo[key]
        memo[key] = frozenset()  # cycle guard; never hit for valid models
        outcomes = set()
        for inputs in all_inputs:
            nstate, nout, fired, weak = eval_cycle(model, state, inputs, outputs)
            outcomes.add((fired, weak, nstate, _freeze(nout)))
        sequences: set[tuple] = set()
        nvisited = visited if stutter else visited | {state}
        for fired, weak, nstate, nout_frozen in outcomes:
            nstutter = weak and not stutter
            for suffix in go(nstate, dict(nout_frozen), nvisited, nstutter):
                sequences.add(((state, fired),) + suffix)
        memo[key] = frozenset(sequences)
        return memo[key]

    return go(model.initial, default_values(model), frozenset(), False)


def brute_force_reachable(model: Model, cap: int = 10**6) -> frozenset:
    """Objective keys reachable by any driver execution, by enumeration."""
    all_inputs = list(enumerate_inputs(model, cap))
    states_hit: set[str] = set()
    transitions_hit: set[int] = set()
    vectors: dict[int, set[tuple[bool, ...]]] = {t.index: set() for t in model.transitions}
    seen_ctx: set[tuple] = set()

    def go(state: str, outputs: dict, visited: frozenset, stutter: bool) -> None:
        if state in visited and not stutter:
            return
        key = (state, _freeze(outputs), visited, stutter)
        if key in seen_ctx:
            return
        seen_ctx.add(key)
        states_hit.add(state)
        outcomes = set()
        for inputs in all_inputs:
            for t in transitions_from(model, state):
                atoms = guard_atoms(t.guard)
                if atoms:
                    vec = tuple(
                        eval_expr(inputs, outputs, a).value for a in atoms  # type: ignore[union-attr]
                    )
                    vectors[t.index].add(vec)
            nstate, nout, fired, weak = eval_cycle(model, state, inputs, outputs)
            if fired is not None:
                transitions_hit.add(fired)
            outcomes.add((fired, weak, nstate, _freeze(nout)))
        nvisited = visited if stutter else visited | {state}
        for fired, weak, nstate, nout_frozen in outcomes:
            go(nstate, dict(nout_frozen), nvisited, weak and not stutter)

    go(model.initial, default_values(model), frozenset(), False)

    keys: set[tuple] = set()
    keys.update(("state", s) for s in states_hit)
    keys.update(("transition", i) for i in transitions_hit)
    for t in model.transitions:
        for ci in mcdc_oracle(t.guard, vectors[t.index]):
            keys.add(("mcdc", t.index, ci))
    return frozenset(keys)


def trace_sequences(traces) -> SequenceSet:
    return frozenset(tuple(zip(t.entry_sequence(), t.fired_sequence())) for t in traces)


# ---------------------------------------------------------------------------
# Random models (valid by construction, re-checked through validate)
# ---------------------------------------------------------------------------

_COLOR = EnumTy("Color", ("RED", "GREEN", "BLUE"))


def random_model(rng: random.Random, max_states: int = 4, max_transitions: int = 6) -> Model:
    n_states = rng.randint(1, max_states)
    state_names = [f"S{i}" for i in range(n_states)]

    inputs: list[tuple[str, object]] = []
    n_inputs = rng.randint(1, 3)
    for i in range(n_inputs):
        kind = rng.randrange(3)
        if kind == 0:
            inputs.append((f"b{i}", BOOL))
        elif kind == 1:
            inputs.append((f"c{i}", _COLOR))
        else:
            inputs.append((f"n{i}", IntTy(0, rng.randint(1, 4))))

    outputs = [("flag", BOOL, BoolV(False)), ("level", IntTy(0, 3), IntV(0))]

    def input_atom() -> Expr:
        name, ty = inputs[rng.randrange(len(inputs))]
        ref = InVar(name, ty)
        if isinstance(ty, EnumTy):
            k = rng.randrange(len(ty.variants))
            return Binary("==", ref, Const(EnumV(ty.name, k), ty), BOOL)
        if isinstance(ty, IntTy):
            k = rng.randint(ty.lo, ty.hi)
            op = rng.choice(["==", "<=", "<", ">="])
            return Binary(op, ref, Const(IntV(k), IntTy(k, k)), BOOL)
        return ref

    def atom() -> Expr:
        if rng.random() < 0.25:
            return Binary("==", OutVar("flag", BOOL), Const(BoolV(True), BOOL), BOOL)
        return input_atom()

    def guard(depth: int = 0) -> Expr:
        r = rng.random()
        if depth >= 2 or r < 0.45:
            a = atom()
            return Unary("!", a, BOOL) if rng.random() < 0.3 else a
        op = rng.choice(["&&", "||"])
        return Binary(op, guard(depth + 1), guard(depth + 1), BOOL)

    def body() -> tuple:
        stmts: list = [
            Assign(OutVar("level", IntTy(0, 3)), Const(IntV(rng.randint(0, 3)), IntTy(0, 3)))
        ]
        cond = input_atom()
        stmts.append(
            If(
                cond,
                (Assign(OutVar("flag", BOOL), Const(BoolV(True), BOOL)),),
                (Assign(OutVar("flag", BOOL), Const(BoolV(False), BOOL)),),
            )
        )
        return tuple(stmts)

    states = tuple(State(name, body()) for name in state_names)
    transitions = []
    n_trans = rng.randint(0, max_transitions)
    for i in range(n_trans):
        src = rng.choice(state_names)
        dst = rng.choice(state_names)
        kind = rng.choice(["strong", "strong", "weak"])
        transitions.append(Transition(src, dst, kind, guard(), i))

    model = Model(
        name=f"Rand{rng.randrange(10**6)}",
        enums=(_COLOR,) if any(isinstance(t, EnumTy) for _, t in inputs) else (),
        records=(),
        inputs=tuple(inputs),  # type: ignore[arg-type]
        outputs=tuple(outputs),
        states=states,
        initial="S0",
        transitions=tuple(transitions),
    )
    return model


def random_valid_model(rng: random.Random, **kw) -> Model:
    """Draw models until one passes validation (repeated atoms etc.)."""
    for _ in range(100):
        m = random_model(rng, **kw)
        if not validate(m):
            return m
    raise AssertionError("random model generation kept producing invalid models")
