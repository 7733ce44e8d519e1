"""Exploration driver: unfolds all single-state-path-coverage sequences.

Each driver path starts at the initial state with default outputs and
repeatedly: instantiates fresh symbols for the next cycle, forks through
the symbolic executor, and advances, until it would re-enter an already
visited state.  A weak fire grants exactly one stutter cycle: the next
cycle runs without marking its entry state visited, so the delayed
outputs of the weak transition's target are observed before the path
can end.  A weak fire during a stutter cycle does not grant a second
consecutive stutter (that literal reading would not terminate when a
weak self-transition is always enabled); this bounds every path by
2 x |states| cycles.

Every branch owns its own visited set and stutter flag.  Traces are
produced in canonical order: depth-first, with each cycle's successors
ordered by transition declaration order (self-loop last) and internal
forks in syntactic order.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .interp import default_values
from .lang import Model, output_leaves
from .solver import SolverStats
from .symexec import (
    ExploreSession,
    SymState,
    SymStore,
    fresh_symbols,
    sym_step,
)
from .symexpr import PathCondition, SConst, SymbolId, SymExpr

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CycleRecord:
    """What one cycle of one driver path did."""

    sequence: int
    entry_state: str
    fired: int | None
    weak_fired: bool
    input_symbols: tuple[SymbolId, ...]
    outputs: dict[str, SymExpr]  # symbolic snapshot at cycle end


@dataclass(frozen=True)
class PathTrace:
    """One complete driver path."""

    trace_id: int
    cycles: tuple[CycleRecord, ...]
    pc: PathCondition
    terminal_state: str

    def fired_sequence(self) -> tuple[int | None, ...]:
        return tuple(c.fired for c in self.cycles)

    def entry_sequence(self) -> tuple[str, ...]:
        return tuple(c.entry_state for c in self.cycles)


@dataclass
class ExploreConfig:
    solver_budget_ms: float = 100.0
    max_paths: int | None = None


@dataclass
class ExploreStats:
    """Aggregate exploration statistics."""

    paths: int = 0
    wall_seconds: float = 0.0
    cycle_counts: list[int] = field(default_factory=list)
    truncated: bool = False
    pessimistic_branches: int = 0
    solver: SolverStats = field(default_factory=SolverStats)

    @property
    def steps_avg(self) -> float:
        if not self.cycle_counts:
            return 0.0
        return round(sum(self.cycle_counts) / len(self.cycle_counts), 2)

    @property
    def steps_max(self) -> int:
        return max(self.cycle_counts, default=0)

    def to_json(self) -> dict:
        return {
            "paths": self.paths,
            "time_s": round(self.wall_seconds, 3),
            "steps_avg": self.steps_avg,
            "steps_max": self.steps_max,
            "truncated": self.truncated,
            "pessimistic_branches": self.pessimistic_branches,
            "solver": self.solver.to_json(),
        }


@dataclass
class _Branch:
    state: str
    visited: frozenset[str]
    stutter: bool
    outputs: SymStore
    pc: PathCondition
    cycles: tuple[CycleRecord, ...]


def explore(model: Model, config: ExploreConfig | None = None) -> tuple[list[PathTrace], ExploreStats]:
    """All driver paths of the model, in canonical order, plus statistics."""
    if config is None:
        config = ExploreConfig()
    session = ExploreSession(budget_ms=config.solver_budget_ms)
    start = time.perf_counter()

    leaf_tys = dict(output_leaves(model))
    init_outputs: SymStore = {
        path: SConst(value, leaf_tys[path]) for path, value in default_values(model).items()
    }

    traces: list[PathTrace] = []
    stack: list[_Branch] = [
        _Branch(model.initial, frozenset(), False, init_outputs, (), ())
    ]
    truncated = False
    while stack:
        b = stack.pop()
        if b.state in b.visited and not b.stutter:
            traces.append(PathTrace(len(traces), b.cycles, b.pc, b.state))
            if config.max_paths is not None and len(traces) >= config.max_paths:
                truncated = bool(stack)
                if truncated:
                    log.warning("path cap %d reached; exploration truncated", config.max_paths)
                break
            continue
        seq = len(b.cycles) + 1
        sym_in = fresh_symbols(model, seq)
        input_syms = tuple(sym_in[p].sid for p in sym_in)
        succs = sym_step(model, SymState(b.state, sym_in, b.outputs, b.pc), session)
        for succ in reversed(succs):
            record = CycleRecord(
                sequence=seq,
                entry_state=b.state,
                fired=succ.fired,
                weak_fired=succ.weak_fired,
                input_symbols=input_syms,
                outputs=dict(succ.state.sym_outputs),
            )
            visited = b.visited if b.stutter else b.visited | {b.state}
            stack.append(
                _Branch(
                    state=succ.state.state,
                    visited=visited,
                    stutter=succ.weak_fired and not b.stutter,
                    outputs=succ.state.sym_outputs,
                    pc=succ.state.pc,
                    cycles=b.cycles + (record,),
                )
            )

    stats = ExploreStats(
        paths=len(traces),
        wall_seconds=time.perf_counter() - start,
        cycle_counts=[len(t.cycles) for t in traces],
        truncated=truncated,
        pessimistic_branches=session.pessimistic_branches,
        solver=session.stats,
    )
    return traces, stats


def trace_stats(traces: list[PathTrace], wall_seconds: float = 0.0, solver: SolverStats | None = None) -> ExploreStats:
    """Aggregate statistics over an existing trace list."""
    return ExploreStats(
        paths=len(traces),
        wall_seconds=wall_seconds,
        cycle_counts=[len(t.cycles) for t in traces],
        solver=solver or SolverStats(),
    )


def trace_dump(traces: list[PathTrace]) -> str:
    """Debug dump: one line per cycle, ``seq=k state=S fired=T weak=bool``."""
    lines: list[str] = []
    for t in traces:
        lines.append(f"# trace {t.trace_id} terminal={t.terminal_state}")
        for c in t.cycles:
            fired = "self" if c.fired is None else f"t{c.fired}"
            lines.append(f"seq={c.sequence} state={c.entry_state} fired={fired} weak={str(c.weak_fired).lower()}")
    return "\n".join(lines) + ("\n" if lines else "")
