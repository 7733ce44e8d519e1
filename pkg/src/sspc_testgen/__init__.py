"""Test generation for synchronous state-machine models.

Pipeline: parse/validate a model, symbolically explore every driver
path under single-state-path coverage, solve path conditions into
concrete test cases with regression oracles, minimize the suite against
coverage objectives, and emit SSM-format scripts.  A coverage meter
replays suites against the concrete interpreter, and a mutation-based
baseline generator provides a search-based point of comparison.
"""

from .coverage import (
    CoverageObjective,
    CoverageReport,
    CoverageTracker,
    ScriptMismatchError,
    mcdc_oracle,
    objectives,
    run_suite,
)
from .driver import CycleRecord, ExploreConfig, ExploreStats, PathTrace, explore, trace_dump, trace_stats
from .fuzz import FuzzResult, decode, encode, fuzz, seeds_from_case
from .interp import (
    DomainCapError,
    EvalError,
    default_values,
    enumerate_inputs,
    eval_cycle,
    eval_expr,
)
from .lang import Diagnostic, Model, Ty, Value, validate
from .parser import ParseResult, load_model, parse_model
from .solver import (
    Assignment,
    MissingSymbolError,
    SolveResult,
    SolverStats,
    eval_under,
    solve,
)
from .suite import TestCase, TestStep, concretize, emit_ssm, manifest_text, minimize, parse_ssm
from .symexec import ExploreSession, SymState, fresh_symbols, sym_step
from .symexpr import PathCondition, SymbolId, SymExpr, simplify

__all__ = [
    "Assignment",
    "CoverageObjective",
    "CoverageReport",
    "CoverageTracker",
    "CycleRecord",
    "Diagnostic",
    "DomainCapError",
    "EvalError",
    "ExploreConfig",
    "ExploreSession",
    "ExploreStats",
    "FuzzResult",
    "MissingSymbolError",
    "Model",
    "ParseResult",
    "PathCondition",
    "PathTrace",
    "ScriptMismatchError",
    "SolveResult",
    "SolverStats",
    "SymExpr",
    "SymState",
    "SymbolId",
    "TestCase",
    "TestStep",
    "Ty",
    "Value",
    "concretize",
    "decode",
    "default_values",
    "emit_ssm",
    "encode",
    "enumerate_inputs",
    "eval_cycle",
    "eval_expr",
    "eval_under",
    "explore",
    "fresh_symbols",
    "fuzz",
    "load_model",
    "manifest_text",
    "mcdc_oracle",
    "minimize",
    "objectives",
    "parse_model",
    "parse_ssm",
    "run_suite",
    "seeds_from_case",
    "simplify",
    "solve",
    "sym_step",
    "trace_dump",
    "trace_stats",
    "validate",
]
