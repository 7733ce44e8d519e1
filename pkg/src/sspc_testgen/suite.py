"""Turn driver paths into concrete test cases and SSM scripts.

Concretization solves a path's condition, groups the assignment by
sequence number into steps (don't-care inputs take the solver's
canonical first value), and evaluates each cycle's symbolic output
snapshot under the assignment to obtain regression-oracle checks.

Minimization is greedy set cover over the selected objective set
(transitions plus MC/DC guard conditions by default, transitions only
in ``branch`` mode), measured with suite-level crediting so that an
independence pair may span two kept tests.

The SSM script format is fixed::

    ###################################################
    ## <model>, Test case: 00001
    ####################################################

    #Test step 1
    SSM::set <path> <value>
    SSM::check <path> <value>
    SSM::cycle

with 51/52-character banners, record fields split into separate lines,
arrays rendered inline as ``{(v1, v2)}`` and scalars bare.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

from .coverage import CoverageTracker, ScriptMismatchError
from .driver import PathTrace
from .interp import Store, default_values, eval_cycle
from .lang import (
    ArrayTy,
    ArrayV,
    BoolTy,
    BoolV,
    EnumTy,
    EnumV,
    IntTy,
    IntV,
    Model,
    RecordTy,
    RecordV,
    Ty,
    Value,
    first_value,
    flatten_value,
    input_leaves,
    is_scalar,
    output_leaves,
    render_value,
    type_desc,
    unflatten_value,
)
from .solver import Assignment, SolverStats, eval_under, solve
from .symexec import INPUT_PREFIX
from .symexpr import SymbolId

log = logging.getLogger(__name__)

BANNER1 = "#" * 51
BANNER3 = "#" * 52


@dataclass
class TestStep:
    """One execution cycle of a test: input settings and output checks."""

    sets: list[tuple[str, Value]]
    checks: list[tuple[str, Value]]


@dataclass
class TestCase:
    case_id: str
    steps: list[TestStep]
    trace_id: int = -1


def concretize(
    model: Model,
    trace: PathTrace,
    budget_ms: float = 100.0,
    stats: SolverStats | None = None,
) -> TestCase | None:
    """Solve a trace's path condition into a concrete test case.

    Returns None when the path condition is unsatisfiable (infeasible
    path) or the solver times out (reported, never fabricated).
    """
    res = solve(trace.pc, budget_ms, stats)
    if res.status == "timeout":
        log.warning("trace %d: solver timeout, test not concretized", trace.trace_id)
        return None
    if not res.is_sat:
        return None
    assignment: Assignment = dict(res.assignment or {})
    in_leaves = input_leaves(model)
    out_leaves = output_leaves(model)
    for cycle in trace.cycles:
        for path, ty in in_leaves:
            sid = SymbolId(INPUT_PREFIX + path, type_desc(ty), cycle.sequence)
            assignment.setdefault(sid, first_value(ty))
    steps: list[TestStep] = []
    for cycle in trace.cycles:
        sets = []
        for path, ty in in_leaves:
            sid = SymbolId(INPUT_PREFIX + path, type_desc(ty), cycle.sequence)
            sets.append((path, assignment[sid]))
        checks = [(path, eval_under(assignment, cycle.outputs[path])) for path, _ in out_leaves]
        steps.append(TestStep(sets, checks))
    return TestCase(case_id="", steps=steps, trace_id=trace.trace_id)


# ---------------------------------------------------------------------------
# Minimization
# ---------------------------------------------------------------------------

MINIMIZE_MODES = ("full", "branch", "off")


def _replay_cycles(model: Model, case: TestCase) -> list[tuple[str, int | None, Store, Store]]:
    cycles = []
    state = model.initial
    outputs = default_values(model)
    for step in case.steps:
        inputs = dict(step.sets)
        prev = outputs
        entry = state
        state, outputs, fired, _ = eval_cycle(model, entry, inputs, prev)
        cycles.append((entry, fired, inputs, prev))
    return cycles


def _relevant(keys: frozenset, mode: str) -> frozenset:
    kinds = ("transition",) if mode == "branch" else ("transition", "mcdc")
    return frozenset(k for k in keys if k[0] in kinds)


def minimize(
    model: Model,
    candidates: list[tuple[TestCase, PathTrace]],
    mode: str = "full",
) -> list[TestCase]:
    """Greedy set cover over the chosen objective set.

    Picks the candidate with the largest marginal coverage gain (ties:
    fewer steps, then lower trace id) until nothing is gained; if an
    MC/DC independence pair is stranded across two unpicked candidates,
    a pairwise lookahead closes the gap.  The minimized suite covers
    exactly what the full candidate set covers over the chosen set.
    """
    if mode not in MINIMIZE_MODES:
        raise ValueError(f"unknown minimize mode {mode!r}")
    if mode == "off" or not candidates:
        return [c for c, _ in candidates]

    replays = [_replay_cycles(model, case) for case, _ in candidates]

    def tracker_with(base: CoverageTracker, idxs: list[int]) -> CoverageTracker:
        t = base.copy()
        for i in idxs:
            for entry, fired, inputs, prev in replays[i]:
                t.add_cycle(entry, fired, inputs, prev)
        return t

    full = tracker_with(CoverageTracker(model), list(range(len(candidates))))
    target = _relevant(full.hit_keys(), mode)

    picked: list[int] = []
    pool = list(range(len(candidates)))
    tracker = CoverageTracker(model)
    covered = _relevant(tracker.hit_keys(), mode)

    while covered != target and pool:
        best_i, best_gain, best_key = None, 0, None
        for i in pool:
            gain = len(_relevant(tracker_with(tracker, [i]).hit_keys(), mode) - covered)
            key = (-gain, len(candidates[i][0].steps), candidates[i][1].trace_id)
            if gain > 0 and (best_key is None or key < best_key):
                best_i, best_gain, best_key = i, gain, key
        if best_i is not None:
            picked.append(best_i)
            pool.remove(best_i)
            tracker = tracker_with(tracker, [picked[-1]])
            covered = _relevant(tracker.hit_keys(), mode)
            continue
        # plateau: an independence pair needs two new tests at once
        best_pair, best_pkey = None, None
        for ai in range(len(pool)):
            for bi in range(ai + 1, len(pool)):
                i, j = pool[ai], pool[bi]
                gain = len(_relevant(tracker_with(tracker, [i, j]).hit_keys(), mode) - covered)
                if gain <= 0:
                    continue
                pkey = (
                    -gain,
                    len(candidates[i][0].steps) + len(candidates[j][0].steps),
                    candidates[i][1].trace_id,
                    candidates[j][1].trace_id,
                )
                if best_pkey is None or pkey < best_pkey:
                    best_pair, best_pkey = (i, j), pkey
        if best_pair is None:
            # cannot happen for pair-based objectives; keep the contract anyway
            picked.extend(pool)
            pool.clear()
            break
        for i in best_pair:
            picked.append(i)
            pool.remove(i)
        tracker = tracker_with(tracker, list(best_pair))
        covered = _relevant(tracker.hit_keys(), mode)

    picked.sort()
    return [candidates[i][0] for i in picked]


# ---------------------------------------------------------------------------
# SSM emission
# ---------------------------------------------------------------------------


def _grouped_paths(name: str, ty: Ty) -> list[tuple[str, Ty]]:
    """Line granularity of SSM set/check: records split, arrays inline."""
    if is_scalar(ty) or isinstance(ty, ArrayTy):
        return [(name, ty)]
    assert isinstance(ty, RecordTy)
    out: list[tuple[str, Ty]] = []
    for fname, fty in ty.fields:
        out.extend(_grouped_paths(f"{name}.{fname}", fty))
    return out


def _group_lines(kind: str, roots: list[tuple[str, Ty]], leaf_values: dict[str, Value]) -> list[str]:
    lines = []
    for name, ty in roots:
        for gpath, gty in _grouped_paths(name, ty):
            value = unflatten_value(gpath, gty, leaf_values)
            lines.append(f"SSM::{kind} {gpath} {render_value(gty, value)}")
    return lines


def emit_ssm(model: Model, suite: list[TestCase]) -> str:
    """Render a suite in the SSM script format; deterministic, bit-exact."""
    if not suite:
        raise ValueError("cannot emit an empty suite")
    in_roots = [(n, ty) for n, ty in model.inputs]
    out_roots = [(n, ty) for n, ty, _ in model.outputs]
    blocks: list[str] = []
    for idx, case in enumerate(suite, start=1):
        case.case_id = f"{idx:05d}"
        header = f"{BANNER1}\n## {model.name}, Test case: {case.case_id}\n{BANNER3}"
        step_blocks: list[str] = []
        for k, step in enumerate(case.steps, start=1):
            lines = [f"#Test step {k}"]
            lines.extend(_group_lines("set", in_roots, dict(step.sets)))
            lines.extend(_group_lines("check", out_roots, dict(step.checks)))
            lines.append("SSM::cycle")
            step_blocks.append("\n".join(lines))
        blocks.append(header + "\n\n" + "\n\n".join(step_blocks))
    return "\n\n".join(blocks) + "\n"


# ---------------------------------------------------------------------------
# SSM parsing
# ---------------------------------------------------------------------------

_PATH_SEG = re.compile(r"\.([A-Za-z_][A-Za-z0-9_]*)|\[(\d+)\]")


def _path_ty(model: Model, path: str, is_input: bool) -> Ty:
    m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", path)
    if not m:
        raise ScriptMismatchError(f"bad path {path!r}")
    root = m.group()
    roots = dict(model.inputs) if is_input else {n: ty for n, ty, _ in model.outputs}
    if root not in roots:
        kind = "input" if is_input else "output"
        raise ScriptMismatchError(f"unknown {kind} {root!r}")
    ty = roots[root]
    for seg in _PATH_SEG.finditer(path, m.end()):
        fname, idx = seg.group(1), seg.group(2)
        if fname is not None:
            if not isinstance(ty, RecordTy) or fname not in dict(ty.fields):
                raise ScriptMismatchError(f"path {path!r} does not fit the model")
            ty = dict(ty.fields)[fname]
        else:
            if not isinstance(ty, ArrayTy) or int(idx) >= ty.length:
                raise ScriptMismatchError(f"path {path!r} does not fit the model")
            ty = ty.elem
    return ty


def _parse_literal(ty: Ty, text: str) -> Value:
    text = text.strip()
    if isinstance(ty, BoolTy):
        if text in ("true", "false"):
            return BoolV(text == "true")
        raise ScriptMismatchError(f"expected boolean, found {text!r}")
    if isinstance(ty, IntTy):
        try:
            v = int(text)
        except ValueError as exc:
            raise ScriptMismatchError(f"expected integer, found {text!r}") from exc
        return IntV(v)
    if isinstance(ty, EnumTy):
        if text in ty.variants:
            return EnumV(ty.name, ty.variants.index(text))
        raise ScriptMismatchError(f"unknown variant {text!r} of enum {ty.name}")
    # aggregate: {( ... )}
    if not (text.startswith("{(") and text.endswith(")}")):
        raise ScriptMismatchError(f"expected aggregate literal, found {text!r}")
    parts = _split_aggregate(text[2:-2])
    if isinstance(ty, ArrayTy):
        if len(parts) != ty.length:
            raise ScriptMismatchError(f"aggregate arity {len(parts)} does not match array length {ty.length}")
        return ArrayV(tuple(_parse_literal(ty.elem, p) for p in parts))
    if isinstance(ty, RecordTy):
        if len(parts) != len(ty.fields):
            raise ScriptMismatchError("aggregate arity does not match record field count")
        return RecordV(tuple((fn, _parse_literal(fty, p)) for (fn, fty), p in zip(ty.fields, parts)))
    raise ScriptMismatchError(f"cannot parse literal {text!r}")


def _split_aggregate(inner: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in inner:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        if ch in "{(":
            depth += 1
        elif ch in ")}":
            depth -= 1
        cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (s.strip() for s in parts) if p != ""]


def parse_ssm(model: Model, text: str) -> list[TestCase]:
    """Parse an SSM script back into test cases (round-trip of emit_ssm)."""
    cases: list[TestCase] = []
    cur_sets: dict[str, Value] = {}
    cur_checks: dict[str, Value] = {}
    cur_steps: list[TestStep] = []
    case_id = None
    in_leaf_order = input_leaves(model)
    out_leaf_order = output_leaves(model)

    def commit_step() -> None:
        missing = [p for p, _ in in_leaf_order if p not in cur_sets]
        if missing:
            raise ScriptMismatchError(f"step does not set every input leaf (missing {missing[0]})")
        sets = [(p, cur_sets[p]) for p, _ in in_leaf_order]
        checks = [(p, cur_checks[p]) for p, _ in out_leaf_order if p in cur_checks]
        cur_steps.append(TestStep(sets, checks))
        cur_sets.clear()
        cur_checks.clear()

    def commit_case() -> None:
        nonlocal case_id
        if cur_sets or cur_checks:
            raise ScriptMismatchError("test step not terminated by SSM::cycle")
        if case_id is not None:
            cases.append(TestCase(case_id, list(cur_steps)))
            cur_steps.clear()
        case_id = None

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = re.match(r"##\s+(.+), Test case: (\d+)$", line)
        if m:
            commit_case()
            if m.group(1) != model.name:
                raise ScriptMismatchError(f"script is for model {m.group(1)!r}, not {model.name!r}")
            case_id = m.group(2)
            continue
        if re.fullmatch(r"#+", line):
            continue
        if line.startswith("#Test step"):
            continue
        if line == "SSM::cycle":
            commit_step()
            continue
        m = re.match(r"SSM::(set|check)\s+(\S+)\s+(.+)$", line)
        if not m:
            raise ScriptMismatchError(f"unrecognized line {line!r}")
        kind, path, literal = m.groups()
        if case_id is None:
            raise ScriptMismatchError("SSM statement before any test-case header")
        ty = _path_ty(model, path, is_input=(kind == "set"))
        value = _parse_literal(ty, literal)
        target = cur_sets if kind == "set" else cur_checks
        target.update(flatten_value(path, ty, value))
    commit_case()
    return cases


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------


def suite_manifest(model: Model, suite: list[TestCase]) -> dict:
    """Machine-readable companion of the SSM script."""
    in_tys = dict(input_leaves(model))
    out_tys = dict(output_leaves(model))
    tests = []
    for case in suite:
        steps = []
        for step in case.steps:
            steps.append(
                {
                    "sets": [[p, render_value(in_tys[p], v)] for p, v in step.sets],
                    "checks": [[p, render_value(out_tys[p], v)] for p, v in step.checks],
                }
            )
        tests.append({"id": case.case_id, "steps": steps, "trace": case.trace_id})
    return {"model": model.name, "tests": tests}


def manifest_text(model: Model, suite: list[TestCase]) -> str:
    return json.dumps(suite_manifest(model, suite), indent=2) + "\n"
