"""Model coverage measurement: states, transitions, MC/DC of guards.

The objective universe is derived solely from the model: one objective
per state, one per transition, and one per atomic guard condition
(constant atoms excluded -- a literal cannot flip).  MC/DC is the
unique-cause flavor: a condition is credited when the executed cycles
contain two vectors that differ only in that condition while the guard
outcome flips.  Guards of all transitions leaving the current state are
(logically) evaluated every cycle, whether or not one fires.

:class:`CoverageTracker` does streaming crediting cycle by cycle;
:func:`mcdc_oracle` is the independent brute-force pairwise check used
to cross-validate it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .interp import Store, default_values, eval_cycle, eval_expr
from .lang import (
    BoolV,
    Expr,
    Model,
    Transition,
    eval_guard_skeleton,
    guard_atoms,
    output_leaves,
    render_expr,
    render_value,
    transitions_from,
)

ObjectiveKey = tuple  # ("state", name) | ("transition", idx) | ("mcdc", t_idx, cond_idx)


@dataclass(frozen=True)
class CoverageObjective:
    kind: str  # 'state' | 'transition' | 'mcdc'
    key: ObjectiveKey
    ref: str


def objectives(model: Model) -> list[CoverageObjective]:
    """Objective universe in stable order: states, transitions, conditions."""
    out: list[CoverageObjective] = []
    for s in model.states:
        out.append(CoverageObjective("state", ("state", s.name), s.name))
    for t in model.transitions:
        out.append(CoverageObjective("transition", ("transition", t.index), _t_ref(t)))
    for t in model.transitions:
        for ci, atom in enumerate(guard_atoms(t.guard)):
            out.append(
                CoverageObjective(
                    "mcdc",
                    ("mcdc", t.index, ci),
                    f"{_t_ref(t)} condition {ci}: {render_expr(atom)}",
                )
            )
    return out


def _t_ref(t: Transition) -> str:
    return f"t{t.index} {t.source}->{t.target} [{t.kind}]"


class CoverageTracker:
    """Streaming coverage accumulator over executed cycles."""

    def __init__(self, model: Model):
        self.model = model
        self._atoms: dict[int, list[Expr]] = {
            t.index: guard_atoms(t.guard) for t in model.transitions
        }
        self.states_hit: set[str] = set()
        self.transitions_hit: set[int] = set()
        # (t_idx, cond_idx, rest-vector) -> set of (cond value, guard outcome)
        self._pairs: dict[tuple, set[tuple[bool, bool]]] = {}
        self.mcdc_hit: set[tuple[int, int]] = set()
        self._guard_vectors: dict[int, set[tuple[bool, ...]]] = {
            t.index: set() for t in model.transitions
        }

    def copy(self) -> "CoverageTracker":
        c = CoverageTracker.__new__(CoverageTracker)
        c.model = self.model
        c._atoms = self._atoms
        c.states_hit = set(self.states_hit)
        c.transitions_hit = set(self.transitions_hit)
        c._pairs = {k: set(v) for k, v in self._pairs.items()}
        c.mcdc_hit = set(self.mcdc_hit)
        c._guard_vectors = {k: set(v) for k, v in self._guard_vectors.items()}
        return c

    def add_cycle(self, entry_state: str, fired: int | None, inputs: Store, prev_outputs: Store) -> None:
        """Credit one executed cycle (entry state, fired transition, vectors)."""
        self.states_hit.add(entry_state)
        if fired is not None:
            self.transitions_hit.add(fired)
        for t in transitions_from(self.model, entry_state):
            atoms = self._atoms[t.index]
            if not atoms:
                continue
            values = []
            for atom in atoms:
                v = eval_expr(inputs, prev_outputs, atom)
                assert isinstance(v, BoolV)
                values.append(v.value)
            vector = tuple(values)
            self._guard_vectors[t.index].add(vector)
            outcome = eval_guard_skeleton(t.guard, dict(zip(atoms, vector)))
            for ci in range(len(atoms)):
                rest = vector[:ci] + vector[ci + 1 :]
                key = (t.index, ci, rest)
                seen = self._pairs.setdefault(key, set())
                seen.add((vector[ci], outcome))
                if (t.index, ci) not in self.mcdc_hit:
                    for a, oa in seen:
                        for b, ob in seen:
                            if a != b and oa != ob:
                                self.mcdc_hit.add((t.index, ci))
                                break

    def hit_keys(self) -> frozenset[ObjectiveKey]:
        keys: set[ObjectiveKey] = set()
        keys.update(("state", s) for s in self.states_hit)
        keys.update(("transition", i) for i in self.transitions_hit)
        keys.update(("mcdc", ti, ci) for ti, ci in self.mcdc_hit)
        return frozenset(keys)


def mcdc_oracle(guard: Expr, vectors: set[tuple[bool, ...]]) -> set[int]:
    """Brute-force pairwise MC/DC: independently-demonstrated conditions.

    ``vectors`` are truth assignments to the guard's atomic conditions in
    syntactic order.  A condition is demonstrated by a pair of vectors
    differing only in it with flipping guard outcome.
    """
    atoms = guard_atoms(guard)
    demonstrated: set[int] = set()
    vecs = list(vectors)
    for i in range(len(atoms)):
        for v1 in vecs:
            for v2 in vecs:
                if v1[i] == v2[i]:
                    continue
                if any(v1[j] != v2[j] for j in range(len(atoms)) if j != i):
                    continue
                o1 = eval_guard_skeleton(guard, dict(zip(atoms, v1)))
                o2 = eval_guard_skeleton(guard, dict(zip(atoms, v2)))
                if o1 != o2:
                    demonstrated.add(i)
                    break
            if i in demonstrated:
                break
    return demonstrated


@dataclass
class CheckResult:
    test: str
    step: int
    path: str
    expected: str
    actual: str
    passed: bool


@dataclass
class CoverageReport:
    model: str
    objectives: list[CoverageObjective]
    hit: frozenset[ObjectiveKey]
    checks: list[CheckResult]
    guard_vectors: dict[int, set[tuple[bool, ...]]] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return len(self.objectives)

    @property
    def hit_count(self) -> int:
        return sum(1 for o in self.objectives if o.key in self.hit)

    @property
    def percent(self) -> int:
        if self.total == 0:
            return 100
        return int(100 * self.hit_count / self.total + 0.5)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def unhit(self) -> list[CoverageObjective]:
        return [o for o in self.objectives if o.key not in self.hit]

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "total": self.total,
            "hit": self.hit_count,
            "percent": self.percent,
            "objectives": [
                {"kind": o.kind, "ref": o.ref, "hit": o.key in self.hit} for o in self.objectives
            ],
            "checks": [
                {
                    "test": c.test,
                    "step": c.step,
                    "path": c.path,
                    "expected": c.expected,
                    "actual": c.actual,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
        }

    def render_table(self) -> str:
        lines = [f"model {self.model}: {self.hit_count}/{self.total} objectives ({self.percent}%)"]
        for o in self.objectives:
            mark = "x" if o.key in self.hit else " "
            lines.append(f"  [{mark}] {o.kind:<10} {o.ref}")
        if self.checks:
            n_fail = len(self.failures)
            lines.append(f"checks: {len(self.checks)} total, {n_fail} failed")
            for c in self.failures:
                lines.append(
                    f"  FAIL {c.test} step {c.step}: {c.path} expected {c.expected}, got {c.actual}"
                )
        return "\n".join(lines) + "\n"


class ScriptMismatchError(Exception):
    """SSM script does not fit the model (paths, types, or structure)."""


def run_suite(model: Model, ssm_text: str) -> CoverageReport:
    """Replay an SSM suite against the interpreter and measure coverage.

    Every test starts from the declared defaults in the initial state.
    Check lines are compared against interpreter outputs; failures are
    recorded but coverage is still credited for executed items.
    """
    from .suite import parse_ssm  # late import; suite depends on coverage

    cases = parse_ssm(model, ssm_text)
    tracker = CoverageTracker(model)
    checks: list[CheckResult] = []
    leaf_tys = dict(output_leaves(model))
    for case in cases:
        state = model.initial
        outputs = default_values(model)
        for k, step in enumerate(case.steps, start=1):
            inputs = dict(step.sets)
            prev = outputs
            entry = state
            state, outputs, fired, _weak = eval_cycle(model, entry, inputs, prev)
            tracker.add_cycle(entry, fired, inputs, prev)
            for path, expected in step.checks:
                actual = outputs[path]
                ty = leaf_tys[path]
                checks.append(
                    CheckResult(
                        test=case.case_id,
                        step=k,
                        path=path,
                        expected=render_value(ty, expected),
                        actual=render_value(ty, actual),
                        passed=expected == actual,
                    )
                )
    return CoverageReport(
        model=model.name,
        objectives=objectives(model),
        hit=tracker.hit_keys(),
        checks=checks,
        guard_vectors=dict(tracker._guard_vectors),
    )
