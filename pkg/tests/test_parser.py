"""Model-file parsing: structure, diagnostics, totality."""

from __future__ import annotations

import pytest

from sspc_testgen.lang import ArrayTy, EnumTy, RecordTy
from sspc_testgen.parser import parse_model

MINIMAL = """
model Tiny {
  output out: bool = false
  initial state ONLY { out := false }
}
"""


def diag_messages(text: str) -> list[str]:
    return [d.message for d in parse_model(text).diagnostics]


def test_wing_mirror_structure(wing_mirror):
    assert wing_mirror.name == "WingMirrorControl"
    assert [s.name for s in wing_mirror.states] == ["CAR_IS_LOCKED", "CAR_IS_UNLOCKED"]
    assert len(wing_mirror.transitions) == 2
    names = dict(wing_mirror.inputs)
    assert isinstance(names["ctrl"], EnumTy) and names["ctrl"].name == "Lock"
    mirror = names["mirrorData"]
    assert isinstance(mirror, RecordTy)
    assert [f for f, _ in mirror.fields] == ["automaticControl", "mirrorState"]
    assert isinstance(dict(mirror.fields)["mirrorState"], ArrayTy)


def test_minimal_model_parses():
    result = parse_model(MINIMAL)
    assert result.ok
    assert len(result.model.states) == 1
    assert result.model.transitions == ()


def test_recursive_record_type_rejected():
    msgs = diag_messages(
        """
        model Bad {
          type T { self: T }
          input x: T
          output o: bool = false
          initial state S { o := false }
        }
        """
    )
    assert any("recursive type" in m for m in msgs)


def test_non_constant_loop_bound_rejected():
    msgs = diag_messages(
        """
        model Bad {
          input n: int(0, 5)
          output xs: int(0, 5)[3] = [0, 0, 0]
          initial state S { for i in 0..n { xs[i] := 0 } }
        }
        """
    )
    assert any("non-constant loop bound" in m for m in msgs)


def test_unknown_identifier_in_guard():
    msgs = diag_messages(
        """
        model Bad {
          output o: bool = false
          initial state A { o := false }
          state B { o := true }
          transition A -> B strong when mystery
        }
        """
    )
    assert any("unknown identifier" in m for m in msgs)


def test_duplicate_names_rejected():
    msgs = diag_messages(
        """
        model Bad {
          input x: bool
          output x: bool = false
          initial state S { x := false }
        }
        """
    )
    assert any("duplicate name" in m for m in msgs)


def test_type_mismatch_rejected():
    msgs = diag_messages(
        """
        model Bad {
          input n: int(0, 5)
          output o: bool = false
          initial state S { o := n }
        }
        """
    )
    assert any("type mismatch" in m for m in msgs)


def test_out_of_bounds_index_rejected():
    msgs = diag_messages(
        """
        model Bad {
          input i: int(0, 5)
          input xs: bool[3]
          output o: bool = false
          initial state S { o := xs[i] }
        }
        """
    )
    assert any("index may leave bounds" in m for m in msgs)


def test_assignment_to_input_rejected():
    msgs = diag_messages(
        """
        model Bad {
          input x: bool
          output o: bool = false
          initial state S { x := true }
        }
        """
    )
    assert any("cannot assign to input" in m for m in msgs)


def test_repeated_guard_atom_rejected():
    msgs = diag_messages(
        """
        model Bad {
          input a: bool
          output o: bool = false
          initial state S { o := false }
          state T { o := true }
          transition S -> T strong when a && a
        }
        """
    )
    assert any("condition repeated" in m for m in msgs)


def test_diagnostics_carry_positions():
    result = parse_model("model M {\n  output o: bool = maybe\n}")
    assert result.model is None
    assert any(d.pos.line == 2 for d in result.diagnostics)
    rendered = result.diagnostics[0].render("m.smx")
    assert rendered.startswith("m.smx:") and ": error: " in rendered


@pytest.mark.parametrize(
    "text",
    [
        "",
        "model",
        "model M {",
        "model M { input x: }",
        "model M { state S { } }",  # no initial state
        "model M { initial state S { o := } }",
        "%%%",
    ],
)
def test_parsing_is_total_on_garbage(text):
    result = parse_model(text)
    assert result.model is None
    assert result.diagnostics
