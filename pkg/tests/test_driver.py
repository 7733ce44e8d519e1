"""Exploration driver: trace shapes, bookkeeping invariants, statistics."""

from __future__ import annotations

import random

from oracles import brute_force_sequences, random_valid_model, trace_sequences

from sspc_testgen.driver import ExploreConfig, ExploreStats, explore, trace_dump, trace_stats
from sspc_testgen.parser import parse_model


def test_wing_mirror_traces(wing_mirror):
    traces, stats = explore(wing_mirror)
    assert stats.paths == 5
    assert all(len(t.cycles) <= 2 for t in traces)
    assert stats.steps_max == 2
    # the unlock-then-relock shape is present
    shapes = {(t.entry_sequence(), t.fired_sequence()) for t in traces}
    assert (("CAR_IS_LOCKED", "CAR_IS_UNLOCKED"), (0, 1)) in shapes


def test_single_state_weak_self_transition_two_cycles(pulse):
    traces, _ = explore(pulse)
    assert traces, "weak self-loop must produce traces"
    assert all(len(t.cycles) == 2 for t in traces)
    assert all(t.cycles[0].weak_fired for t in traces)


def test_single_state_strong_self_transition_one_cycle(echo):
    traces, _ = explore(echo)
    assert [len(t.cycles) for t in traces] == [1]


def test_unreachable_state_never_entered():
    m = parse_model(
        """
        model M {
          input a: bool
          output o: bool = false
          initial state S { o := a }
          state ISLAND { o := true }
        }
        """
    ).model
    traces, _ = explore(m)
    assert all("ISLAND" not in t.entry_sequence() for t in traces)


def test_sequence_discipline(radio_watch):
    traces, _ = explore(radio_watch)
    for t in traces:
        for k, cycle in enumerate(t.cycles, start=1):
            assert cycle.sequence == k
            assert all(s.sequence == k for s in cycle.input_symbols)


def test_snapshot_references_only_past_symbols(radio_watch):
    from sspc_testgen.symexpr import symbols_of

    traces, _ = explore(radio_watch)
    for t in traces:
        for cycle in t.cycles:
            for expr in cycle.outputs.values():
                assert all(s.sid.sequence <= cycle.sequence for s in symbols_of(expr))


def test_length_bound_twice_state_count(radio_watch):
    traces, _ = explore(radio_watch)
    bound = 2 * len(radio_watch.states)
    assert all(len(t.cycles) <= bound for t in traces)


def test_weak_revisit_bookkeeping(radio_watch):
    # dropping each stutter entry (the one permitted revisit granted by a
    # weak fire) leaves all remaining entry states distinct
    traces, _ = explore(radio_watch)
    for t in traces:
        keep = []
        stutter = False
        for cycle in t.cycles:
            if not stutter:
                keep.append(cycle.entry_state)
            stutter = cycle.weak_fired and not stutter
        assert len(keep) == len(set(keep)), (t.entry_sequence(), [c.weak_fired for c in t.cycles])


def test_traces_in_canonical_order(wing_mirror):
    traces, _ = explore(wing_mirror)
    assert [t.trace_id for t in traces] == list(range(5))

    def key(t):
        return tuple(len(wing_mirror.transitions) if f is None else f for f in t.fired_sequence())

    keys = [key(t) for t in traces]
    assert keys == sorted(keys)


def test_max_paths_cap_truncates():
    m = parse_model(
        """
        model M {
          input a: bool
          input b: bool
          output o: bool = false
          initial state S { if a { if b { o := true } } }
        }
        """
    ).model
    traces, stats = explore(m, ExploreConfig(max_paths=2))
    assert len(traces) == 2 and stats.truncated


def test_trace_stats_arithmetic():
    class FakeTrace:
        def __init__(self, n):
            self.cycles = [None] * n

    stats = trace_stats([FakeTrace(1), FakeTrace(2), FakeTrace(2)])
    assert stats.paths == 3
    assert stats.steps_avg == 1.67
    assert stats.steps_max == 2

    empty = trace_stats([])
    assert empty.paths == 0 and empty.steps_avg == 0.0 and empty.steps_max == 0


def test_wing_mirror_stats(wing_mirror):
    _, stats = explore(wing_mirror)
    assert stats.steps_max == 2
    assert stats.solver.timeouts == 0
    payload = stats.to_json()
    assert payload["paths"] == 5
    assert set(payload["solver"]) == {"queries", "timeouts", "max_query_micros"}


def test_trace_dump_format(pulse):
    traces, _ = explore(pulse)
    dump = trace_dump(traces)
    assert "seq=1 state=RUN fired=t0 weak=true" in dump
    assert "seq=2 state=RUN" in dump


def test_sequences_match_brute_force_on_corpus(wing_mirror, pulse, echo, radio_watch, scanner):
    for model in (wing_mirror, pulse, echo, radio_watch, scanner):
        traces, stats = explore(model)
        assert stats.solver.timeouts == 0
        assert trace_sequences(traces) == brute_force_sequences(model), model.name


def test_sequences_match_brute_force_on_random_models():
    rng = random.Random(99)
    for _ in range(10):
        model = random_valid_model(rng)
        traces, _ = explore(model)
        assert trace_sequences(traces) == brute_force_sequences(model), model.name
