"""Mutation-based baseline generator over the same driver loop.

Input sequences are encoded as byte buffers (one leaf = enough bytes
for its domain, big-endian; decode clamps by modular reduction, so
decoding is total).  The campaign keeps a queue seeded with given input
sequences; each iteration picks a queue entry round-robin, applies one
mutation (bit flip, byte randomization, step duplication or truncation
within the length bound of twice the state count), replays it through
the concrete interpreter, and admits it to the queue only when it
increases the cumulative model-coverage hit set (states, transitions,
MC/DC conditions).  Fully deterministic for a fixed rng seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .coverage import CoverageTracker
from .interp import Store, default_values, eval_cycle
from .lang import (
    Model,
    Ty,
    Value,
    domain_size,
    input_leaves,
    output_leaves,
    scalar_index,
    value_at,
)
from .suite import TestCase, TestStep


def leaf_width(ty: Ty) -> int:
    """Bytes needed for one leaf: ceil(log256(domain size)), at least 1."""
    size = domain_size(ty)
    width = 1
    while 256**width < size:
        width += 1
    return width


def step_width(model: Model) -> int:
    return sum(leaf_width(ty) for _, ty in input_leaves(model))


def encode(model: Model, steps: list[Store]) -> bytes:
    """Encode an input sequence; stable under one decode/encode round."""
    out = bytearray()
    for store in steps:
        for path, ty in input_leaves(model):
            k = scalar_index(ty, store[path])
            out.extend(k.to_bytes(leaf_width(ty), "big"))
    return bytes(out)


def decode(data: bytes, model: Model, steps: int) -> list[Store]:
    """Decode a buffer into ``steps`` input stores; total by clamping.

    Each leaf takes ``leaf_width`` bytes reduced modulo its domain size;
    missing bytes read as zero.
    """
    leaves = input_leaves(model)
    width = step_width(model)
    padded = data + b"\x00" * max(0, steps * width - len(data))
    stores: list[Store] = []
    offset = 0
    for _ in range(steps):
        store: Store = {}
        for path, ty in leaves:
            w = leaf_width(ty)
            raw = int.from_bytes(padded[offset : offset + w], "big")
            store[path] = value_at(ty, raw % domain_size(ty))
            offset += w
        stores.append(store)
    return stores


@dataclass
class QueueEntry:
    data: bytes
    steps: int
    fingerprint: frozenset


@dataclass
class FuzzResult:
    suite: list[TestCase]
    queue: list[QueueEntry]
    coverage_keys: frozenset
    iterations: int


def _replay(model: Model, tracker: CoverageTracker, stores: list[Store]) -> None:
    state = model.initial
    outputs = default_values(model)
    for inputs in stores:
        prev = outputs
        entry = state
        state, outputs, fired, _ = eval_cycle(model, entry, inputs, prev)
        tracker.add_cycle(entry, fired, inputs, prev)


def _entry_to_case(model: Model, entry: QueueEntry, trace_id: int) -> TestCase:
    """Convert a queue entry to a test case with interpreter outputs as checks."""
    stores = decode(entry.data, model, entry.steps)
    out_leaves = output_leaves(model)
    state = model.initial
    outputs = default_values(model)
    steps: list[TestStep] = []
    for inputs in stores:
        prev = outputs
        state, outputs, _, _ = eval_cycle(model, state, inputs, prev)
        sets = [(p, inputs[p]) for p, _ in input_leaves(model)]
        checks = [(p, outputs[p]) for p, _ in out_leaves]
        steps.append(TestStep(sets, checks))
    return TestCase(case_id="", steps=steps, trace_id=trace_id)


def fuzz(
    model: Model,
    seeds: list[list[Store]],
    budget: int,
    rng_seed: int = 0,
) -> FuzzResult:
    """Run one mutation campaign; returns the final queue as a suite.

    ``seeds`` are input sequences (one store per step).  ``budget`` is
    the number of mutation iterations; 0 keeps exactly the seeds.
    """
    if not seeds:
        raise ValueError("fuzzing needs at least one seed")
    rng = random.Random(rng_seed)
    max_steps = 2 * len(model.states)
    width = step_width(model)

    cumulative = CoverageTracker(model)
    queue: list[QueueEntry] = []

    def admit(data: bytes, steps: int, force: bool = False) -> None:
        nonlocal cumulative
        candidate = cumulative.copy()
        _replay(model, candidate, decode(data, model, steps))
        if force or len(candidate.hit_keys()) > len(cumulative.hit_keys()):
            cumulative = candidate
            queue.append(QueueEntry(data, steps, candidate.hit_keys()))

    for seq in seeds:
        admit(encode(model, seq), len(seq), force=True)

    for iteration in range(budget):
        entry = queue[iteration % len(queue)]
        data = bytearray(entry.data)
        steps = entry.steps
        op = rng.randrange(4)
        if op == 0 and data:  # flip one bit
            bit = rng.randrange(len(data) * 8)
            data[bit // 8] ^= 1 << (bit % 8)
        elif op == 1 and data:  # randomize one byte
            data[rng.randrange(len(data))] = rng.randrange(256)
        elif op == 2 and steps < max_steps:  # duplicate one step
            k = rng.randrange(steps)
            chunk = data[k * width : (k + 1) * width]
            data[(k + 1) * width : (k + 1) * width] = chunk
            steps += 1
        elif op == 3 and steps > 1:  # truncate the last step
            del data[(steps - 1) * width :]
            steps -= 1
        else:
            continue
        admit(bytes(data), steps)

    suite = [_entry_to_case(model, entry, i) for i, entry in enumerate(queue)]
    return FuzzResult(
        suite=suite,
        queue=queue,
        coverage_keys=cumulative.hit_keys(),
        iterations=budget,
    )


def seeds_from_case(model: Model, case: TestCase) -> list[Store]:
    """Input sequence of one concrete test case (the usual campaign seed)."""
    return [dict(step.sets) for step in case.steps]
