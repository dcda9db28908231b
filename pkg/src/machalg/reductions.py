"""Reductions that carve smaller machines out of larger ones.

Two primitive moves:

* functional reduction drops transition functions while keeping every state;
* state reduction keeps a subset of states, retaining exactly the
  restrictions of those functions that map the subset into itself.

A sub-machine is the result of a functional reduction followed by a state
reduction.  State labels are matched literally here; matching up to
renaming is isomorphism territory and lives elsewhere.  Output
designations are bookkeeping and are not consulted by these operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    EmptyReductionError,
    InvalidMachineError,
    InvalidReductionError,
)
from .machine import Machine, StateSet, TransitionFunction, make_machine


@dataclass(frozen=True)
class Reduction:
    """Witness for one reduction step.

    kind "functional": ``kept_functions`` holds indices into
    ``source.functions``.  kind "state": ``kept_states`` holds the retained
    labels in result order.  ``result`` is the reduced machine either way.
    """

    kind: str
    source: Machine
    result: Machine
    kept_functions: tuple[int, ...] = ()
    kept_states: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("functional", "state"):
            raise InvalidReductionError(f"unknown reduction kind {self.kind!r}")
        if self.kind == "functional" and not self.kept_functions:
            raise InvalidReductionError("functional reduction witness lists no functions")
        if self.kind == "state" and not self.kept_states:
            raise InvalidReductionError("state reduction witness lists no states")


def functional_reduce(m: Machine, keep: Iterable[TransitionFunction]) -> Machine:
    """Keep only the listed functions; the state set is untouched."""
    return functional_reduction(m, keep).result


def functional_reduction(m: Machine, keep: Iterable[TransitionFunction]) -> Reduction:
    """Like :func:`functional_reduce` but returns the full witness."""
    keep = list(keep)
    if not keep:
        raise InvalidMachineError("a machine cannot keep zero transition functions")
    indices = set()
    for f in keep:
        try:
            indices.add(m.function_index(f))
        except KeyError:
            raise InvalidReductionError(
                "functional reduction may only keep functions the machine already has"
            ) from None
    kept = tuple(sorted(indices))
    reduced = make_machine(m.states, [m.functions[i] for i in kept], name=m.name)
    return Reduction("functional", m, reduced, kept_functions=kept)


def preserves(f: TransitionFunction, labels: Sequence[str]) -> bool:
    """True when ``f`` maps every listed state to a listed state."""
    kept = {f.domain.index(s) for s in labels}
    return all(f.table[i] in kept for i in kept)


def restrict(f: TransitionFunction, sub: StateSet) -> TransitionFunction:
    """Restriction of ``f`` to a preserved subset, reindexed against ``sub``."""
    if not preserves(f, sub.labels):
        raise InvalidReductionError(
            f"function does not map {list(sub.labels)} into itself"
        )
    table = tuple(sub.index(f(s)) for s in sub.labels)
    return TransitionFunction(sub, table, f.name)


def state_reduce(m: Machine, keep_states: Sequence[str]) -> Machine:
    """Shrink to ``keep_states``; the result is unique given the subset.

    Keeps exactly the restrictions of functions preserving the subset,
    extensional duplicates collapsed.  The given label order becomes the
    reduced machine's state order.
    """
    return state_reduction(m, keep_states).result


def state_reduction(m: Machine, keep_states: Sequence[str]) -> Reduction:
    """Like :func:`state_reduce` but returns the full witness."""
    keep_states = tuple(keep_states)
    if not keep_states:
        raise InvalidReductionError("a state reduction must keep at least one state")
    foreign = [s for s in keep_states if s not in m.states]
    if foreign:
        raise InvalidReductionError(f"states not in the machine: {foreign}")
    sub = StateSet(keep_states)  # validates distinctness
    preserving = [f for f in m.functions if preserves(f, keep_states)]
    if not preserving:
        raise EmptyReductionError(
            f"no transition function preserves {list(keep_states)}; "
            "the reduction would leave an empty function set"
        )
    reduced = make_machine(sub, [restrict(f, sub) for f in preserving], name=m.name)
    return Reduction("state", m, reduced, kept_states=keep_states)


def sub_machine(
    m: Machine,
    keep_functions: Optional[Iterable[TransitionFunction]] = None,
    keep_states: Optional[Sequence[str]] = None,
) -> tuple[Reduction, Reduction, Machine]:
    """Functional reduction followed by state reduction, with witnesses."""
    fr = functional_reduction(
        m, m.functions if keep_functions is None else keep_functions
    )
    sr = state_reduction(
        fr.result, fr.result.states.labels if keep_states is None else keep_states
    )
    return fr, sr, sr.result


def is_sub_machine(a: Machine, b: Machine) -> Optional[tuple[Reduction, Reduction]]:
    """Witness that ``b`` arises from ``a`` by the two reductions, or None.

    Labels are literal, so the only candidate state subset is ``b``'s own
    label set.  ``b`` qualifies exactly when each of its functions is the
    restriction of some function of ``a`` preserving that subset.  The
    returned functional reduction keeps every function of ``a`` whose
    restriction lands in ``b``'s function set, which makes the witness
    canonical (it is the same for every run).
    """
    if not set(b.states.labels) <= set(a.states.labels):
        return None
    sub = b.states
    wanted = {g.table for g in b.functions}
    kept = []
    achieved = set()
    for f in a.functions:
        if preserves(f, sub.labels):
            r = restrict(f, sub).table
            if r in wanted:
                kept.append(f)
                achieved.add(r)
    if achieved != wanted:
        return None
    fr = functional_reduction(a, kept)
    sr = state_reduction(fr.result, sub.labels)
    if sr.result.states != b.states or sr.result.functions != b.functions:
        return None
    return fr, sr
