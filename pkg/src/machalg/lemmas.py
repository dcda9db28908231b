"""Randomized checks of the reduction composition and commutation laws.

Three laws are checked on machines drawn uniformly at small sizes:

1. Keeping functions twice equals keeping the inner selection once.
2. Shrinking the state set twice equals shrinking to the inner subset once.
3. A functional reduction followed by a state reduction can be reordered
   as a state reduction followed by a functional reduction, and back.

Law 2 is checked exactly as stated even though it does not hold for this
reduction semantics: restricting to the inner subset directly can keep a
function whose extension fails to preserve the intermediate subset, so the
two-step result may be a strict sub-machine of the one-step result.  The
checker reports such cases as violations rather than papering over them;
see tests for the minimal counterexample.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import EmptyReductionError
from .machine import Machine, StateSet, TransitionFunction, make_machine
from .reductions import functional_reduce, preserves, restrict, state_reduce

LEMMA_NAMES = {
    1: "nested functional reductions collapse",
    2: "nested state reductions collapse",
    3: "functional and state reductions commute",
}


def random_machine(
    rng: random.Random, max_states: int = 4, max_functions: int = 6
) -> Machine:
    """Uniform draw: a state count, then distinct transition tables."""
    n = rng.randint(1, max_states)
    states = StateSet(tuple(f"s{i}" for i in range(n)))
    tables = list(itertools.product(range(n), repeat=n))
    k = rng.randint(1, min(max_functions, len(tables)))
    chosen = rng.sample(tables, k)
    fns = [TransitionFunction(states, t) for t in chosen]
    return make_machine(states, fns)


def _subset(rng: random.Random, items: tuple) -> list:
    """Non-empty subset in original order."""
    k = rng.randint(1, len(items))
    picks = sorted(rng.sample(range(len(items)), k))
    return [items[i] for i in picks]


def _describe(m: Machine) -> str:
    tables = ", ".join(str(f.table) for f in m.functions)
    return f"states={list(m.states.labels)} tables=[{tables}]"


def _try_state_reduce(m: Machine, labels) -> Machine | None:
    try:
        return state_reduce(m, labels)
    except EmptyReductionError:
        return None


def check_lemma_1(m: Machine, rng: random.Random) -> str | None:
    """None when the law holds on one random draw, else a counterexample."""
    k1 = _subset(rng, m.functions)
    inner = functional_reduce(m, k1)
    k2 = _subset(rng, inner.functions)
    left = functional_reduce(inner, k2)
    right = functional_reduce(m, k2)
    if left == right:
        return None
    return (
        f"{_describe(m)} keep1={[f.table for f in k1]} keep2={[f.table for f in k2]}: "
        f"two-step {_describe(left)} != one-step {_describe(right)}"
    )


def check_lemma_2(m: Machine, rng: random.Random) -> tuple[bool, str | None]:
    """(applicable, counterexample or None) for one random nested pair."""
    s1 = _subset(rng, m.states.labels)
    inner = _try_state_reduce(m, s1)
    if inner is None:
        return False, None
    s2 = _subset(rng, tuple(s1))
    left = _try_state_reduce(inner, s2)
    right = _try_state_reduce(m, s2)
    if left is None and right is None:
        return True, None
    if left is None or right is None:
        missing = "two-step" if left is None else "one-step"
        return True, f"{_describe(m)} outer={s1} inner={s2}: {missing} side undefined"
    if left == right:
        return True, None
    return True, (
        f"{_describe(m)} outer={s1} inner={s2}: "
        f"two-step {_describe(left)} != one-step {_describe(right)}"
    )


def check_lemma_3(m: Machine, rng: random.Random) -> tuple[int, list[str]]:
    """(directions checked, violations) for one random draw per direction."""
    checked = 0
    problems: list[str] = []

    # functions first, then states; rebuild as states first, functions second
    keep = _subset(rng, m.functions)
    fr = functional_reduce(m, keep)
    s1 = _subset(rng, m.states.labels)
    b = _try_state_reduce(fr, s1)
    if b is not None:
        checked += 1
        sr = _try_state_reduce(m, s1)
        if sr is None:
            problems.append(
                f"{_describe(m)} keep={[f.table for f in keep]} subset={s1}: "
                "state reduction vanished after widening the function set"
            )
        else:
            wanted = {f.table for f in b.functions}
            if not wanted <= {f.table for f in sr.functions}:
                problems.append(
                    f"{_describe(m)} keep={[f.table for f in keep]} subset={s1}: "
                    f"{_describe(b)} is not a functional reduction of {_describe(sr)}"
                )
            else:
                cand = functional_reduce(
                    sr, [f for f in sr.functions if f.table in wanted]
                )
                if cand != b:
                    problems.append(
                        f"{_describe(m)} keep={[f.table for f in keep]} subset={s1}: "
                        f"rebuilt {_describe(cand)} != direct {_describe(b)}"
                    )

    # states first, then functions; rebuild as functions first, states second
    s2 = _subset(rng, m.states.labels)
    sr2 = _try_state_reduce(m, s2)
    if sr2 is not None:
        checked += 1
        keep2 = _subset(rng, sr2.functions)
        b2 = functional_reduce(sr2, keep2)
        wanted2 = {f.table for f in b2.functions}
        lifted = [
            f
            for f in m.functions
            if preserves(f, s2) and restrict(f, b2.states).table in wanted2
        ]
        if not lifted:
            problems.append(
                f"{_describe(m)} subset={s2} keep={sorted(wanted2)}: no lift exists"
            )
        else:
            cand2 = _try_state_reduce(functional_reduce(m, lifted), s2)
            if cand2 != b2:
                got = "undefined" if cand2 is None else _describe(cand2)
                problems.append(
                    f"{_describe(m)} subset={s2} keep={sorted(wanted2)}: "
                    f"rebuilt {got} != direct {_describe(b2)}"
                )
    return checked, problems


@dataclass(frozen=True)
class LemmaViolation:
    lemma: int
    description: str


@dataclass(frozen=True)
class LemmaRunReport:
    """Outcome of a seeded randomized run over all three laws."""

    seed: int
    iterations: int
    checked: tuple[tuple[int, int], ...]
    violations: tuple[LemmaViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def checked_for(self, lemma: int) -> int:
        for num, count in self.checked:
            if num == lemma:
                return count
        return 0

    def violations_for(self, lemma: int) -> tuple[LemmaViolation, ...]:
        return tuple(v for v in self.violations if v.lemma == lemma)


def run_lemma_suite(
    seed: int,
    iterations: int,
    max_states: int = 4,
    max_functions: int = 6,
) -> LemmaRunReport:
    """Draw ``iterations`` machines and check every law on each."""
    rng = random.Random(seed)
    counts = {1: 0, 2: 0, 3: 0}
    violations: list[LemmaViolation] = []
    for _ in range(iterations):
        m = random_machine(rng, max_states, max_functions)

        problem = check_lemma_1(m, rng)
        counts[1] += 1
        if problem is not None:
            violations.append(LemmaViolation(1, problem))

        applicable, problem = check_lemma_2(m, rng)
        if applicable:
            counts[2] += 1
        if problem is not None:
            violations.append(LemmaViolation(2, problem))

        checked, problems = check_lemma_3(m, rng)
        counts[3] += checked
        for p in problems:
            violations.append(LemmaViolation(3, p))
    return LemmaRunReport(
        seed=seed,
        iterations=iterations,
        checked=tuple(sorted(counts.items())),
        violations=tuple(violations),
    )
