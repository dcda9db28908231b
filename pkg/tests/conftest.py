"""Shared randomized generators; everything is seeded and deterministic."""

from __future__ import annotations

import random


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Replay the acceptance verdict lines after the usual test output."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

from machalg import (
    BoundaryPolicy,
    Machine,
    Move,
    StateSet,
    TmConfiguration,
    TransitionFunction,
    TuringSpec,
    make_machine,
)

MOVES = (Move.LEFT, Move.RIGHT, Move.STAY)


def random_turing_spec(
    rng: random.Random,
    max_registers: int = 3,
    max_symbols: int = 2,
    max_cells: int = 4,
    rule_density: float = 0.85,
) -> TuringSpec:
    k = rng.randint(1, max_registers)
    registers = tuple(f"q{i}" for i in range(k))
    m = rng.randint(1, max_symbols)
    symbols = tuple(str(i) for i in range(m))
    n = rng.randint(1, max_cells)
    halting = frozenset(r for r in registers if rng.random() < 0.25)
    rules = {}
    for r in registers:
        if r in halting:
            continue
        for s in symbols:
            if rng.random() < rule_density:
                rules[(r, s)] = (
                    rng.choice(registers),
                    rng.choice(symbols),
                    rng.choice(MOVES),
                )
    policy = rng.choice((BoundaryPolicy.REJECT, BoundaryPolicy.CLAMP))
    initial = random_tm_config(rng, symbols, registers, n)
    return TuringSpec(
        symbols=symbols,
        registers=registers,
        cells=n,
        rules=rules,
        halting=halting,
        boundary_policy=policy,
        initial=initial,
    )


def random_tm_config(
    rng: random.Random, symbols, registers, cells: int
) -> TmConfiguration:
    return TmConfiguration(
        rng.choice(registers),
        tuple(rng.choice(symbols) for _ in range(cells)),
        rng.randrange(cells),
    )


def conjugated(m: Machine, perm: tuple[int, ...], labels=None) -> Machine:
    """Relabel a machine through a state permutation; isomorphic by design."""
    n = m.n_states
    new_labels = tuple(labels) if labels else tuple(f"t{i}" for i in range(n))
    domain = StateSet(new_labels)
    fns = []
    for f in m.functions:
        table = [0] * n
        for s in range(n):
            table[perm[s]] = perm[f.table[s]]
        fns.append(TransitionFunction(domain, tuple(table)))
    return make_machine(domain, fns)
