"""Concrete machine frontends compiled into the abstract normal form.

Two source models: bounded-tape Turing machines and finite memory-cell
programs whose cells both store and process (reads select cells, writes
update them, and the next selector and next rule index travel with the
state).  Both compile to a Machine with a single total step function; both
have direct interpreters that serve as independent oracles; and a Turing
machine can be translated into a memory-cell program whose run tracks the
original step for step, checked by verify_lockstep.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import (
    EnumerationTooLargeError,
    InvalidMachineError,
    TotalityViolationError,
)
from .machine import (
    DEFAULT_ENUMERATION_CAP,
    Machine,
    StateSet,
    TransitionFunction,
    make_machine,
)

# Characters reserved by the compiled-state label codecs plus the text
# formats those labels must survive (clause separators, comments, parens).
_TM_RESERVED = set("|.,;:#>()=")
_MEM_RESERVED = set("|,;:#>()=")


def _check_token(token: str, what: str, reserved: set) -> None:
    if not token or any(ch.isspace() for ch in token) or set(token) & reserved:
        raise InvalidMachineError(
            f"{what} {token!r} is empty, has whitespace, or uses a reserved "
            f"character ({''.join(sorted(reserved))})"
        )


class Move(str, Enum):
    LEFT = "L"
    RIGHT = "R"
    STAY = "S"


class BoundaryPolicy(str, Enum):
    REJECT = "reject"
    CLAMP = "clamp"


@dataclass(frozen=True)
class TmConfiguration:
    register: str
    tape: tuple[str, ...]
    head: int


@dataclass(frozen=True)
class TuringSpec:
    """A Turing machine on a fixed-length tape.

    ``rules`` maps (register, read symbol) to (register, written symbol,
    move).  A halting register never appears on a rule's left side; a
    missing rule means halt in place.  ``boundary_policy`` decides what a
    move off the tape edge does: reject routes to a designated absorbing
    error state, clamp leaves the head at the edge (the write and register
    change still happen).
    """

    symbols: tuple[str, ...]
    registers: tuple[str, ...]
    cells: int
    rules: dict
    halting: frozenset
    boundary_policy: BoundaryPolicy
    initial: TmConfiguration
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.symbols or len(set(self.symbols)) != len(self.symbols):
            raise InvalidMachineError("symbols must be non-empty and distinct")
        if not self.registers or len(set(self.registers)) != len(self.registers):
            raise InvalidMachineError("registers must be non-empty and distinct")
        for s in self.symbols:
            _check_token(s, "symbol", _TM_RESERVED)
        for r in self.registers:
            _check_token(r, "register", _TM_RESERVED)
        if self.cells < 1:
            raise InvalidMachineError("the tape needs at least one cell")
        if not self.halting <= set(self.registers):
            raise InvalidMachineError("halting set names unknown registers")
        for (r, s), (r2, s2, mv) in self.rules.items():
            if r not in self.registers or r2 not in self.registers:
                raise InvalidMachineError(f"rule ({r},{s}) references an unknown register")
            if s not in self.symbols or s2 not in self.symbols:
                raise InvalidMachineError(f"rule ({r},{s}) references an unknown symbol")
            if r in self.halting:
                raise InvalidMachineError(
                    f"rule ({r},{s}): halting registers cannot have outgoing rules"
                )
            if not isinstance(mv, Move):
                raise InvalidMachineError(f"rule ({r},{s}) has a bad move {mv!r}")
        c = self.initial
        if len(c.tape) != self.cells:
            raise InvalidMachineError(
                f"initial tape has {len(c.tape)} cells, spec says {self.cells}"
            )
        if any(s not in self.symbols for s in c.tape):
            raise InvalidMachineError("initial tape uses unknown symbols")
        if not 0 <= c.head < self.cells:
            raise InvalidMachineError(f"initial head {c.head} is off the tape")
        if c.register not in self.registers:
            raise InvalidMachineError(f"initial register {c.register!r} is unknown")

    @property
    def k(self) -> int:
        return len(self.registers)

    @property
    def m(self) -> int:
        return len(self.symbols)

    @property
    def n(self) -> int:
        return self.cells


@dataclass(frozen=True)
class TmTrace:
    """Configuration sequence plus how it ended.

    outcome "halted": the final configuration is a fixed point (halting
    register or no applicable rule).  "boundary-error": the next move would
    leave the tape under the reject policy; the violating step is not taken.
    "step-limit": budget exhausted with the machine still running.
    """

    configurations: tuple[TmConfiguration, ...]
    outcome: str

    @property
    def steps(self) -> int:
        return len(self.configurations) - 1


def _tm_halts_at(t: TuringSpec, c: TmConfiguration) -> bool:
    return c.register in t.halting or (c.register, c.tape[c.head]) not in t.rules


def simulate_tm(t: TuringSpec, max_steps: int) -> TmTrace:
    """Direct rule interpretation; the oracle that compile_tm must match."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    configs = [t.initial]
    while True:
        c = configs[-1]
        if _tm_halts_at(t, c):
            return TmTrace(tuple(configs), "halted")
        if len(configs) == max_steps + 1:
            return TmTrace(tuple(configs), "step-limit")
        r2, s2, mv = t.rules[(c.register, c.tape[c.head])]
        tape = list(c.tape)
        tape[c.head] = s2
        head = c.head + {Move.LEFT: -1, Move.RIGHT: 1, Move.STAY: 0}[mv]
        if not 0 <= head < t.cells:
            if t.boundary_policy is BoundaryPolicy.CLAMP:
                head = c.head
            else:
                return TmTrace(tuple(configs), "boundary-error")
        configs.append(TmConfiguration(r2, tuple(tape), head))


ERROR_LABEL = "!boundary-error"


@dataclass(frozen=True)
class TmStateCodec:
    """Bijection between compiled state labels and (register, tape, head).

    Labels read ``register|sym.sym...|head``.  Under the reject policy one
    extra absorbing state carries the label in ``error_label`` and encodes
    no configuration.
    """

    symbols: tuple[str, ...]
    registers: tuple[str, ...]
    cells: int
    error_label: Optional[str] = None

    def encode(self, c: TmConfiguration) -> str:
        return f"{c.register}|{'.'.join(c.tape)}|{c.head}"

    def decode(self, label: str) -> TmConfiguration:
        if label == self.error_label:
            raise InvalidMachineError(f"{label!r} encodes no configuration")
        register, tape, head = label.split("|")
        return TmConfiguration(register, tuple(tape.split(".")), int(head))


def compile_tm(
    t: TuringSpec, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[Machine, TmStateCodec]:
    """Expand a TuringSpec into a Machine with one step function.

    States are all (register, tape contents, head) triples in declaration
    order (register-major, then tape lexicographic, then head), k*m^n*n of
    them, plus one absorbing error state under the reject policy.  Halting
    registers and missing rules yield fixed points.
    """
    k, m, n = t.k, t.m, t.n
    reject = t.boundary_policy is BoundaryPolicy.REJECT
    size = k * m**n * n + (1 if reject else 0)
    if size > cap:
        raise EnumerationTooLargeError("compiled state set", size, cap)

    tapes = list(itertools.product(t.symbols, repeat=n))
    labels = []
    for r in t.registers:
        for tape in tapes:
            for h in range(n):
                labels.append(f"{r}|{'.'.join(tape)}|{h}")
    error_index = None
    if reject:
        error_index = len(labels)
        labels.append(ERROR_LABEL)

    sym_rank = {s: i for i, s in enumerate(t.symbols)}
    tape_rank = {tape: i for i, tape in enumerate(tapes)}
    halting = t.halting

    def index_of(register_i: int, tape: tuple, head: int) -> int:
        return (register_i * len(tapes) + tape_rank[tape]) * n + head

    table = []
    for ri, r in enumerate(t.registers):
        for tape in tapes:
            for h in range(n):
                me = index_of(ri, tape, h)
                if r in halting:
                    table.append(me)
                    continue
                rule = t.rules.get((r, tape[h]))
                if rule is None:
                    table.append(me)
                    continue
                r2, s2, mv = rule
                new_tape = tape[:h] + (s2,) + tape[h + 1 :]
                h2 = h + {Move.LEFT: -1, Move.RIGHT: 1, Move.STAY: 0}[mv]
                if not 0 <= h2 < n:
                    if reject:
                        table.append(error_index)
                        continue
                    h2 = h
                table.append(index_of(t.registers.index(r2), new_tape, h2))
    if reject:
        table.append(error_index)

    domain = StateSet(tuple(labels))
    step = TransitionFunction(domain, tuple(table), "step")
    codec = TmStateCodec(
        t.symbols, t.registers, n, ERROR_LABEL if reject else None
    )
    return make_machine(domain, [step], name=t.name), codec


# ---------------------------------------------------------------------------
# Memory-cell programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MemEntry:
    """One rule of one indexed transition family.

    Applies when the current selector equals ``read_cells`` and those cells
    hold ``read_values``; then ``write_values`` land at ``write_cells``, the
    selector becomes ``next_read_cells``, and control moves to rule family
    ``next_function``.
    """

    read_cells: tuple[int, ...]
    read_values: tuple[str, ...]
    write_cells: tuple[int, ...]
    write_values: tuple[str, ...]
    next_read_cells: tuple[int, ...]
    next_function: int


@dataclass(frozen=True)
class MemState:
    cells: tuple[str, ...]
    selector: tuple[int, ...]
    fn: int


@dataclass(frozen=True)
class MemProgram:
    """Finite program over n memory cells sharing one alphabet.

    ``functions[a]`` is the entry list of family a.  ``finals`` lists
    (cell, value) conditions; a state where any condition holds is final
    and steps to itself.  With ``default_halt`` a missing entry also means
    halt in place; without it a missing entry is a totality error.
    """

    n_cells: int
    alphabet: tuple[str, ...]
    functions: tuple[tuple[MemEntry, ...], ...]
    initial_cells: tuple[str, ...]
    initial_selector: tuple[int, ...]
    initial_function: int
    finals: tuple[tuple[int, str], ...] = ()
    default_halt: bool = False
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_cells < 1:
            raise InvalidMachineError("a program needs at least one cell")
        if not self.alphabet or len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidMachineError("alphabet must be non-empty and distinct")
        for v in self.alphabet:
            _check_token(v, "alphabet value", _MEM_RESERVED)
        if not self.functions:
            raise InvalidMachineError("a program needs at least one rule family")
        if len(self.initial_cells) != self.n_cells:
            raise InvalidMachineError(
                f"initial contents fill {len(self.initial_cells)} of {self.n_cells} cells"
            )
        if any(v not in self.alphabet for v in self.initial_cells):
            raise InvalidMachineError("initial contents use unknown values")
        self._check_selector(self.initial_selector, "initial selector")
        if not 0 <= self.initial_function < len(self.functions):
            raise InvalidMachineError("initial rule-family index out of range")
        for c, v in self.finals:
            if not 0 <= c < self.n_cells or v not in self.alphabet:
                raise InvalidMachineError(f"final condition ({c},{v!r}) is invalid")
        for a, entries in enumerate(self.functions):
            seen = set()
            for e in entries:
                self._check_selector(e.read_cells, f"family {a} read selector")
                self._check_selector(e.write_cells, f"family {a} write selector")
                self._check_selector(e.next_read_cells, f"family {a} next selector")
                if len(e.read_values) != len(e.read_cells):
                    raise InvalidMachineError(f"family {a}: read arity mismatch")
                if len(e.write_values) != len(e.write_cells):
                    raise InvalidMachineError(f"family {a}: write arity mismatch")
                if any(v not in self.alphabet for v in e.read_values + e.write_values):
                    raise InvalidMachineError(f"family {a}: unknown value in entry")
                if not 0 <= e.next_function < len(self.functions):
                    raise InvalidMachineError(f"family {a}: next family index out of range")
                key = (e.read_cells, e.read_values)
                if key in seen:
                    raise InvalidMachineError(
                        f"family {a}: duplicate entry for read{key[0]}={key[1]}"
                    )
                seen.add(key)

    def _check_selector(self, sel: tuple, what: str) -> None:
        if len(set(sel)) != len(sel):
            raise InvalidMachineError(f"{what} repeats a cell")
        if any(not 0 <= c < self.n_cells for c in sel):
            raise InvalidMachineError(f"{what} references a cell out of range")

    @property
    def initial_state(self) -> MemState:
        return MemState(self.initial_cells, self.initial_selector, self.initial_function)


def mem_is_final(p: MemProgram, state: MemState) -> bool:
    return any(state.cells[c] == v for c, v in p.finals)


def _find_entry(p: MemProgram, state: MemState) -> Optional[MemEntry]:
    values = tuple(state.cells[c] for c in state.selector)
    for e in p.functions[state.fn]:
        if e.read_cells == state.selector and e.read_values == values:
            return e
    return None


def mem_step(p: MemProgram, state: MemState) -> MemState:
    """One aggregate step; total by construction or by explicit default."""
    if mem_is_final(p, state):
        return state
    e = _find_entry(p, state)
    if e is None:
        if p.default_halt:
            return state
        values = tuple(state.cells[c] for c in state.selector)
        raise TotalityViolationError(
            f"family {state.fn} has no entry for read{state.selector}={values} "
            "and the program declares no default"
        )
    cells = list(state.cells)
    for c, v in zip(e.write_cells, e.write_values):
        cells[c] = v
    return MemState(tuple(cells), e.next_read_cells, e.next_function)


def mem_run(p: MemProgram, steps: int) -> list[MemState]:
    """States visited from the initial state, inclusive; length steps+1."""
    out = [p.initial_state]
    for _ in range(steps):
        out.append(mem_step(p, out[-1]))
    return out


@dataclass(frozen=True)
class MemStateCodec:
    """Labels aggregate states as ``v;v;...|selector cells|family index``."""

    n_cells: int
    alphabet: tuple[str, ...]
    selectors: tuple[tuple[int, ...], ...]

    def encode(self, s: MemState) -> str:
        sel = ".".join(str(c) for c in s.selector)
        return f"{';'.join(s.cells)}|{sel}|{s.fn}"

    def decode(self, label: str) -> MemState:
        contents, sel, fn = label.split("|")
        selector = tuple(int(c) for c in sel.split(".")) if sel else ()
        return MemState(tuple(contents.split(";")), selector, int(fn))


def _selector_universe(p: MemProgram) -> tuple[tuple[int, ...], ...]:
    sels = {p.initial_selector}
    for entries in p.functions:
        for e in entries:
            sels.add(e.read_cells)
            sels.add(e.next_read_cells)
    return tuple(sorted(sels))


def compile_mem(
    p: MemProgram, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[Machine, MemStateCodec]:
    """Expand a MemProgram into a Machine over aggregate states.

    An aggregate state is (cell contents, current selector, current rule
    family); folding the selector and family into the state makes the whole
    program a single stationary step function.  Final states are fixed
    points.  Raises if some reachable combination has no entry and the
    program declares no default.
    """
    selectors = _selector_universe(p)
    n_fns = len(p.functions)
    size = len(p.alphabet) ** p.n_cells * len(selectors) * n_fns
    if size > cap:
        raise EnumerationTooLargeError("aggregate state set", size, cap)

    codec = MemStateCodec(p.n_cells, p.alphabet, selectors)
    states = [
        MemState(cells, sel, fn)
        for cells in itertools.product(p.alphabet, repeat=p.n_cells)
        for sel in selectors
        for fn in range(n_fns)
    ]
    index = {s: i for i, s in enumerate(states)}
    table = tuple(index[mem_step(p, s)] for s in states)
    domain = StateSet(tuple(codec.encode(s) for s in states))
    step = TransitionFunction(domain, table, "step")
    return make_machine(domain, [step], name=p.name), codec


# ---------------------------------------------------------------------------
# Turing machine -> memory-cell program
# ---------------------------------------------------------------------------


def _sym(s: str) -> str:
    return f"sym.{s}"


def _reg(r: str) -> str:
    return f"reg.{r}"


def _pos(h) -> str:
    return f"pos.{h}"


def tm_to_mem(t: TuringSpec) -> MemProgram:
    """Rebuild a Turing machine as cells: tape cells 0..n-1, a register
    cell n, an address cell n+1.

    Every step reads (register cell, address cell, the addressed tape cell)
    and writes the rule's outputs; the next selector carries the new head
    position, so the read target moves with the head.  The shared alphabet
    namespaces values as sym.*, reg.* and pos.* to keep the cells' roles
    disjoint.  Halting registers become final conditions; missing rules
    fall to the default (halt in place).  A rejected boundary move writes
    pos.err to the address cell and parks the selector on a combination
    with no entries, an absorbing fixed point.
    """
    n = t.cells
    reg_cell = n
    addr_cell = n + 1
    reject = t.boundary_policy is BoundaryPolicy.REJECT
    alphabet = (
        tuple(_sym(s) for s in t.symbols)
        + tuple(_reg(r) for r in t.registers)
        + tuple(_pos(h) for h in range(n))
        + ((_pos("err"),) if reject else ())
    )
    entries = []
    for j in range(n):
        for (r, s), (r2, s2, mv) in sorted(t.rules.items()):
            h2 = j + {Move.LEFT: -1, Move.RIGHT: 1, Move.STAY: 0}[mv]
            read = ((reg_cell, addr_cell, j), (_reg(r), _pos(j), _sym(s)))
            if 0 <= h2 < n:
                pass
            elif not reject:
                h2 = j
            else:
                entries.append(
                    MemEntry(
                        read_cells=read[0],
                        read_values=read[1],
                        write_cells=(addr_cell,),
                        write_values=(_pos("err"),),
                        next_read_cells=(reg_cell, addr_cell),
                        next_function=0,
                    )
                )
                continue
            entries.append(
                MemEntry(
                    read_cells=read[0],
                    read_values=read[1],
                    write_cells=(reg_cell, addr_cell, j),
                    write_values=(_reg(r2), _pos(h2), _sym(s2)),
                    next_read_cells=(reg_cell, addr_cell, h2),
                    next_function=0,
                )
            )
    return MemProgram(
        n_cells=n + 2,
        alphabet=alphabet,
        functions=(tuple(entries),),
        initial_cells=tuple(_sym(s) for s in t.initial.tape)
        + (_reg(t.initial.register), _pos(t.initial.head)),
        initial_selector=(reg_cell, addr_cell, t.initial.head),
        initial_function=0,
        finals=tuple((reg_cell, _reg(r)) for r in sorted(t.halting)),
        default_halt=True,
        name=t.name,
    )


@dataclass(frozen=True)
class LockstepReport:
    """Outcome of running a TuringSpec and a MemProgram side by side."""

    steps_verified: int
    mapping: str
    divergence: Optional[tuple[int, str]]
    tm_outcome: str

    @property
    def ok(self) -> bool:
        return self.divergence is None


def verify_lockstep(t: TuringSpec, p: MemProgram, steps: int) -> LockstepReport:
    """Check tape<->cells, register<->cell n, head<->cell n+1 every step.

    Follows the Turing trace for at most ``steps`` transitions, advancing
    the program in lockstep.  After a halt the program must sit on a fixed
    point; after a rejected boundary move it must show pos.err in the
    address cell one step later.
    """
    n = t.cells
    mapping = (
        f"tape[i] <-> cell i (sym.*) for i<{n}; register <-> cell {n} (reg.*); "
        f"head <-> cell {n + 1} (pos.*)"
    )
    trace = simulate_tm(t, steps)
    state = p.initial_state
    verified = 0
    for i, c in enumerate(trace.configurations):
        want = (
            tuple(_sym(s) for s in c.tape),
            _reg(c.register),
            _pos(c.head),
        )
        got = (state.cells[:n], state.cells[n], state.cells[n + 1])
        if got != want:
            return LockstepReport(
                verified,
                mapping,
                (i, f"expected {want}, program shows {got}"),
                trace.outcome,
            )
        if i > 0:
            verified += 1
        if i + 1 < len(trace.configurations):
            state = mem_step(p, state)
    if trace.outcome == "halted":
        nxt = mem_step(p, state)
        if nxt != state:
            return LockstepReport(
                verified,
                mapping,
                (len(trace.configurations) - 1, "machine halted but program still moves"),
                trace.outcome,
            )
    elif trace.outcome == "boundary-error":
        state = mem_step(p, state)
        if state.cells[n + 1] != _pos("err"):
            return LockstepReport(
                verified,
                mapping,
                (
                    len(trace.configurations) - 1,
                    "rejected boundary move not mirrored by pos.err",
                ),
                trace.outcome,
            )
        verified += 1
    return LockstepReport(verified, mapping, None, trace.outcome)


def full_bijection_machine(
    states: StateSet, cap: int = DEFAULT_ENUMERATION_CAP
) -> Machine:
    """The machine whose realizable set is exactly all bijections on S.

    A strict subset of the full function set for |S| >= 2, and closed under
    conjugation by any state bijection, which is what blocks isomorphisms
    to machines holding any non-invertible function.
    """
    n = len(states)
    size = 1
    for i in range(2, n + 1):
        size *= i
    if size > cap:
        raise EnumerationTooLargeError("bijection set", size, cap)
    fns = [
        TransitionFunction(states, perm)
        for perm in itertools.permutations(range(n))
    ]
    return Machine(states, tuple(fns), frozenset(), None)
