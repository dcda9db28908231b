"""Text formats: machines, Turing specs, memory-cell programs, certificates.

All four formats are line-oriented, ``#`` starts a comment, and parsing
reports positions as line/column in ParseError.  Rendering is canonical:
the same value always produces byte-identical text, and parse(render(x))
round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidMachineError, ParseError
from .machine import Machine, StateSet, TransitionFunction, fn_from_map, make_machine
from .models import (
    BoundaryPolicy,
    MemEntry,
    MemProgram,
    Move,
    TmConfiguration,
    TuringSpec,
)


def _significant_lines(text: str) -> list[tuple[int, str, list[str]]]:
    """(line number, raw line, tokens) for every non-blank non-comment line."""
    rows = []
    for i, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            rows.append((i, raw, body.split()))
    return rows


def _col(raw: str, piece: str) -> int:
    at = raw.find(piece)
    return at + 1 if at >= 0 else 1


# ---------------------------------------------------------------------------
# Machine format (.mx)
# ---------------------------------------------------------------------------

_MX_BAD = (",", ":", "->", "#")


def _check_mx_token(token: str, what: str, lineno: int, raw: str) -> None:
    if any(bad in token for bad in _MX_BAD):
        raise ParseError(
            f"{what} {token!r} may not contain any of , : -> #",
            lineno,
            _col(raw, token),
        )


def parse_machine(text: str) -> Machine:
    """Read the ``machine`` block format.

    Rejects missing clauses (every function must cover every state),
    unknown state names, duplicate states, functions, or clauses, and
    output lines naming undeclared functions.
    """
    rows = _significant_lines(text)
    if not rows:
        raise ParseError("empty input; expected 'machine <name>'", 1)
    name = None
    state_set = None
    fns: list[TransitionFunction] = []
    fn_names: dict[str, TransitionFunction] = {}
    output_names: list[tuple[str, int, str]] = []
    last_line = rows[-1][0]

    for lineno, raw, tokens in rows:
        head = tokens[0]
        if head == "machine":
            if name is not None:
                raise ParseError("second 'machine' header", lineno, _col(raw, "machine"))
            if len(tokens) != 2:
                raise ParseError("expected 'machine <name>'", lineno, 1)
            name = tokens[1]
        elif head == "states":
            if name is None:
                raise ParseError("'machine <name>' must come first", lineno, 1)
            if state_set is not None:
                raise ParseError("second 'states' line", lineno, 1)
            if len(tokens) < 2:
                raise ParseError("'states' needs at least one state", lineno, 1)
            seen = set()
            for s in tokens[1:]:
                _check_mx_token(s, "state", lineno, raw)
                if s in seen:
                    raise ParseError(f"duplicate state {s!r}", lineno, _col(raw, s))
                seen.add(s)
            state_set = StateSet(tuple(tokens[1:]))
        elif head == "fn":
            if state_set is None:
                raise ParseError("'states' must come before 'fn'", lineno, 1)
            body = raw.split("#", 1)[0]
            header, sep, rest = body.partition(":")
            if not sep:
                raise ParseError("fn line needs 'fn <name>: <clauses>'", lineno, 1)
            htokens = header.split()
            if len(htokens) != 2:
                raise ParseError("fn line needs exactly one name", lineno, 1)
            fname = htokens[1]
            _check_mx_token(fname, "function name", lineno, raw)
            if fname in fn_names:
                raise ParseError(f"duplicate function name {fname!r}", lineno, _col(raw, fname))
            mapping: dict[str, str] = {}
            for chunk in rest.split(","):
                clause = chunk.strip()
                if not clause:
                    raise ParseError("empty clause", lineno, _col(raw, chunk) if chunk else 1)
                parts = clause.split("->")
                if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                    raise ParseError(
                        f"clause {clause!r} must read 'state->state'",
                        lineno,
                        _col(raw, clause),
                    )
                src, dst = parts[0].strip(), parts[1].strip()
                for tok in (src, dst):
                    if tok not in state_set:
                        raise ParseError(f"unknown state {tok!r}", lineno, _col(raw, tok))
                if src in mapping:
                    raise ParseError(f"duplicate clause for state {src!r}", lineno, _col(raw, clause))
                mapping[src] = dst
            missing = [s for s in state_set.labels if s not in mapping]
            if missing:
                raise ParseError(
                    f"fn {fname!r} missing clauses for: {' '.join(missing)}", lineno, 1
                )
            f = fn_from_map(state_set, mapping, fname)
            fn_names[fname] = f
            fns.append(f)
        elif head == "output":
            if len(tokens) < 2:
                raise ParseError("'output' needs at least one function name", lineno, 1)
            for tok in tokens[1:]:
                output_names.append((tok, lineno, raw))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, _col(raw, head))

    if name is None:
        raise ParseError("missing 'machine <name>' header", last_line)
    if state_set is None:
        raise ParseError("missing 'states' line", last_line)
    if not fns:
        raise ParseError("a machine needs at least one fn", last_line)
    outputs = []
    for tok, lineno, raw in output_names:
        if tok not in fn_names:
            raise ParseError(f"output names unknown function {tok!r}", lineno, _col(raw, tok))
        outputs.append(fn_names[tok])
    return make_machine(state_set, fns, outputs, name)


def display_names(m: Machine) -> list[str]:
    names = []
    used = set()
    for i, f in enumerate(m.functions):
        cand = f.name
        if (
            cand is None
            or cand in used
            or any(bad in cand for bad in _MX_BAD)
            or any(ch.isspace() for ch in cand)
        ):
            cand = f"f{i}"
            while cand in used:
                cand += "_"
        names.append(cand)
        used.add(cand)
    return names


def render_machine(m: Machine, name: str | None = None) -> str:
    """Canonical machine block; inverse of parse_machine."""
    for s in m.states.labels:
        if any(bad in s for bad in _MX_BAD) or any(ch.isspace() for ch in s):
            raise InvalidMachineError(f"state label {s!r} is not representable in text")
    lines = [f"machine {name or m.name or 'm'}"]
    lines.append("states " + " ".join(m.states.labels))
    display = display_names(m)
    for f, dn in zip(m.functions, display):
        clauses = ", ".join(f"{s}->{f(s)}" for s in m.states.labels)
        lines.append(f"fn {dn}: {clauses}")
    if m.output_functions:
        lines.append("output " + " ".join(display[i] for i in sorted(m.output_functions)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Turing machine format (.tm)
# ---------------------------------------------------------------------------


def parse_turing(text: str) -> TuringSpec:
    rows = _significant_lines(text)
    if not rows:
        raise ParseError("empty input; expected 'tm <name>'", 1)
    name = None
    symbols: tuple[str, ...] | None = None
    registers: tuple[str, ...] | None = None
    cells: int | None = None
    boundary: BoundaryPolicy | None = None
    halting: frozenset | None = None
    rules: dict = {}
    rules_seen = False
    initial: TmConfiguration | None = None
    last_line = rows[-1][0]

    def need(value, what, lineno):
        if value is None:
            raise ParseError(f"{what} must be declared before this line", lineno)
        return value

    for lineno, raw, tokens in rows:
        head = tokens[0]
        if head == "tm":
            if len(tokens) != 2:
                raise ParseError("expected 'tm <name>'", lineno, 1)
            name = tokens[1]
        elif head == "symbols":
            if len(tokens) < 2:
                raise ParseError("'symbols' needs at least one symbol", lineno, 1)
            symbols = tuple(tokens[1:])
        elif head == "registers":
            if len(tokens) < 2:
                raise ParseError("'registers' needs at least one register", lineno, 1)
            registers = tuple(tokens[1:])
        elif head == "cells":
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise ParseError(
                    "'cells' needs one positive integer",
                    lineno,
                    _col(raw, tokens[1]) if len(tokens) > 1 else 1,
                )
            cells = int(tokens[1])
        elif head == "boundary":
            if len(tokens) != 2 or tokens[1] not in ("reject", "clamp"):
                raise ParseError("'boundary' must be 'reject' or 'clamp'", lineno, 1)
            boundary = BoundaryPolicy(tokens[1])
        elif head == "halting":
            if rules_seen:
                raise ParseError("'halting' must come before the rules", lineno, 1)
            regs = need(registers, "'registers'", lineno)
            for r in tokens[1:]:
                if r not in regs:
                    raise ParseError(f"unknown halting register {r!r}", lineno, _col(raw, r))
            halting = frozenset(tokens[1:])
        elif head == "rule":
            syms = need(symbols, "'symbols'", lineno)
            regs = need(registers, "'registers'", lineno)
            rules_seen = True
            if len(tokens) != 7 or tokens[3] != "->":
                raise ParseError(
                    "rule must read 'rule <reg> <sym> -> <reg> <sym> <L|R|S>'", lineno, 1
                )
            r, s, _, r2, s2, mv = tokens[1:]
            for reg in (r, r2):
                if reg not in regs:
                    raise ParseError(f"unknown register {reg!r}", lineno, _col(raw, reg))
            for sym in (s, s2):
                if sym not in syms:
                    raise ParseError(f"unknown symbol {sym!r}", lineno, _col(raw, sym))
            if halting and r in halting:
                raise ParseError(
                    f"halting register {r!r} cannot have outgoing rules", lineno, _col(raw, r)
                )
            if mv not in ("L", "R", "S"):
                raise ParseError(f"move must be L, R or S, not {mv!r}", lineno, _col(raw, mv))
            if (r, s) in rules:
                raise ParseError(f"duplicate rule for ({r}, {s})", lineno, 1)
            rules[(r, s)] = (r2, s2, Move(mv))
        elif head == "init":
            syms = need(symbols, "'symbols'", lineno)
            regs = need(registers, "'registers'", lineno)
            n = need(cells, "'cells'", lineno)
            want = 2 + n + 2 + 2
            if (
                len(tokens) != want
                or tokens[1] != "tape"
                or tokens[2 + n] != "head"
                or tokens[4 + n] != "register"
            ):
                raise ParseError(
                    f"init must read 'init tape <{n} symbols> head <i> register <reg>'",
                    lineno,
                    1,
                )
            tape = tuple(tokens[2 : 2 + n])
            for sym in tape:
                if sym not in syms:
                    raise ParseError(f"unknown symbol {sym!r}", lineno, _col(raw, sym))
            head_tok = tokens[3 + n]
            if not head_tok.isdigit() or not 0 <= int(head_tok) < n:
                raise ParseError(f"head must be in 0..{n - 1}", lineno, _col(raw, head_tok))
            reg = tokens[5 + n]
            if reg not in regs:
                raise ParseError(f"unknown register {reg!r}", lineno, _col(raw, reg))
            initial = TmConfiguration(reg, tape, int(head_tok))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, _col(raw, head))

    for what, value in (
        ("'tm <name>' header", name),
        ("'symbols' line", symbols),
        ("'registers' line", registers),
        ("'cells' line", cells),
        ("'boundary' line", boundary),
        ("'init' line", initial),
    ):
        if value is None:
            raise ParseError(f"missing {what}", last_line)
    return TuringSpec(
        symbols=symbols,
        registers=registers,
        cells=cells,
        rules=rules,
        halting=halting if halting is not None else frozenset(),
        boundary_policy=boundary,
        initial=initial,
        name=name,
    )


def render_turing(t: TuringSpec) -> str:
    lines = [f"tm {t.name or 'tm'}"]
    lines.append("symbols " + " ".join(t.symbols))
    lines.append("registers " + " ".join(t.registers))
    lines.append(f"cells {t.cells}")
    lines.append(f"boundary {t.boundary_policy.value}")
    halting = [r for r in t.registers if r in t.halting]
    if halting:
        lines.append("halting " + " ".join(halting))
    order = {r: i for i, r in enumerate(t.registers)}
    sym_order = {s: i for i, s in enumerate(t.symbols)}
    for (r, s), (r2, s2, mv) in sorted(
        t.rules.items(), key=lambda kv: (order[kv[0][0]], sym_order[kv[0][1]])
    ):
        lines.append(f"rule {r} {s} -> {r2} {s2} {mv.value}")
    c = t.initial
    lines.append(
        "init tape " + " ".join(c.tape) + f" head {c.head} register {c.register}"
    )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Memory-cell program format (.mem)
# ---------------------------------------------------------------------------


def _parse_paren(piece: str, prefix: str, lineno: int, raw: str) -> list[str]:
    if not piece.startswith(prefix + "(") or not piece.endswith(")"):
        raise ParseError(
            f"expected '{prefix}(...)', got {piece!r}", lineno, _col(raw, piece)
        )
    inner = piece[len(prefix) + 1 : -1]
    if not inner:
        return []
    return [p for p in inner.split(",")]


def _parse_cells(piece: str, prefix: str, lineno: int, raw: str) -> tuple[int, ...]:
    out = []
    for p in _parse_paren(piece, prefix, lineno, raw):
        if not p.isdigit():
            raise ParseError(f"cell index {p!r} is not a number", lineno, _col(raw, p))
        out.append(int(p))
    return tuple(out)


def _parse_read_eq(piece: str, lineno: int, raw: str) -> tuple[tuple[int, ...], tuple[str, ...]]:
    left, sep, right = piece.partition("=")
    if not sep:
        raise ParseError(f"expected 'read(...)=(...)', got {piece!r}", lineno, _col(raw, piece))
    cells = _parse_cells(left, "read", lineno, raw)
    values = tuple(_parse_paren(right, "", lineno, raw))
    return cells, values


def _parse_write_eq(piece: str, lineno: int, raw: str) -> tuple[tuple[int, ...], tuple[str, ...]]:
    left, sep, right = piece.partition("=")
    if not sep:
        raise ParseError(f"expected 'write(...)=(...)', got {piece!r}", lineno, _col(raw, piece))
    cells = _parse_cells(left, "write", lineno, raw)
    values = tuple(_parse_paren(right, "", lineno, raw))
    return cells, values


def parse_mem(text: str) -> MemProgram:
    rows = _significant_lines(text)
    if not rows:
        raise ParseError("empty input; expected 'mem <name>'", 1)
    name = None
    alphabet: tuple[str, ...] | None = None
    cell_inits: dict[int, str] = {}
    start_sel: tuple[int, ...] | None = None
    start_fn: int | None = None
    default_halt = False
    families: list[list[MemEntry]] = []
    finals: list[tuple[int, str]] = []
    last_line = rows[-1][0]

    for lineno, raw, tokens in rows:
        head = tokens[0]
        if head == "mem":
            if len(tokens) != 2:
                raise ParseError("expected 'mem <name>'", lineno, 1)
            name = tokens[1]
        elif head == "alphabet":
            if len(tokens) < 2:
                raise ParseError("'alphabet' needs at least one value", lineno, 1)
            alphabet = tuple(tokens[1:])
        elif head == "cell":
            if alphabet is None:
                raise ParseError("'alphabet' must come before 'cell'", lineno, 1)
            if len(tokens) != 4 or tokens[2] != "=" or not tokens[1].isdigit():
                raise ParseError("cell line must read 'cell <i> = <value>'", lineno, 1)
            idx, val = int(tokens[1]), tokens[3]
            if val not in alphabet:
                raise ParseError(f"unknown value {val!r}", lineno, _col(raw, val))
            if idx in cell_inits:
                raise ParseError(f"cell {idx} initialized twice", lineno, 1)
            cell_inits[idx] = val
        elif head == "start":
            if len(tokens) != 4 or tokens[2] != "fn" or not tokens[3].isdigit():
                raise ParseError("start line must read 'start read(...) fn <i>'", lineno, 1)
            start_sel = _parse_cells(tokens[1], "read", lineno, raw)
            start_fn = int(tokens[3])
        elif head == "default":
            if tokens[1:] != ["halt"]:
                raise ParseError("only 'default halt' is supported", lineno, 1)
            default_halt = True
        elif head == "fn":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError("fn line must read 'fn <i>'", lineno, 1)
            if int(tokens[1]) != len(families):
                raise ParseError(
                    f"fn blocks must appear in order; expected fn {len(families)}", lineno, 1
                )
            families.append([])
        elif head == "entry":
            if not families:
                raise ParseError("'entry' must follow a 'fn' header", lineno, 1)
            if (
                len(tokens) != 8
                or tokens[2] != "->"
                or tokens[4] != "next"
                or tokens[6] != "fn"
                or not tokens[7].isdigit()
            ):
                raise ParseError(
                    "entry must read 'entry read(...)=(...) -> write(...)=(...) "
                    "next read(...) fn <i>'",
                    lineno,
                    1,
                )
            rc, rv = _parse_read_eq(tokens[1], lineno, raw)
            wc, wv = _parse_write_eq(tokens[3], lineno, raw)
            nc = _parse_cells(tokens[5], "read", lineno, raw)
            families[-1].append(
                MemEntry(rc, rv, wc, wv, nc, int(tokens[7]))
            )
        elif head == "final":
            if len(tokens) != 5 or tokens[1] != "cell" or tokens[3] != "=" or not tokens[2].isdigit():
                raise ParseError("final line must read 'final cell <i> = <value>'", lineno, 1)
            finals.append((int(tokens[2]), tokens[4]))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, _col(raw, head))

    if name is None:
        raise ParseError("missing 'mem <name>' header", last_line)
    if alphabet is None:
        raise ParseError("missing 'alphabet' line", last_line)
    if not cell_inits:
        raise ParseError("missing 'cell' lines", last_line)
    n = len(cell_inits)
    if sorted(cell_inits) != list(range(n)):
        raise ParseError(
            f"cell indices must be exactly 0..{n - 1}", last_line
        )
    if start_sel is None or start_fn is None:
        raise ParseError("missing 'start' line", last_line)
    if not families:
        raise ParseError("missing 'fn' block", last_line)
    return MemProgram(
        n_cells=n,
        alphabet=alphabet,
        functions=tuple(tuple(entries) for entries in families),
        initial_cells=tuple(cell_inits[i] for i in range(n)),
        initial_selector=start_sel,
        initial_function=start_fn,
        finals=tuple(finals),
        default_halt=default_halt,
        name=name,
    )


def render_mem(p: MemProgram) -> str:
    lines = [f"mem {p.name or 'mem'}"]
    lines.append("alphabet " + " ".join(p.alphabet))
    for i, v in enumerate(p.initial_cells):
        lines.append(f"cell {i} = {v}")
    sel = ",".join(str(c) for c in p.initial_selector)
    lines.append(f"start read({sel}) fn {p.initial_function}")
    if p.default_halt:
        lines.append("default halt")
    for a, entries in enumerate(p.functions):
        lines.append(f"fn {a}")
        for e in entries:
            rc = ",".join(str(c) for c in e.read_cells)
            rv = ",".join(e.read_values)
            wc = ",".join(str(c) for c in e.write_cells)
            wv = ",".join(e.write_values)
            nc = ",".join(str(c) for c in e.next_read_cells)
            lines.append(
                f"entry read({rc})=({rv}) -> write({wc})=({wv}) "
                f"next read({nc}) fn {e.next_function}"
            )
    for c, v in p.finals:
        lines.append(f"final cell {c} = {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

CERTIFICATE_KINDS = ("iso", "complete", "submachine")


@dataclass(frozen=True)
class Certificate:
    """Machine-readable witness: what to keep and where states/functions go.

    kind "iso": g and h only.  kind "complete": the functional keep (indices
    into the container's functions), the state keep (labels), then g and h
    into the reduced machine.  kind "submachine": the keeps only.
    """

    kind: str
    g: tuple[int, ...] = ()
    h: tuple[int, ...] = ()
    kept_functions: tuple[int, ...] = ()
    kept_states: tuple[str, ...] = ()


_CERT_REQUIRED = {
    "iso": ("g", "h"),
    "complete": ("keep-fns", "keep-states", "g", "h"),
    "submachine": ("keep-fns", "keep-states"),
}


def parse_certificate(text: str) -> Certificate:
    rows = _significant_lines(text)
    if not rows:
        raise ParseError("empty input; expected 'certificate <kind>'", 1)
    lineno, raw, tokens = rows[0]
    if tokens[0] != "certificate" or len(tokens) != 2:
        raise ParseError("expected 'certificate <kind>'", lineno, 1)
    kind = tokens[1]
    if kind not in CERTIFICATE_KINDS:
        raise ParseError(
            f"unknown certificate kind {kind!r}", lineno, _col(raw, kind)
        )
    fields: dict[str, tuple] = {}
    for lineno, raw, tokens in rows[1:]:
        key = tokens[0]
        if key not in ("g", "h", "keep-fns", "keep-states"):
            raise ParseError(f"unknown certificate key {key!r}", lineno, _col(raw, key))
        if key in fields:
            raise ParseError(f"duplicate certificate key {key!r}", lineno, 1)
        if key == "keep-states":
            fields[key] = tuple(tokens[1:])
        else:
            vals = []
            for tok in tokens[1:]:
                if not tok.isdigit():
                    raise ParseError(
                        f"{key} entries must be numbers, got {tok!r}", lineno, _col(raw, tok)
                    )
                vals.append(int(tok))
            fields[key] = tuple(vals)
    for key in _CERT_REQUIRED[kind]:
        if key not in fields:
            raise ParseError(f"certificate is missing the {key!r} line", rows[-1][0])
    for key in fields:
        if key not in _CERT_REQUIRED[kind]:
            raise ParseError(f"{key!r} does not belong in a {kind} certificate", rows[-1][0])
    return Certificate(
        kind,
        g=fields.get("g", ()),
        h=fields.get("h", ()),
        kept_functions=fields.get("keep-fns", ()),
        kept_states=fields.get("keep-states", ()),
    )


def render_certificate(c: Certificate) -> str:
    if c.kind not in CERTIFICATE_KINDS:
        raise InvalidMachineError(f"unknown certificate kind {c.kind!r}")
    lines = [f"certificate {c.kind}"]
    if "keep-fns" in _CERT_REQUIRED[c.kind]:
        lines.append("keep-fns " + " ".join(str(i) for i in c.kept_functions))
        lines.append("keep-states " + " ".join(c.kept_states))
    if "g" in _CERT_REQUIRED[c.kind]:
        lines.append("g " + " ".join(str(i) for i in c.g))
        lines.append("h " + " ".join(str(i) for i in c.h))
    return "\n".join(lines) + "\n"
