"""Command-line front end.

One process, one subcommand, deterministic output.  Exit codes: 0 for any
definite answer that matches ``--expect`` (or any definite answer when
``--expect`` is not given), 1 for a definite answer contradicting
``--expect``, 2 for errors and inconclusive searches.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .cardinal import (
    Cardinal,
    MachineTemplate,
    TEMPLATE_KINDS,
    TraceStep,
    evaluate_expression,
    state_cardinality,
    transition_space_cardinality,
)
from .errors import IncompatibleShapesError, MachalgError
from .isomorphism import (
    CompletenessWitness,
    Morphism,
    find_isomorphism,
    is_complete,
    verify_completeness,
    verify_morphism,
)
from .lemmas import LEMMA_NAMES, run_lemma_suite
from .machine import (
    DEFAULT_ENUMERATION_CAP,
    Cycled,
    Halted,
    Machine,
    StepLimit,
    run_to_fixpoint,
)
from .models import (
    compile_mem,
    compile_tm,
    mem_is_final,
    mem_run,
    simulate_tm,
    tm_to_mem,
    verify_lockstep,
)
from .reductions import (
    functional_reduction,
    is_sub_machine,
    state_reduction,
    sub_machine,
)
from .textio import (
    Certificate,
    display_names,
    parse_certificate,
    parse_machine,
    parse_mem,
    parse_turing,
    render_certificate,
    render_machine,
    render_mem,
)

DEFAULT_NODE_BUDGET = 2_000_000
DEFAULT_STEPS = 50


# ---------------------------------------------------------------------------
# Universality report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniversalityRow:
    template: MachineTemplate
    states: Cardinal
    transitions: Cardinal
    trace: tuple[TraceStep, ...]


@dataclass(frozen=True)
class UniversalityReport:
    """Cardinality table plus simulate-everything verdicts.

    A target is marked "UMM-complete" exactly when its state cardinality is
    at most the simulator's and the simulator carries the full transition
    set; both facts are computed, never assumed.
    """

    simulator: UniversalityRow
    targets: tuple[UniversalityRow, ...]
    verdicts: tuple[tuple[str, str, str], ...]

    @property
    def all_complete(self) -> bool:
        return all(v == "UMM-complete" for _, v, _ in self.verdicts)


def _universality_row(t: MachineTemplate) -> UniversalityRow:
    trace: list[TraceStep] = []
    card = state_cardinality(t, trace)
    phi = transition_space_cardinality(card, trace)
    return UniversalityRow(t, card, phi, tuple(trace))


def build_universality_report(k: int = 2, m: int = 2, n: int = 2) -> UniversalityReport:
    simulator = _universality_row(MachineTemplate("umm", n=n))
    targets = (
        _universality_row(MachineTemplate("infinite-tape-turing", k=k, m=m)),
        _universality_row(MachineTemplate("lsm")),
        _universality_row(MachineTemplate("quantum", m=m, n=n)),
    )
    verdicts = []
    for row in targets:
        small_enough = row.states <= simulator.states
        full_set = simulator.template.has_full_transition_set
        if small_enough and full_set:
            verdict = "UMM-complete"
            reason = (
                f"|T| = {row.states!r} <= |S| = {simulator.states!r} "
                "and the simulator's transition set is full"
            )
        elif not full_set:
            verdict = "not shown"
            reason = "the simulator lacks the full transition set"
        else:
            verdict = "not shown"
            reason = f"|T| = {row.states!r} > |S| = {simulator.states!r}"
        verdicts.append((row.template.describe(), verdict, reason))
    return UniversalityReport(simulator, targets, tuple(verdicts))


def _render_universality(report: UniversalityReport, show_trace: bool) -> list[str]:
    out = ["universality report"]
    rows = [("simulator", report.simulator)] + [("target", r) for r in report.targets]
    for role, row in rows:
        full = " (full transition set)" if row.template.has_full_transition_set else ""
        out.append(
            f"{role} {row.template.describe()}: |S| = {row.states!r}, "
            f"|Phi| = {row.transitions!r}{full}"
        )
        if show_trace:
            out.extend(f"  {step}" for step in row.trace)
    for name, verdict, reason in report.verdicts:
        out.append(f"verdict {name}: {verdict} ({reason})")
    return out


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _definite(answer: bool, expect: str | None) -> int:
    if expect is None:
        return 0
    return 0 if answer == (expect == "yes") else 1


def _emit(lines) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def _resolve_fn(m: Machine, token: str):
    display = display_names(m)
    if token in display:
        return m.functions[display.index(token)]
    named = [f for f in m.functions if f.name == token]
    if len(named) == 1:
        return named[0]
    if token.isdigit() and int(token) < m.n_functions:
        return m.functions[int(token)]
    raise MachalgError(
        f"unknown function {token!r}; known names: {' '.join(display)}"
    )


def _morphism_lines(b: Machine, sub: Machine, mor: Morphism) -> list[str]:
    b_names = display_names(b)
    sub_names = display_names(sub)
    out = []
    for i, label in enumerate(b.states.labels):
        out.append(f"g: {label} -> {sub.states.labels[mor.g[i]]}")
    for j, name in enumerate(b_names):
        out.append(f"h: {name} -> {sub_names[mor.h[j]]}")
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_card(args) -> int:
    out = []
    trace: list[TraceStep] = []
    if args.what in TEMPLATE_KINDS:
        t = MachineTemplate(args.what, k=args.k, m=args.m, n=args.n)
        card = state_cardinality(t, trace)
        out.append(t.describe())
        out.append(f"|S| = {card!r}")
        if args.transition_space:
            card_phi = transition_space_cardinality(card, trace)
            out.append(f"|Phi| = {card_phi!r}")
    else:
        for name in ("k", "m", "n"):
            if getattr(args, name) is not None:
                raise MachalgError(f"--{name} only applies to template names")
        value = evaluate_expression(args.what, trace)
        out.append(f"{args.what} = {value!r}")
    if not args.no_trace:
        out.extend(f"  {step}" for step in trace)
    _emit(out)
    return 0


def _cmd_universality(args) -> int:
    report = build_universality_report(k=args.k, m=args.m, n=args.n)
    _emit(_render_universality(report, show_trace=not args.no_trace))
    return _definite(report.all_complete, args.expect)


def _cmd_iso(args) -> int:
    a = parse_machine(_read(args.a))
    b = parse_machine(_read(args.b))
    mor = find_isomorphism(a, b, node_budget=args.node_budget)
    if mor is None:
        _emit(["not isomorphic"])
        return _definite(False, args.expect)
    if args.format == "certificate":
        sys.stdout.write(render_certificate(Certificate("iso", g=mor.g, h=mor.h)))
    else:
        _emit(["isomorphic"] + _morphism_lines(a, b, mor))
    return _definite(True, args.expect)


def _cmd_complete(args) -> int:
    a = parse_machine(_read(args.a))
    b = parse_machine(_read(args.b))
    w = is_complete(a, b, method=args.method, node_budget=args.node_budget)
    if w is None:
        _emit(["not complete"])
        return _definite(False, args.expect)
    fr, sr = w.reductions
    if args.format == "certificate":
        cert = Certificate(
            "complete",
            g=w.morphism.g,
            h=w.morphism.h,
            kept_functions=fr.kept_functions,
            kept_states=sr.kept_states,
        )
        sys.stdout.write(render_certificate(cert))
    else:
        out = ["complete"]
        out.append("keep-fns " + " ".join(str(i) for i in fr.kept_functions))
        out.append("keep-states " + " ".join(sr.kept_states))
        out.extend(_morphism_lines(b, w.sub, w.morphism))
        _emit(out)
    return _definite(True, args.expect)


def _cmd_submachine(args) -> int:
    a = parse_machine(_read(args.a))
    b = parse_machine(_read(args.b))
    witness = is_sub_machine(a, b)
    if witness is None:
        _emit(["not a sub-machine"])
        return _definite(False, args.expect)
    fr, sr = witness
    if args.format == "certificate":
        cert = Certificate(
            "submachine",
            kept_functions=fr.kept_functions,
            kept_states=sr.kept_states,
        )
        sys.stdout.write(render_certificate(cert))
    else:
        out = ["sub-machine"]
        out.append("keep-fns " + " ".join(str(i) for i in fr.kept_functions))
        out.append("keep-states " + " ".join(sr.kept_states))
        _emit(out)
    return _definite(True, args.expect)


def _cmd_reduce(args) -> int:
    m = parse_machine(_read(args.machine))
    if args.keep_fns is None and args.keep_states is None:
        raise MachalgError("nothing to do: pass --keep-fns and/or --keep-states")
    keep_fns = None
    if args.keep_fns is not None:
        keep_fns = [_resolve_fn(m, tok) for tok in args.keep_fns.split(",") if tok]
    keep_states = None
    if args.keep_states is not None:
        keep_states = [tok for tok in args.keep_states.split(",") if tok]
    _, _, result = sub_machine(m, keep_functions=keep_fns, keep_states=keep_states)
    sys.stdout.write(render_machine(result))
    return 0


def _cmd_compile_tm(args) -> int:
    t = parse_turing(_read(args.tm))
    machine, codec = compile_tm(t, cap=args.cap)
    if args.summary:
        _emit(
            [
                f"states {machine.n_states}",
                "functions 1",
                f"initial {codec.encode(t.initial)}",
                f"boundary {t.boundary_policy.value}",
            ]
        )
    else:
        sys.stdout.write(render_machine(machine))
    return 0


def _cmd_compile_mem(args) -> int:
    p = parse_mem(_read(args.mem))
    machine, codec = compile_mem(p, cap=args.cap)
    if args.summary:
        _emit(
            [
                f"states {machine.n_states}",
                "functions 1",
                f"initial {codec.encode(p.initial_state)}",
            ]
        )
    else:
        sys.stdout.write(render_machine(machine))
    return 0


def _cmd_tm2mem(args) -> int:
    t = parse_turing(_read(args.tm))
    sys.stdout.write(render_mem(tm_to_mem(t)))
    return 0


def _cmd_lockstep(args) -> int:
    t = parse_turing(_read(args.tm))
    p = parse_mem(_read(args.mem)) if args.mem else tm_to_mem(t)
    report = verify_lockstep(t, p, args.steps)
    if report.ok:
        _emit(
            [
                f"verified {report.steps_verified} step(s), "
                f"{report.tm_outcome}, no divergence"
            ]
        )
    else:
        step, detail = report.divergence
        _emit(
            [
                f"verified {report.steps_verified} step(s), {report.tm_outcome}, "
                f"divergence at step {step}: {detail}"
            ]
        )
    return _definite(report.ok, args.expect)


def _sniff(text: str) -> str:
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            return body.split()[0]
    return ""


def _cmd_sim(args) -> int:
    text = _read(args.file)
    kind = _sniff(text)
    out = []
    if kind == "tm":
        t = parse_turing(text)
        trace = simulate_tm(t, args.steps)
        for i, c in enumerate(trace.configurations):
            out.append(
                f"step {i}: register={c.register} tape={' '.join(c.tape)} head={c.head}"
            )
        out.append(f"outcome: {trace.outcome} after {trace.steps} step(s)")
    elif kind == "mem":
        p = parse_mem(text)
        done = False
        for i, s in enumerate(mem_run(p, args.steps)):
            fin = mem_is_final(p, s)
            sel = ",".join(str(c) for c in s.selector)
            out.append(
                f"step {i}: cells={' '.join(s.cells)} selector={sel} fn={s.fn}"
                f"{' (final)' if fin else ''}"
            )
            if fin:
                out.append(f"outcome: final condition met after {i} step(s)")
                done = True
                break
        if not done:
            out.append(f"outcome: step limit after {args.steps} step(s)")
    elif kind == "machine":
        m = parse_machine(text)
        if args.fn is None or getattr(args, "from") is None:
            raise MachalgError("machine simulation needs --fn and --from")
        f = _resolve_fn(m, args.fn)
        result = run_to_fixpoint(f, getattr(args, "from"), args.steps, record_trajectory=True)
        out.append("trajectory: " + " -> ".join(result.trajectory))
        if isinstance(result, Halted):
            out.append(f"outcome: halted at {result.state} after {result.steps} step(s)")
        elif isinstance(result, Cycled):
            out.append(
                f"outcome: cycled, length {result.cycle_length}, "
                f"entered at step {result.entry_step}"
            )
        else:
            out.append(f"outcome: step limit after {result.steps} step(s)")
    else:
        raise MachalgError(
            f"cannot tell what {args.file!r} contains; expected a machine, tm or mem block"
        )
    _emit(out)
    return 0


def _cmd_verify(args) -> int:
    cert = parse_certificate(_read(args.certificate))
    a = parse_machine(_read(args.a))
    b = parse_machine(_read(args.b))
    ok, reason = _verify_certificate(cert, a, b)
    _emit(["certificate verifies"] if ok else [f"certificate rejected: {reason}"])
    return _definite(ok, args.expect)


def _verify_certificate(cert: Certificate, a: Machine, b: Machine) -> tuple[bool, str]:
    try:
        if cert.kind == "iso":
            mor = Morphism(cert.g, cert.h)
            if not verify_morphism(a, b, mor):
                return False, "the mapping does not commute with every function"
            return True, ""
        if cert.kind == "complete":
            fr = functional_reduction(
                a, [a.functions[i] for i in cert.kept_functions]
            )
            sr = state_reduction(fr.result, cert.kept_states)
            w = CompletenessWitness((fr, sr), Morphism(cert.g, cert.h))
            if not verify_completeness(a, b, w):
                return False, "the reductions or the morphism do not check out"
            return True, ""
        if cert.kind == "submachine":
            fr = functional_reduction(
                a, [a.functions[i] for i in cert.kept_functions]
            )
            sr = state_reduction(fr.result, cert.kept_states)
            got = sr.result
            if got.states != b.states:
                return False, "the reduced state set differs from the target"
            if tuple(f.table for f in got.functions) != tuple(
                f.table for f in b.functions
            ):
                return False, "the reduced function set differs from the target"
            return True, ""
        return False, f"unknown certificate kind {cert.kind!r}"
    except IndexError:
        return False, "an index in the certificate is out of range"
    except MachalgError as e:
        return False, str(e)


def _cmd_check_lemmas(args) -> int:
    report = run_lemma_suite(
        args.seed, args.iters, max_states=args.max_states, max_functions=args.max_fns
    )
    out = [f"seed {report.seed}, {report.iterations} iterations"]
    for lemma in (1, 2, 3):
        bad = report.violations_for(lemma)
        out.append(
            f"lemma {lemma} ({LEMMA_NAMES[lemma]}): "
            f"{report.checked_for(lemma)} checked, {len(bad)} violation(s)"
        )
    for v in report.violations[:3]:
        out.append(f"  lemma {v.lemma} counterexample: {v.description}")
    _emit(out)
    return _definite(report.ok, args.expect)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_expect(sub) -> None:
    sub.add_argument(
        "--expect",
        choices=("yes", "no"),
        default=None,
        help="exit 1 unless the definite answer matches",
    )


def _add_format(sub) -> None:
    sub.add_argument(
        "--format",
        choices=("text", "certificate"),
        default="text",
        help="certificate emits the stable machine-readable witness",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="machalg",
        description="Workbench for finite machines as sets of self-maps: "
        "cardinal bookkeeping, isomorphism and completeness certificates, "
        "reductions, and compilers from tape and memory-cell models.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("card", help="state-set cardinality of a template, or evaluate an expression")
    p.add_argument("what", help=f"template ({', '.join(TEMPLATE_KINDS)}) or expression like '2 ^ beth(0)'")
    p.add_argument("--k", type=int, default=None, help="register count (templates)")
    p.add_argument("--m", type=int, default=None, help="symbol count (templates)")
    p.add_argument("--n", type=int, default=None, help="cell count (templates)")
    p.add_argument("--transition-space", action="store_true", help="also compute |S|^|S|")
    p.add_argument("--no-trace", action="store_true", help="suppress derivation steps")
    p.set_defaults(run=_cmd_card)

    p = subs.add_parser("universality", help="cardinality table plus simulate-everything verdicts")
    p.add_argument("--k", type=int, default=2, help="registers for the tape target (default 2)")
    p.add_argument("--m", type=int, default=2, help="symbols / basis size (default 2)")
    p.add_argument("--n", type=int, default=2, help="cells / unit count (default 2)")
    p.add_argument("--no-trace", action="store_true", help="suppress derivation steps")
    _add_expect(p)
    p.set_defaults(run=_cmd_universality)

    p = subs.add_parser("iso", help="find an isomorphism between two machines")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET,
                   help=f"search node cap (default {DEFAULT_NODE_BUDGET})")
    _add_format(p)
    _add_expect(p)
    p.set_defaults(run=_cmd_iso)

    p = subs.add_parser("complete", help="embed the second machine into a sub-machine of the first")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--method", choices=("auto", "construct", "search"), default="auto")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET,
                   help=f"search node cap (default {DEFAULT_NODE_BUDGET})")
    _add_format(p)
    _add_expect(p)
    p.set_defaults(run=_cmd_complete)

    p = subs.add_parser("submachine", help="is the second machine a reduction of the first, labels literal")
    p.add_argument("a")
    p.add_argument("b")
    _add_format(p)
    _add_expect(p)
    p.set_defaults(run=_cmd_submachine)

    p = subs.add_parser("reduce", help="apply functional and/or state reductions")
    p.add_argument("machine")
    p.add_argument("--keep-fns", default=None, help="comma-separated function names to keep")
    p.add_argument("--keep-states", default=None, help="comma-separated states to keep")
    p.set_defaults(run=_cmd_reduce)

    p = subs.add_parser("compile-tm", help="expand a tape machine into a one-function machine")
    p.add_argument("tm")
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                   help=f"state enumeration cap (default {DEFAULT_ENUMERATION_CAP})")
    p.add_argument("--summary", action="store_true", help="print counts instead of the machine")
    p.set_defaults(run=_cmd_compile_tm)

    p = subs.add_parser("compile-mem", help="expand a memory-cell program into a one-function machine")
    p.add_argument("mem")
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                   help=f"state enumeration cap (default {DEFAULT_ENUMERATION_CAP})")
    p.add_argument("--summary", action="store_true", help="print counts instead of the machine")
    p.set_defaults(run=_cmd_compile_mem)

    p = subs.add_parser("tm2mem", help="rebuild a tape machine as a memory-cell program")
    p.add_argument("tm")
    p.set_defaults(run=_cmd_tm2mem)

    p = subs.add_parser("lockstep", help="run a tape machine and a program side by side")
    p.add_argument("--tm", required=True)
    p.add_argument("--mem", default=None, help="program file (default: translate the tape machine)")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS,
                   help=f"transitions to follow (default {DEFAULT_STEPS})")
    _add_expect(p)
    p.set_defaults(run=_cmd_lockstep)

    p = subs.add_parser("sim", help="print the step-by-step run of a machine, tape machine, or program")
    p.add_argument("file")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS,
                   help=f"step cap (default {DEFAULT_STEPS})")
    p.add_argument("--fn", default=None, help="function to iterate (machine files)")
    p.add_argument("--from", default=None, help="start state (machine files)")
    p.set_defaults(run=_cmd_sim)

    p = subs.add_parser("verify", help="re-check a certificate against two machine files, no search")
    p.add_argument("certificate")
    p.add_argument("a")
    p.add_argument("b")
    _add_expect(p)
    p.set_defaults(run=_cmd_verify)

    p = subs.add_parser("check-lemmas", help="randomized reduction-law suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--max-states", type=int, default=4)
    p.add_argument("--max-fns", type=int, default=6)
    _add_expect(p)
    p.set_defaults(run=_cmd_check_lemmas)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (MachalgError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
