"""End-to-end command tests driving main() with in-process argv."""

from pathlib import Path

import pytest

from machalg import (
    StateSet,
    full_machine,
    parse_certificate,
    parse_machine,
    parse_mem,
    render_machine,
)
from machalg.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

SWITCH = str(SAMPLES / "switch.mx")
CONST0 = str(SAMPLES / "const0.mx")
CONST1 = str(SAMPLES / "const1.mx")
BITFLIP = str(SAMPLES / "bitflip.tm")
INCREMENT = str(SAMPLES / "increment.tm")
TOGGLE = str(SAMPLES / "toggle.mem")


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestCard:
    def test_template(self, capsys):
        rc, out, _ = run(
            capsys, "card", "finite-turing", "--k", "2", "--m", "2", "--n", "2"
        )
        assert rc == 0
        assert "|S| = Finite(16)" in out
        assert "[" in out  # derivation steps present

    def test_template_transition_space(self, capsys):
        rc, out, _ = run(
            capsys,
            "card", "finite-turing", "--k", "1", "--m", "2", "--n", "1",
            "--transition-space",
        )
        assert rc == 0
        assert "|S| = Finite(2)" in out
        assert "|Phi| = Finite(4)" in out

    def test_transition_space_overflow_is_error(self, capsys):
        rc, _, err = run(
            capsys,
            "card", "finite-turing", "--k", "2", "--m", "2", "--n", "2",
            "--transition-space",
        )
        assert rc == 2
        assert "error:" in err

    def test_expression(self, capsys):
        rc, out, _ = run(capsys, "card", "2 ^ beth(0)")
        assert rc == 0
        assert "= Beth(1)" in out

    def test_no_trace(self, capsys):
        rc, out, _ = run(capsys, "card", "2 ^ beth(0)", "--no-trace")
        assert rc == 0
        assert "[" not in out

    def test_param_on_expression_is_error(self, capsys):
        rc, _, err = run(capsys, "card", "2 + 2", "--k", "3")
        assert rc == 2
        assert "only applies" in err

    def test_parse_error_names_position(self, capsys):
        rc, _, err = run(capsys, "card", "2 ^^ 3")
        assert rc == 2
        assert "column" in err


class TestUniversality:
    def test_default_report(self, capsys):
        rc, out, _ = run(capsys, "universality")
        assert rc == 0
        assert out.count("UMM-complete") == 3
        assert "simulator umm" in out

    def test_expect_yes(self, capsys):
        rc, _, _ = run(capsys, "universality", "--expect", "yes")
        assert rc == 0

    def test_expect_no_contradicted(self, capsys):
        rc, _, _ = run(capsys, "universality", "--expect", "no")
        assert rc == 1

    def test_no_trace_drops_steps(self, capsys):
        _, with_trace, _ = run(capsys, "universality")
        _, without, _ = run(capsys, "universality", "--no-trace")
        assert len(without) < len(with_trace)
        assert "verdict" in without


class TestIso:
    def test_self_iso(self, capsys):
        rc, out, _ = run(capsys, "iso", SWITCH, SWITCH)
        assert rc == 0
        assert out.startswith("isomorphic")
        assert "g: off -> off" in out
        assert "h: flip -> flip" in out

    def test_negative_is_exit_zero_without_expect(self, capsys):
        rc, out, _ = run(capsys, "iso", SWITCH, CONST0)
        assert rc == 0
        assert "not isomorphic" in out

    def test_expect_gates(self, capsys):
        rc, _, _ = run(capsys, "iso", SWITCH, SWITCH, "--expect", "no")
        assert rc == 1
        rc, _, _ = run(capsys, "iso", SWITCH, CONST0, "--expect", "yes")
        assert rc == 1
        rc, _, _ = run(capsys, "iso", SWITCH, CONST0, "--expect", "no")
        assert rc == 0

    def test_isomorphic_pair(self, capsys):
        rc, out, _ = run(capsys, "iso", CONST0, CONST1)
        assert rc == 0
        assert out.startswith("isomorphic")

    def test_deterministic_output(self, capsys):
        _, first, _ = run(capsys, "iso", CONST0, CONST1)
        _, second, _ = run(capsys, "iso", CONST0, CONST1)
        assert first == second

    def test_certificate_round_trip(self, capsys, tmp_path):
        rc, out, _ = run(capsys, "iso", SWITCH, SWITCH, "--format", "certificate")
        assert rc == 0
        cert = parse_certificate(out)
        assert cert.kind == "iso"
        path = tmp_path / "iso.cert"
        path.write_text(out)
        rc, out2, _ = run(capsys, "verify", str(path), SWITCH, SWITCH)
        assert rc == 0
        assert "certificate verifies" in out2

    def test_budget_exhaustion_names_cap(self, capsys, tmp_path):
        big = tmp_path / "full3.mx"
        big.write_text(render_machine(full_machine(StateSet(("a", "b", "c")))))
        twin = tmp_path / "full3b.mx"
        twin.write_text(render_machine(full_machine(StateSet(("d", "e", "f")))))
        rc, _, err = run(capsys, "iso", str(big), str(twin), "--node-budget", "1")
        assert rc == 2
        assert "budget of 1" in err
        assert "inconclusive" in err


class TestComplete:
    @pytest.fixture
    def full2(self, tmp_path):
        path = tmp_path / "full2.mx"
        path.write_text(render_machine(full_machine(StateSet(("x", "y")))))
        return str(path)

    def test_embed_into_full(self, capsys, full2):
        rc, out, _ = run(capsys, "complete", full2, CONST0)
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "complete"
        assert lines[1].startswith("keep-fns ")
        assert lines[2].startswith("keep-states ")
        assert any(line.startswith("g: ") for line in lines)
        assert any(line.startswith("h: ") for line in lines)

    def test_certificate_verifies(self, capsys, tmp_path, full2):
        rc, out, _ = run(
            capsys, "complete", full2, CONST0, "--format", "certificate"
        )
        assert rc == 0
        path = tmp_path / "complete.cert"
        path.write_text(out)
        rc, out2, _ = run(capsys, "verify", str(path), full2, CONST0)
        assert rc == 0
        assert "certificate verifies" in out2

    def test_methods_agree(self, capsys, full2):
        rc1, out1, _ = run(capsys, "complete", full2, CONST0, "--method", "construct")
        rc2, out2, _ = run(capsys, "complete", full2, CONST0, "--method", "search")
        assert rc1 == rc2 == 0
        assert out1.splitlines()[0] == out2.splitlines()[0] == "complete"

    def test_negative(self, capsys):
        rc, out, _ = run(capsys, "complete", SWITCH, CONST0)
        assert rc == 0
        assert "not complete" in out
        rc, _, _ = run(capsys, "complete", SWITCH, CONST0, "--expect", "yes")
        assert rc == 1

    def test_construct_on_thin_container_is_error(self, capsys):
        rc, _, err = run(capsys, "complete", SWITCH, CONST0, "--method", "construct")
        assert rc == 2
        assert "full function set" in err


class TestSubmachineAndReduce:
    def test_reduce_emits_parseable_machine(self, capsys):
        rc, out, _ = run(capsys, "reduce", SWITCH, "--keep-fns", "hold")
        assert rc == 0
        m = parse_machine(out)
        assert m.n_functions == 1
        assert m.n_states == 2

    def test_reduce_states(self, capsys):
        rc, out, _ = run(capsys, "reduce", CONST0, "--keep-states", "0")
        assert rc == 0
        m = parse_machine(out)
        assert m.states.labels == ("0",)

    def test_reduce_without_work_is_error(self, capsys):
        rc, _, err = run(capsys, "reduce", SWITCH)
        assert rc == 2
        assert "nothing to do" in err

    def test_reduce_unknown_function_is_error(self, capsys):
        rc, _, err = run(capsys, "reduce", SWITCH, "--keep-fns", "zzz")
        assert rc == 2
        assert "unknown function" in err

    def test_submachine_positive(self, capsys, tmp_path):
        rc, reduced, _ = run(capsys, "reduce", SWITCH, "--keep-fns", "hold")
        assert rc == 0
        path = tmp_path / "hold.mx"
        path.write_text(reduced)
        rc, out, _ = run(capsys, "submachine", SWITCH, str(path))
        assert rc == 0
        assert out.splitlines()[0] == "sub-machine"

    def test_submachine_negative(self, capsys):
        rc, out, _ = run(capsys, "submachine", CONST0, SWITCH)
        assert rc == 0
        assert "not a sub-machine" in out

    def test_submachine_certificate(self, capsys, tmp_path):
        rc, reduced, _ = run(
            capsys, "reduce", SWITCH, "--keep-fns", "hold", "--keep-states", "off"
        )
        assert rc == 0
        target = tmp_path / "sub.mx"
        target.write_text(reduced)
        rc, cert_text, _ = run(
            capsys, "submachine", SWITCH, str(target), "--format", "certificate"
        )
        assert rc == 0
        cert = parse_certificate(cert_text)
        assert cert.kind == "submachine"
        cert_path = tmp_path / "sub.cert"
        cert_path.write_text(cert_text)
        rc, out, _ = run(capsys, "verify", str(cert_path), SWITCH, str(target))
        assert rc == 0
        assert "certificate verifies" in out

    def test_tampered_certificate_rejected(self, capsys, tmp_path):
        rc, cert_text, _ = run(
            capsys, "iso", CONST0, CONST1, "--format", "certificate"
        )
        assert rc == 0
        tampered = cert_text.replace("g 1 0", "g 0 1")
        assert tampered != cert_text
        path = tmp_path / "bad.cert"
        path.write_text(tampered)
        rc, out, _ = run(capsys, "verify", str(path), CONST0, CONST1)
        assert rc == 0  # definite negative, no expectation set
        assert "certificate rejected" in out
        rc, _, _ = run(
            capsys, "verify", str(path), CONST0, CONST1, "--expect", "yes"
        )
        assert rc == 1

    def test_certificate_index_out_of_range(self, capsys, tmp_path):
        path = tmp_path / "oob.cert"
        path.write_text("certificate submachine\nkeep-fns 9\nkeep-states 0\n")
        rc, out, _ = run(capsys, "verify", str(path), SWITCH, CONST0)
        assert rc == 0
        assert "out of range" in out


class TestCompilers:
    def test_compile_tm_parseable(self, capsys):
        rc, out, _ = run(capsys, "compile-tm", BITFLIP)
        assert rc == 0
        m = parse_machine(out)
        assert m.n_states == 4  # 2 registers * 2^1 tapes * 1 head slot
        assert m.n_functions == 1

    def test_compile_tm_summary(self, capsys):
        rc, out, _ = run(capsys, "compile-tm", BITFLIP, "--summary")
        assert rc == 0
        lines = out.splitlines()
        assert "states 4" in lines
        assert "functions 1" in lines
        assert any(line.startswith("initial q0|") for line in lines)
        assert "boundary clamp" in lines

    def test_compile_tm_cap(self, capsys):
        rc, _, err = run(capsys, "compile-tm", INCREMENT, "--cap", "3")
        assert rc == 2
        assert "error:" in err

    def test_compile_mem_summary(self, capsys):
        rc, out, _ = run(capsys, "compile-mem", TOGGLE, "--summary")
        assert rc == 0
        assert "states 3" in out.splitlines()

    def test_compile_mem_parseable(self, capsys):
        rc, out, _ = run(capsys, "compile-mem", TOGGLE)
        assert rc == 0
        m = parse_machine(out)
        assert m.n_states == 3

    def test_tm2mem_parseable(self, capsys):
        rc, out, _ = run(capsys, "tm2mem", BITFLIP)
        assert rc == 0
        p = parse_mem(out)
        assert p.n_cells == 3  # one tape cell + register + address

    def test_lockstep_default_translation(self, capsys):
        rc, out, _ = run(capsys, "lockstep", "--tm", BITFLIP)
        assert rc == 0
        assert out.strip() == "verified 1 step(s), halted, no divergence"

    def test_lockstep_increment(self, capsys):
        rc, out, _ = run(capsys, "lockstep", "--tm", INCREMENT)
        assert rc == 0
        assert out.strip() == "verified 3 step(s), halted, no divergence"

    def test_lockstep_explicit_mem_file(self, capsys, tmp_path):
        rc, translated, _ = run(capsys, "tm2mem", BITFLIP)
        assert rc == 0
        path = tmp_path / "bitflip.mem"
        path.write_text(translated)
        rc, out, _ = run(capsys, "lockstep", "--tm", BITFLIP, "--mem", str(path))
        assert rc == 0
        assert "no divergence" in out

    def test_lockstep_divergence_reported(self, capsys, tmp_path):
        # corrupt one written symbol; the tape mismatch shows on step 1
        rc, translated, _ = run(capsys, "tm2mem", BITFLIP)
        assert rc == 0
        bad = translated.replace(
            "=(reg.halt,pos.0,sym.1)", "=(reg.halt,pos.0,sym.0)", 1
        )
        assert bad != translated
        path = tmp_path / "wrong.mem"
        path.write_text(bad)
        rc, out, _ = run(capsys, "lockstep", "--tm", BITFLIP, "--mem", str(path))
        assert rc == 0
        assert "divergence at step" in out
        rc, _, _ = run(
            capsys,
            "lockstep", "--tm", BITFLIP, "--mem", str(path), "--expect", "yes",
        )
        assert rc == 1


class TestSim:
    def test_machine_route_needs_fn(self, capsys):
        rc, _, err = run(capsys, "sim", SWITCH)
        assert rc == 2
        assert "--fn" in err

    def test_machine_cycle(self, capsys):
        rc, out, _ = run(
            capsys, "sim", SWITCH, "--fn", "flip", "--from", "off", "--steps", "5"
        )
        assert rc == 0
        assert "trajectory: off -> on" in out
        assert "cycled, length 2" in out

    def test_machine_halt(self, capsys):
        rc, out, _ = run(
            capsys, "sim", CONST0, "--fn", "to0", "--from", "1", "--steps", "5"
        )
        assert rc == 0
        assert "halted at 0" in out

    def test_tm_route(self, capsys):
        rc, out, _ = run(capsys, "sim", BITFLIP)
        assert rc == 0
        assert "step 0:" in out
        assert "outcome: halted" in out

    def test_mem_route(self, capsys):
        rc, out, _ = run(capsys, "sim", TOGGLE, "--steps", "4")
        assert rc == 0
        assert "step 2: cells=2 selector=0 fn=0 (final)" in out
        assert "outcome: final condition met after 2 step(s)" in out
        assert "step 3" not in out

    def test_mem_route_step_limit(self, capsys):
        rc, out, _ = run(capsys, "sim", TOGGLE, "--steps", "1")
        assert rc == 0
        assert "outcome: step limit after 1 step(s)" in out

    def test_unknown_file_shape(self, capsys, tmp_path):
        path = tmp_path / "mystery.txt"
        path.write_text("gibberish here\n")
        rc, _, err = run(capsys, "sim", str(path))
        assert rc == 2
        assert "cannot tell" in err


class TestErrorPaths:
    def test_missing_file(self, capsys):
        rc, _, err = run(capsys, "iso", "nope.mx", SWITCH)
        assert rc == 2
        assert "error:" in err

    def test_parse_error_location(self, capsys, tmp_path):
        path = tmp_path / "broken.mx"
        path.write_text("machine broken\nstates a b\nfn f: a->a\n")
        rc, _, err = run(capsys, "iso", str(path), SWITCH)
        assert rc == 2
        assert "line" in err


class TestCheckLemmas:
    def test_reports_violations_without_expect(self, capsys):
        rc, out, _ = run(capsys, "check-lemmas", "--seed", "0", "--iters", "300")
        assert rc == 0
        assert "lemma 1" in out and "lemma 2" in out and "lemma 3" in out
        assert "counterexample" in out

    def test_expect_gating(self, capsys):
        rc, _, _ = run(
            capsys, "check-lemmas", "--seed", "0", "--iters", "300", "--expect", "yes"
        )
        assert rc == 1
        rc, _, _ = run(
            capsys, "check-lemmas", "--seed", "0", "--iters", "300", "--expect", "no"
        )
        assert rc == 0

    def test_lemma_one_alone_is_clean(self, capsys):
        rc, out, _ = run(capsys, "check-lemmas", "--seed", "5", "--iters", "200")
        assert rc == 0
        for line in out.splitlines():
            if line.startswith("lemma 1") or line.startswith("lemma 3"):
                assert "0 violation(s)" in line
