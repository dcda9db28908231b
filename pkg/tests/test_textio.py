"""Round-trips and error positions for every text format."""

import random

import pytest

from machalg import (
    BoundaryPolicy,
    Certificate,
    InvalidMachineError,
    MemEntry,
    MemProgram,
    ParseError,
    parse_certificate,
    parse_machine,
    parse_mem,
    parse_turing,
    render_certificate,
    render_machine,
    render_mem,
    render_turing,
    tm_to_mem,
)
from machalg.lemmas import random_machine

from conftest import random_turing_spec

SWITCH = """\
machine switch
states off on
fn flip: off->on, on->off
fn hold: off->off, on->on
output flip
"""


class TestMachineFormat:
    def test_parse_basic(self):
        m = parse_machine(SWITCH)
        assert m.states.labels == ("off", "on")
        assert m.n_functions == 2
        assert m.function_named("flip").table == (1, 0)
        assert m.output_functions == frozenset({m.function_index(m.function_named("flip"))})

    def test_comments_and_blanks(self):
        text = "# top note\nmachine m\n\nstates a b  # trailing\nfn f: a->b, b->b\n"
        m = parse_machine(text)
        assert m.function_named("f")("a") == "b"

    def test_round_trip(self):
        m = parse_machine(SWITCH)
        assert parse_machine(render_machine(m)) == m

    def test_round_trip_random(self):
        rng = random.Random(5)
        for _ in range(60):
            m = random_machine(rng, max_states=4, max_functions=6)
            again = parse_machine(render_machine(m))
            assert again == m

    def test_render_stable(self):
        m = parse_machine(SWITCH)
        assert render_machine(m) == render_machine(m)

    def test_missing_clause_rejected(self):
        with pytest.raises(ParseError) as e:
            parse_machine("machine m\nstates a b\nfn f: a->b\n")
        assert "missing clauses" in str(e.value)
        assert e.value.line == 3

    def test_unknown_state_rejected(self):
        with pytest.raises(ParseError) as e:
            parse_machine("machine m\nstates a b\nfn f: a->b, b->z\n")
        assert "unknown state 'z'" in str(e.value)
        assert e.value.line == 3
        assert e.value.column == "fn f: a->b, b->z".index("z") + 1

    def test_duplicate_clause_rejected(self):
        with pytest.raises(ParseError) as e:
            parse_machine("machine m\nstates a b\nfn f: a->b, a->a, b->b\n")
        assert "duplicate clause" in str(e.value)

    def test_duplicate_state_rejected(self):
        with pytest.raises(ParseError):
            parse_machine("machine m\nstates a a\nfn f: a->a\n")

    def test_duplicate_fn_name_rejected(self):
        with pytest.raises(ParseError):
            parse_machine("machine m\nstates a\nfn f: a->a\nfn f: a->a\n")

    def test_missing_sections(self):
        with pytest.raises(ParseError):
            parse_machine("")
        with pytest.raises(ParseError):
            parse_machine("machine m\n")
        with pytest.raises(ParseError):
            parse_machine("machine m\nstates a\n")
        with pytest.raises(ParseError):
            parse_machine("states a\nfn f: a->a\n")

    def test_unknown_directive(self):
        with pytest.raises(ParseError) as e:
            parse_machine("machine m\nstates a\nfrobnicate\n")
        assert e.value.line == 3

    def test_output_unknown_fn(self):
        with pytest.raises(ParseError) as e:
            parse_machine("machine m\nstates a\nfn f: a->a\noutput g\n")
        assert "unknown function 'g'" in str(e.value)

    def test_bad_label_rejected_on_render(self):
        import machalg

        ss = machalg.states("a,b", "c")
        m = machalg.make_machine(ss, [machalg.identity_fn(ss)])
        with pytest.raises(InvalidMachineError):
            render_machine(m)

    def test_samples_parse(self):
        for path in ("samples/switch.mx", "samples/const0.mx", "samples/const1.mx"):
            with open(path) as fh:
                parse_machine(fh.read())


class TestTuringFormat:
    def test_round_trip_samples(self):
        for path in ("samples/bitflip.tm", "samples/increment.tm"):
            with open(path) as fh:
                t = parse_turing(fh.read())
            assert parse_turing(render_turing(t)) == t

    def test_round_trip_random(self):
        rng = random.Random(9)
        for _ in range(60):
            t = random_turing_spec(rng)
            assert parse_turing(render_turing(t)) == t

    def test_fields(self):
        with open("samples/increment.tm") as fh:
            t = parse_turing(fh.read())
        assert t.cells == 4
        assert t.boundary_policy is BoundaryPolicy.REJECT
        assert t.halting == frozenset({"done"})
        assert ("scan", "1") in t.rules

    def test_unknown_symbol_in_rule(self):
        text = (
            "tm t\nsymbols 0 1\nregisters q\ncells 1\nboundary clamp\n"
            "rule q 2 -> q 0 S\ninit tape 0 head 0 register q\n"
        )
        with pytest.raises(ParseError) as e:
            parse_turing(text)
        assert e.value.line == 6
        assert "unknown symbol '2'" in str(e.value)

    def test_duplicate_rule(self):
        text = (
            "tm t\nsymbols 0\nregisters q\ncells 1\nboundary clamp\n"
            "rule q 0 -> q 0 S\nrule q 0 -> q 0 L\n"
            "init tape 0 head 0 register q\n"
        )
        with pytest.raises(ParseError) as e:
            parse_turing(text)
        assert "duplicate rule" in str(e.value)

    def test_halting_register_with_rule(self):
        text = (
            "tm t\nsymbols 0\nregisters q h\ncells 1\nboundary clamp\nhalting h\n"
            "rule h 0 -> q 0 S\ninit tape 0 head 0 register q\n"
        )
        with pytest.raises(ParseError) as e:
            parse_turing(text)
        assert "halting register" in str(e.value)

    def test_head_out_of_range(self):
        text = (
            "tm t\nsymbols 0\nregisters q\ncells 2\nboundary clamp\n"
            "init tape 0 0 head 2 register q\n"
        )
        with pytest.raises(ParseError) as e:
            parse_turing(text)
        assert "head" in str(e.value)

    def test_missing_section(self):
        with pytest.raises(ParseError) as e:
            parse_turing("tm t\nsymbols 0\nregisters q\ncells 1\nboundary clamp\n")
        assert "missing 'init'" in str(e.value)

    def test_bad_move(self):
        text = (
            "tm t\nsymbols 0\nregisters q\ncells 1\nboundary clamp\n"
            "rule q 0 -> q 0 X\ninit tape 0 head 0 register q\n"
        )
        with pytest.raises(ParseError) as e:
            parse_turing(text)
        assert "move" in str(e.value)


class TestMemFormat:
    def test_round_trip_sample(self):
        with open("samples/toggle.mem") as fh:
            p = parse_mem(fh.read())
        assert parse_mem(render_mem(p)) == p
        assert p.finals == ((0, "2"),)

    def test_round_trip_translated(self):
        # namespaced values with dots must survive the format
        for path in ("samples/bitflip.tm", "samples/increment.tm"):
            with open(path) as fh:
                t = parse_turing(fh.read())
            p = tm_to_mem(t)
            assert parse_mem(render_mem(p)) == p

    def test_multi_family_round_trip(self):
        p = MemProgram(
            n_cells=2,
            alphabet=("x", "y"),
            functions=(
                (MemEntry((0,), ("x",), (1,), ("y",), (1,), 1),),
                (MemEntry((1,), ("y",), (), (), (0,), 0),),
            ),
            initial_cells=("x", "x"),
            initial_selector=(0,),
            initial_function=0,
            finals=((1, "y"),),
            default_halt=True,
        )
        assert parse_mem(render_mem(p)) == p

    def test_empty_write_renders(self):
        p = MemProgram(
            n_cells=1,
            alphabet=("a",),
            functions=((MemEntry((0,), ("a",), (), (), (0,), 0),),),
            initial_cells=("a",),
            initial_selector=(0,),
            initial_function=0,
        )
        text = render_mem(p)
        assert "write()=()" in text
        assert parse_mem(text) == p

    def test_entry_before_fn(self):
        text = (
            "mem m\nalphabet 0\ncell 0 = 0\nstart read(0) fn 0\n"
            "entry read(0)=(0) -> write()=() next read(0) fn 0\n"
        )
        with pytest.raises(ParseError) as e:
            parse_mem(text)
        assert "must follow" in str(e.value)

    def test_fn_order_enforced(self):
        text = "mem m\nalphabet 0\ncell 0 = 0\nstart read(0) fn 0\nfn 1\n"
        with pytest.raises(ParseError) as e:
            parse_mem(text)
        assert "expected fn 0" in str(e.value)

    def test_unknown_value(self):
        text = "mem m\nalphabet 0\ncell 0 = 9\nstart read(0) fn 0\nfn 0\n"
        with pytest.raises(ParseError) as e:
            parse_mem(text)
        assert "unknown value '9'" in str(e.value)
        assert e.value.line == 3

    def test_cell_gap(self):
        text = (
            "mem m\nalphabet 0\ncell 0 = 0\ncell 2 = 0\n"
            "start read(0) fn 0\nfn 0\n"
        )
        with pytest.raises(ParseError) as e:
            parse_mem(text)
        assert "cell indices" in str(e.value)

    def test_missing_start(self):
        with pytest.raises(ParseError) as e:
            parse_mem("mem m\nalphabet 0\ncell 0 = 0\nfn 0\n")
        assert "missing 'start'" in str(e.value)


class TestCertificates:
    def test_iso_round_trip(self):
        c = Certificate("iso", g=(1, 0, 2), h=(0, 2, 1))
        assert parse_certificate(render_certificate(c)) == c

    def test_complete_round_trip(self):
        c = Certificate(
            "complete",
            g=(0, 1),
            h=(1, 0),
            kept_functions=(0, 3, 7),
            kept_states=("a", "b"),
        )
        assert parse_certificate(render_certificate(c)) == c

    def test_submachine_round_trip(self):
        c = Certificate("submachine", kept_functions=(2,), kept_states=("x",))
        assert parse_certificate(render_certificate(c)) == c

    def test_render_deterministic(self):
        c = Certificate("complete", g=(0,), h=(0,), kept_functions=(1,), kept_states=("s",))
        assert render_certificate(c) == render_certificate(c)

    def test_unknown_kind(self):
        with pytest.raises(ParseError):
            parse_certificate("certificate wat\ng 0\nh 0\n")

    def test_missing_key(self):
        with pytest.raises(ParseError) as e:
            parse_certificate("certificate iso\ng 0\n")
        assert "'h'" in str(e.value)

    def test_stray_key(self):
        with pytest.raises(ParseError):
            parse_certificate("certificate iso\ng 0\nh 0\nkeep-fns 0\n")

    def test_non_numeric(self):
        with pytest.raises(ParseError) as e:
            parse_certificate("certificate iso\ng zero\nh 0\n")
        assert "numbers" in str(e.value)
