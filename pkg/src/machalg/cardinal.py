"""Symbolic cardinal arithmetic over finite cardinals and Beth numbers.

Values are either ``Finite(n)`` with ``n`` a checked non-negative 64-bit
integer, or ``Beth(alpha)`` with a natural-number index: ``Beth(0)`` is the
cardinality of the naturals and ``Beth(alpha+1) = 2**Beth(alpha)``.  The
rewrite rules implemented here are the standard ones:

* ``mu + kappa = mu * kappa = max(mu, kappa)`` once either operand is
  infinite (with ``Finite(0)`` still annihilating products),
* ``mu ** Beth(a) = Beth(a+1)`` for ``2 <= mu <= Beth(a+1)``,
* ``Beth(a) ** kappa = Beth(a)`` for finite ``kappa >= 1``,
* and the closure ``Beth(b) ** Beth(a) = Beth(max(b, a+1))``, which the two
  rules above force by monotonicity (they agree on the overlap ``b = a+1``).

Every operation optionally appends ``TraceStep`` records to a caller-owned
list, so the CLI can print the derivation that produced a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Optional, Union

from .errors import CardinalOverflowError, UndefinedFormError

# Checked bound for Finite values: non-negative signed-64-bit range.
FINITE_MAX = 2**63 - 1


@total_ordering
@dataclass(frozen=True)
class Finite:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise TypeError(f"Finite value must be an int, got {self.n!r}")
        if self.n < 0:
            raise ValueError(f"Finite value must be non-negative, got {self.n}")
        if self.n > FINITE_MAX:
            raise CardinalOverflowError(f"Finite({self.n}) exceeds the checked 64-bit range")

    def __lt__(self, other):
        if not isinstance(other, (Finite, Beth)):
            return NotImplemented
        return _order_key(self) < _order_key(other)

    def __repr__(self):
        return f"Finite({self.n})"


@total_ordering
@dataclass(frozen=True)
class Beth:
    alpha: int

    def __post_init__(self):
        if not isinstance(self.alpha, int) or isinstance(self.alpha, bool):
            raise TypeError(f"Beth index must be an int, got {self.alpha!r}")
        if self.alpha < 0:
            raise ValueError(f"Beth index must be non-negative, got {self.alpha}")

    def __lt__(self, other):
        if not isinstance(other, (Finite, Beth)):
            return NotImplemented
        return _order_key(self) < _order_key(other)

    def __repr__(self):
        return f"Beth({self.alpha})"


Cardinal = Union[Finite, Beth]


def _order_key(c: Cardinal) -> tuple[int, int]:
    # Every Finite sorts below every Beth; within a variant the value decides.
    if isinstance(c, Finite):
        return (0, c.n)
    return (1, c.alpha)


def is_finite(c: Cardinal) -> bool:
    return isinstance(c, Finite)


def is_infinite(c: Cardinal) -> bool:
    return isinstance(c, Beth)


@dataclass(frozen=True)
class TraceStep:
    """One rewrite applied during a cardinal computation."""

    rule: str
    text: str

    def __str__(self):
        return f"[{self.rule}] {self.text}"


Trace = list  # list[TraceStep]; caller-owned accumulator


def _note(trace: Optional[Trace], rule: str, text: str) -> None:
    if trace is not None:
        trace.append(TraceStep(rule, text))


def _checked_finite(value: int, what: str) -> Finite:
    if value > FINITE_MAX:
        raise CardinalOverflowError(f"{what} = {value} exceeds the checked 64-bit range")
    return Finite(value)


def card_add(a: Cardinal, b: Cardinal, trace: Optional[Trace] = None) -> Cardinal:
    """Cardinal sum: exact on finites, max once either operand is infinite."""
    if isinstance(a, Finite) and isinstance(b, Finite):
        result = _checked_finite(a.n + b.n, f"{a!r} + {b!r}")
        _note(trace, "finite-add", f"{a!r} + {b!r} = {result!r} (exact integer sum)")
        return result
    result = max(a, b, key=_order_key)
    _note(
        trace,
        "infinite-max-add",
        f"{a!r} + {b!r} = {result!r} (mu + kappa = max(mu, kappa) when either is infinite)",
    )
    return result


def card_mul(a: Cardinal, b: Cardinal, trace: Optional[Trace] = None) -> Cardinal:
    """Cardinal product: exact on finites, max once either operand is infinite.

    ``Finite(0)`` annihilates even against infinite factors.
    """
    if a == Finite(0) or b == Finite(0):
        _note(trace, "annihilate", f"{a!r} * {b!r} = Finite(0) (zero annihilates any product)")
        return Finite(0)
    if isinstance(a, Finite) and isinstance(b, Finite):
        result = _checked_finite(a.n * b.n, f"{a!r} * {b!r}")
        _note(trace, "finite-mul", f"{a!r} * {b!r} = {result!r} (exact integer product)")
        return result
    result = max(a, b, key=_order_key)
    _note(
        trace,
        "infinite-max-mul",
        f"{a!r} * {b!r} = {result!r} (mu * kappa = max(mu, kappa) when either is infinite)",
    )
    return result


def card_pow(base: Cardinal, exp: Cardinal, trace: Optional[Trace] = None) -> Cardinal:
    """Cardinal exponentiation.

    Raises UndefinedFormError on ``0 ** 0`` and CardinalOverflowError when a
    finite-by-finite power leaves the checked range.
    """
    if base == Finite(0) and exp == Finite(0):
        raise UndefinedFormError("Finite(0) ** Finite(0) has no defined value")
    if exp == Finite(0):
        _note(trace, "pow-zero-exp", f"{base!r} ** Finite(0) = Finite(1) (empty product)")
        return Finite(1)
    if base == Finite(1):
        _note(trace, "pow-base-one", f"Finite(1) ** {exp!r} = Finite(1)")
        return Finite(1)
    if base == Finite(0):
        # exp >= Finite(1) here; no map from a non-empty set into the empty set.
        _note(trace, "pow-base-zero", f"Finite(0) ** {exp!r} = Finite(0)")
        return Finite(0)
    if isinstance(exp, Finite):
        if isinstance(base, Finite):
            # Guard before computing: 2**64 already overflows, so any base >= 2
            # with exponent above 63 is out of range.
            if exp.n > 63:
                raise CardinalOverflowError(
                    f"{base!r} ** {exp!r} exceeds the checked 64-bit range"
                )
            result = _checked_finite(base.n**exp.n, f"{base!r} ** {exp!r}")
            _note(trace, "finite-pow", f"{base!r} ** {exp!r} = {result!r} (exact integer power)")
            return result
        result = Beth(base.alpha)
        _note(
            trace,
            "beth-finite-pow",
            f"{base!r} ** {exp!r} = {result!r} (beth_a ** k = beth_a for finite k >= 1)",
        )
        return result
    # exp is Beth(alpha)
    if isinstance(base, Finite):
        result = Beth(exp.alpha + 1)
        _note(
            trace,
            "finite-beth-pow",
            f"{base!r} ** {exp!r} = {result!r} (mu ** beth_a = beth_(a+1) for 2 <= mu <= beth_(a+1))",
        )
        return result
    result = Beth(max(base.alpha, exp.alpha + 1))
    _note(
        trace,
        "beth-beth-pow",
        f"{base!r} ** {exp!r} = {result!r} (beth_b ** beth_a = beth_(max(b, a+1)))",
    )
    return result


# ---------------------------------------------------------------------------
# Machine-size templates
# ---------------------------------------------------------------------------

TEMPLATE_KINDS = (
    "finite-turing",
    "infinite-tape-turing",
    "umm",
    "lsm",
    "quantum",
)

# Which parameters each kind requires.
_TEMPLATE_PARAMS = {
    "finite-turing": ("k", "m", "n"),
    "infinite-tape-turing": ("k", "m"),
    "umm": ("n",),
    "lsm": (),
    "quantum": ("m", "n"),
}


@dataclass(frozen=True)
class MachineTemplate:
    """A named machine family whose state-set size is computed symbolically.

    ``finite-turing(k, m, n)``: k control registers, m tape symbols, n tape
    cells.  ``infinite-tape-turing(k, m)``: countably many cells (m >= 2 so
    the written-tape component is a genuine power of the continuum).
    ``umm(n)``: n cells each holding a continuum of values.  ``lsm``: a
    reservoir of continuum-valued units.  ``quantum(m, n)``: n qudits with m
    basis states each.
    """

    kind: str
    k: Optional[int] = None
    m: Optional[int] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in TEMPLATE_KINDS:
            raise ValueError(f"unknown template kind {self.kind!r}; expected one of {TEMPLATE_KINDS}")
        required = _TEMPLATE_PARAMS[self.kind]
        for name in ("k", "m", "n"):
            value = getattr(self, name)
            if name in required:
                if value is None:
                    raise ValueError(f"template {self.kind!r} requires parameter {name}")
                if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                    raise ValueError(f"template parameter {name} must be a positive integer, got {value!r}")
            elif value is not None:
                raise ValueError(f"template {self.kind!r} does not take parameter {name}")
        if self.kind == "infinite-tape-turing" and self.m < 2:
            # With a single tape symbol the tape component collapses to one
            # state and the machine is only countable.
            raise ValueError("infinite-tape-turing requires m >= 2 tape symbols")

    @property
    def has_full_transition_set(self) -> bool:
        """True when the family supports every self-map of its state set."""
        return self.kind == "umm"

    def describe(self) -> str:
        params = ", ".join(
            f"{name}={getattr(self, name)}" for name in _TEMPLATE_PARAMS[self.kind]
        )
        return f"{self.kind}({params})" if params else self.kind


def _continuum(trace: Optional[Trace]) -> Cardinal:
    # |R| = 2 ** |N|, computed rather than asserted.
    return card_pow(Finite(2), Beth(0), trace)


def state_cardinality(t: MachineTemplate, trace: Optional[Trace] = None) -> Cardinal:
    """Size of the internal-state set of a template machine.

    Each case is computed through its defining chain of products and powers,
    never returned as a hard-coded constant.
    """
    if t.kind == "finite-turing":
        _note(trace, "state-product", f"|S| = k * m^n * n with k={t.k}, m={t.m}, n={t.n}")
        tape = card_pow(Finite(t.m), Finite(t.n), trace)
        return card_mul(card_mul(Finite(t.k), tape, trace), Finite(t.n), trace)
    if t.kind == "infinite-tape-turing":
        _note(trace, "state-product", f"|S| = k * m^beth_0 * beth_0 with k={t.k}, m={t.m}")
        tape = card_pow(Finite(t.m), Beth(0), trace)
        return card_mul(card_mul(Finite(t.k), tape, trace), Beth(0), trace)
    if t.kind == "umm":
        _note(trace, "state-power", f"|S| = |R|^n with n={t.n} continuum-valued cells")
        return card_pow(_continuum(trace), Finite(t.n), trace)
    if t.kind == "lsm":
        _note(trace, "state-continuum", "|S| = |R|: unconstrained continuum-valued units")
        return _continuum(trace)
    if t.kind == "quantum":
        basis = card_pow(Finite(t.m), Finite(t.n), trace)
        assert isinstance(basis, Finite)
        _note(trace, "state-power", f"|S| = |C|^(m^n) with m^n = {basis.n} basis amplitudes")
        reals = _continuum(trace)
        complexes = card_mul(reals, reals, trace)
        result = card_pow(complexes, basis, trace)
        _note(
            trace,
            "quotient-note",
            "normalization and global-phase quotients leave the cardinality unchanged (absorbed)",
        )
        return result
    raise AssertionError(f"unhandled template kind {t.kind!r}")


def transition_space_cardinality(state_card: Cardinal, trace: Optional[Trace] = None) -> Cardinal:
    """Number of self-maps on a state set of the given size: |S| ** |S|."""
    if state_card < Finite(1):
        raise ValueError("transition_space_cardinality requires at least one state")
    _note(trace, "self-map-count", f"|Phi| = |S| ** |S| with |S| = {state_card!r}")
    return card_pow(state_card, state_card, trace)


# ---------------------------------------------------------------------------
# Expression grammar: integers, beth(alpha), + * ^, parentheses
# ---------------------------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, object, int]] = []
        self._scan()
        self.index = 0

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", int(text[i:j]), i))
                i = j
                continue
            if text.startswith("beth", i):
                self.tokens.append(("beth", None, i))
                i += 4
                continue
            if ch in "+*^()":
                self.tokens.append((ch, None, i))
                i += 1
                continue
            raise _expr_error(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", None, len(text)))

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.index]

    def next(self) -> tuple[str, object, int]:
        tok = self.tokens[self.index]
        self.index += 1
        return tok


def _expr_error(message: str, column: int):
    from .errors import ParseError

    return ParseError(message, line=1, column=column + 1)


class _ExprParser:
    """Recursive descent over: sum -> product -> power -> atom.

    ``^`` binds tightest and associates to the right; ``+`` and ``*`` are
    left-associative.  Evaluation happens during the parse, feeding the trace.
    """

    def __init__(self, text: str, trace: Optional[Trace] = None):
        self.toks = _Tokenizer(text)
        self.trace = trace

    def parse(self) -> Cardinal:
        value = self._sum()
        kind, _, pos = self.toks.peek()
        if kind != "end":
            raise _expr_error(f"unexpected token {kind!r}", pos)
        return value

    def _sum(self) -> Cardinal:
        value = self._product()
        while self.toks.peek()[0] == "+":
            self.toks.next()
            value = card_add(value, self._product(), self.trace)
        return value

    def _product(self) -> Cardinal:
        value = self._power()
        while self.toks.peek()[0] == "*":
            self.toks.next()
            value = card_mul(value, self._power(), self.trace)
        return value

    def _power(self) -> Cardinal:
        base = self._atom()
        if self.toks.peek()[0] == "^":
            self.toks.next()
            return card_pow(base, self._power(), self.trace)
        return base

    def _atom(self) -> Cardinal:
        kind, value, pos = self.toks.next()
        if kind == "int":
            return Finite(value)
        if kind == "beth":
            k, _, p = self.toks.next()
            if k != "(":
                raise _expr_error("expected '(' after beth", p)
            k, idx, p = self.toks.next()
            if k != "int":
                raise _expr_error("expected a non-negative integer index in beth(...)", p)
            k, _, p = self.toks.next()
            if k != ")":
                raise _expr_error("expected ')' closing beth(...)", p)
            return Beth(idx)
        if kind == "(":
            inner = self._sum()
            k, _, p = self.toks.next()
            if k != ")":
                raise _expr_error("expected ')'", p)
            return inner
        raise _expr_error(f"expected a value, got {kind!r}", pos)


def evaluate_expression(text: str, trace: Optional[Trace] = None) -> Cardinal:
    """Evaluate a cardinal arithmetic expression like ``2 ^ beth(0) + 5``."""
    return _ExprParser(text, trace).parse()
