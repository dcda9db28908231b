"""Shared exception hierarchy.

Everything raised on purpose by this package derives from MachalgError, so
callers (notably the CLI) can separate deliberate failures from bugs.
"""

from __future__ import annotations


class MachalgError(Exception):
    """Base class for all errors raised by machalg."""


class CardinalOverflowError(MachalgError, OverflowError):
    """Finite cardinal arithmetic left the checked 64-bit range."""


class UndefinedFormError(MachalgError, ArithmeticError):
    """An arithmetic form with no defined value, e.g. 0^0."""


class InvalidMachineError(MachalgError, ValueError):
    """A machine violating a structural invariant (empty function set, ...)."""


class TotalityViolationError(MachalgError, ValueError):
    """A transition table entry points outside its state set."""


class DomainMismatchError(MachalgError, KeyError):
    """A state was used with a function defined on a different state set."""


class EnumerationTooLargeError(MachalgError, ValueError):
    """An exhaustive enumeration would exceed the configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what} would enumerate {size} items, above the cap of {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class InvalidReductionError(MachalgError, ValueError):
    """A reduction request that is not a subset of the source machine."""


class EmptyReductionError(MachalgError, ValueError):
    """A state reduction whose preserving function set would be empty."""


class IncompatibleShapesError(MachalgError, ValueError):
    """Witness verification against machines of mismatched sizes."""


class SearchBudgetExceededError(MachalgError, RuntimeError):
    """A search hit its node cap before reaching a definite answer.

    Deliberately distinct from a negative result: the question was not
    answered, and callers must not treat this as "no".
    """

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what}: search budget of {cap} nodes exceeded (inconclusive)")
        self.what = what
        self.cap = cap


class ParseError(MachalgError, ValueError):
    """Text-format parse failure with source position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column
