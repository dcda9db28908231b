"""Algebra of finite machines built from total self-maps on a state set.

Submodules: ``cardinal`` (symbolic state-set sizes), ``machine`` (states,
transition functions, fixpoint runs), ``reductions`` (keeping fewer
functions or states), ``isomorphism`` (witness search, completeness,
constructive embeddings), ``models`` (tape machines and memory-cell
programs compiled down to machines), ``textio`` (file formats and
certificates), ``lemmas`` (randomized law checks), ``cli`` (command line).
"""

from .cardinal import (
    Beth,
    Cardinal,
    FINITE_MAX,
    Finite,
    MachineTemplate,
    TEMPLATE_KINDS,
    TraceStep,
    card_add,
    card_mul,
    card_pow,
    evaluate_expression,
    state_cardinality,
    transition_space_cardinality,
)
from .errors import (
    CardinalOverflowError,
    DomainMismatchError,
    EmptyReductionError,
    EnumerationTooLargeError,
    IncompatibleShapesError,
    InvalidMachineError,
    InvalidReductionError,
    MachalgError,
    ParseError,
    SearchBudgetExceededError,
    TotalityViolationError,
    UndefinedFormError,
)
from .isomorphism import (
    CompletenessWitness,
    Morphism,
    construct_full_embedding,
    find_isomorphism,
    is_complete,
    is_isomorphic,
    verify_completeness,
    verify_morphism,
)
from .cli import (
    UniversalityReport,
    UniversalityRow,
    build_universality_report,
)
from .lemmas import (
    LemmaRunReport,
    LemmaViolation,
    random_machine,
    run_lemma_suite,
)
from .machine import (
    Cycled,
    DEFAULT_ENUMERATION_CAP,
    Halted,
    Machine,
    RunResult,
    StateSet,
    StepLimit,
    TransitionFunction,
    apply,
    constant_fn,
    fn_from_map,
    full_machine,
    full_transition_set,
    identity_fn,
    is_fixed_point,
    make_machine,
    run_to_fixpoint,
    states,
)
from .models import (
    ERROR_LABEL,
    BoundaryPolicy,
    LockstepReport,
    MemEntry,
    MemProgram,
    MemState,
    MemStateCodec,
    Move,
    TmConfiguration,
    TmStateCodec,
    TmTrace,
    TuringSpec,
    compile_mem,
    compile_tm,
    full_bijection_machine,
    mem_is_final,
    mem_run,
    mem_step,
    simulate_tm,
    tm_to_mem,
    verify_lockstep,
)
from .reductions import (
    Reduction,
    functional_reduce,
    functional_reduction,
    is_sub_machine,
    preserves,
    restrict,
    state_reduce,
    state_reduction,
    sub_machine,
)
from .textio import (
    Certificate,
    parse_certificate,
    parse_machine,
    parse_mem,
    parse_turing,
    render_certificate,
    render_machine,
    render_mem,
    render_turing,
)

__all__ = [name for name in dir() if not name.startswith("_")]
