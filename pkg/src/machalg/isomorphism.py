"""Machine isomorphism, completeness, and the full-set embedding.

An isomorphism between machines is a pair of bijections: g on states and h
on functions, commuting in the sense g(f(s)) = h(f)(g(s)).  The commuting
condition forces h(f) = g . f . g^-1, so only g is ever searched; h is
induced and looked up.  Witnesses are canonical: the lexicographically
least valid g under the source state order, so identical inputs always
produce identical certificates.

Completeness asks for a sub-machine of one machine isomorphic to another.
When the container carries the full function set the witness is constructed
directly (conjugate each target function by an arbitrary injection and
extend by the identity); otherwise subsets are searched exhaustively.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import IncompatibleShapesError, SearchBudgetExceededError
from .machine import (
    DEFAULT_ENUMERATION_CAP,
    Machine,
    StateSet,
    full_machine,
)
from .reductions import Reduction, functional_reduction, state_reduction


@dataclass(frozen=True)
class Morphism:
    """State and function mappings as index tables.

    ``g[i]`` is the target state index for source state ``i``; ``h[j]`` is
    the target function index for source function ``j``.  Semantic checks
    (bijectivity, commutation) live in :func:`verify_morphism`.
    """

    g: tuple[int, ...]
    h: tuple[int, ...]


@dataclass(frozen=True)
class CompletenessWitness:
    """Sub-machine location plus the isomorphism onto it.

    ``reductions`` is the functional-then-state pair applied to the
    container; ``morphism`` maps the target machine onto the reduced one.
    """

    reductions: tuple[Reduction, Reduction]
    morphism: Morphism

    @property
    def sub(self) -> Machine:
        return self.reductions[1].result


def verify_morphism(a: Machine, b: Machine, mor: Morphism) -> bool:
    """Check that ``mor`` is an isomorphism from ``a`` to ``b``.

    Shape preconditions (equal state and function counts) are hard errors;
    everything else, including malformed index tables, is just ``False``.
    """
    n = a.n_states
    k = a.n_functions
    if b.n_states != n or b.n_functions != k:
        raise IncompatibleShapesError(
            f"cannot compare a {n}-state/{k}-function machine with a "
            f"{b.n_states}-state/{b.n_functions}-function one"
        )
    if len(mor.g) != n or sorted(mor.g) != list(range(n)):
        return False
    if len(mor.h) != k or sorted(mor.h) != list(range(k)):
        return False
    for j, f in enumerate(a.functions):
        image = b.functions[mor.h[j]]
        for s in range(n):
            if mor.g[f.table[s]] != image.table[mor.g[s]]:
                return False
    return True


# ---------------------------------------------------------------------------
# Structural invariants used for pruning
# ---------------------------------------------------------------------------


def _function_profile(table: tuple[int, ...]) -> tuple[tuple, frozenset]:
    """(invariant fingerprint, set of on-cycle states) for one self-map.

    The fingerprint (image size, indegree multiset, cycle-length multiset)
    is preserved by conjugation with any state bijection, so mismatched
    fingerprint multisets rule an isomorphism out before any search.
    """
    n = len(table)
    indeg = [0] * n
    for j in table:
        indeg[j] += 1
    deg = indeg[:]
    stack = [i for i in range(n) if deg[i] == 0]
    off_cycle = [False] * n
    while stack:
        i = stack.pop()
        off_cycle[i] = True
        j = table[i]
        deg[j] -= 1
        if deg[j] == 0:
            stack.append(j)
    cyclic = frozenset(i for i in range(n) if not off_cycle[i])
    lengths = []
    seen = set()
    for i in cyclic:
        if i in seen:
            continue
        length = 0
        j = i
        while j not in seen:
            seen.add(j)
            j = table[j]
            length += 1
        lengths.append(length)
    fingerprint = (len(set(table)), tuple(sorted(indeg)), tuple(sorted(lengths)))
    return fingerprint, cyclic


def _state_signatures(m: Machine) -> list[tuple]:
    """Per-state fingerprints invariant under isomorphism.

    For each state, the multiset over functions of (indegree here, fixes
    here, lies on a cycle here).  Conjugation matches functions one to one
    and transports all three quantities, so signatures must agree between
    g-paired states.
    """
    n = m.n_states
    per_fn = []
    for f in m.functions:
        indeg = [0] * n
        for j in f.table:
            indeg[j] += 1
        _, cyclic = _function_profile(f.table)
        per_fn.append((indeg, f.table, cyclic))
    sigs = []
    for s in range(n):
        rows = sorted(
            (indeg[s], table[s] == s, s in cyclic) for indeg, table, cyclic in per_fn
        )
        sigs.append(tuple(rows))
    return sigs


def _arc_counts(m: Machine) -> list[list[int]]:
    """arc[s][t] = number of functions sending s to t; invariant matrix."""
    n = m.n_states
    arc = [[0] * n for _ in range(n)]
    for f in m.functions:
        for s, t in enumerate(f.table):
            arc[s][t] += 1
    return arc


def find_isomorphism(
    a: Machine, b: Machine, *, node_budget: Optional[int] = None
) -> Optional[Morphism]:
    """Canonical isomorphism witness or None.

    Backtracks over state bijections g in lexicographic order; the first
    solution is therefore the least.  h is never searched: at a full
    assignment each conjugate g.f.g^-1 must literally be one of b's
    functions, found by table lookup.  ``node_budget`` caps the number of
    attempted partial assignments; exceeding it raises rather than guessing.
    """
    if a.n_states != b.n_states or a.n_functions != b.n_functions:
        return None
    n = a.n_states
    # Cheap reject: image-size multisets (bijections can never pair with
    # non-bijections, collapse ranks must line up).
    if sorted(len(set(f.table)) for f in a.functions) != sorted(
        len(set(f.table)) for f in b.functions
    ):
        return None
    prof_a = sorted(_function_profile(f.table)[0] for f in a.functions)
    prof_b = sorted(_function_profile(f.table)[0] for f in b.functions)
    if prof_a != prof_b:
        return None
    sig_a = _state_signatures(a)
    sig_b = _state_signatures(b)
    if sorted(sig_a) != sorted(sig_b):
        return None
    arc_a = _arc_counts(a)
    arc_b = _arc_counts(b)
    b_index = {f.table: j for j, f in enumerate(b.functions)}

    assign = [-1] * n
    used = [False] * n
    nodes = 0

    def induced() -> Optional[Morphism]:
        h = []
        for f in a.functions:
            conj = [0] * n
            for s in range(n):
                conj[assign[s]] = assign[f.table[s]]
            j = b_index.get(tuple(conj))
            if j is None:
                return None
            h.append(j)
        # Conjugation by a bijection is injective, and counts match, so h
        # here is always a bijection.
        return Morphism(tuple(assign), tuple(h))

    def extend(i: int) -> Optional[Morphism]:
        nonlocal nodes
        if i == n:
            return induced()
        for t in range(n):
            if used[t] or sig_a[i] != sig_b[t]:
                continue
            if arc_a[i][i] != arc_b[t][t]:
                continue
            ok = True
            for j in range(i):
                u = assign[j]
                if arc_a[i][j] != arc_b[t][u] or arc_a[j][i] != arc_b[u][t]:
                    ok = False
                    break
            if not ok:
                continue
            nodes += 1
            if node_budget is not None and nodes > node_budget:
                raise SearchBudgetExceededError("isomorphism search", node_budget)
            assign[i] = t
            used[t] = True
            found = extend(i + 1)
            if found is not None:
                return found
            assign[i] = -1
            used[t] = False
        return None

    return extend(0)


def is_isomorphic(a: Machine, b: Machine, *, node_budget: Optional[int] = None) -> bool:
    return find_isomorphism(a, b, node_budget=node_budget) is not None


# ---------------------------------------------------------------------------
# Completeness
# ---------------------------------------------------------------------------


def construct_full_embedding(
    a_states: StateSet,
    b: Machine,
    g: Optional[Sequence[int]] = None,
    *,
    container: Optional[Machine] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CompletenessWitness:
    """Embed ``b`` into the full machine on ``a_states`` without searching.

    ``g`` is an injection as a tuple of ``a_states`` indices, one per state
    of ``b`` (default: the order-preserving injection 0,1,...).  Each
    function of ``b`` is conjugated through g and extended by the identity
    off the image; with the full function set available the extension is
    always present, so the witness verifies by construction.

    ``container`` can supply an existing full machine on ``a_states`` to
    avoid re-enumeration; otherwise one is materialized (subject to ``cap``).
    """
    n_a = len(a_states)
    n_b = b.n_states
    if n_b > n_a:
        raise IncompatibleShapesError(
            f"cannot embed {n_b} states into {n_a}; an injection needs "
            "at least as many targets as sources"
        )
    if g is None:
        g = tuple(range(n_b))
    else:
        g = tuple(g)
        if len(g) != n_b or len(set(g)) != n_b or not all(0 <= i < n_a for i in g):
            raise IncompatibleShapesError(
                "g must be an injection of target-state indices into the container states"
            )
    if container is None:
        container = full_machine(a_states, cap)
    else:
        if container.states != a_states:
            raise IncompatibleShapesError("container is not a machine on the given states")
        if not container.has_full_function_set():
            raise IncompatibleShapesError(
                "the constructive embedding needs the full function set"
            )

    image = sorted(g)  # sub-machine states keep the container's order
    sub_labels = tuple(a_states.labels[i] for i in image)
    position = {i: p for p, i in enumerate(image)}
    table_index = {f.table: j for j, f in enumerate(container.functions)}

    chosen = []
    conjugates = []
    for f in b.functions:
        ext = list(range(n_a))
        for s in range(n_b):
            ext[g[s]] = g[f.table[s]]
        conjugates.append(tuple(ext))
        chosen.append(table_index[tuple(ext)])

    fr = functional_reduction(container, [container.functions[j] for j in chosen])
    sr = state_reduction(fr.result, sub_labels)
    sub_index = {f.table: j for j, f in enumerate(sr.result.functions)}
    h = []
    for ext in conjugates:
        restr = tuple(position[ext[i]] for i in image)
        h.append(sub_index[restr])
    mor = Morphism(tuple(position[i] for i in g), tuple(h))
    return CompletenessWitness((fr, sr), mor)


def is_complete(
    a: Machine,
    b: Machine,
    *,
    method: str = "auto",
    node_budget: Optional[int] = None,
) -> Optional[CompletenessWitness]:
    """Witness that some sub-machine of ``a`` is isomorphic to ``b``, or None.

    method "construct" uses the full-set embedding (requires a full ``a``),
    "search" is exhaustive over state subsets, "auto" picks construct when
    it applies.  A budget overrun raises; None is a definite negative.
    """
    if method not in ("auto", "construct", "search"):
        raise ValueError(f"unknown method {method!r}")
    if b.n_states > a.n_states:
        return None
    if method == "construct" or (method == "auto" and a.has_full_function_set()):
        if not a.has_full_function_set():
            raise IncompatibleShapesError(
                "the constructive path needs the full function set on the container"
            )
        return construct_full_embedding(a.states, b, container=a)
    return _search_completeness(a, b, node_budget)


def _search_completeness(
    a: Machine, b: Machine, node_budget: Optional[int]
) -> Optional[CompletenessWitness]:
    """Exhaustive completeness search: subsets in lexicographic order, then
    bijections onto each subset, with sub-multiset pruning.

    For a candidate subset S' the reachable function tables are the
    restrictions of a's S'-preserving functions; b embeds iff some bijection
    g sends every b-function's conjugate into that table set.  Surplus
    functions are discarded by the functional reduction, which keeps, for
    each needed table, the least-index function of a realizing it.
    """
    n_a = a.n_states
    n_b = b.n_states
    sig_b = _state_signatures(b)
    arc_b = _arc_counts(b)
    nodes = 0

    for subset in itertools.combinations(range(n_a), n_b):
        sub_labels = tuple(a.states.labels[i] for i in subset)
        kept = {i: p for p, i in enumerate(subset)}
        # Restrictions of preserving functions, each with its least origin.
        reachable: dict[tuple[int, ...], int] = {}
        for idx, f in enumerate(a.functions):
            if all(f.table[i] in kept for i in subset):
                restr = tuple(kept[f.table[i]] for i in subset)
                reachable.setdefault(restr, idx)
        if len(reachable) < b.n_functions:
            continue

        # Invariants of the reduced machine, for pruning g.
        arc_r = [[0] * n_b for _ in range(n_b)]
        for restr in reachable:
            for s, t in enumerate(restr):
                arc_r[s][t] += 1
        sigs_r = _subset_signatures(list(reachable), n_b)

        assign = [-1] * n_b
        used = [False] * n_b

        def embeds_current() -> bool:
            for f in b.functions:
                conj = [0] * n_b
                for s in range(n_b):
                    conj[assign[s]] = assign[f.table[s]]
                if tuple(conj) not in reachable:
                    return False
            return True

        def extend(i: int) -> Optional[tuple[int, ...]]:
            nonlocal nodes
            if i == n_b:
                return tuple(assign) if embeds_current() else None
            for t in range(n_b):
                if used[t] or not _sub_multiset(sig_b[i], sigs_r[t]):
                    continue
                if arc_b[i][i] > arc_r[t][t]:
                    continue
                ok = True
                for j in range(i):
                    u = assign[j]
                    if arc_b[i][j] > arc_r[t][u] or arc_b[j][i] > arc_r[u][t]:
                        ok = False
                        break
                if not ok:
                    continue
                nodes += 1
                if node_budget is not None and nodes > node_budget:
                    raise SearchBudgetExceededError("completeness search", node_budget)
                assign[i] = t
                used[t] = True
                found = extend(i + 1)
                if found is not None:
                    return found
                assign[i] = -1
                used[t] = False
            return None

        g_found = extend(0)
        if g_found is None:
            continue

        chosen = []
        conj_tables = []
        for f in b.functions:
            conj = [0] * n_b
            for s in range(n_b):
                conj[g_found[s]] = g_found[f.table[s]]
            conj = tuple(conj)
            conj_tables.append(conj)
            chosen.append(reachable[conj])
        fr = functional_reduction(a, [a.functions[j] for j in sorted(set(chosen))])
        sr = state_reduction(fr.result, sub_labels)
        sub_index = {f.table: j for j, f in enumerate(sr.result.functions)}
        mor = Morphism(g_found, tuple(sub_index[t] for t in conj_tables))
        return CompletenessWitness((fr, sr), mor)
    return None


def _subset_signatures(tables: list[tuple[int, ...]], n: int) -> list[tuple]:
    """Per-state rows for a set of reduced tables, matching _state_signatures."""
    per_fn = []
    for table in tables:
        indeg = [0] * n
        for j in table:
            indeg[j] += 1
        _, cyclic = _function_profile(table)
        per_fn.append((indeg, table, cyclic))
    sigs = []
    for s in range(n):
        rows = sorted(
            (indeg[s], table[s] == s, s in cyclic) for indeg, table, cyclic in per_fn
        )
        sigs.append(tuple(rows))
    return sigs


def _sub_multiset(smaller: tuple, larger: tuple) -> bool:
    """True when the first sorted row tuple embeds into the second."""
    need = Counter(smaller)
    have = Counter(larger)
    return all(have[k] >= v for k, v in need.items())


def verify_completeness(a: Machine, b: Machine, w: CompletenessWitness) -> bool:
    """Re-derive both reductions and re-check the morphism; no search.

    A witness is accepted only if its functional reduction starts from
    ``a``, the reductions chain, the recomputed results match the recorded
    ones, and the morphism is a genuine isomorphism onto the sub-machine.
    """
    fr, sr = w.reductions
    if fr.kind != "functional" or sr.kind != "state":
        return False
    if fr.source != a or sr.source != fr.result:
        return False
    try:
        fr2 = functional_reduction(a, [a.functions[i] for i in fr.kept_functions])
        sr2 = state_reduction(fr2.result, sr.kept_states)
    except Exception:
        return False
    if fr2.result != fr.result or sr2.result != sr.result:
        return False
    try:
        return verify_morphism(b, sr.result, w.morphism)
    except IncompatibleShapesError:
        return False
