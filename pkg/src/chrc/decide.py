"""The two decision procedures.

Divergence for range-restricted programs is decided by a finite
reachability tree over normalized macro-step configurations: a branch
stops as soon as the new configuration dominates one of its ancestors in
the quasi-order, which both witnesses an infinite computation and, by
the well-quasi-order, guarantees the tree is finite.

Termination-existence for single-headed programs is an iterative
deepening search over macro-step derivations: a branch is pruned when
some path of its partial forest accumulates more than ``m`` pairwise
r-equal repetitions, and exhausting the search at the closed-form bound
``L`` (times ``2^r`` under the theoretical semantics) is complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .engine import (
    INTRODUCE,
    OMEGA_O,
    OMEGA_T,
    Computation,
    Configuration,
    ReplayError,
    computation_to_json,
    initial_configuration,
    macro_initial,
    macro_successors,
    replay,
)
from .forest import (
    PreconditionViolation,
    atom_pattern,
    build_forest,
    compress,
    r_equal,
    repetitiveness,
)
from .syntax import Goal, Program, classify, symbol_universe
from .wqo import leq


class NotRangeRestricted(Exception):
    pass


class NotSingleHeaded(Exception):
    pass


# --- the closed-form bound -------------------------------------------------


@dataclass(frozen=True)
class BoundParameters:
    u: int  # distinct constants in program + goal
    w: int  # maximal CHR constraint arity in program + goal
    r: int  # number of propagation rules


def bound_parameters(program: Program, goal: Goal) -> BoundParameters:
    constants, w, r = symbol_universe(program, goal)
    return BoundParameters(len(constants), w, r)


def bound_L(u: int, w: int) -> int:
    """Number of strictly increasing sequences over w variables and u
    constants, up to logical equivalence: the geometric sum
    sum_{k=0}^{w+2} (2^{w(u+w)})^k, in exact integer arithmetic."""
    if u < 0 or w < 0:
        raise ValueError("u and w must be non-negative")
    base = 2 ** (w * (u + w))
    if base == 1:
        return w + 3
    return (base ** (w + 3) - 1) // (base - 1)


def effective_cap(program: Program, goal: Goal, sem: str = OMEGA_O) -> int:
    params = bound_parameters(program, goal)
    cap = bound_L(params.u, params.w)
    if sem == OMEGA_T:
        cap *= 2 ** params.r
    return cap


# --- divergence ------------------------------------------------------------


@dataclass
class DivergenceWitness:
    """A replayable macro-step path whose last configuration dominates
    one of its ancestors."""

    computation: Computation  # truncated prefix ending at the dominated node
    macro_step_indices: tuple  # step index of each macro configuration
    ancestor_index: int  # position of the dominated ancestor

    def macro_configuration(self, index: int) -> Configuration:
        step = self.macro_step_indices[index]
        if step < 0:
            return self.computation.initial
        return self.computation.steps[step][1]


@dataclass
class DivergenceVerdict:
    result: str  # "Divergent" | "AllFinite"
    witness: Optional[DivergenceWitness] = None


def decide_divergence(program: Program, goal: Goal) -> DivergenceVerdict:
    if not classify(program).range_restricted:
        raise NotRangeRestricted(
            "the divergence decider requires a range-restricted program"
        )
    sem = OMEGA_O
    root, init_steps = macro_initial(program, goal, sem)
    path_configs = [root]
    path_micro: list = []
    stack = [iter(macro_successors(program, root, sem))]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            if path_micro:
                path_micro.pop()
            path_configs.pop()
            continue
        _, micro, child = nxt
        hit = next(
            (i for i, anc in enumerate(path_configs) if leq(anc, child)), None
        )
        if hit is not None:
            steps = list(init_steps)
            macro_idx = [len(steps) - 1]
            for mic in path_micro + [micro]:
                steps.extend(mic)
                macro_idx.append(len(steps) - 1)
            comp = Computation(
                program, sem, initial_configuration(goal, sem), steps, truncated=True
            )
            return DivergenceVerdict(
                "Divergent", DivergenceWitness(comp, tuple(macro_idx), hit)
            )
        path_configs.append(child)
        path_micro.append(micro)
        stack.append(iter(macro_successors(program, child, sem)))
    return DivergenceVerdict("AllFinite", None)


def verify_divergence_witness(
    program: Program, goal: Goal, witness: DivergenceWitness
) -> bool:
    """Check the witness claim without trusting the decider."""
    try:
        replay(witness.computation)
    except ReplayError:
        return False
    if witness.computation.initial.goal != tuple(goal):
        return False
    last = len(witness.macro_step_indices) - 1
    if not 0 <= witness.ancestor_index < last:
        return False
    return leq(
        witness.macro_configuration(witness.ancestor_index),
        witness.macro_configuration(last),
    )


# --- termination existence -------------------------------------------------


@dataclass
class TerminationVerdict:
    result: str  # "Terminating" | "NoTerminating" | "ExhaustedAtCap"
    witness: Optional[Computation]
    cap_used: int
    complete: bool
    semantics: str


def _node_key(atom, fired: frozenset, sem: str):
    if sem == OMEGA_T:
        return (atom_pattern(atom), fired)
    return atom_pattern(atom)


def _state_key(config, info: dict) -> tuple:
    """Search-state identity: interleavings of independent rewrites meet
    in the same state, so memoizing on it collapses the permutations."""
    atoms = tuple(
        sorted(
            (str(member.atom), info[member.id][0], tuple(sorted(info[member.id][1])))
            for member in config.store
        )
    )
    return (atoms, config.builtin.canonical_text())


def _search(
    program: Program,
    goal: Goal,
    sem: str,
    m: int,
    max_states: int = 2_000,
) -> tuple[Optional[Computation], bool]:
    """Depth-first macro-step search pruned at per-path r-equality
    multiplicity m.

    Returns ``(computation, exhausted)``: the first terminating
    computation found (or None), and whether the level was searched to
    exhaustion within the ``max_states`` budget — only an exhausted
    level supports a negative verdict."""
    init_cfg, init_steps = macro_initial(program, goal, sem)
    initial = initial_configuration(goal, sem)
    info: dict = {}
    for lab, after in init_steps:
        if lab.kind == INTRODUCE:
            atom = after.store[-1].atom
            key = _node_key(atom, frozenset(), sem)
            info[after.next_id - 1] = ((key,), frozenset())
    first = [] if init_cfg.failed else macro_successors(program, init_cfg, sem)
    if not first:
        return Computation(program, sem, initial, list(init_steps)), True
    steps = list(init_steps)
    visited = {_state_key(init_cfg, info)}
    stack = [(iter(first), len(steps), info)]
    while stack:
        it, own_len, info = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            continue
        del steps[own_len:]
        label, micro, child = nxt
        sid = label.matched_ids[0]
        path, fired = info[sid]
        rule = program.rule(label.rule)
        new_info = dict(info)
        del new_info[sid]
        pruned = False
        for lab2, aft2 in micro:
            if lab2.kind != INTRODUCE:
                continue
            atom = aft2.store[-1].atom
            key = _node_key(atom, frozenset(), sem)
            child_path = path + (key,)
            if child_path.count(key) > m:
                pruned = True
                break
            new_info[aft2.next_id - 1] = (child_path, frozenset())
        if pruned:
            continue
        if rule.is_propagation:
            fired2 = fired | {rule.name}
            atom = child.member(sid).atom
            key = _node_key(atom, fired2, sem)
            child_path = path + (key,)
            if child_path.count(key) > m:
                continue
            new_info[sid] = (child_path, fired2)
        state = _state_key(child, new_info)
        if state in visited:
            continue
        if len(visited) >= max_states:
            return None, False
        visited.add(state)
        steps.extend(micro)
        succs = [] if child.failed else macro_successors(program, child, sem)
        if not succs:
            return Computation(program, sem, initial, list(steps)), True
        stack.append((iter(succs), len(steps), new_info))
    return None, True


def minimize_witness(delta: Computation, max_rounds: int = 10) -> Computation:
    """Best-effort shrinking of a terminating computation by repeated
    compression; only verified improvements are kept."""
    for _ in range(max_rounds):
        forest = build_forest(delta)
        measure = repetitiveness(forest)
        if measure[0] <= 1:
            break
        improved = None
        for node in forest.nodes():
            if node.box or node.id is None:
                continue
            for desc in node.subtree():
                if desc is node or desc.box or desc.id is None:
                    continue
                if r_equal(node, desc) is None:
                    continue
                try:
                    cand = compress(delta, node, desc)
                    replay(cand)
                    if not cand.ends_final():
                        continue
                    if repetitiveness(build_forest(cand)) < measure:
                        improved = cand
                        break
                except (PreconditionViolation, ReplayError):
                    continue
            if improved is not None:
                break
        if improved is None:
            break
        delta = improved
    return delta


def decide_termination_existence(
    program: Program,
    goal: Goal,
    sem: str = OMEGA_O,
    cap: Optional[int] = None,
    minimize: bool = True,
    max_states: int = 2_000,
) -> TerminationVerdict:
    if not classify(program).single_headed:
        raise NotSingleHeaded(
            "the termination-existence decider requires a single-headed program"
        )
    complete_bound = effective_cap(program, goal, sem)
    cap_used = cap if cap is not None else min(complete_bound, 64)
    m = 1
    while m <= cap_used:
        found, exhausted = _search(program, goal, sem, m, max_states=max_states)
        if found is not None:
            witness = minimize_witness(found) if minimize else found
            return TerminationVerdict("Terminating", witness, m, True, sem)
        if not exhausted:
            # the state budget ran out before the level was fully searched
            return TerminationVerdict("ExhaustedAtCap", None, m, False, sem)
        m += 1
    if cap_used >= complete_bound:
        return TerminationVerdict("NoTerminating", None, cap_used, True, sem)
    return TerminationVerdict("ExhaustedAtCap", None, cap_used, False, sem)


def verify_termination_witness(
    program: Program, goal: Goal, sem: str, comp: Computation
) -> bool:
    try:
        replay(comp)
    except ReplayError:
        return False
    if comp.initial.goal != tuple(goal):
        return False
    return comp.ends_final()


# --- serialization ---------------------------------------------------------


def divergence_to_json(verdict: DivergenceVerdict) -> dict:
    witness = None
    if verdict.witness is not None:
        witness = {
            "trace": computation_to_json(verdict.witness.computation),
            "macro_step_indices": list(verdict.witness.macro_step_indices),
            "ancestor_index": verdict.witness.ancestor_index,
        }
    return {
        "analysis": "divergence",
        "semantics": OMEGA_O,
        "result": verdict.result,
        "cap_used": None,
        "complete": True,
        "witness": witness,
    }


def termination_to_json(verdict: TerminationVerdict) -> dict:
    witness = None
    if verdict.witness is not None:
        witness = {"trace": computation_to_json(verdict.witness)}
    return {
        "analysis": "termination",
        "semantics": verdict.semantics,
        "result": verdict.result,
        "cap_used": verdict.cap_used,
        "complete": verdict.complete,
        "witness": witness,
    }
