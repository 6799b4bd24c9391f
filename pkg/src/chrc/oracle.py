"""Independent cross-checks for the deciders.

``explore`` enumerates the entire macro-step state space of an instance
by breadth-first search over canonicalized configurations and reports,
by direct inspection of the resulting graph, whether an infinite
computation exists (a reachable cycle) and whether a terminating one
does (a reachable final state).  It shares no code with the deciders
beyond the engine itself and serves as the ground truth in differential
tests.

``enumerate_strictly_increasing`` counts strictly increasing sequences
of built-in-store pairs by brute force, which checks the closed-form
bound from below.

The ``random_*`` generators emit small program/goal instances as
concrete text (exercising the parser on the way in).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Optional

import networkx as nx

from .engine import OMEGA_O, macro_initial, macro_successors
from .store import BuiltinStore, ProjectedStore, proj_entails
from .syntax import Equation, Goal, Program, const, parse_goal, parse_program, var


class ScaleError(Exception):
    """The requested brute-force enumeration is too large to run."""


# --- exhaustive state-space exploration --------------------------------------


def _atom_key(atom) -> tuple:
    return (atom.predicate, tuple(arg.name for arg in atom.args))


def _canonical_key(config) -> tuple:
    """Identity of a macro state up to identifier renaming."""
    atoms = sorted((_atom_key(m.atom), m.id) for m in config.store)
    renumber = {old: i for i, (_, old) in enumerate(atoms)}
    history: tuple = ()
    if config.history is not None:
        live = []
        for ids, rule in config.history:
            if all(i in renumber for i in ids):
                live.append((tuple(renumber[i] for i in ids), rule))
        history = tuple(sorted(live))
    return (
        tuple(a for a, _ in atoms),
        config.builtin.canonical_text(),
        history,
        config.failed,
    )


@dataclass
class ExplorationReport:
    states_visited: int
    terminating_found: bool
    cycle_found: bool
    truncated: bool
    max_depth_reached: int

    def to_json(self) -> dict:
        return {
            "states_visited": self.states_visited,
            "terminating_found": self.terminating_found,
            "cycle_found": self.cycle_found,
            "truncated": self.truncated,
            "max_depth_reached": self.max_depth_reached,
        }


def explore(
    program: Program,
    goal: Goal,
    sem: str = OMEGA_O,
    max_states: int = 5000,
    max_depth: int = 200,
    stop_when_decided: bool = False,
) -> ExplorationReport:
    """Breadth-first exploration of macro-step states up to canonical
    identity.

    A state with no successors is final (goals are always fully
    normalized); an infinite computation exists iff the explored graph
    has a cycle, which is only a complete analysis when ``truncated`` is
    false and the instance's reachable variable universe is fixed
    (ground or range-restricted programs).
    """
    root, _ = macro_initial(program, goal, sem)
    graph = nx.DiGraph()
    key0 = _canonical_key(root)
    graph.add_node(key0)
    frontier = deque([(key0, root, 0)])
    seen = {key0}
    terminating_found = False
    truncated = False
    max_depth_reached = 0
    popped = 0
    while frontier:
        key, config, depth = frontier.popleft()
        popped += 1
        # both analyses already answered affirmatively: stop early if allowed
        if (
            stop_when_decided
            and terminating_found
            and popped % 32 == 0
            and not nx.is_directed_acyclic_graph(graph)
        ):
            truncated = True
            break
        max_depth_reached = max(max_depth_reached, depth)
        succs = [] if config.failed else macro_successors(program, config, sem)
        if not succs:
            terminating_found = True
            continue
        if depth >= max_depth:
            truncated = True
            continue
        for _, _, child in succs:
            ckey = _canonical_key(child)
            graph.add_edge(key, ckey)
            if ckey not in seen:
                if len(seen) >= max_states:
                    truncated = True
                    continue
                seen.add(ckey)
                frontier.append((ckey, child, depth + 1))
    cycle_found = not nx.is_directed_acyclic_graph(graph)
    return ExplorationReport(
        states_visited=graph.number_of_nodes(),
        terminating_found=terminating_found,
        cycle_found=cycle_found,
        truncated=truncated,
        max_depth_reached=max_depth_reached,
    )


# --- brute-force count of strictly increasing sequences ---------------------


def _all_projections(u: int, w: int) -> list[ProjectedStore]:
    """All stores over w variables and u constants, up to logical
    equivalence, as canonical projections; the failed store included."""
    names = [f"X{i}" for i in range(w)]
    terms = [var(n) for n in names] + [const(str(c)) for c in range(u)]
    keep = frozenset(names)
    # Every satisfiable store is a conjunction of equations X_i = t;
    # enumerate all assignment subsets and deduplicate by canonical text.
    out: dict[str, ProjectedStore] = {}
    choices: list[list[Optional[Equation]]] = [
        [None] + [Equation(var(n), t) for t in terms if t != var(n)] for n in names
    ]
    for combo in product(*choices):
        eqs = [e for e in combo if e is not None]
        store = BuiltinStore.true().add_equations(eqs)
        if not store.consistent:
            continue
        proj = store.project(keep)
        out.setdefault(proj.text, proj)
    out["false"] = ProjectedStore(keep, (), consistent=False)
    return list(out.values())


def enumerate_strictly_increasing(u: int, w: int, limit: int = 10**6) -> int:
    """Count (by explicit enumeration) the strictly increasing sequences
    of store pairs over w variables and u constants, including the empty
    sequence.

    A sequence ``<c1,d1>...<cn,dn>`` is strictly increasing when every
    arrow in the chain ``c1 < d1 < c2 < ... < dn`` is a strict
    entailment, so sequences are exactly the strict chains of even
    length in the poset of stores."""
    stores = _all_projections(u, w)
    n = len(stores)
    if n * n > limit:
        raise ScaleError(f"{n} stores is too many to enumerate pairwise")
    stronger = [
        [
            proj_entails(stores[j], stores[i])
            and not proj_entails(stores[i], stores[j])
            for j in range(n)
        ]
        for i in range(n)
    ]
    count = 1  # the empty sequence
    budget = limit

    def dfs(i: int, length: int) -> None:
        nonlocal count, budget
        for j in range(n):
            if not stronger[i][j]:
                continue
            budget -= 1
            if budget <= 0:
                raise ScaleError(f"enumeration exceeded {limit} steps")
            if (length + 1) % 2 == 0:
                count += 1
            dfs(j, length + 1)

    for i in range(n):
        dfs(i, 1)
    return count


# --- random instance generators ----------------------------------------------


def _random_atom_text(rng: random.Random, preds: list, args_pool: list) -> str:
    name, arity = rng.choice(preds)
    if arity == 0:
        return name
    return f"{name}({','.join(rng.choice(args_pool) for _ in range(arity))})"


def random_propositional_instance(
    rng: random.Random, max_rules: int = 4, max_body: int = 2
) -> tuple[Program, Goal]:
    """Zero-arity single-headed programs: the corpus for fast exhaustive
    differential checks (the completeness cap is 3)."""
    preds = [(p, 0) for p in ("p", "q", "s")]
    lines = []
    for i in range(rng.randint(1, max_rules)):
        head = _random_atom_text(rng, preds, [])
        body_len = rng.randint(0, max_body)
        body = ",".join(_random_atom_text(rng, preds, []) for _ in range(body_len))
        arrow = rng.choice(["<=>", "==>"])
        if arrow == "==>" and body_len == 0:
            arrow = "<=>"
        lines.append(f"r{i + 1} @ {head} {arrow} {body or 'true'}.")
    program = parse_program("\n".join(lines))
    goal_len = rng.randint(1, 3)
    goal_text = ",".join(_random_atom_text(rng, preds, []) for _ in range(goal_len))
    return program, parse_goal(goal_text, program)


def random_ground_instance(
    rng: random.Random, max_rules: int = 4, max_body: int = 2
) -> tuple[Program, Goal]:
    """Ground (hence range-restricted) programs over unary predicates and
    two constants; may or may not be single-headed."""
    preds = [("p", 1), ("q", 1)]
    consts = ["0", "1"]
    lines = []
    for i in range(rng.randint(1, max_rules)):
        n_heads = rng.choice([1, 1, 1, 2])
        heads = ",".join(
            _random_atom_text(rng, preds, consts) for _ in range(n_heads)
        )
        body_len = rng.randint(0, max_body)
        body = ",".join(
            _random_atom_text(rng, preds, consts) for _ in range(body_len)
        )
        arrow = rng.choice(["<=>", "==>"])
        if arrow == "==>" and body_len == 0:
            arrow = "<=>"
        lines.append(f"r{i + 1} @ {heads} {arrow} {body or 'true'}.")
    program = parse_program("\n".join(lines))
    goal_len = rng.randint(1, 3)
    goal_text = ",".join(
        _random_atom_text(rng, preds, consts) for _ in range(goal_len)
    )
    return program, parse_goal(goal_text, program)


def random_single_headed_instance(
    rng: random.Random, max_rules: int = 4, max_body: int = 2
) -> tuple[Program, Goal]:
    """Single-headed programs with variables, guards and built-in bodies."""
    preds = [("p", 1), ("q", 1)]
    consts = ["0", "1"]
    lines = []
    for i in range(rng.randint(1, max_rules)):
        head_args = rng.choice(["X", "0", "1"])
        head = f"{rng.choice(['p', 'q'])}({head_args})"
        head_vars = ["X"] if head_args == "X" else []
        guard = ""
        if head_vars and rng.random() < 0.3:
            guard = f"X={rng.choice(consts)} | "
        items = []
        for _ in range(rng.randint(0, max_body)):
            if rng.random() < 0.25 and head_vars:
                items.append(f"X={rng.choice(consts)}")
            else:
                pool = consts + head_vars
                items.append(_random_atom_text(rng, preds, pool))
        arrow = rng.choice(["<=>", "==>"])
        if arrow == "==>" and not items:
            arrow = "<=>"
        lines.append(f"r{i + 1} @ {head} {arrow} {guard}{','.join(items) or 'true'}.")
    program = parse_program("\n".join(lines))
    goal_items = []
    for _ in range(rng.randint(1, 2)):
        goal_items.append(_random_atom_text(rng, preds, consts + ["Y"]))
    return program, parse_goal(",".join(goal_items), program)


# --- differential corpus ------------------------------------------------------


def differential_corpus(
    n: int, seed: int = 0, kind: str = "ground", max_states: int = 80
) -> dict:
    """Generate ``n`` oracle-decided random instances and compare the
    deciders against the exhaustive oracle on each.

    ``kind`` selects the generator and the analysis: ``ground``
    (range-restricted, divergence decider) or ``propositional``
    (single-headed, both deciders; the termination search exhausts at
    its complete bound of 3).  A truncated exploration still decides the
    instance when it found a cycle (divergence) or a final state
    (termination); otherwise the instance is skipped and generation
    continues until ``n`` decided instances have been compared.
    """
    from .decide import (
        decide_divergence,
        decide_termination_existence,
        verify_divergence_witness,
        verify_termination_witness,
    )
    from .syntax import classify

    rng = random.Random(seed)
    results = {
        "kind": kind,
        "seed": seed,
        "instances": 0,
        "skipped": 0,
        "divergence_checked": 0,
        "termination_checked": 0,
        "mismatches": [],
    }
    attempts = 0
    while results["instances"] < n and attempts < 50 * n:
        attempts += 1
        if kind == "propositional":
            program, goal = random_propositional_instance(rng)
        elif kind == "ground":
            program, goal = random_ground_instance(rng)
        else:
            raise ValueError(f"unknown corpus kind {kind!r}")
        report = explore(
            program, goal, max_states=max_states, max_depth=30,
            stop_when_decided=True,
        )
        divergence_known = not report.truncated or report.cycle_found
        termination_known = not report.truncated or report.terminating_found
        checked = False
        text = "\n".join(str(r) for r in program.rules)
        flags = classify(program)
        if flags.range_restricted and divergence_known:
            verdict = decide_divergence(program, goal)
            results["divergence_checked"] += 1
            checked = True
            ok = (verdict.result == "Divergent") == report.cycle_found
            if verdict.witness is not None:
                ok = ok and verify_divergence_witness(program, goal, verdict.witness)
            if not ok:
                results["mismatches"].append(
                    {"program": text, "analysis": "divergence"}
                )
        if kind == "propositional" and flags.single_headed and termination_known:
            verdict = decide_termination_existence(program, goal)
            if verdict.result != "ExhaustedAtCap":
                results["termination_checked"] += 1
                checked = True
                ok = (verdict.result == "Terminating") == report.terminating_found
                if verdict.witness is not None:
                    ok = ok and verify_termination_witness(
                        program, goal, "o", verdict.witness
                    )
                if not ok:
                    results["mismatches"].append(
                        {"program": text, "analysis": "termination"}
                    )
        if checked:
            results["instances"] += 1
        else:
            results["skipped"] += 1
    return results
