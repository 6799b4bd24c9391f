"""Transition systems over configurations: one-step successors,
normalization into macro-steps, derivation recording and replay.

Two semantics are supported: the theoretical one (``OMEGA_T``), whose
configurations carry a propagation history blocking a rule instance from
firing twice, and the abstract one (``OMEGA_O``) without a history.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .store import BuiltinStore
from .syntax import (
    ChrAtom,
    Equation,
    Goal,
    Program,
    Rule,
    Term,
    var,
)

OMEGA_O = "o"
OMEGA_T = "t"

SOLVE = "solve"
INTRODUCE = "introduce"
APPLY = "apply"


class ReplayError(Exception):
    pass


@dataclass(frozen=True)
class IdentifiedConstraint:
    atom: ChrAtom
    id: int

    def __str__(self) -> str:
        return f"{self.atom}#{self.id}"


@dataclass(frozen=True)
class Configuration:
    goal: tuple  # multiset of ChrAtom | Equation, insertion order kept
    store: tuple  # IdentifiedConstraint, ascending ids
    builtin: BuiltinStore
    history: Optional[frozenset]  # propagation tokens, None under omega_o
    next_id: int = 1

    @property
    def failed(self) -> bool:
        return not self.builtin.consistent

    def member(self, cid: int) -> IdentifiedConstraint:
        for m in self.store:
            if m.id == cid:
                return m
        raise KeyError(cid)

    def __str__(self) -> str:
        goal = ", ".join(str(i) for i in self.goal) or "-"
        store = ", ".join(str(m) for m in self.store) or "-"
        return (
            f"<{goal} ; {store} ; {self.builtin.canonical_text()}>_{self.next_id}"
        )


@dataclass(frozen=True)
class TransitionLabel:
    kind: str
    goal_index: Optional[int] = None
    rule: Optional[str] = None
    kept_ids: tuple = ()
    removed_ids: tuple = ()
    theta: tuple = ()  # sorted (rule var name, Term)
    fresh: tuple = ()  # sorted (rule var name, fresh var name)

    @property
    def matched_ids(self) -> tuple:
        return self.kept_ids + self.removed_ids

    def __str__(self) -> str:
        if self.kind == APPLY:
            ids = ",".join(str(i) for i in self.matched_ids)
            return f"apply {self.rule} @ #{ids}"
        return f"{self.kind} goal[{self.goal_index}]"


def configuration_variables(config: Configuration) -> set:
    out = set(config.builtin.variables)
    for item in config.goal:
        out |= item.variables()
    for m in config.store:
        out |= m.atom.variables()
    return out


def initial_configuration(goal: Goal, sem: str = OMEGA_O) -> Configuration:
    history = frozenset() if sem == OMEGA_T else None
    return Configuration(tuple(goal), (), BuiltinStore.true(), history, 1)


def all_builtins_store(config: Configuration) -> BuiltinStore:
    """The conjunction of every built-in in the configuration: the
    built-in store plus the equations still sitting in the goal."""
    eqs = [item for item in config.goal if isinstance(item, Equation)]
    return config.builtin.add_equations(eqs) if eqs else config.builtin


def _subst(theta: dict, fresh: dict, t: Term) -> Term:
    if not t.is_variable:
        return t
    if t.name in theta:
        return theta[t.name]
    return var(fresh[t.name])


def _subst_atom(theta: dict, fresh: dict, a: ChrAtom) -> ChrAtom:
    return ChrAtom(a.predicate, tuple(_subst(theta, fresh, t) for t in a.args))


def _subst_eq(theta: dict, fresh: dict, e: Equation) -> Equation:
    return Equation(_subst(theta, fresh, e.lhs), _subst(theta, fresh, e.rhs))


def _fresh_names(
    rule: Rule, theta: dict, config: Configuration
) -> dict:
    """Canonical names for rule variables not bound by matching."""
    unbound = []
    for e in rule.guard:
        for name in sorted(e.variables()):
            if name not in theta and name not in unbound:
                unbound.append(name)
    for item in rule.body:
        for name in sorted(item.variables()):
            if name not in theta and name not in unbound:
                unbound.append(name)
    if not unbound:
        return {}
    taken = configuration_variables(config)
    fresh = {}
    k = 0
    for name in unbound:
        while True:
            candidate = f"_V{config.next_id}_{k}"
            k += 1
            if candidate not in taken:
                break
        taken.add(candidate)
        fresh[name] = candidate
    return fresh


def _apply_successors(
    program: Program, config: Configuration, sem: str
) -> list:
    out = []
    for rule in program.rules:
        heads = rule.heads
        nk = len(rule.kept)
        candidates = []
        for h in heads:
            candidates.append(
                [
                    m
                    for m in config.store
                    if m.atom.predicate == h.predicate
                    and len(m.atom.args) == len(h.args)
                ]
            )
        for combo in itertools.product(*candidates):
            if len({m.id for m in combo}) != len(combo):
                continue
            theta: dict = {}
            ok = True
            for h, m in zip(heads, combo):
                for ha, sa in zip(h.args, m.atom.args):
                    if ha.is_constant:
                        if not config.builtin.entails_eq(sa, ha):
                            ok = False
                            break
                    else:
                        rep = config.builtin.rep(sa)
                        if theta.get(ha.name, rep) != rep:
                            ok = False
                            break
                        theta[ha.name] = rep
                if not ok:
                    break
            if not ok:
                continue
            fresh = _fresh_names(rule, theta, config)
            guard_eqs = [_subst_eq(theta, fresh, e) for e in rule.guard]
            guard_existentials = frozenset(
                fresh[name]
                for e in rule.guard
                for name in e.variables()
                if name in fresh
            )
            if not config.builtin.entails(guard_existentials, guard_eqs):
                continue
            kept_ids = tuple(m.id for m in combo[:nk])
            removed_ids = tuple(m.id for m in combo[nk:])
            history = config.history
            if sem == OMEGA_T:
                token = (kept_ids + removed_ids, rule.name)
                if token in (history or frozenset()):
                    continue
                history = (history or frozenset()) | {token}
            removed_set = set(removed_ids)
            new_store = tuple(m for m in config.store if m.id not in removed_set)
            body = tuple(
                _subst_atom(theta, fresh, i)
                if isinstance(i, ChrAtom)
                else _subst_eq(theta, fresh, i)
                for i in rule.body
            )
            new_builtin = (
                config.builtin.add_equations(guard_eqs)
                if guard_eqs
                else config.builtin
            )
            label = TransitionLabel(
                APPLY,
                rule=rule.name,
                kept_ids=kept_ids,
                removed_ids=removed_ids,
                theta=tuple(sorted(theta.items())),
                fresh=tuple(sorted(fresh.items())),
            )
            succ = Configuration(
                config.goal + body,
                new_store,
                new_builtin,
                history,
                config.next_id,
            )
            out.append((label, succ))
    return out


def successors(
    program: Program, config: Configuration, sem: str = OMEGA_O
) -> list:
    """All one-step successors, in canonical order: Solve steps, then
    Introduce steps (both in goal order), then Apply steps (rules in
    program order, matchings lexicographically).  A failed configuration
    has no successors."""
    if config.failed:
        return []
    out = []
    for i, item in enumerate(config.goal):
        if isinstance(item, Equation):
            label = TransitionLabel(SOLVE, goal_index=i)
            goal = config.goal[:i] + config.goal[i + 1 :]
            out.append(
                (
                    label,
                    replace(
                        config, goal=goal, builtin=config.builtin.add_equation(item)
                    ),
                )
            )
    for i, item in enumerate(config.goal):
        if isinstance(item, ChrAtom):
            label = TransitionLabel(INTRODUCE, goal_index=i)
            goal = config.goal[:i] + config.goal[i + 1 :]
            member = IdentifiedConstraint(item, config.next_id)
            out.append(
                (
                    label,
                    replace(
                        config,
                        goal=goal,
                        store=config.store + (member,),
                        next_id=config.next_id + 1,
                    ),
                )
            )
    out.extend(_apply_successors(program, config, sem))
    return out


def apply_transition(
    program: Program, config: Configuration, label: TransitionLabel, sem: str
) -> Configuration:
    """Replay a single recorded step."""
    for lab, succ in successors(program, config, sem):
        if lab == label:
            return succ
    raise ReplayError(f"step {label} is not enabled in {config}")


def normalize_steps(program: Program, config: Configuration) -> list:
    """Solve every goal built-in, then Introduce every goal CHR atom,
    each in goal insertion order.  Returns the recorded micro-steps."""
    steps = []
    while True:
        idx = next(
            (i for i, it in enumerate(config.goal) if isinstance(it, Equation)), None
        )
        if idx is None:
            break
        label = TransitionLabel(SOLVE, goal_index=idx)
        item = config.goal[idx]
        config = replace(
            config,
            goal=config.goal[:idx] + config.goal[idx + 1 :],
            builtin=config.builtin.add_equation(item),
        )
        steps.append((label, config))
    while config.goal:
        label = TransitionLabel(INTRODUCE, goal_index=0)
        member = IdentifiedConstraint(config.goal[0], config.next_id)
        config = replace(
            config,
            goal=config.goal[1:],
            store=config.store + (member,),
            next_id=config.next_id + 1,
        )
        steps.append((label, config))
    return steps


def normalize(program: Program, config: Configuration) -> Configuration:
    steps = normalize_steps(program, config)
    return steps[-1][1] if steps else config


def is_final(program: Program, config: Configuration, sem: str = OMEGA_O) -> bool:
    if config.failed:
        return True
    return not config.goal and not successors(program, config, sem)


@dataclass
class Computation:
    """A recorded derivation: replaying the labels from the initial
    configuration reproduces the recorded configurations."""

    program: Program
    sem: str
    initial: Configuration
    steps: list  # [(TransitionLabel, Configuration)]
    truncated: bool = False

    @property
    def final_configuration(self) -> Configuration:
        return self.steps[-1][1] if self.steps else self.initial

    def config_before(self, step_index: int) -> Configuration:
        return self.initial if step_index == 0 else self.steps[step_index - 1][1]

    def ends_final(self) -> bool:
        return not self.truncated and is_final(
            self.program, self.final_configuration, self.sem
        )

    def apply_steps(self) -> list:
        return [i for i, (lab, _) in enumerate(self.steps) if lab.kind == APPLY]


def replay(comp: Computation) -> bool:
    """Re-derive every configuration from the labels; raises ReplayError
    on any mismatch."""
    config = comp.initial
    for label, recorded in comp.steps:
        config = apply_transition(comp.program, config, label, comp.sem)
        if config != recorded:
            raise ReplayError(f"replay diverged at {label}")
    return True


def run(
    program: Program,
    goal: Goal,
    sem: str = OMEGA_O,
    strategy: str = "first",
    max_steps: int = 1000,
    seed: Optional[int] = None,
    script: Optional[Sequence[str]] = None,
) -> Computation:
    """Drive a derivation.

    ``strategy`` is one of ``first`` (canonical successor order),
    ``random`` (seeded), or ``script``: Solve/Introduce eagerly, then
    Apply the scripted rule names in order.
    """
    initial = initial_configuration(goal, sem)
    config = initial
    steps = []
    rng = random.Random(seed)
    pending = list(script) if script is not None else None
    truncated = False
    while True:
        if len(steps) >= max_steps:
            truncated = not is_final(program, config, sem)
            break
        succ = successors(program, config, sem)
        if not succ:
            break
        if strategy == "first":
            choice = succ[0]
        elif strategy == "random":
            choice = rng.choice(succ)
        elif strategy == "script":
            if succ[0][0].kind != APPLY:
                choice = succ[0]
            elif not pending:
                truncated = True
                break
            else:
                name = pending[0]
                matching = [s for s in succ if s[0].rule == name]
                if not matching:
                    raise ValueError(f"scripted rule {name!r} is not applicable")
                pending.pop(0)
                choice = matching[0]
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        steps.append(choice)
        config = choice[1]
    return Computation(program, sem, initial, steps, truncated)


def macro_initial(program: Program, goal: Goal, sem: str = OMEGA_O):
    """Normalize the initial configuration; returns (config, micro steps)."""
    initial = initial_configuration(goal, sem)
    steps = normalize_steps(program, initial)
    config = steps[-1][1] if steps else initial
    return config, steps


def macro_successors(program: Program, config: Configuration, sem: str = OMEGA_O):
    """Apply followed by exhaustive Solve/Introduce.

    Returns a list of (apply label, micro steps including the Apply,
    resulting configuration) triples.  ``config`` must be normalized.
    """
    out = []
    for label, succ in successors(program, config, sem):
        if label.kind != APPLY:
            continue
        micro = [(label, succ)] + normalize_steps(program, succ)
        out.append((label, micro, micro[-1][1]))
    return out


# --- JSON trace ------------------------------------------------------------


def _term_json(t: Term) -> str:
    return t.name


def label_to_json(label: TransitionLabel) -> dict:
    out: dict = {"kind": label.kind}
    if label.kind == APPLY:
        out["rule"] = label.rule
        out["matched_ids"] = list(label.matched_ids)
        out["kept_ids"] = list(label.kept_ids)
        out["removed_ids"] = list(label.removed_ids)
        out["theta"] = {v: _term_json(t) for v, t in label.theta}
        out["fresh"] = {v: n for v, n in label.fresh}
    else:
        out["goal_index"] = label.goal_index
    return out


def label_from_json(data: dict) -> TransitionLabel:
    from .syntax import term as mk_term

    if data["kind"] == APPLY:
        return TransitionLabel(
            APPLY,
            rule=data["rule"],
            kept_ids=tuple(data["kept_ids"]),
            removed_ids=tuple(data["removed_ids"]),
            theta=tuple(sorted((v, mk_term(t)) for v, t in data["theta"].items())),
            fresh=tuple(sorted(data["fresh"].items())),
        )
    return TransitionLabel(data["kind"], goal_index=data["goal_index"])


def computation_to_json(comp: Computation) -> dict:
    steps = []
    for label, config in comp.steps:
        entry = label_to_json(label)
        entry["builtin_after"] = config.builtin.canonical_text()
        entry["store_after"] = [str(m) for m in config.store]
        entry["goal_after"] = [str(i) for i in config.goal]
        steps.append(entry)
    return {
        "semantics": comp.sem,
        "initial_goal": [str(i) for i in comp.initial.goal],
        "steps": steps,
        "truncated": comp.truncated,
        "final": comp.ends_final(),
    }
