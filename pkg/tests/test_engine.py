import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chrc.engine import (
    APPLY,
    INTRODUCE,
    OMEGA_O,
    OMEGA_T,
    SOLVE,
    ReplayError,
    all_builtins_store,
    initial_configuration,
    is_final,
    macro_initial,
    macro_successors,
    normalize,
    replay,
    run,
    successors,
)
from chrc.oracle import random_ground_instance
from chrc.syntax import parse_goal, parse_program


def drive(program, goal, sem=OMEGA_O, picks=None):
    """Take successors by index (default 0) until final; return configs."""
    config = initial_configuration(goal, sem)
    picks = list(picks or [])
    trail = [config]
    while True:
        succ = successors(program, config, sem)
        if not succ:
            return trail
        index = picks.pop(0) if picks else 0
        config = succ[index][1]
        trail.append(config)


def test_initial_configuration_form():
    p = parse_program("c(X,Y) <=> true.")
    g = parse_goal("c(X,Y)", p)
    c = initial_configuration(g, OMEGA_O)
    assert c.goal == g and not c.store and c.builtin.consistent and c.next_id == 1
    assert c.history is None
    assert initial_configuration(g, OMEGA_T).history == frozenset()


def test_empty_goal_is_final():
    p = parse_program("a <=> true.")
    c = initial_configuration((), OMEGA_O)
    assert is_final(p, c, OMEGA_O)


def test_solve_then_introduce_then_apply():
    p = parse_program("r @ a(X) <=> true.")
    g = parse_goal("X = 0, a(X)", p)
    trail = drive(p, g)
    kinds = []
    config = trail[0]
    for nxt in trail[1:]:
        # recover the kind by diffing
        if len(nxt.store) > len(config.store):
            kinds.append(INTRODUCE)
        elif len(nxt.goal) < len(config.goal) and len(nxt.store) == len(config.store):
            kinds.append(SOLVE if config.goal and not nxt.store else APPLY)
        else:
            kinds.append(APPLY)
        config = nxt
    assert is_final(p, trail[-1], OMEGA_O)
    assert not trail[-1].store


def test_duplication_rule_successor():
    p = parse_program("r1 @ c(X,Y) <=> c(X,Y),c(X,Y).")
    g = parse_goal("c(X,Y)", p)
    config = normalize(p, initial_configuration(g, OMEGA_O))
    succ = successors(p, config, OMEGA_O)
    assert len(succ) == 1
    label, after = succ[0]
    assert label.kind == APPLY and label.rule == "r1"
    assert not after.store and len(after.goal) == 2


def test_failed_configuration_has_no_successors():
    p = parse_program("a <=> true.")
    g = parse_goal("X = 0, X = 1, a", p)
    config = normalize(p, initial_configuration(g, OMEGA_O))
    assert config.failed
    assert successors(p, config, OMEGA_O) == []
    assert is_final(p, config, OMEGA_O)


def test_propagation_token_blocks_refiring():
    p = parse_program("r @ a ==> a.")
    g = parse_goal("a", p)
    # introduce a#1, then fire once
    config = normalize(p, initial_configuration(g, OMEGA_T))
    (label, after), = successors(p, config, OMEGA_T)
    assert label.kind == APPLY
    # drop the body atom from the goal, leaving <(),{a#1}> with the token
    blocked = dataclasses.replace(after, goal=())
    assert successors(p, blocked, OMEGA_T) == []
    # under the abstract semantics the same configuration fires again
    config_o = normalize(p, initial_configuration(g, OMEGA_O))
    (_, after_o), = successors(p, config_o, OMEGA_O)
    refire = dataclasses.replace(after_o, goal=())
    assert len(successors(p, refire, OMEGA_O)) == 1


def test_guard_requires_entailment():
    p = parse_program("r @ a(X) <=> X = 0 | b.")
    g1 = parse_goal("X = 0, a(X)", p)
    final1 = drive(p, g1)[-1]
    assert [m.atom.predicate for m in final1.store] == ["b"]
    # without the binding the guard is not entailed, a(X) stays
    g2 = parse_goal("a(X)", p)
    final2 = drive(p, g2)[-1]
    assert [m.atom.predicate for m in final2.store] == ["a"]


def test_head_matching_modulo_builtin():
    p = parse_program("r @ c(0) <=> b.")
    g = parse_goal("c(X), X = 0", p)
    final = drive(p, g)[-1]
    assert [m.atom.predicate for m in final.store] == ["b"]


def test_multiset_matching_needs_distinct_ids():
    p = parse_program("r @ a, a <=> b.")
    g1 = parse_goal("a", p)
    final1 = drive(p, g1)[-1]
    assert [m.atom.predicate for m in final1.store] == ["a"]
    g2 = parse_goal("a, a", p)
    final2 = drive(p, g2)[-1]
    assert [m.atom.predicate for m in final2.store] == ["b"]


def test_fresh_body_variables_are_renamed():
    p = parse_program("r @ a <=> b(Z).")
    g = parse_goal("a, a", p)
    final = drive(p, g)[-1]
    args = [m.atom.args[0].name for m in final.store]
    assert len(set(args)) == 2  # two firings, two distinct fresh variables


def test_simpagation_keeps_kept_head():
    p = parse_program("r @ a \\ b <=> true.")
    g = parse_goal("a, b", p)
    final = drive(p, g)[-1]
    assert [m.atom.predicate for m in final.store] == ["a"]


def test_builtin_monotone_along_run(example_program, example_goal):
    comp = run(example_program, example_goal, strategy="random", seed=5, max_steps=60)
    prev = comp.initial
    for _, config in comp.steps:
        earlier = all_builtins_store(prev)
        later = all_builtins_store(config)
        for root, members in earlier.classes().items():
            members = sorted(members)
            for m in members[1:]:
                assert later.entails_eq(members[0], m)
        prev = config


def test_replay_reproduces_run(example_program, example_goal):
    comp = run(example_program, example_goal, strategy="random", seed=11, max_steps=60)
    assert replay(comp)


def test_replay_detects_tampering(example_program, example_goal):
    comp = run(example_program, example_goal, strategy="random", seed=11, max_steps=60)
    label, config = comp.steps[-1]
    comp.steps[-1] = (label, comp.initial)
    with pytest.raises(ReplayError):
        replay(comp)


def test_scripted_run_follows_rule_names(example_program, example_goal):
    comp = run(
        example_program,
        example_goal,
        strategy="script",
        script=["r1", "r2", "r3", "r4"],
    )
    assert comp.ends_final()
    fired = [lab.rule for lab, _ in comp.steps if lab.kind == APPLY]
    assert fired == ["r1", "r2", "r3", "r4"]


def test_macro_successors_are_normalized(example_program, example_goal):
    root, _ = macro_initial(example_program, example_goal, OMEGA_O)
    for _, _, child in macro_successors(example_program, root, OMEGA_O):
        assert not child.goal or child.failed


def test_range_restricted_runs_add_no_variables():
    p = parse_program("r @ c(X) ==> d(X).\ns @ d(X) <=> true.")
    g = parse_goal("c(0)", p)
    comp = run(p, g, sem=OMEGA_T, max_steps=30)
    from chrc.engine import configuration_variables

    allowed = configuration_variables(comp.initial)
    for _, config in comp.steps:
        assert configuration_variables(config) <= allowed


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_finite_branching_on_random_instances(seed):
    rng = random.Random(seed)
    p, g = random_ground_instance(rng)
    config = normalize(p, initial_configuration(g, OMEGA_O))
    succ = successors(p, config, OMEGA_O)
    bound = len(config.goal) + sum(
        len(config.store) ** len(r.heads) for r in p.rules
    )
    assert len(succ) <= bound
