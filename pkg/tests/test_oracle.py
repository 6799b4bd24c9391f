import random

import pytest

from chrc.decide import bound_L
from chrc.oracle import (
    ScaleError,
    differential_corpus,
    enumerate_strictly_increasing,
    explore,
    random_ground_instance,
    random_propositional_instance,
    random_single_headed_instance,
)
from chrc.syntax import classify, parse_goal, parse_program


def load(program_text, goal_text):
    p = parse_program(program_text)
    return p, parse_goal(goal_text, p)


def test_explore_two_step_chain():
    p, g = load("a @ p <=> q.\nb @ q <=> true.", "p")
    report = explore(p, g)
    assert report.terminating_found
    assert not report.cycle_found
    assert not report.truncated
    assert report.states_visited == 3


def test_explore_self_loop():
    p, g = load("c <=> c.", "c")
    report = explore(p, g)
    assert report.cycle_found
    assert not report.terminating_found
    assert not report.truncated


def test_explore_empty_goal():
    p = parse_program("c <=> c.")
    report = explore(p, ())
    assert report.states_visited == 1
    assert report.terminating_found


def test_explore_truncates_on_growth():
    p, g = load("p <=> p, p.", "p")
    report = explore(p, g, max_states=10)
    assert report.truncated


def test_explore_canonicalizes_identifiers():
    # two interleavings produce id-permuted but identical states
    p, g = load("a @ p <=> q.\nb @ q <=> true.", "p, p")
    report = explore(p, g)
    assert not report.truncated
    assert report.terminating_found


def test_enumeration_counts():
    assert enumerate_strictly_increasing(0, 0) == 2
    assert enumerate_strictly_increasing(1, 0) == 2
    assert enumerate_strictly_increasing(1, 1) == 4


def test_enumeration_below_closed_form():
    for u, w in ((0, 0), (1, 0), (1, 1)):
        assert enumerate_strictly_increasing(u, w) <= bound_L(u, w)


def test_enumeration_scale_guard():
    with pytest.raises(ScaleError):
        enumerate_strictly_increasing(2, 2, limit=10)


def test_generators_emit_parseable_instances():
    rng = random.Random(0)
    for maker in (
        random_propositional_instance,
        random_ground_instance,
        random_single_headed_instance,
    ):
        for _ in range(20):
            program, goal = maker(rng)
            assert program.rules
    rng = random.Random(1)
    for _ in range(20):
        program, _ = random_propositional_instance(rng)
        assert classify(program).propositional
        assert classify(program).single_headed
    for _ in range(20):
        program, _ = random_ground_instance(rng)
        assert classify(program).range_restricted


def test_differential_corpus_smoke():
    report = differential_corpus(15, seed=3, kind="propositional")
    assert report["instances"] == 15
    assert report["mismatches"] == []
