import pytest

from chrc.decide import (
    NotRangeRestricted,
    NotSingleHeaded,
    bound_L,
    bound_parameters,
    decide_divergence,
    decide_termination_existence,
    divergence_to_json,
    effective_cap,
    termination_to_json,
    verify_divergence_witness,
    verify_termination_witness,
)
from chrc.engine import OMEGA_O, OMEGA_T, replay
from chrc.forest import build_forest, repetitiveness
from chrc.syntax import parse_goal, parse_program
from chrc.wqo import leq


def load(program_text, goal_text):
    p = parse_program(program_text)
    return p, parse_goal(goal_text, p)


# --- bound ------------------------------------------------------------------


def test_bound_values():
    assert bound_L(1, 1) == 85
    assert bound_L(2, 1) == 585
    assert bound_L(0, 0) == 3
    assert bound_L(2, 0) == 3
    assert bound_L(1, 2) == (2**30 - 1) // 63


def test_bound_rejects_negative():
    with pytest.raises(ValueError):
        bound_L(-1, 0)


def test_bound_parameters(example_program, example_goal):
    params = bound_parameters(example_program, example_goal)
    assert (params.u, params.w, params.r) == (1, 2, 1)


def test_effective_cap_doubles_per_propagation_rule(example_program, example_goal):
    cap_o = effective_cap(example_program, example_goal, OMEGA_O)
    cap_t = effective_cap(example_program, example_goal, OMEGA_T)
    assert cap_o == (2**30 - 1) // 63
    assert cap_t == 2 * cap_o


# --- divergence --------------------------------------------------------------


def test_self_loop_is_divergent():
    p, g = load("p(X) <=> p(X).", "p(0)")
    verdict = decide_divergence(p, g)
    assert verdict.result == "Divergent"
    assert verify_divergence_witness(p, g, verdict.witness)


def test_erasing_rule_is_all_finite():
    p, g = load("p(X) <=> true.", "p(0)")
    assert decide_divergence(p, g).result == "AllFinite"


def test_propagation_is_divergent_without_history():
    p, g = load("c ==> c.", "c")
    verdict = decide_divergence(p, g)
    assert verdict.result == "Divergent"
    assert verify_divergence_witness(p, g, verdict.witness)


def test_divergence_requires_range_restriction():
    p, g = load("p(X) <=> p(Y).", "p(0)")
    with pytest.raises(NotRangeRestricted):
        decide_divergence(p, g)


def test_divergent_witness_replays_and_dominates():
    p, g = load("a <=> a, a.", "a")
    verdict = decide_divergence(p, g)
    assert verdict.result == "Divergent"
    w = verdict.witness
    replay(w.computation)
    last = len(w.macro_step_indices) - 1
    assert leq(
        w.macro_configuration(w.ancestor_index), w.macro_configuration(last)
    )


def test_empty_goal_all_finite():
    p = parse_program("a <=> a.")
    assert decide_divergence(p, ()).result == "AllFinite"


def test_failing_goal_all_finite():
    p, g = load("a <=> a.", "X = 0, X = 1")
    assert decide_divergence(p, g).result == "AllFinite"


# --- termination existence ---------------------------------------------------


def test_example_program_terminates(example_program, example_goal):
    verdict = decide_termination_existence(example_program, example_goal)
    assert verdict.result == "Terminating" and verdict.complete
    assert verify_termination_witness(
        example_program, example_goal, OMEGA_O, verdict.witness
    )


def test_pure_loop_has_no_terminating_computation():
    p, g = load("c <=> c.", "c")
    verdict = decide_termination_existence(p, g)
    assert verdict.result == "NoTerminating"
    assert verdict.complete
    assert verdict.cap_used >= 3


def test_duplicator_has_no_terminating_computation():
    p, g = load("p <=> p, p.", "p")
    verdict = decide_termination_existence(p, g)
    assert verdict.result == "NoTerminating" and verdict.complete


def test_choice_between_loop_and_exit():
    p, g = load("r1 @ c <=> c.\nr2 @ c <=> true.", "c")
    verdict = decide_termination_existence(p, g)
    assert verdict.result == "Terminating"
    assert verify_termination_witness(p, g, OMEGA_O, verdict.witness)


def test_termination_requires_single_headed():
    p, g = load("a, a <=> true.", "a, a")
    with pytest.raises(NotSingleHeaded):
        decide_termination_existence(p, g)


def test_exhausted_below_complete_bound():
    # u=1, w=1 gives L=85 > cap=1, and the instance needs repetitiveness 2
    p, g = load("r1 @ c(X) <=> c(X).\nr2 @ c(X) <=> true.", "c(0)")
    verdict = decide_termination_existence(p, g, cap=0)
    assert verdict.result == "ExhaustedAtCap"
    assert not verdict.complete


def test_minimized_witness_is_still_valid(example_program, example_goal):
    verdict = decide_termination_existence(example_program, example_goal)
    assert replay(verdict.witness)
    assert verdict.witness.ends_final()
    # minimization never increases the repetitiveness of the raw find
    raw = decide_termination_existence(
        example_program, example_goal, minimize=False
    )
    assert (
        repetitiveness(build_forest(verdict.witness))
        <= repetitiveness(build_forest(raw.witness))
    )


def test_theoretical_semantics_propagation_terminates_only_with_history():
    # under omega_o no terminating computation exists: the propagation can
    # always re-fire; under omega_t each atom fires once but spawns a new
    # atom, so every computation is still infinite
    p, g = load("r @ c ==> c.", "c")
    assert decide_termination_existence(p, g, sem=OMEGA_O).result == "NoTerminating"
    assert decide_termination_existence(p, g, sem=OMEGA_T).result == "NoTerminating"
    # with an erasing alternative the theoretical semantics can finish
    p2, g2 = load("r @ c ==> d.\ns @ d <=> true.\nt @ c <=> true.", "c")
    v = decide_termination_existence(p2, g2, sem=OMEGA_T)
    assert v.result == "Terminating"
    assert verify_termination_witness(p2, g2, OMEGA_T, v.witness)


def test_verify_rejects_foreign_goal(example_program, example_goal):
    verdict = decide_termination_existence(example_program, example_goal)
    other = parse_goal("c(0,0)", example_program)
    assert not verify_termination_witness(
        example_program, other, OMEGA_O, verdict.witness
    )


# --- serialization -----------------------------------------------------------


def test_divergence_json_shape():
    p, g = load("a <=> a.", "a")
    data = divergence_to_json(decide_divergence(p, g))
    assert data["analysis"] == "divergence"
    assert data["result"] == "Divergent"
    assert data["witness"]["ancestor_index"] == 0
    assert data["witness"]["trace"]["truncated"] is True


def test_termination_json_shape(example_program, example_goal):
    data = termination_to_json(
        decide_termination_existence(example_program, example_goal)
    )
    assert data["analysis"] == "termination"
    assert data["result"] == "Terminating"
    assert data["witness"]["trace"]["final"] is True
