"""Deciding whether a range-restricted program admits an infinite run.

The decider builds a finite reachability tree of macro-step
configurations and stops a branch as soon as the new configuration
dominates an ancestor in the quasi-order — that domination is itself
the witness, and it replays without trusting the decider.
"""

from chrc import (
    decide_divergence,
    parse_goal,
    parse_program,
    verify_divergence_witness,
)

for text, goal_text in [
    ("p(X) <=> p(X).", "p(0)"),
    ("p(X) <=> true.", "p(0)"),
    ("grow @ c ==> c.", "c"),
    ("a @ p <=> q.  b @ q <=> true.", "p"),
]:
    program = parse_program(text)
    goal = parse_goal(goal_text, program)
    verdict = decide_divergence(program, goal)
    line = f"{text!r:<45} goal {goal_text:<6} -> {verdict.result}"
    if verdict.witness is not None:
        w = verdict.witness
        checked = verify_divergence_witness(program, goal, w)
        last = len(w.macro_step_indices) - 1
        line += (
            f"  (macro config {last} dominates ancestor "
            f"{w.ancestor_index}; replays: {checked})"
        )
    print(line)
