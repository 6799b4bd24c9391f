"""Deciding whether a single-headed program has *some* terminating run,
and shrinking the witness by forest compression.

A looping rule next to an exit rule still has a terminating run — take
the exit immediately. The decider finds it by iterative deepening on
forest repetitiveness; compression then replays a shorter derivation
obtained by splicing out an r-equal repetition.
"""

from chrc import (
    build_forest,
    compress,
    decide_termination_existence,
    parse_goal,
    parse_program,
    repetitiveness,
    run,
    verify_termination_witness,
)

program = parse_program("loop @ c(X) <=> c(X).  exit @ c(X) <=> true.")
goal = parse_goal("c(0)", program)

verdict = decide_termination_existence(program, goal)
print(f"{verdict.result} (deepening level {verdict.cap_used}, complete={verdict.complete})")
print(f"witness: {len(verdict.witness.steps)} steps, "
      f"replays: {verify_termination_witness(program, goal, 'o', verdict.witness)}")

# compression by hand: loop once, then exit — repetitiveness 2 ...
wasteful = run(program, goal, strategy="script", script=["loop", "exit"])
forest = build_forest(wasteful)
print(f"\nscripted loop-then-exit run: repetitiveness {repetitiveness(forest)}")
root = forest.roots[0]
shorter = compress(wasteful, root, root.children[0])
# ... compressing the r-equal pair leaves the direct exit, repetitiveness 1
print(f"after compressing the r-equal pair: "
      f"{repetitiveness(build_forest(shorter))}, final={shorter.ends_final()}")

program2 = parse_program("only @ c <=> c.")
goal2 = parse_goal("c", program2)
verdict2 = decide_termination_existence(program2, goal2)
print(f"\nno exit rule: {verdict2.result} (complete={verdict2.complete})")
