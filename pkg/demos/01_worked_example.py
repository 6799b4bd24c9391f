"""A guided tour of a single derivation and its forest of repetitions.

The program duplicates a constraint, grounds its arguments one equation
at a time, and finally discards it:

    r1 @ c(X,Y) <=> c(X,Y),c(X,Y).
    r2 @ c(X,Y) <=> X = 0.
    r3 @ c(0,Y) ==> Y = 0.
    r4 @ c(0,0) <=> true.

We script one terminating run, rebuild its forest, and print the
reactive sequence attached to every node.
"""

from chrc import (
    build_forest,
    node_sequence,
    parse_goal,
    parse_program,
    repetitiveness,
    run,
)

program = parse_program(
    """
    r1 @ c(X,Y) <=> c(X,Y),c(X,Y).
    r2 @ c(X,Y) <=> X = 0.
    r3 @ c(0,Y) ==> Y = 0.
    r4 @ c(0,0) <=> true.
    """
)
goal = parse_goal("c(X,Y)", program)

comp = run(program, goal, strategy="script", script=["r1", "r2", "r3", "r4"])
print(f"derivation: {len(comp.steps)} micro steps, final={comp.ends_final()}")
for i, (label, after) in enumerate(comp.steps):
    print(f"  step {i}: {label.kind:<9} store={[str(m.atom) for m in after.store]}")

forest = build_forest(comp)
print(f"\nforest: {forest.node_count()} nodes, {forest.box_count()} boxes")
for node in forest.nodes():
    if node.box:
        continue
    seq = node_sequence(forest, node)
    print(f"  {node.label}  sequence {seq.text}")

l, degree = repetitiveness(forest)
print(f"\nrepetitiveness: longest r-equal chain {l}, {degree} path(s) achieve it")
