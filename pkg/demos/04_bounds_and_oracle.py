"""The closed-form search bound, checked against brute force.

``bound_L(u, w)`` bounds the number of strictly increasing reactive
sequences over w variables and u constants; the oracle enumerates them
exhaustively for tiny alphabets. The oracle also cross-checks both
deciders against a breadth-first exploration on random programs.
"""

from chrc import bound_L, differential_corpus, enumerate_strictly_increasing

print("exact enumeration vs closed-form bound:")
for u, w in [(0, 0), (1, 0), (1, 1)]:
    exact = enumerate_strictly_increasing(u, w)
    print(f"  u={u} w={w}: {exact} strictly increasing sequences <= bound {bound_L(u, w)}")

print(f"\nbound grows fast: L(1,2) = {bound_L(1, 2)}")

print("\ndifferential check of the deciders against brute-force exploration:")
for kind in ("ground", "propositional"):
    report = differential_corpus(25, seed=7, kind=kind)
    print(
        f"  {kind:<14} {report['instances']} instances, "
        f"divergence checked on {report['divergence_checked']}, "
        f"termination on {report['termination_checked']}, "
        f"mismatches: {report['mismatches']}"
    )
