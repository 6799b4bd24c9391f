"""The quasi-order on configurations underlying the divergence decider.

``leq(c1, c2)`` holds when every goal constraint and every stored CHR
atom of ``c1`` occurs in ``c2`` at least as often (identifiers are
bookkeeping and ignored) and the built-in stores are logically
equivalent.  Over the finite symbol universe of a range-restricted
program plus goal this is a well-quasi-order that is strongly compatible
with the transition relation.
"""

from __future__ import annotations

from collections import Counter

from .engine import Configuration
from .store import equivalent


def leq(c1: Configuration, c2: Configuration) -> bool:
    goal1 = Counter(c1.goal)
    goal2 = Counter(c2.goal)
    for item, count in goal1.items():
        if goal2[item] < count:
            return False
    store1 = Counter(m.atom for m in c1.store)
    store2 = Counter(m.atom for m in c2.store)
    for atom, count in store1.items():
        if store2[atom] < count:
            return False
    return equivalent(c1.builtin, c2.builtin)
