"""The built-in constraint theory: conjunctions of equations over
variables and constants.

A store is a congruence over the terms it has seen, kept as a flat
parent map whose roots double as canonical representatives (a constant
if the class contains one, otherwise the lexicographically least
variable).  The theory assumes a Herbrand universe with at least two
constants, so ``x = y`` is never entailed unless the congruence forces
it.  Stores are persistent values: adding an equation returns a new
store.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .syntax import Equation, Term, var


def _better_root(a: Term, b: Term) -> Term:
    """Pick the canonical representative between two roots."""
    if a.is_constant != b.is_constant:
        return a if a.is_constant else b
    return a if a.name <= b.name else b


class BuiltinStore:
    """Conjunction of equations, with satisfiability, entailment,
    projection and equivalence."""

    __slots__ = ("_parent", "consistent")

    def __init__(self, parent: dict | None = None, consistent: bool = True):
        self._parent = parent or {}
        self.consistent = consistent

    @classmethod
    def true(cls) -> "BuiltinStore":
        return cls()

    def find(self, t: Term) -> Term:
        return self._parent.get(t, t)

    def rep(self, t: Term) -> Term:
        """Canonical representative of t's class."""
        return self.find(t)

    @property
    def variables(self) -> set[str]:
        out = set()
        for t in self._parent:
            if t.is_variable:
                out.add(t.name)
        return out

    def classes(self) -> dict:
        """Map each root to the set of its class members (singletons omitted)."""
        out: dict[Term, set[Term]] = {}
        for t, root in self._parent.items():
            out.setdefault(root, set()).add(t)
        return out

    def add_equation(self, eq: Equation) -> "BuiltinStore":
        return self.add_equations([eq])

    def add_equations(self, eqs: Iterable[Equation]) -> "BuiltinStore":
        parent = dict(self._parent)
        consistent = self.consistent
        for eq in eqs:
            for t in (eq.lhs, eq.rhs):
                parent.setdefault(t, t)
            ra = parent[eq.lhs]
            rb = parent[eq.rhs]
            # flatten: parents always point at roots
            ra = parent.get(ra, ra)
            rb = parent.get(rb, rb)
            if ra == rb:
                continue
            if ra.is_constant and rb.is_constant:
                consistent = False
            root = _better_root(ra, rb)
            old = ra if root == rb else rb
            for t, r in parent.items():
                if r == old:
                    parent[t] = root
            parent[old] = root
        return BuiltinStore(parent, consistent)

    def entails_eq(self, a: Term, b: Term) -> bool:
        if not self.consistent:
            return True
        return self.find(a) == self.find(b)

    def entails(self, existentials: frozenset, eqs: Iterable[Equation]) -> bool:
        """Does this store entail ``exists existentials . /\\ eqs``?

        ``existentials`` is a set of variable names; they may be used as
        witnesses.  A failed store entails everything.
        """
        if not self.consistent:
            return True
        rhs = BuiltinStore.true().add_equations(eqs)
        if not rhs.consistent:
            return False
        for members in rhs.classes().values():
            anchored = sorted(
                m for m in members if m.is_constant or m.name not in existentials
            )
            for other in anchored[1:]:
                if not self.entails_eq(anchored[0], other):
                    return False
        return True

    def project(self, variables: Iterable[str]) -> "ProjectedStore":
        """Existentially close everything except ``variables``; canonical."""
        keep = frozenset(variables)
        if not self.consistent:
            return ProjectedStore(keep, (), consistent=False)
        eqs = []
        for root, members in self.classes().items():
            consts = sorted(m for m in members if m.is_constant)
            xs = sorted(m.name for m in members if m.is_variable and m.name in keep)
            if consts:
                rep: Term = consts[0]
            elif xs:
                rep = var(xs[0])
                xs = xs[1:]
            else:
                continue
            for x in xs:
                eqs.append(Equation(var(x), rep))
        eqs.sort(key=str)
        return ProjectedStore(keep, tuple(eqs))

    def canonical_text(self) -> str:
        return self.project(self.variables).text

    def __eq__(self, other) -> bool:
        if not isinstance(other, BuiltinStore):
            return NotImplemented
        return self.consistent == other.consistent and self._parent == other._parent

    def __repr__(self) -> str:
        return f"BuiltinStore({self.canonical_text()})"


@dataclass(frozen=True)
class ProjectedStore:
    """Canonical solved form of a store restricted to a variable set.

    Logically equivalent projections compare equal byte-wise via
    ``text``.
    """

    variables: frozenset
    equations: tuple[Equation, ...]
    consistent: bool = True

    @property
    def text(self) -> str:
        if not self.consistent:
            return "false"
        if not self.equations:
            return "true"
        return ",".join(str(e) for e in self.equations)

    def to_store(self) -> BuiltinStore:
        s = BuiltinStore.true().add_equations(self.equations)
        if not self.consistent:
            # encode falsity with a clash of reserved constants
            s = s.add_equations(
                [Equation(Term("constant", "0"), Term("constant", "1"))]
            )
        return s

    def rename(self, rho: dict) -> "ProjectedStore":
        """Apply a variable renaming (old name -> new name)."""

        def rn(t: Term) -> Term:
            return var(rho.get(t.name, t.name)) if t.is_variable else t

        eqs = tuple(Equation(rn(e.lhs), rn(e.rhs)) for e in self.equations)
        vs = frozenset(rho.get(v, v) for v in self.variables)
        if not self.consistent:
            return ProjectedStore(vs, (), consistent=False)
        return BuiltinStore.true().add_equations(eqs).project(vs)

    def __str__(self) -> str:
        return self.text


StoreLike = Union[BuiltinStore, ProjectedStore]


def _as_store(s: StoreLike) -> BuiltinStore:
    return s.to_store() if isinstance(s, ProjectedStore) else s


def _is_consistent(s: StoreLike) -> bool:
    return s.consistent


def equivalent(a: StoreLike, b: StoreLike) -> bool:
    """Mutual entailment in the theory; two failed stores are equivalent."""
    if not _is_consistent(a) or not _is_consistent(b):
        return not _is_consistent(a) and not _is_consistent(b)
    sa, sb = _as_store(a), _as_store(b)
    universe = sa.variables | sb.variables
    return sa.project(universe).text == sb.project(universe).text


def proj_entails(a: ProjectedStore, b: ProjectedStore) -> bool:
    """Does projection a entail projection b?"""
    if not b.consistent:
        return not a.consistent
    if not a.consistent:
        return True
    return a.to_store().entails(frozenset(), b.equations)


def proj_equivalent(a: ProjectedStore, b: ProjectedStore) -> bool:
    return proj_entails(a, b) and proj_entails(b, a)
