"""Forests of repetitions for terminating single-headed computations.

Every CHR atom of the initial configuration roots a tree; firing a rule
on a repetition grows children for the body atoms (propagation adds the
incremented repetition of the rewritten atom, an empty-body
simplification adds a box leaf).  Each node carries a reactive sequence:
the store pairs of the Apply steps in its subtree, normalized by the
eta operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .engine import (
    APPLY,
    INTRODUCE,
    SOLVE,
    Computation,
    all_builtins_store,
    is_final,
    normalize_steps,
    successors,
)
from .store import (
    BuiltinStore,
    ProjectedStore,
    proj_entails,
    proj_equivalent,
)
from .syntax import ChrAtom, classify


class NonTerminatingInput(Exception):
    pass


class NotSingleHeaded(Exception):
    pass


class PreconditionViolation(Exception):
    pass


@dataclass(frozen=True)
class Repetition:
    atom: ChrAtom
    id: Optional[int]
    superscript: int

    def __str__(self) -> str:
        return f"{self.atom}#{self.id}^{self.superscript}"


class ForestNode:
    """A repetition of an identified constraint, or a box leaf."""

    __slots__ = ("atom", "id", "superscript", "children", "rewrite_step", "box")

    def __init__(
        self,
        atom: Optional[ChrAtom] = None,
        id: Optional[int] = None,
        superscript: int = 0,
        box: bool = False,
    ):
        self.atom = atom
        self.id = id
        self.superscript = superscript
        self.children: list[ForestNode] = []
        self.rewrite_step: Optional[int] = None
        self.box = box

    @property
    def label(self):
        if self.box:
            return "box"
        return Repetition(self.atom, self.id, self.superscript)

    def subtree(self) -> Iterator["ForestNode"]:
        yield self
        for child in self.children:
            yield from child.subtree()

    def __repr__(self) -> str:
        return "box" if self.box else str(self.label)


@dataclass
class Forest:
    roots: list
    source: Computation

    def nodes(self) -> Iterator[ForestNode]:
        for root in self.roots:
            yield from root.subtree()

    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())

    def box_count(self) -> int:
        return sum(1 for n in self.nodes() if n.box)

    def find(self, id: int, superscript: int) -> ForestNode:
        for n in self.nodes():
            if not n.box and n.id == id and n.superscript == superscript:
                return n
        raise KeyError((id, superscript))

    def to_text(self) -> str:
        lines: list[str] = []

        def walk(node: ForestNode, depth: int):
            lines.append("  " * depth + repr(node))
            for child in node.children:
                walk(child, depth + 1)

        for root in self.roots:
            walk(root, 0)
        return "\n".join(lines)

    def to_json(self) -> list:
        def walk(node: ForestNode) -> dict:
            if node.box:
                return {"label": "box", "children": []}
            return {
                "label": str(node.atom),
                "id": node.id,
                "superscript": node.superscript,
                "children": [walk(c) for c in node.children],
            }

        return [walk(r) for r in self.roots]


def _body_chr_count(rule) -> int:
    return sum(1 for item in rule.body if isinstance(item, ChrAtom))


def build_forest(delta: Computation) -> Forest:
    """The forest associated to a terminating computation of a
    single-headed program."""
    flags = classify(delta.program)
    if not flags.single_headed:
        raise NotSingleHeaded("forests are defined for single-headed programs")
    if delta.truncated or not delta.ends_final():
        raise NonTerminatingInput("the computation does not end in a final configuration")

    roots: list[ForestNode] = []
    prov: list[Optional[ForestNode]] = []
    for item in delta.initial.goal:
        if isinstance(item, ChrAtom):
            node = ForestNode(atom=item)
            roots.append(node)
            prov.append(node)
        else:
            prov.append(None)
    id2node: dict[int, ForestNode] = {}

    for s, (label, after) in enumerate(delta.steps):
        before = delta.config_before(s)
        if label.kind == SOLVE:
            prov.pop(label.goal_index)
        elif label.kind == INTRODUCE:
            node = prov.pop(label.goal_index)
            node.id = before.next_id
            id2node[node.id] = node
        else:
            target_id = label.matched_ids[0]
            node = id2node[target_id]
            node.rewrite_step = s
            rule = delta.program.rule(label.rule)
            appended = after.goal[len(before.goal) :]
            for item in appended:
                if isinstance(item, ChrAtom):
                    child = ForestNode(atom=item)
                    node.children.append(child)
                    prov.append(child)
                else:
                    prov.append(None)
            if rule.is_propagation:
                child = ForestNode(
                    atom=node.atom, id=target_id, superscript=node.superscript + 1
                )
                node.children.append(child)
                id2node[target_id] = child
            else:
                del id2node[target_id]
                if _body_chr_count(rule) == 0:
                    node.children.append(ForestNode(box=True))
    return Forest(roots, delta)


def sc_computations(forest: Forest) -> list:
    """All root-to-leaf paths, left to right."""
    paths: list[list[ForestNode]] = []

    def walk(node: ForestNode, prefix: list):
        prefix = prefix + [node]
        if not node.children:
            paths.append(prefix)
        else:
            for child in node.children:
                walk(child, prefix)

    for root in forest.roots:
        walk(root, [])
    return paths


def _atom_of(x) -> ChrAtom:
    if isinstance(x, ChrAtom):
        return x
    if isinstance(x, Repetition):
        return x.atom
    if isinstance(x, ForestNode):
        if x.box:
            raise ValueError("box nodes carry no atom")
        return x.atom
    raise TypeError(type(x))


def r_equal(a, b) -> Optional[dict]:
    """The injective variable renaming rho with atom(a) = atom(b) rho,
    or None.  Identifiers and superscripts are ignored."""
    h, k = _atom_of(a), _atom_of(b)
    if h.predicate != k.predicate or len(h.args) != len(k.args):
        return None
    rho: dict = {}
    inverse: dict = {}
    for ha, ka in zip(h.args, k.args):
        if ha.is_constant != ka.is_constant:
            return None
        if ha.is_constant:
            if ha.name != ka.name:
                return None
            continue
        if rho.get(ka.name, ha.name) != ha.name:
            return None
        if inverse.get(ha.name, ka.name) != ka.name:
            return None
        rho[ka.name] = ha.name
        inverse[ha.name] = ka.name
    return rho


def atom_pattern(atom: ChrAtom) -> tuple:
    """Canonical key of the r-equality class of an atom."""
    seen: dict = {}
    pattern = []
    for t in atom.args:
        if t.is_constant:
            pattern.append(("c", t.name))
        else:
            if t.name not in seen:
                seen[t.name] = len(seen)
            pattern.append(("v", seen[t.name]))
    return (atom.predicate, tuple(pattern))


def repetitiveness(forest: Forest) -> tuple:
    """(l, degree): the maximal r-equality multiplicity over the
    sc-computations, and the number of class representatives achieving
    it, summed over the maximal paths."""
    paths = sc_computations(forest)
    per_path = []
    for path in paths:
        counts: dict = {}
        for node in path:
            if node.box:
                continue
            key = atom_pattern(node.atom)
            counts[key] = counts.get(key, 0) + 1
        per_path.append(counts)
    l = max((max(c.values(), default=0) for c in per_path), default=0)
    if l == 0:
        return (0, 0)
    degree = sum(
        sum(1 for v in counts.values() if v == l)
        for counts in per_path
        if counts and max(counts.values()) == l
    )
    return (l, degree)


# --- reactive sequences ----------------------------------------------------


@dataclass(frozen=True)
class ReactiveSequence:
    pairs: tuple  # ((ProjectedStore, ProjectedStore), ...)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def text(self) -> str:
        return " ".join(f"<{c.text}, {d.text}>" for c, d in self.pairs) or "eps"

    def rename(self, rho: dict) -> "ReactiveSequence":
        return ReactiveSequence(
            tuple((c.rename(rho), d.rename(rho)) for c, d in self.pairs)
        )

    def __str__(self) -> str:
        return self.text


def eta(raw, X) -> ReactiveSequence:
    """Project each pair to X, drop stuttering pairs except a final one,
    then fuse connected consecutive pairs to closure."""
    X = frozenset(X)
    projected = [
        (
            c.project(X) if isinstance(c, BuiltinStore) else c,
            d.project(X) if isinstance(d, BuiltinStore) else d,
        )
        for c, d in raw
    ]
    kept = [
        pair
        for i, pair in enumerate(projected)
        if i == len(projected) - 1 or not proj_equivalent(pair[0], pair[1])
    ]
    changed = True
    while changed:
        changed = False
        for i in range(len(kept) - 1):
            (c1, d1), (c2, d2) = kept[i], kept[i + 1]
            if proj_entails(d1, c2):
                kept[i : i + 2] = [(c1, d2)]
                changed = True
                break
    return ReactiveSequence(tuple(kept))


def is_strictly_increasing(seq: ReactiveSequence, X) -> bool:
    """The strictly-increasing condition: all free variables inside X,
    and no non-final pair stutters or absorbs its successor's input."""
    X = frozenset(X)
    pairs = seq.pairs
    for c, d in pairs:
        if not (c.variables <= X and d.variables <= X):
            return False
    for i in range(len(pairs) - 1):
        c_i, d_i = pairs[i]
        c_next = pairs[i + 1][0]
        if proj_entails(c_i, d_i):
            return False
        if proj_entails(d_i, c_next):
            return False
    return True


def max_sequence_length_check(seq: ReactiveSequence, X) -> bool:
    return len(seq) <= len(frozenset(X)) + 2


def node_sequence(forest: Forest, node: ForestNode) -> ReactiveSequence:
    """The eta-normalized sequence of store pairs of the Apply steps that
    rewrite this node's repetition or any repetition derived from it."""
    if node.box:
        return ReactiveSequence(())
    delta = forest.source
    steps = sorted(
        n.rewrite_step for n in node.subtree() if n.rewrite_step is not None
    )
    raw = [
        (
            all_builtins_store(delta.config_before(s)),
            all_builtins_store(delta.steps[s][1]),
        )
        for s in steps
    ]
    return eta(raw, node.atom.variables())


# --- compression of r-equal repetitions ------------------------------------


def _replay_children(rule, source: ForestNode) -> list:
    """The children of a node that correspond to body CHR atoms."""
    if rule.is_propagation:
        return source.children[:-1]
    if _body_chr_count(rule) == 0:
        return []
    return list(source.children)


def compress(delta: Computation, n: ForestNode, n2: ForestNode) -> Computation:
    """Replace the rewriting work of node ``n`` by the renamed work of
    its descendant ``n2``, yielding a terminating computation for the
    same goal with a strictly smaller repetitiveness measure."""
    forest = build_forest(delta)
    if n.box or n2.box or n.id is None or n2.id is None:
        raise PreconditionViolation("both nodes must be introduced repetitions")
    if (n.id, n.superscript) == (n2.id, n2.superscript):
        raise PreconditionViolation("nodes must be distinct")
    node = forest.find(n.id, n.superscript)
    try:
        node2 = next(
            x
            for x in node.subtree()
            if not x.box and (x.id, x.superscript) == (n2.id, n2.superscript)
        )
    except StopIteration:
        raise PreconditionViolation(
            "the second node must lie in the subtree of the first"
        ) from None
    rho = r_equal(node, node2)
    if rho is None:
        raise PreconditionViolation("node atoms are not equal up to renaming")
    seq1 = node_sequence(forest, node)
    seq2 = node_sequence(forest, node2).rename(rho)
    if len(seq1) != len(seq2) or any(
        a.text != c.text or b.text != d.text
        for (a, b), (c, d) in zip(seq1.pairs, seq2.pairs)
    ):
        raise PreconditionViolation("node sequences differ up to the renaming")

    program = delta.program
    sem = delta.sem
    keep = set(node2.subtree())
    drop = set(node.subtree()) - keep
    by_step = sorted(
        (x.rewrite_step, x)
        for x in forest.nodes()
        if x.rewrite_step is not None and x not in drop
    )
    instructions = []
    for step, source in by_step:
        rule_name = delta.steps[step][0].rule
        target = node if source is node2 else source
        instructions.append((rule_name, source, target))

    node_id: dict = {}
    steps_out: list = []
    config = delta.initial

    def track_normalize(cfg, pending_nodes):
        # pending_nodes: forest nodes for the goal's CHR atoms, in goal order
        micro = normalize_steps(program, cfg)
        introduced = iter(pending_nodes)
        for label, after in micro:
            if label.kind == INTRODUCE:
                node_id[next(introduced)] = after.next_id - 1
        steps_out.extend(micro)
        return micro[-1][1] if micro else cfg

    config = track_normalize(config, list(forest.roots))

    pending = list(instructions)
    progress = True
    while pending and progress:
        progress = False
        for i, (rule_name, source, target) in enumerate(pending):
            if target not in node_id:
                continue
            sid = node_id[target]
            match = [
                (lab, succ)
                for lab, succ in successors(program, config, sem)
                if lab.kind == APPLY
                and lab.rule == rule_name
                and lab.matched_ids == (sid,)
            ]
            if not match:
                continue
            label, after = match[0]
            steps_out.append((label, after))
            rule = program.rule(rule_name)
            del node_id[target]
            if rule.is_propagation:
                node_id[source.children[-1]] = sid
            config = track_normalize(after, _replay_children(rule, source))
            pending.pop(i)
            progress = True
            break
    if pending:
        raise PreconditionViolation(
            "could not schedule the compressed computation"
        )
    if not is_final(program, config, sem):
        raise PreconditionViolation("compressed computation is not terminating")
    return Computation(program, sem, delta.initial, steps_out, truncated=False)

