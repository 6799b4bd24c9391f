"""Parsing, pretty-printing and classification of CHR programs over constants.

Concrete syntax is Prolog-like: rules end with ``.``, comments start with
``%``, ``\\`` separates kept from removed head atoms, ``<=>`` introduces
simplification/simpagation rules, ``==>`` propagation rules, and ``|``
separates the guard from the body.  The only built-in is ``=``; function
symbols of arity > 0 are a hard parse error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

VARIABLE = "variable"
CONSTANT = "constant"

_RULE_VAR_RE = re.compile(r"_R(\d+)_(\d+)$")


class ParseError(Exception):
    """Syntax or validation error, with 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


def is_variable_name(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


@dataclass(frozen=True, order=True)
class Term:
    kind: str
    name: str

    @property
    def is_variable(self) -> bool:
        return self.kind == VARIABLE

    @property
    def is_constant(self) -> bool:
        return self.kind == CONSTANT

    def __str__(self) -> str:
        return self.name


def var(name: str) -> Term:
    return Term(VARIABLE, name)


def const(name: str) -> Term:
    return Term(CONSTANT, name)


def term(name: str) -> Term:
    """Build a Term inferring its kind from the lexical convention."""
    return var(name) if is_variable_name(name) else const(name)


@dataclass(frozen=True)
class ChrAtom:
    predicate: str
    args: tuple[Term, ...] = ()

    def variables(self) -> set[str]:
        return {a.name for a in self.args if a.is_variable}

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def variables(self) -> set[str]:
        return {t.name for t in (self.lhs, self.rhs) if t.is_variable}

    def __str__(self) -> str:
        return f"{self.lhs}={self.rhs}"


BodyItem = Union[ChrAtom, Equation]
Goal = tuple  # tuple[BodyItem, ...]


@dataclass(frozen=True)
class Rule:
    name: str
    kept: tuple[ChrAtom, ...]
    removed: tuple[ChrAtom, ...]
    guard: tuple[Equation, ...]
    body: tuple[BodyItem, ...]

    @property
    def heads(self) -> tuple[ChrAtom, ...]:
        return self.kept + self.removed

    @property
    def is_propagation(self) -> bool:
        return bool(self.kept) and not self.removed

    @property
    def is_simplification(self) -> bool:
        return bool(self.removed) and not self.kept

    def head_variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.heads:
            out |= a.variables()
        return out

    def body_guard_variables(self) -> set[str]:
        out: set[str] = set()
        for e in self.guard:
            out |= e.variables()
        for item in self.body:
            out |= item.variables()
        return out

    def __str__(self) -> str:
        if self.kept and self.removed:
            head = f"{_atoms(self.kept)} \\ {_atoms(self.removed)} <=>"
        elif self.is_propagation:
            head = f"{_atoms(self.kept)} ==>"
        else:
            head = f"{_atoms(self.removed)} <=>"
        guard = f"{', '.join(str(e) for e in self.guard)} | " if self.guard else ""
        body = ", ".join(str(i) for i in self.body) if self.body else "true"
        return f"{self.name} @ {head} {guard}{body}."


def _atoms(atoms: Iterable[ChrAtom]) -> str:
    return ", ".join(str(a) for a in atoms)


@dataclass(frozen=True)
class DialectFlags:
    range_restricted: bool
    single_headed: bool
    propositional: bool


@dataclass
class Program:
    rules: tuple[Rule, ...]
    constants: frozenset[str] = field(default_factory=frozenset)
    predicates: dict = field(default_factory=dict)  # name -> arity

    def rule(self, name: str) -> Rule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)


# --- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<simp><=>)
      | (?P<prop>==>)
      | (?P<name>[a-z][A-Za-z0-9_]*)
      | (?P<varb>[A-Z_][A-Za-z0-9_]*)
      | (?P<num>[0-9]+)
      | (?P<punct>[@\\|,()=.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    type: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        if kind not in ("ws", "comment"):
            ttype = tok_text if kind == "punct" else kind
            if kind in ("simp", "prop"):
                ttype = tok_text
            tokens.append(_Token(ttype, tok_text, line, col))
        for i, ch in enumerate(tok_text):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.type != "eof":
            self.i += 1
        return tok

    def expect(self, ttype: str) -> _Token:
        tok = self.peek()
        if tok.type != ttype:
            raise ParseError(
                f"expected {ttype!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.next()

    def error(self, message: str, tok: Optional[_Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    # terms and atoms

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.type in ("name", "num"):
            self.next()
            if self.peek().type == "(":
                self.error(
                    f"compound term {tok.text}(...) is not allowed "
                    "(function symbols must have arity 0)",
                    tok,
                )
            return const(tok.text)
        if tok.type == "varb":
            self.next()
            return var(tok.text)
        self.error(f"expected a term, found {tok.text!r}")

    def parse_atom(self) -> ChrAtom:
        tok = self.expect("name")
        args: list[Term] = []
        if self.peek().type == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek().type == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
        return ChrAtom(tok.text, tuple(args))

    def parse_item(self) -> Optional[BodyItem]:
        """Parse one goal/body item; 'true' yields None."""
        tok = self.peek()
        if tok.type == "varb":
            self.next()
            self.expect("=")
            return Equation(var(tok.text), self.parse_term())
        if tok.type == "num":
            self.next()
            if self.peek().type != "=":
                self.error(f"number {tok.text!r} cannot be used as a constraint", tok)
            self.next()
            return Equation(const(tok.text), self.parse_term())
        if tok.type == "name":
            atom = self.parse_atom()
            if self.peek().type == "=":
                if atom.args:
                    self.error(
                        "left-hand side of '=' must be a variable or constant", tok
                    )
                self.next()
                return Equation(const(atom.predicate), self.parse_term())
            if atom.predicate == "true" and not atom.args:
                return None
            return atom
        self.error(f"expected a constraint, found {tok.text or 'end of input'!r}")

    def parse_item_list(self) -> list[BodyItem]:
        items = []
        item = self.parse_item()
        if item is not None:
            items.append(item)
        while self.peek().type == ",":
            self.next()
            item = self.parse_item()
            if item is not None:
                items.append(item)
        return items

    def parse_head_atoms(self) -> list[ChrAtom]:
        atoms = [self._head_atom()]
        while self.peek().type == ",":
            self.next()
            atoms.append(self._head_atom())
        return atoms

    def _head_atom(self) -> ChrAtom:
        tok = self.peek()
        if tok.type != "name":
            self.error(f"expected a head atom, found {tok.text or 'end of input'!r}")
        if tok.text == "true":
            self.error("'true' cannot appear in a rule head", tok)
        atom = self.parse_atom()
        if self.peek().type == "=":
            self.error("built-in constraints cannot appear in a rule head")
        return atom

    def parse_rule(self, index: int) -> Rule:
        start = self.peek()
        name = None
        if self.peek().type == "name" and self.peek(1).type == "@":
            name = self.next().text
            self.next()
        first = self.parse_head_atoms()
        kept: list[ChrAtom] = []
        removed: list[ChrAtom] = []
        if self.peek().type == "\\":
            self.next()
            second = self.parse_head_atoms()
            op = self.peek()
            if op.type != "<=>":
                self.error("simpagation rules require '<=>'", op)
            self.next()
            kept, removed = first, second
        else:
            op = self.peek()
            if op.type == "<=>":
                self.next()
                removed = first
            elif op.type == "==>":
                self.next()
                kept = first
            else:
                self.error(
                    f"expected '<=>' or '==>', found {op.text or 'end of input'!r}", op
                )
        items = self.parse_item_list()
        guard: list[Equation] = []
        if self.peek().type == "|":
            bar = self.next()
            for item in items:
                if not isinstance(item, Equation):
                    raise ParseError(
                        "guards may contain only '=' constraints", bar.line, bar.col
                    )
            guard = items
            items = self.parse_item_list()
        self.expect(".")
        if name is None:
            name = f"rule{index + 1}"
        rule = Rule(name, tuple(kept), tuple(removed), tuple(guard), tuple(items))
        return _rename_apart(rule, index, start)


def _rename_apart(rule: Rule, index: int, start: _Token) -> Rule:
    """Rename rule-local variables to the canonical _R<rule>_<k> scheme."""
    mapping: dict[str, str] = {}

    def rn(t: Term) -> Term:
        if not t.is_variable:
            return t
        if t.name not in mapping:
            mapping[t.name] = f"_R{index}_{len(mapping)}"
        return var(mapping[t.name])

    def rn_atom(a: ChrAtom) -> ChrAtom:
        return ChrAtom(a.predicate, tuple(rn(t) for t in a.args))

    def rn_eq(e: Equation) -> Equation:
        return Equation(rn(e.lhs), rn(e.rhs))

    return Rule(
        rule.name,
        tuple(rn_atom(a) for a in rule.kept),
        tuple(rn_atom(a) for a in rule.removed),
        tuple(rn_eq(e) for e in rule.guard),
        tuple(rn_atom(i) if isinstance(i, ChrAtom) else rn_eq(i) for i in rule.body),
    )


def _collect_symbols(
    atoms_and_eqs: Iterable[BodyItem],
    constants: set[str],
    predicates: dict,
    where: _Token,
) -> None:
    for item in atoms_and_eqs:
        if isinstance(item, ChrAtom):
            arity = len(item.args)
            known = predicates.get(item.predicate)
            if known is not None and known != arity:
                raise ParseError(
                    f"predicate {item.predicate!r} used with arity {arity} "
                    f"and {known}",
                    where.line,
                    where.col,
                )
            predicates[item.predicate] = arity
            for t in item.args:
                if t.is_constant:
                    constants.add(t.name)
        else:
            for t in (item.lhs, item.rhs):
                if t.is_constant:
                    constants.add(t.name)


def parse_program(text: str) -> Program:
    parser = _Parser(text)
    rules: list[Rule] = []
    names: set[str] = set()
    constants: set[str] = set()
    predicates: dict = {}
    while parser.peek().type != "eof":
        start = parser.peek()
        rule = parser.parse_rule(len(rules))
        if rule.name in names:
            raise ParseError(
                f"duplicate rule name {rule.name!r}", start.line, start.col
            )
        if not rule.heads:
            raise ParseError("a rule needs at least one head atom", start.line, start.col)
        names.add(rule.name)
        _collect_symbols(rule.heads, constants, predicates, start)
        _collect_symbols(rule.guard, constants, predicates, start)
        _collect_symbols(rule.body, constants, predicates, start)
        rules.append(rule)
    return Program(tuple(rules), frozenset(constants), predicates)


def parse_goal(text: str, program: Optional[Program] = None) -> Goal:
    """Parse a goal: a multiset of CHR atoms and equations.

    When a program is given, predicate arities are checked against (and
    linked with) the program's predicate table.
    """
    parser = _Parser(text)
    if parser.peek().type == "eof":
        return ()
    items = parser.parse_item_list()
    tok = parser.peek()
    if tok.type != "eof":
        parser.error(f"unexpected trailing input {tok.text!r}")
    constants: set[str] = set()
    predicates = dict(program.predicates) if program is not None else {}
    _collect_symbols(items, constants, predicates, _Token("eof", "", 1, 1))
    if program is not None:
        program.predicates.update(predicates)
    return tuple(items)


def goal_to_text(goal: Goal) -> str:
    return ", ".join(str(i) for i in goal) if goal else "true"


def classify(program: Program) -> DialectFlags:
    range_restricted = all(
        r.body_guard_variables() <= r.head_variables() for r in program.rules
    )
    single_headed = all(len(r.heads) == 1 for r in program.rules)
    propositional = all(arity == 0 for arity in program.predicates.values()) and all(
        not r.guard and all(isinstance(i, ChrAtom) for i in r.body)
        for r in program.rules
    )
    return DialectFlags(range_restricted, single_headed, propositional)


def symbol_universe(program: Program, goal: Goal) -> tuple[set[str], int, int]:
    """Distinct constants, maximal CHR arity and propagation-rule count
    for a program/goal pair."""
    constants = set(program.constants)
    arities = [a for a in program.predicates.values()]
    for item in goal:
        if isinstance(item, ChrAtom):
            arities.append(len(item.args))
            for t in item.args:
                if t.is_constant:
                    constants.add(t.name)
        else:
            for t in (item.lhs, item.rhs):
                if t.is_constant:
                    constants.add(t.name)
    w = max(arities, default=0)
    r = sum(1 for rule in program.rules if rule.is_propagation)
    return constants, w, r
