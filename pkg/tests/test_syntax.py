import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chrc.syntax import (
    ParseError,
    classify,
    goal_to_text,
    parse_goal,
    parse_program,
    symbol_universe,
)


def test_rule_kinds():
    p = parse_program(
        """
        s1 @ a(X) <=> b(X).
        p1 @ a(X) ==> b(X).
        sp @ a(X) \\ b(X) <=> c(X).
        """
    )
    assert p.rule("s1").is_simplification
    assert p.rule("p1").is_propagation
    assert not p.rule("sp").is_simplification
    assert p.rule("sp").kept and p.rule("sp").removed


def test_unnamed_rules_get_positional_names():
    p = parse_program("a <=> true.\nb <=> a.")
    assert [r.name for r in p.rules] == ["rule1", "rule2"]


def test_guard_and_body_equations():
    p = parse_program("r @ c(X,Y) <=> X = 0 | c(Y,X), Y = 1.")
    rule = p.rule("r")
    assert len(rule.guard) == 1
    assert len(rule.body) == 2


def test_duplicate_rule_name_rejected():
    with pytest.raises(ParseError):
        parse_program("r @ a <=> true.\nr @ b <=> true.")


def test_arity_mismatch_rejected():
    with pytest.raises(ParseError):
        parse_program("a(X) <=> a(X,X).")


def test_compound_terms_rejected():
    with pytest.raises(ParseError):
        parse_program("a(f(X)) <=> true.")


def test_parse_error_carries_position():
    try:
        parse_program("a <=> %comment\n  ,true.")
    except ParseError as exc:
        assert exc.line == 2
    else:  # pragma: no cover
        pytest.fail("expected a parse error")


def test_goal_round_trip():
    p = parse_program("c(X,Y) <=> true.")
    g = parse_goal("c(0,Z), Z = 1, c(1,1)", p)
    assert goal_to_text(g) == "c(0,Z), Z=1, c(1,1)"


def test_goal_checks_arity_against_program():
    p = parse_program("c(X,Y) <=> true.")
    with pytest.raises(ParseError):
        parse_goal("c(0)", p)


def test_classify_range_restricted():
    assert classify(parse_program("a(X) <=> a(X).")).range_restricted
    assert not classify(parse_program("a(X) <=> a(Y).")).range_restricted
    # guard variables count too
    assert not classify(parse_program("a(X) <=> Y = 0 | a(X).")).range_restricted


def test_classify_single_headed():
    assert classify(parse_program("a(X) <=> a(X).")).single_headed
    assert not classify(parse_program("a(X), a(Y) <=> true.")).single_headed
    assert not classify(parse_program("a(X) \\ a(Y) <=> true.")).single_headed


def test_classify_propositional():
    assert classify(parse_program("p <=> q.\nq ==> p.")).propositional
    assert not classify(parse_program("p(0) <=> true.")).propositional


def test_symbol_universe(example_program, example_goal):
    constants, w, r = symbol_universe(example_program, example_goal)
    assert constants == {"0"}
    assert w == 2
    assert r == 1


def test_rules_renamed_apart():
    p = parse_program("a(X) <=> b(X).\nb(X) <=> a(X).")
    v1 = p.rules[0].head_variables()
    v2 = p.rules[1].head_variables()
    assert v1.isdisjoint(v2)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(["a", "b"]),
            st.lists(st.sampled_from(["X", "Y", "0", "1"]), max_size=2),
        ),
        min_size=1,
        max_size=3,
    )
)
def test_print_parse_round_trip(heads):
    # build a single simplification rule and round-trip it through text
    arity = {name: len(args) for name, args in heads}
    atoms = [
        f"{name}({','.join(args[: arity[name]])})" if arity[name] else name
        for name, args in heads
        if len(args) == arity[name]
    ]
    if not atoms:
        return
    text = f"r @ {','.join(atoms)} <=> true."
    p1 = parse_program(text)
    p2 = parse_program(str(p1.rules[0]))
    assert str(p1.rules[0]) == str(p2.rules[0])
