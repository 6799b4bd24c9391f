import pytest

from chrc.syntax import parse_goal, parse_program

WORKED_EXAMPLE = """
r1 @ c(X,Y) <=> c(X,Y),c(X,Y).
r2 @ c(X,Y) <=> X = 0.
r3 @ c(0,Y) ==> Y = 0.
r4 @ c(0,0) <=> true.
"""


@pytest.fixture
def example_program():
    return parse_program(WORKED_EXAMPLE)


@pytest.fixture
def example_goal(example_program):
    return parse_goal("c(X,Y)", example_program)
