import pytest

from twintree.matching import (
    assignment_feasible,
    lexicographic_assignment,
    lowest_index_matching,
    saturating_matching_exists,
)
from twintree.utils import OMEGA


def full(n: int, m: int):
    return {(i, j) for i in range(n) for j in range(m)}


@pytest.mark.parametrize(
    "demands, capacities, allowed, expected",
    [
        ([2], [1, 1], full(1, 2), True),
        ([3], [1, 1], full(1, 2), False),
        ([1, 1], [1], full(2, 1), False),
        ([2, 1], [2, 1], {(0, 0), (1, 0)}, False),
        ([2, 1], [2, 1], {(0, 0), (1, 1)}, True),
        ([OMEGA], [5], full(1, 1), False),
        ([OMEGA, 3], [OMEGA], full(2, 1), True),
        ([5], [OMEGA], full(1, 1), True),
        ([], [], set(), True),
    ],
    ids=[
        "split-over-two",
        "too-many",
        "two-into-one",
        "blocked-pair",
        "diagonal",
        "omega-needs-omega",
        "omega-absorbs",
        "finite-into-omega",
        "empty",
    ],
)
def test_assignment_feasible(demands, capacities, allowed, expected):
    """
    Test the capacity feasibility with omega capacities
    :return:
    """
    assert assignment_feasible(demands, capacities, allowed) == expected


def test_lexicographic_assignment():
    """
    Every demand goes first to the lowest capacity that keeps the rest feasible
    :return:
    """
    # demand 0 could take both copies of capacity 0 but then demand 1 would be stuck
    assignment = lexicographic_assignment([2, 1], [2, 1], {(0, 0), (0, 1), (1, 0)})
    assert assignment == [(0, 0, 1), (0, 1, 1), (1, 0, 1)]

    assert lexicographic_assignment([OMEGA, 1], [1, OMEGA], full(2, 2)) == [
        (0, 1, OMEGA),
        (1, 0, 1),
    ]
    assert lexicographic_assignment([3], [1, 1], full(1, 2)) is None


def test_saturating_matching_exists():
    """
    Test the bipartite matching helper
    :return:
    """
    assert saturating_matching_exists(["a", "b"], [1, 2], lambda a, b: True)
    assert not saturating_matching_exists(["a", "b"], [1, 2], lambda a, b: b == 1)
    assert saturating_matching_exists([], [1], lambda a, b: False)


def test_lowest_index_matching():
    """
    The first left item does not take the only candidate of the second one
    :return:
    """
    allowed = {("a", 1), ("a", 2), ("b", 1)}
    assert lowest_index_matching(["a", "b"], [1, 2], lambda a, b: (a, b) in allowed) == {
        "a": 2,
        "b": 1,
    }
    assert lowest_index_matching(["a", "b"], [1], lambda a, b: True) is None
