import pytest

from twintree.construct import make
from twintree.decide import Verdict, scheme_embed_rooted, scheme_iso_rooted
from twintree.errors import BadParamsError
from twintree.finite_tree import ahu_code, iso_rooted
from twintree.generators import (
    random_equivalent_scheme,
    random_extension,
    random_relabeling,
    random_rooted_tree,
    random_scheme,
)
from twintree.scheme import validate
from twintree.utils import is_omega


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_random_rooted_tree(n):
    """
    Same seed, same tree
    :return:
    """
    tree = random_rooted_tree(n, seed="abc")
    assert tree.n == n
    assert tree == random_rooted_tree(n, seed="abc")
    assert iso_rooted(random_relabeling(tree, seed=3), tree)


def test_random_rooted_tree_seeds():
    trees = {random_rooted_tree(12, seed=seed) for seed in range(10)}
    assert len(trees) > 1
    with pytest.raises(BadParamsError):
        random_rooted_tree(0)


def test_random_rooted_tree_shapes():
    """
    Many of the 115 rooted trees on 8 vertices come out of 1000 seeds
    :return:
    """
    codes = {ahu_code(random_rooted_tree(8, seed=seed)).text for seed in range(1000)}
    assert len(codes) >= 50


@pytest.mark.parametrize("seed", range(6))
def test_random_scheme(seed):
    """
    Random schemes are valid and reproducible
    :return:
    """
    s = random_scheme(5, seed=seed)
    assert validate(s)
    assert s.states == ("Q0", "Q1", "Q2", "Q3", "Q4")
    assert s.root == "Q0"
    assert s.name == f"random_5_{seed}"
    assert s == random_scheme(5, seed=seed)
    assert all(1 <= m <= 3 for entries in s.children.values() for _, m in entries)


def test_random_scheme_omega():
    s = random_scheme(4, omega_prob=1.0, seed=2)
    assert validate(s)
    assert all(is_omega(m) for entries in s.children.values() for _, m in entries)


@pytest.mark.parametrize(
    "params",
    [{"states": 0}, {"states": 3, "max_mult": 0}, {"states": 3, "omega_prob": 1.5}],
    ids=["no-state", "no-multiplicity", "probability"],
)
def test_random_scheme_errors(params):
    with pytest.raises(BadParamsError):
        random_scheme(**params)


@pytest.mark.parametrize("seed", range(6))
def test_random_equivalent_scheme(seed):
    """
    Splitting states does not change the unfolding
    :return:
    """
    s = random_scheme(4, seed=seed)
    split = random_equivalent_scheme(s, seed=seed)
    assert validate(split)
    assert split.name == f"{s.name}_split"
    assert scheme_iso_rooted(s, split).verdict == Verdict.YES


def test_random_equivalent_caterpillar():
    split = random_equivalent_scheme(make("caterpillar"), seed=0, splits=3)
    assert scheme_iso_rooted(make("caterpillar"), split).verdict == Verdict.YES


@pytest.mark.parametrize("seed", range(6))
def test_random_extension(seed):
    """
    The original embeds into the extension
    :return:
    """
    s = random_scheme(4, seed=seed)
    extended = random_extension(s, seed=seed)
    assert validate(extended)
    assert extended.name == f"{s.name}_extended"
    assert scheme_embed_rooted(s, extended).verdict == Verdict.YES
