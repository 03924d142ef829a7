import itertools

import pytest

from twintree.errors import (
    CapExceededError,
    InvalidTreeError,
    LastVertexError,
    NotALeafError,
)
from twintree.finite_tree import (
    CanonicalCode,
    FiniteTree,
    RootedFiniteTree,
    VertexMap,
    ahu_code,
    all_free_trees,
    all_rooted_trees,
    branches,
    brute_force_iso_rooted,
    centers,
    cherry,
    complete_dary,
    count_branching_vertices,
    embed_rooted,
    embed_unrooted,
    embeds_rooted,
    embeds_rooted_by_search,
    enumerate_root_self_embeddings,
    height,
    iso_rooted,
    iso_unrooted,
    path_tree,
    remove_leaf,
    root_at,
    spider,
    star,
    to_unrooted,
)
from twintree.utils import OMEGA


@pytest.mark.parametrize(
    "parent",
    [[], [None, None], [None, 2, 1], [None, 5], [0]],
    ids=["empty", "two-roots", "cycle", "out-of-range", "no-root"],
)
def test_invalid_rooted_tree(parent):
    """
    Test the validation of the parent arrays
    :return:
    """
    with pytest.raises(InvalidTreeError):
        RootedFiniteTree(parent)


@pytest.mark.parametrize(
    "n, edges",
    [(0, []), (3, [(0, 1)]), (3, [(0, 1), (0, 1)]), (4, [(0, 1), (1, 2), (2, 0)]), (2, [(0, 0)])],
    ids=["empty", "too-few-edges", "duplicate-edge", "cycle", "loop"],
)
def test_invalid_finite_tree(n, edges):
    """
    Test the validation of the unrooted trees
    :return:
    """
    with pytest.raises(InvalidTreeError):
        FiniteTree(n, edges)


def test_rooted_tree_structure():
    """
    Test the derived children, order and depths
    :return:
    """
    t = RootedFiniteTree([1, None, 1, 0])
    assert t.root == 1
    assert t.children == ((3,), (0, 2), (), ())
    assert t.order == (1, 0, 2, 3)
    assert t.depth == (1, 0, 1, 2)
    assert height(t) == 2
    assert t.edges == ((1, 0), (1, 2), (0, 3))
    assert t.degree(1) == 2 and t.degree(0) == 2 and t.degree(3) == 1
    assert t == RootedFiniteTree([1, None, 1, 0])


def test_canonical_code():
    """
    Test the text of the codes, omega groups included
    :return:
    """
    assert ahu_code(RootedFiniteTree([None])).text == "()"
    assert ahu_code(cherry()).text == "(()())"
    assert ahu_code(path_tree(3)).text == "((()))"
    leaf = CanonicalCode()
    assert CanonicalCode([(leaf, OMEGA)]).text == "(()*w)"
    assert CanonicalCode([(leaf, 2), (leaf, OMEGA)]).text == "(()*w)", "omega absorbs the finite copies"


def test_branches():
    """
    One branch per child of the root, the sizes add up to n - 1
    :return:
    """
    t = spider([2, 1, 3])
    parts = branches(t)
    assert [part.n for part in parts] == [2, 1, 3]
    assert sum(part.n for part in parts) == t.n - 1
    assert all(iso_rooted(part, path_tree(part.n)) for part in parts)
    assert branches(RootedFiniteTree([None])) == []


def test_iso_rooted():
    """
    Isomorphism with the root preserved
    :return:
    """
    assert iso_rooted(RootedFiniteTree([None, 0, 0, 1]), RootedFiniteTree([None, 0, 0, 2]))
    # the same path rooted at an end and in the middle
    assert not iso_rooted(path_tree(3), RootedFiniteTree([1, None, 1]))


def test_iso_unrooted():
    """
    The three trees on 5 vertices are pairwise not isomorphic, and the path does not depend on its root
    :return:
    """
    free = all_free_trees(5)
    assert len(free) == 3
    for f1, f2 in itertools.combinations(free, 2):
        assert not iso_unrooted(f1, f2)
    assert iso_unrooted(to_unrooted(path_tree(5)), to_unrooted(spider([2, 2])))


def test_centers():
    """
    Test the leaf peeling
    :return:
    """
    assert centers(to_unrooted(path_tree(5))) == [2]
    assert centers(to_unrooted(path_tree(4))) == [1, 2]
    assert centers(FiniteTree(1, [])) == [0]


@pytest.mark.parametrize(
    "n, expected",
    [(1, 1), (2, 1), (3, 2), (4, 4), (5, 9), (6, 20), (7, 48), (8, 115)],
)
def test_all_rooted_trees(n, expected):
    """
    Number of rooted trees on n vertices
    :return:
    """
    trees = all_rooted_trees(n)
    assert len(trees) == expected
    assert len({ahu_code(t).text for t in trees}) == expected


def test_all_free_trees():
    """
    Number of unrooted trees on n vertices
    :return:
    """
    assert [len(all_free_trees(n)) for n in range(1, 8)] == [1, 1, 1, 2, 3, 6, 11]


def test_iso_rooted_against_brute_force():
    """
    The codes agree with the bijection search on every pair of trees with up to 6 vertices
    :return:
    """
    for n in range(1, 7):
        trees = all_rooted_trees(n)
        for t1, t2 in itertools.product(trees, repeat=2):
            assert iso_rooted(t1, t2) == brute_force_iso_rooted(t1, t2) == (t1 is t2)


def test_embed_rooted():
    """
    The witness is an embedding preserving the depths
    :return:
    """
    s = cherry()
    t = RootedFiniteTree([None, 0, 0, 1, 1])
    found = embed_rooted(s, t)
    assert found is not None
    assert found.is_embedding(s, t)
    assert found.preserves_depth(s, t)
    assert found.items() == ((0, 0), (1, 1), (2, 2)), "Lowest target index first"

    assert embed_rooted(path_tree(3), star(5)) is None, "Rooted embeddings keep the depths"
    assert embed_rooted(star(3), cherry()) is None


def test_embed_rooted_against_search():
    """
    The matching engine agrees with the backtracking search up to 6 vertices
    :return:
    """
    trees = [t for n in range(1, 7) for t in all_rooted_trees(n)]
    for s, t in itertools.product(trees, repeat=2):
        assert embeds_rooted(s, t) == embeds_rooted_by_search(s, t), f"{ahu_code(s)} into {ahu_code(t)}"


def test_embed_unrooted():
    """
    A path embeds in a longer path whatever the rootings
    :return:
    """
    s = to_unrooted(path_tree(3))
    t = to_unrooted(RootedFiniteTree([None, 0, 0, 1, 2]))
    found = embed_unrooted(s, t)
    assert found is not None and found.is_embedding(s, t)
    assert embed_unrooted(to_unrooted(star(3)), to_unrooted(path_tree(6))) is None


def test_enumerate_root_self_embeddings():
    """
    Self-embeddings of finite rooted trees are automorphisms
    :return:
    """
    maps = enumerate_root_self_embeddings(complete_dary(2, 2), cap=100)
    assert len(maps) == 8
    assert all(m.is_bijective(7) for m in maps)

    with pytest.raises(CapExceededError):
        enumerate_root_self_embeddings(star(4), cap=10)


def test_mutual_embeddings_are_isomorphisms():
    """
    Finite rooted trees embedding into each other are isomorphic
    :return:
    """
    trees = [t for n in range(1, 7) for t in all_rooted_trees(n)]
    for s, t in itertools.product(trees, repeat=2):
        if embeds_rooted(s, t) and embeds_rooted(t, s):
            assert iso_rooted(s, t)


def test_remove_leaf():
    """
    Test the leaf removal and its errors
    :return:
    """
    f = to_unrooted(path_tree(4))
    assert remove_leaf(f, 3) == FiniteTree(3, [(0, 1), (1, 2)])
    assert remove_leaf(f, 0) == FiniteTree(3, [(0, 1), (1, 2)]), "The vertices above the leaf shift down"
    with pytest.raises(NotALeafError):
        remove_leaf(f, 1)
    with pytest.raises(LastVertexError):
        remove_leaf(FiniteTree(1, []), 0)


def test_root_at():
    """
    Rooting keeps the vertex indices
    :return:
    """
    t = root_at(to_unrooted(path_tree(3)), 1)
    assert t.root == 1
    assert t.children[1] == (0, 2)


def test_vertex_map():
    """
    Test the checks of the vertex maps
    :return:
    """
    m = VertexMap({0: 0, 1: 2})
    assert m.is_injective()
    assert not VertexMap({0: 0, 1: 0}).is_injective()
    assert m.preserves_edges(path_tree(2), star(2))
    assert not VertexMap({0: 1, 1: 2}).preserves_edges(path_tree(2), star(2))


def test_builders():
    """
    Test the named finite trees
    :return:
    """
    assert complete_dary(3, 2).n == 13
    assert spider([1, 1, 1]).n == 4
    assert count_branching_vertices(spider([1, 1, 1])) == 1
    assert count_branching_vertices(complete_dary(2, 3)) == 6, "Every inner vertex but the root has degree 3"
