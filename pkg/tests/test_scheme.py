import pytest

from twintree.construct import make
from twintree.decide import Verdict, scheme_iso_rooted
from twintree.errors import (
    BadAddressError,
    BadParamsError,
    InfiniteUnfoldingError,
    SchemeValidationError,
    UnfoldingTooLargeError,
)
from twintree.finite_tree import cherry, complete_dary, iso_rooted, path_tree, root_at, star, to_unrooted
from twintree.generators import random_scheme
from twintree.scheme import (
    Scheme,
    ShapeInterner,
    VertexAddress,
    acyclic_code,
    addresses_up_to,
    branch_scheme,
    branching_vertex_count,
    classify,
    degree_census,
    diagnose,
    ensure_valid,
    from_rooted_tree,
    level_profile,
    local_iso_up_to,
    materialize,
    materialize_to_depth,
    max_degree,
    prune,
    reroot,
    reroot_with_return,
    state_counts,
    truncate,
    truncation_shape,
    unfold_typed,
    unfolding_size,
    validate,
)
from twintree.utils import OMEGA


def isomorphic(a: Scheme, b: Scheme) -> bool:
    return scheme_iso_rooted(a, b).verdict == Verdict.YES


@pytest.mark.parametrize(
    "children, message",
    [
        ({"A": [("B", 1), ("B", 2)], "B": []}, "more than once"),
        ({"A": [("B", 0)], "B": []}, "invalid multiplicity"),
        ({"A": [("B", 1)]}, "not declared"),
        ({"A": [], "B": [("A", 1)]}, "not reachable"),
    ],
    ids=["duplicate-target", "zero-multiplicity", "undeclared-target", "unreachable-state"],
)
def test_diagnose(children, message):
    """
    Test the scheme invariants
    :return:
    """
    s = Scheme("A", children, "bad")
    assert message in diagnose(s)
    assert not validate(s)
    with pytest.raises(SchemeValidationError):
        ensure_valid(s)


def test_scheme_entries_are_sorted(caterpillar):
    """
    Entries are stored sorted by target, the name does not count in the equality
    :return:
    """
    s = Scheme("S", {"S": [("S", 1), ("L", 1)], "L": []}, "other")
    assert s.children["S"] == (("L", 1), ("S", 1))
    assert s == caterpillar
    assert validate(caterpillar)


def test_prune():
    """
    Unreachable states are dropped
    :return:
    """
    s = prune(Scheme("A", {"A": [], "B": [("A", 1)]}))
    assert s.states == ("A",)


def test_truncate(caterpillar, ray):
    """
    Test the content of the truncations
    :return:
    """
    assert iso_rooted(materialize(truncate(ray, 2)), path_tree(3))
    assert truncate(ray, 2).root == "R_2"
    assert set(truncate(ray, 2).states) == {"R_2", "R_1", "R_0"}

    # root{leaf, v1}, v1{leaf, v2}
    t = materialize(truncate(caterpillar, 2))
    assert t.n == 5
    assert sorted(len(c) for c in t.children) == [0, 0, 0, 2, 2]

    assert isomorphic(truncate(truncate(caterpillar, 5), 3), truncate(caterpillar, 3))
    with pytest.raises(BadParamsError):
        truncate(ray, -1)


def test_materialize():
    """
    Test the explicit unfolding and its errors
    :return:
    """
    assert iso_rooted(materialize(make("star", k=3)), star(3))
    with pytest.raises(InfiniteUnfoldingError):
        materialize(make("ray"))
    with pytest.raises(InfiniteUnfoldingError):
        materialize(make("star", k=OMEGA))
    with pytest.raises(UnfoldingTooLargeError):
        materialize(truncate(make("d_ary", d=2), 10), limit=100)


def test_unfold_typed():
    """
    One record per vertex: parent, state, depth and entry index
    :return:
    """
    assert unfold_typed(make("cherry")) == [(None, "O", 0, -1), (0, "L", 1, 0), (0, "L", 1, 0)]
    assert len(unfold_typed(make("ray"), depth=3)) == 4


def test_sizes_and_levels(caterpillar, ray):
    """
    Test the vertex counts computed without materializing
    :return:
    """
    assert unfolding_size(make("star", k=3)) == 4
    assert unfolding_size(ray) == OMEGA
    assert unfolding_size(ray, 3) == 4
    assert level_profile(caterpillar, 2) == [{"S": 1}, {"L": 1, "S": 1}, {"L": 1, "S": 1}]
    assert branching_vertex_count(caterpillar, 4) == 3
    assert state_counts(make("star", k=3)) == {"O": 1, "L": 3}


@pytest.mark.parametrize(
    "kind, params, flags",
    [
        ("ray", {}, {"finite": False, "locally_finite": True, "rayless": False, "contains_comb": False, "nearly_finite": True}),
        ("caterpillar", {}, {"finite": False, "locally_finite": True, "rayless": False, "contains_comb": True, "nearly_finite": False}),
        ("d_ary", {"d": 2}, {"finite": False, "locally_finite": True, "rayless": False, "contains_comb": True, "nearly_finite": False}),
        ("d_ary", {"d": 3}, {"finite": False, "locally_finite": True, "rayless": False, "contains_comb": True, "nearly_finite": False}),
        ("star", {"k": OMEGA}, {"finite": False, "locally_finite": False, "rayless": True, "contains_comb": False, "nearly_finite": False}),
        ("path", {"n": 3}, {"finite": True, "locally_finite": True, "rayless": True, "contains_comb": False, "nearly_finite": True}),
    ],
    ids=["ray", "caterpillar", "binary", "ternary", "infinite-star", "path"],
)
def test_classify(kind, params, flags):
    """
    Test the structural flags
    :return:
    """
    assert classify(make(kind, **params)).flags() == flags


def test_classify_witnesses(caterpillar):
    """
    The witnesses name a cycle and the branching state on it
    :return:
    """
    report = classify(caterpillar)
    assert report.cycle_witness == ("S",)
    assert report.comb_witness == (("S",), "S")
    assert classify(make("path", n=2)).cycle_witness is None

    two_cycle = Scheme("A", {"A": [("B", 1)], "B": [("A", 1), ("L", 1)], "L": []})
    assert classify(two_cycle).comb_witness == (("B", "A"), "B")


def test_degree_census(caterpillar):
    """
    The census does not depend on the root: the caterpillar and the caterpillar minus two leaves share it
    :return:
    """
    assert degree_census(caterpillar) == {1: OMEGA, 2: 1, 3: OMEGA}
    assert degree_census(make("caterpillar_minus", k=2)) == {1: OMEGA, 2: 1, 3: OMEGA}
    assert degree_census(make("caterpillar_minus", k=1)) == {1: OMEGA, 3: OMEGA}
    assert degree_census(make("star", k=3)) == {1: 3, 3: 1}
    assert max_degree(make("d_ary", d=2)) == 3


def test_acyclic_code():
    """
    Test the canonical codes of acyclic schemes
    :return:
    """
    assert acyclic_code(make("star", k=3)).text == "(()()())"
    assert acyclic_code(make("star", k=OMEGA)).text == "(()*w)"
    with pytest.raises(InfiniteUnfoldingError):
        acyclic_code(make("ray"))


def test_truncation_shape():
    """
    Equal shapes in one interner are isomorphic truncations
    :return:
    """
    interner = ShapeInterner()
    binary = make("d_ary", d=2)
    explicit = from_rooted_tree(complete_dary(2, 3))
    assert truncation_shape(binary, 3, interner) == truncation_shape(explicit, 3, interner)
    assert truncation_shape(binary, 4, interner) != truncation_shape(explicit, 4, interner)


def test_from_rooted_tree():
    """
    One state per vertex
    :return:
    """
    s = from_rooted_tree(cherry(), "cherry")
    assert s.states == ("v0", "v1", "v2")
    assert iso_rooted(materialize(s), cherry())


def test_branch_scheme(caterpillar):
    """
    The sub-scheme below a state
    :return:
    """
    assert branch_scheme(caterpillar, "L").states == ("L",)
    assert branch_scheme(caterpillar, "S") == caterpillar


@pytest.mark.parametrize(
    "text, steps",
    [(".", ()), ("", ()), ("S:0", (("S", 0),)), ("S:0/L:0", (("S", 0), ("L", 0)))],
)
def test_vertex_address_parse(text, steps):
    """
    Test the text form of the addresses
    :return:
    """
    address = VertexAddress.parse(text)
    assert address.steps == steps
    assert VertexAddress.parse(str(address)) == address


@pytest.mark.parametrize("text", ["S", "S:x", "S:0//L:0", "0S:1"])
def test_vertex_address_parse_errors(text):
    """
    Test the invalid addresses
    :return:
    """
    with pytest.raises(BadAddressError):
        VertexAddress.parse(text)


def test_reroot(caterpillar):
    """
    Rerooting the caterpillar at the second spine vertex
    :return:
    """
    assert reroot(caterpillar, VertexAddress()) == caterpillar

    rerooted = reroot(caterpillar, VertexAddress.parse("S:0"))
    expected = Scheme(
        "X",
        {"X": [("L", 1), ("S", 1), ("U", 1)], "U": [("L", 1)], "S": [("L", 1), ("S", 1)], "L": []},
    )
    assert isomorphic(rerooted, expected)


@pytest.mark.parametrize("address", ["X:0", "L:1", "L:0/L:0"], ids=["unknown-state", "copy", "below-a-leaf"])
def test_reroot_bad_address(caterpillar, address):
    """
    Test the addresses that do not exist
    :return:
    """
    with pytest.raises(BadAddressError):
        reroot(caterpillar, VertexAddress.parse(address))


@pytest.mark.parametrize(
    "s, address",
    [
        (make("caterpillar"), "S:0/S:0/L:0"),
        (make("d_ary", d=2), "D:1/D:0"),
        (make("star", k=OMEGA), "L:5"),
        (make("comb"), "Q0:0/T:0"),
    ],
    ids=["caterpillar", "binary", "infinite-star", "comb"],
)
def test_reroot_inverse(s, address):
    """
    Rerooting at the returned address gives the original tree back
    :return:
    """
    rerooted, back = reroot_with_return(s, VertexAddress.parse(address))
    assert len(back) == len(VertexAddress.parse(address))
    assert isomorphic(reroot(rerooted, back), s)


def addressed_vertex(s: Scheme, records, address: VertexAddress) -> int:
    """
    The index of the addressed vertex in a breadth-first unfolding
    :param s:
    :param records: unfold_typed(s, depth) for a depth reaching the address
    :param address:
    :return:
    """
    v = 0
    for target, copy_index in address:
        state = records[v][1]
        entry = next(i for i, (child, _) in enumerate(s.children[state]) if child == target)
        v = [u for u, (parent, _, _, index) in enumerate(records) if parent == v and index == entry][copy_index]
    return v


def ball_around(s: Scheme, address: VertexAddress, radius: int):
    """
    The vertices at distance <= radius of the addressed vertex, rooted there, cut from an explicit unfolding deep
    enough to hold all of them
    :param s:
    :param address:
    :param radius:
    :return:
    """
    depth = len(address) + radius
    records = unfold_typed(s, depth=depth)
    explicit = materialize_to_depth(s, depth)
    rerooted = root_at(to_unrooted(explicit), addressed_vertex(s, records, address))
    return materialize_to_depth(from_rooted_tree(rerooted), radius)


@pytest.mark.parametrize("address", [str(a) for a in addresses_up_to(make("d_ary", d=2), 4)])
def test_reroot_binary_against_explicit_tree(address):
    """
    The truncations of the rerooted binary tree up to depth 5 are the balls around the vertex in the explicit tree
    :return:
    """
    s = make("d_ary", d=2)
    a = VertexAddress.parse(address)
    rerooted = reroot(s, a)
    for radius in range(6):
        assert iso_rooted(materialize_to_depth(rerooted, radius), ball_around(s, a, radius))


def test_reroot_random_schemes_against_explicit_tree():
    """
    Same comparison over random schemes, at every address up to depth 2
    :return:
    """
    checked = 0
    for seed in range(40):
        s = random_scheme(3, max_mult=2, seed=seed)
        if unfolding_size(s, 7) > 5000:
            continue
        for a in addresses_up_to(s, 2):
            assert iso_rooted(materialize_to_depth(reroot(s, a), 5), ball_around(s, a, 5)), (seed, str(a))
        checked += 1
    assert checked >= 20


def test_addresses_up_to(caterpillar):
    """
    One address per entry path
    :return:
    """
    assert [str(a) for a in addresses_up_to(caterpillar, 2)] == [".", "L:0", "S:0", "S:0/L:0", "S:0/S:0"]


def test_local_iso_up_to(caterpillar):
    """
    First depth where the truncations differ
    :return:
    """
    assert local_iso_up_to(caterpillar, caterpillar, 5) is None
    assert local_iso_up_to(caterpillar, make("caterpillar_minus", k=2), 5) == 1
    assert local_iso_up_to(make("ray"), make("path", n=3), 5) == 3
