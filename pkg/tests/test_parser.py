import pytest

from twintree.errors import DslParseError, SchemeValidationError
from twintree.finite_tree import FiniteTree, RootedFiniteTree
from twintree.parser import DslParser, parse_document, parse_dsl
from twintree.scheme import Scheme
from twintree.utils import OMEGA
from tests import fixture


def read(name: str) -> str:
    with open(fixture(name)) as f:
        return f.read()


def test_parse_scheme_document(caterpillar):
    """
    Test the parsing of the caterpillar, comments included
    :return:
    """
    name, value = parse_document(read("cat.tree"), fixture("cat.tree"))
    assert name == "cat"
    assert isinstance(value, Scheme)
    assert value == caterpillar
    assert value.name == "cat"


@pytest.mark.parametrize(
    "document, state, entries",
    [
        ("binary.tree", "D", (("D", 2),)),
        ("omega.tree", "R", (("A", OMEGA),)),
        ("omega_leaf.tree", "R", (("A", OMEGA), ("L", 1))),
        ("cat_minus2.tree", "C0", (("C1", 1),)),
    ],
)
def test_parse_multiplicities(document, state, entries):
    """
    The multiplicity after "*" is an integer or w, 1 when omitted
    :return:
    """
    assert parse_dsl(read(document)).children[state] == entries


def test_parse_inline_scheme():
    scheme = parse_dsl("scheme s { root A; A -> [B * 3, C]; B -> []; C -> [A * w]; }")
    assert scheme.root == "A"
    assert scheme.children == {
        "A": (("B", 3), ("C", 1)),
        "B": (),
        "C": (("A", OMEGA),),
    }


@pytest.mark.parametrize(
    "document, root",
    [("p3.tree", 0), ("p3_center.tree", 1)],
)
def test_parse_rooted_tree(document, root):
    """
    A tree document with a root gives a rooted tree
    :return:
    """
    tree = parse_dsl(read(document))
    assert isinstance(tree, RootedFiniteTree)
    assert tree.n == 3
    assert tree.root == root


def test_parse_unrooted_tree():
    """
    Without root, the tree is unrooted. Commas between the edges are optional.
    :return:
    """
    tree = parse_dsl(read("free_p3.tree"))
    assert isinstance(tree, FiniteTree)
    assert tree.edges == ((0, 1), (1, 2))

    single = parse_dsl("tree one { edges ; }")
    assert isinstance(single, FiniteTree)
    assert single.n == 1


def test_parse_error_location():
    """
    The missing semicolon after the root is reported where the next token starts
    :return:
    """
    with pytest.raises(DslParseError) as e:
        DslParser(read("syntax_error.tree"), "syntax_error.tree").parse()
    assert e.value.line == 3
    assert "syntax_error.tree" in str(e.value)
    assert str(e.value).startswith("line 3, column")


def test_parse_undeclared_state():
    """
    Test the location of a child state that is not defined
    :return:
    """
    with pytest.raises(DslParseError) as e:
        parse_dsl(read("undeclared.tree"))
    assert (e.value.line, e.value.column) == (3, 9)
    assert "The state 'B' is not defined" in str(e.value)


@pytest.mark.parametrize(
    "text, message",
    [
        ("scheme s { root Z; A -> []; }", "The root state 'Z' is not defined"),
        ("scheme s { root A; A -> []; A -> [A]; }", "The state 'A' is defined twice"),
        ("scheme s { root A; A -> [B B]; B -> []; }", "Expected"),
        ("scheme s { root A; }", "Expected"),
        ("graph s { }", "Expected"),
    ],
    ids=["undefined-root", "defined-twice", "missing-comma", "no-rule", "unknown-document"],
)
def test_parse_errors(text, message):
    with pytest.raises(DslParseError, match=message):
        parse_dsl(text)


@pytest.mark.parametrize(
    "text, message",
    [
        ("scheme s { root A; A -> [B * 0]; B -> []; }", "invalid multiplicity"),
        ("scheme s { root A; A -> [B, B]; B -> []; }", "more than once"),
        ("tree t { edges (0,1) (1,2) (2,0); }", "invalid tree 't'"),
        ("tree t { edges (0,1) (2,3); root 0; }", "invalid tree 't'"),
    ],
    ids=["zero-multiplicity", "duplicate-child", "cycle", "forest"],
)
def test_parse_validation_errors(text, message):
    """
    Documents that parse but break the invariants
    :return:
    """
    with pytest.raises(SchemeValidationError, match=message):
        parse_dsl(text)


def test_parse_unreachable_state():
    with pytest.raises(SchemeValidationError, match="not reachable"):
        parse_dsl(read("unreachable.tree"))
