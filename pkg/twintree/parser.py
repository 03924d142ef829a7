# Copyright (C) 2024 The twintree authors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""
The DSL of the .tree documents:

    # the caterpillar
    scheme cat { root S; S -> [S, L]; L -> []; }
    tree p3 { edges (0,1) (1,2); root 0; }

A multiplicity follows the child with "*": "A * 3", "A * w" (countably many). Omitted, it is 1.
A tree document without root is an unrooted tree.
"""
from typing import Dict, List, Tuple, Union

import pyparsing
from ansible.utils.display import Display

from twintree.errors import DslParseError, SchemeValidationError, TwinTreeError
from twintree.finite_tree import FiniteTree, RootedFiniteTree, root_at
from twintree.scheme import Entry, Scheme, diagnose
from twintree.utils import OMEGA

display = Display()

ParsedValue = Union[Scheme, RootedFiniteTree, FiniteTree]


def _located(source: str, loc: int, tokens):
    return [(tokens[0], loc)]


def _build_dsl_parser() -> pyparsing.ParserElement:
    """
    Builds the pyparsing grammar of one document
    :return:
    """
    identifier = pyparsing.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
    integer = pyparsing.Word(pyparsing.nums).set_parse_action(lambda tokens: int(tokens[0]))
    omega = pyparsing.Keyword("w").set_parse_action(lambda: OMEGA)
    semicolon = pyparsing.Suppress(";")

    target = identifier.copy().set_parse_action(_located)
    entry = pyparsing.Group(
        target("target")
        + pyparsing.Optional(pyparsing.Suppress("*") + (integer | omega)("multiplicity"))
    )
    entries = pyparsing.Group(
        pyparsing.Suppress("[")
        + pyparsing.Optional(pyparsing.DelimitedList(entry))
        + pyparsing.Suppress("]")
    )
    head = identifier.copy().set_parse_action(_located)
    rule = pyparsing.Group(head("head") + pyparsing.Suppress("->") + entries("entries") + semicolon)
    scheme_document = (
        pyparsing.Keyword("scheme")("kind")
        + identifier("name")
        + pyparsing.Suppress("{")
        + pyparsing.Suppress(pyparsing.Keyword("root"))
        + identifier.copy().set_parse_action(_located)("root")
        + semicolon
        + pyparsing.Group(pyparsing.OneOrMore(rule))("rules")
        + pyparsing.Suppress("}")
    )

    edge = pyparsing.Group(
        pyparsing.Suppress("(")
        + integer
        + pyparsing.Suppress(",")
        + integer
        + pyparsing.Suppress(")")
    )
    tree_document = (
        pyparsing.Keyword("tree")("kind")
        + identifier("name")
        + pyparsing.Suppress("{")
        + pyparsing.Suppress(pyparsing.Keyword("edges"))
        + pyparsing.Group(pyparsing.ZeroOrMore(edge + pyparsing.Optional(pyparsing.Suppress(","))))("edges")
        + semicolon
        + pyparsing.Optional(pyparsing.Suppress(pyparsing.Keyword("root")) + integer("root") + semicolon)
        + pyparsing.Suppress("}")
    )

    document = (scheme_document | tree_document) + pyparsing.StringEnd()
    document.ignore(pyparsing.python_style_comment)
    return document


class DslParser:
    """
    Parser of the .tree documents
    """

    _grammar = None

    def __init__(self, text: str, source: str = "<string>"):
        """

        :param text: The document
        :param source: Where the document comes from, for the messages
        """
        self.text = text
        self.source = source

    @classmethod
    def grammar(cls) -> pyparsing.ParserElement:
        if cls._grammar is None:
            cls._grammar = _build_dsl_parser()
        return cls._grammar

    def _error(self, message: str, loc: int) -> DslParseError:
        return DslParseError(
            f"{self.source}: {message}",
            pyparsing.lineno(loc, self.text),
            pyparsing.col(loc, self.text),
        )

    def parse(self) -> Tuple[str, ParsedValue]:
        """
        Parse the document
        :return: The name of the document and the scheme or tree it describes
        """
        try:
            tokens = self.grammar().parse_string(self.text, parse_all=True)
        except pyparsing.ParseBaseException as e:
            raise DslParseError(f"{self.source}: {e.msg}", e.lineno, e.col) from e

        display.vvv(f"Parsed the {tokens['kind']} document '{tokens['name']}' from {self.source}")
        if tokens["kind"] == "scheme":
            return tokens["name"], self._scheme(tokens)
        return tokens["name"], self._tree(tokens)

    def _scheme(self, tokens) -> Scheme:
        children: Dict[str, List[Entry]] = {}
        for rule in tokens["rules"]:
            head, loc = rule["head"]
            if head in children:
                raise self._error(f"The state '{head}' is defined twice", loc)
            children[head] = [
                (item["target"][0], item.get("multiplicity", 1)) for item in rule["entries"]
            ]

        root, loc = tokens["root"]
        if root not in children:
            raise self._error(f"The root state '{root}' is not defined", loc)
        for rule in tokens["rules"]:
            for item in rule["entries"]:
                target, loc = item["target"]
                if target not in children:
                    raise self._error(f"The state '{target}' is not defined", loc)

        scheme = Scheme(root, children, tokens["name"])
        problem = diagnose(scheme)
        if problem is not None:
            raise SchemeValidationError(f"{self.source}: invalid scheme '{scheme.name}': {problem}")
        return scheme

    def _tree(self, tokens) -> Union[RootedFiniteTree, FiniteTree]:
        edges = [(u, v) for u, v in tokens["edges"]]
        vertices = [x for edge in edges for x in edge]
        if "root" in tokens:
            vertices.append(tokens["root"])
        n = max(vertices, default=0) + 1
        try:
            tree = FiniteTree(n, edges)
            if "root" in tokens:
                return root_at(tree, tokens["root"])
            return tree
        except TwinTreeError as e:
            raise SchemeValidationError(f"{self.source}: invalid tree '{tokens['name']}': {e.message}") from e


def parse_document(text: str, source: str = "<string>") -> Tuple[str, ParsedValue]:
    return DslParser(text, source).parse()


def parse_dsl(text: str) -> ParsedValue:
    """
    Parse a scheme or tree document
    :param text:
    :return: A Scheme, a RootedFiniteTree (tree document with a root) or a FiniteTree
    """
    return parse_document(text)[1]
