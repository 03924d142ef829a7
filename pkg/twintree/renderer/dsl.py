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
import re
from typing import Any, Optional

from twintree.finite_tree import FiniteTree, RootedFiniteTree
from twintree.renderer import Renderer
from twintree.scheme import Scheme
from twintree.utils import format_multiplicity


def document_name(name: str) -> str:
    """
    Make the name a valid DSL identifier
    :param name:
    :return:
    """
    name = re.sub(r"[^A-Za-z0-9_]", "_", name) or "_"
    return f"_{name}" if name[0].isdigit() else name


class DslRenderer(Renderer):
    """
    Render schemes and finite trees as .tree documents
    """

    def supports(self, value: Any) -> bool:
        return isinstance(value, (Scheme, RootedFiniteTree, FiniteTree))

    def render(self, value: Any, name: Optional[str] = None, **kwargs) -> str:
        if isinstance(value, Scheme):
            return self.render_scheme(value, name)
        return self.render_tree(value, name or "tree")

    @staticmethod
    def render_scheme(s: Scheme, name: Optional[str] = None) -> str:
        lines = [f"scheme {document_name(name or s.name)} {{", f"  root {s.root};"]
        for state, entries in s.children.items():
            items = [
                target if m == 1 else f"{target} * {format_multiplicity(m)}"
                for target, m in entries
            ]
            lines.append(f"  {state} -> [{', '.join(items)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def render_tree(t: Any, name: str) -> str:
        edges = " ".join(f"({u},{v})" for u, v in t.edges)
        lines = [f"tree {document_name(name)} {{", f"  edges {edges};"]
        if isinstance(t, RootedFiniteTree):
            lines.append(f"  root {t.root};")
        lines.append("}")
        return "\n".join(lines) + "\n"
