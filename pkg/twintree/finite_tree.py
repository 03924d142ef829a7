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
import itertools
from collections import deque
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
from ansible.utils.display import Display

from twintree.errors import (
    CapExceededError,
    InvalidTreeError,
    LastVertexError,
    NotALeafError,
)
from twintree.matching import lowest_index_matching, saturating_matching_exists
from twintree.utils import Multiplicity, format_multiplicity, is_omega, mult_add

display = Display()


class RootedFiniteTree:
    """
    An explicit finite tree with a distinguished root, given by its parent array
    """

    def __init__(self, parent: Sequence[Optional[int]], root: Optional[int] = None):
        """

        :param parent: parent[v] is the parent of v, None for the root
        :param root: The expected root. Checked against the parent array when given.
        """
        self.parent: Tuple[Optional[int], ...] = tuple(
            None if p is None else int(p) for p in parent
        )
        self.n = len(self.parent)
        if self.n == 0:
            raise InvalidTreeError("A tree needs at least one vertex")

        roots = [v for v, p in enumerate(self.parent) if p is None]
        if len(roots) != 1:
            raise InvalidTreeError(
                f"Exactly one vertex must have no parent, found {len(roots)}"
            )
        if root is not None and root != roots[0]:
            raise InvalidTreeError(
                f"The root {root} does not match the parentless vertex {roots[0]}"
            )
        self.root: int = roots[0]

        children: List[List[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p is None:
                continue
            if not 0 <= p < self.n or p == v:
                raise InvalidTreeError(f"Vertex {v} has an invalid parent {p}")
            children[p].append(v)
        self.children: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(sorted(c)) for c in children
        )

        # Breadth first from the root. Every vertex missed sits on a parent cycle.
        order = [self.root]
        depth = [0] * self.n
        for v in order:
            for c in self.children[v]:
                depth[c] = depth[v] + 1
                order.append(c)
        if len(order) != self.n:
            raise InvalidTreeError(
                "The parent links contain a cycle: some vertices do not reach the root"
            )
        self.order: Tuple[int, ...] = tuple(order)
        self.depth: Tuple[int, ...] = tuple(depth)

    @property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        """
        The (parent, child) pairs, by child index
        :return:
        """
        return tuple((p, v) for v, p in enumerate(self.parent) if p is not None)

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (0 if v == self.root else 1)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedFiniteTree) and self.parent == other.parent

    def __hash__(self) -> int:
        return hash(self.parent)

    def __repr__(self) -> str:
        return f"RootedFiniteTree(n={self.n}, root={self.root})"


class FiniteTree:
    """
    An explicit finite unrooted tree
    """

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]]):
        edges = [(int(u), int(v)) for u, v in edges]
        if n < 1:
            raise InvalidTreeError("A tree needs at least one vertex")
        if len(edges) != n - 1:
            raise InvalidTreeError(
                f"A tree on {n} vertices has {n - 1} edges, got {len(edges)}"
            )
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise InvalidTreeError(f"Invalid edge ({u},{v}) on {n} vertices")

        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(edges)
        if not nx.is_tree(graph):
            raise InvalidTreeError("The edges do not form a tree")

        self.n = n
        self.edges: Tuple[Tuple[int, int], ...] = tuple(
            sorted((min(u, v), max(u, v)) for u, v in edges)
        )
        self.adjacency: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(sorted(graph.neighbors(v))) for v in range(n)
        )

    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def leaves(self) -> List[int]:
        return [v for v in range(self.n) if self.degree(v) == 1]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteTree)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"FiniteTree(n={self.n}, edges={len(self.edges)})"


AnyTree = Union[RootedFiniteTree, FiniteTree]


class CanonicalCode:
    """
    The AHU code of a rooted tree. Children with identical sub-codes are grouped with a multiplicity in N u {w}.
    Finite groups are written out, omega groups are written "<sub>*w".
    """

    __slots__ = ("groups", "text")

    def __init__(self, groups: Iterable[Tuple["CanonicalCode", Multiplicity]] = ()):
        merged: Dict[str, List] = {}
        for code, count in groups:
            if code.text in merged:
                merged[code.text][1] = mult_add(merged[code.text][1], count)
            else:
                merged[code.text] = [code, count]

        self.groups: Tuple[Tuple[CanonicalCode, Multiplicity], ...] = tuple(
            (code, count) for _, (code, count) in sorted(merged.items())
        )
        parts = []
        for code, count in self.groups:
            if is_omega(count):
                parts.append(f"{code.text}*{format_multiplicity(count)}")
            else:
                parts.append(code.text * int(count))
        self.text = "(" + "".join(parts) + ")"

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"CanonicalCode('{self.text}')"

    def __eq__(self, other) -> bool:
        return isinstance(other, CanonicalCode) and self.text == other.text

    def __lt__(self, other: "CanonicalCode") -> bool:
        return self.text < other.text

    def __hash__(self) -> int:
        return hash(self.text)


class VertexMap:
    """
    An injective partial function between the vertices of two trees
    """

    def __init__(self, mapping: Dict[int, int]):
        self._pairs: Tuple[Tuple[int, int], ...] = tuple(sorted(mapping.items()))
        self._mapping = dict(self._pairs)

    def __getitem__(self, v: int) -> int:
        return self._mapping[v]

    def __contains__(self, v: int) -> bool:
        return v in self._mapping

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self) -> Iterator[int]:
        return iter(self._mapping)

    def items(self) -> Tuple[Tuple[int, int], ...]:
        return self._pairs

    def image(self) -> List[int]:
        return sorted(self._mapping.values())

    def is_injective(self) -> bool:
        return len(set(self._mapping.values())) == len(self._mapping)

    def preserves_edges(self, source: AnyTree, target: AnyTree) -> bool:
        """
        Every source edge with both ends mapped goes to a target edge
        :param source:
        :param target:
        :return:
        """
        target_edges = {frozenset(edge) for edge in target.edges}
        for u, v in source.edges:
            if u in self._mapping and v in self._mapping:
                if frozenset((self._mapping[u], self._mapping[v])) not in target_edges:
                    return False
        return True

    def preserves_depth(
        self, source: RootedFiniteTree, target: RootedFiniteTree
    ) -> bool:
        return all(
            source.depth[v] == target.depth[x] for v, x in self._pairs
        )

    def is_embedding(self, source: AnyTree, target: AnyTree) -> bool:
        return (
            len(self) == source.n
            and self.is_injective()
            and self.preserves_edges(source, target)
        )

    def is_bijective(self, n_target: int) -> bool:
        return self.is_injective() and self.image() == list(range(n_target))

    def to_dict(self) -> Dict[int, int]:
        return dict(self._pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexMap) and self._pairs == other._pairs

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __repr__(self) -> str:
        return f"VertexMap({dict(self._pairs)})"


def subtree(t: RootedFiniteTree, v: int) -> RootedFiniteTree:
    """
    The tree spanned by v and its descendants, rooted at v. Surviving indices keep their relative order.
    :param t:
    :param v:
    :return:
    """
    spanned = [v]
    for u in spanned:
        spanned.extend(t.children[u])
    keep = sorted(spanned)
    index = {u: i for i, u in enumerate(keep)}
    parent = [None if u == v else index[t.parent[u]] for u in keep]
    return RootedFiniteTree(parent, root=index[v])


def branches(t: RootedFiniteTree) -> List[RootedFiniteTree]:
    """
    One rooted tree per neighbour of the root, spanning the component of that neighbour once the root edge is cut
    :param t:
    :return:
    """
    return [subtree(t, c) for c in t.children[t.root]]


def depths(t: RootedFiniteTree) -> Tuple[int, ...]:
    return t.depth


def height(t: RootedFiniteTree) -> int:
    return max(t.depth)


def to_unrooted(t: RootedFiniteTree) -> FiniteTree:
    return FiniteTree(t.n, t.edges)


def root_at(f: FiniteTree, v: int) -> RootedFiniteTree:
    """
    Root an unrooted tree at the vertex v, keeping the vertex indices
    :param f:
    :param v:
    :return:
    """
    parent: List[Optional[int]] = [None] * f.n
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in f.adjacency[u]:
            if w not in seen:
                seen.add(w)
                parent[w] = u
                queue.append(w)
    return RootedFiniteTree(parent, root=v)


def centers(f: FiniteTree) -> List[int]:
    """
    The one or two centers of the tree, by peeling the leaves layer after layer
    :param f:
    :return:
    """
    if f.n <= 2:
        return list(range(f.n))
    degree = [f.degree(v) for v in range(f.n)]
    layer = [v for v in range(f.n) if degree[v] == 1]
    remaining = f.n
    while remaining > 2:
        remaining -= len(layer)
        next_layer = []
        for leaf in layer:
            for w in f.adjacency[leaf]:
                degree[w] -= 1
                if degree[w] == 1:
                    next_layer.append(w)
        layer = next_layer
    return sorted(layer)


def subtree_codes(t: RootedFiniteTree) -> List[CanonicalCode]:
    """
    The canonical code of the subtree below every vertex, computed bottom-up
    :param t:
    :return:
    """
    codes: List[Optional[CanonicalCode]] = [None] * t.n
    for v in reversed(t.order):
        codes[v] = CanonicalCode((codes[c], 1) for c in t.children[v])
    return codes


def ahu_code(t: RootedFiniteTree) -> CanonicalCode:
    return subtree_codes(t)[t.root]


def iso_rooted(t1: RootedFiniteTree, t2: RootedFiniteTree) -> bool:
    return t1.n == t2.n and ahu_code(t1) == ahu_code(t2)


def unrooted_code(f: FiniteTree) -> CanonicalCode:
    """
    The smallest code among the rootings at a center
    :param f:
    :return:
    """
    return min(ahu_code(root_at(f, c)) for c in centers(f))


def iso_unrooted(t1: FiniteTree, t2: FiniteTree) -> bool:
    return t1.n == t2.n and unrooted_code(t1) == unrooted_code(t2)


class _EmbeddingTable:
    """
    For every pair (source code class, target code class), whether the source subtree embeds into the target subtree
    with roots preserved. Filled bottom-up by height: a pair is feasible when the source children inject into the
    target children through feasible pairs.
    """

    def __init__(self, s: RootedFiniteTree, t: RootedFiniteTree):
        s_codes = subtree_codes(s)
        t_codes = subtree_codes(t)
        class_ids: Dict[str, int] = {}
        for code in itertools.chain(s_codes, t_codes):
            class_ids.setdefault(code.text, len(class_ids))
        self.s_class = [class_ids[code.text] for code in s_codes]
        self.t_class = [class_ids[code.text] for code in t_codes]

        by_class: Dict[int, CanonicalCode] = {}
        for code in itertools.chain(s_codes, t_codes):
            by_class[class_ids[code.text]] = code
        self._children: Dict[int, List[int]] = {
            cid: [
                class_ids[sub.text]
                for sub, count in code.groups
                for _ in range(int(count))
            ]
            for cid, code in by_class.items()
        }
        self._height: Dict[int, int] = {}
        for cid in sorted(by_class, key=lambda c: len(by_class[c].text)):
            kids = self._children[cid]
            self._height[cid] = 1 + max((self._height[k] for k in kids), default=-1)

        self._feasible: Dict[Tuple[int, int], bool] = {}
        source_classes = sorted(set(self.s_class), key=lambda c: self._height[c])
        target_classes = sorted(set(self.t_class), key=lambda c: self._height[c])
        for a in source_classes:
            for b in target_classes:
                self._feasible[(a, b)] = self._decide(a, b)

    def _decide(self, a: int, b: int) -> bool:
        source_kids = self._children[a]
        target_kids = self._children[b]
        if self._height[a] > self._height[b] or len(source_kids) > len(target_kids):
            return False
        return saturating_matching_exists(
            list(range(len(source_kids))),
            list(range(len(target_kids))),
            lambda i, j: self._feasible.get((source_kids[i], target_kids[j]), False),
        )

    def fits(self, u: int, x: int) -> bool:
        """
        Source vertex u can be sent to target vertex x
        :param u:
        :param x:
        :return:
        """
        return self._feasible.get((self.s_class[u], self.t_class[x]), False)


def embed_rooted(s: RootedFiniteTree, t: RootedFiniteTree) -> Optional[VertexMap]:
    """
    A root-preserving embedding of s into t, or None. Among the witnesses, every vertex takes the lowest target child
    that still lets its siblings be placed.
    :param s:
    :param t:
    :return:
    """
    if s.n > t.n:
        return None
    table = _EmbeddingTable(s, t)
    if not table.fits(s.root, t.root):
        display.vvv(f"No rooted embedding of {s} into {t}")
        return None

    mapping = {s.root: t.root}
    for u in s.order:
        matching = lowest_index_matching(
            list(s.children[u]), list(t.children[mapping[u]]), table.fits
        )
        mapping.update(matching)
    return VertexMap(mapping)


def embeds_rooted(s: RootedFiniteTree, t: RootedFiniteTree) -> bool:
    return s.n <= t.n and _EmbeddingTable(s, t).fits(s.root, t.root)


def embed_unrooted(s: FiniteTree, t: FiniteTree) -> Optional[VertexMap]:
    """
    An embedding of s into t: root s at vertex 0 and try every image of it
    :param s:
    :param t:
    :return:
    """
    if s.n > t.n:
        return None
    rooted_source = root_at(s, 0)
    for x in range(t.n):
        found = embed_rooted(rooted_source, root_at(t, x))
        if found is not None:
            return found
    return None


def enumerate_root_self_embeddings(t: RootedFiniteTree, cap: int) -> List[VertexMap]:
    """
    Every root-preserving embedding of t into itself
    :param t:
    :param cap: Raise CapExceededError as soon as more maps than this exist
    :return:
    """
    table = _EmbeddingTable(t, t)
    order = t.order[1:]
    images = {t.root: t.root}
    used = {t.root}
    found: List[VertexMap] = []

    def extend(position: int):
        if position == len(order):
            found.append(VertexMap(images))
            if len(found) > cap:
                raise CapExceededError(
                    f"{t} has more than {cap} root-preserving self-embeddings"
                )
            return
        v = order[position]
        for x in t.children[images[t.parent[v]]]:
            if x not in used and table.fits(v, x):
                images[v] = x
                used.add(x)
                extend(position + 1)
                used.discard(x)
                del images[v]

    extend(0)
    display.vvv(f"{len(found)} root-preserving self-embeddings of {t}")
    return found


def remove_leaf(t: FiniteTree, v: int) -> FiniteTree:
    """
    Delete the leaf v. The vertices above v shift down by one.
    :param t:
    :param v:
    :return:
    """
    if t.n == 1:
        raise LastVertexError("Cannot remove the last vertex of a tree")
    if not 0 <= v < t.n or t.degree(v) != 1:
        raise NotALeafError(f"Vertex {v} is not a leaf")

    def shifted(u: int) -> int:
        return u if u < v else u - 1

    return FiniteTree(
        t.n - 1, [(shifted(a), shifted(b)) for a, b in t.edges if v not in (a, b)]
    )


def count_branching_vertices(t: RootedFiniteTree) -> int:
    return sum(1 for v in range(t.n) if t.degree(v) >= 3)


def path_tree(n: int) -> RootedFiniteTree:
    """
    The path on n vertices rooted at an end
    :param n:
    :return:
    """
    return RootedFiniteTree([None] + list(range(n - 1)))


def star(k: int) -> RootedFiniteTree:
    """
    A center with k leaves, rooted at the center
    :param k:
    :return:
    """
    return RootedFiniteTree([None] + [0] * k)


def cherry() -> RootedFiniteTree:
    return star(2)


def complete_dary(d: int, depth: int) -> RootedFiniteTree:
    parent: List[Optional[int]] = [None]
    level = [0]
    for _ in range(depth):
        next_level = []
        for v in level:
            for _ in range(d):
                parent.append(v)
                next_level.append(len(parent) - 1)
        level = next_level
    return RootedFiniteTree(parent)


def spider(legs: Sequence[int]) -> RootedFiniteTree:
    """
    Paths of the given lengths glued at the root
    :param legs:
    :return:
    """
    parent: List[Optional[int]] = [None]
    for length in legs:
        previous = 0
        for _ in range(length):
            parent.append(previous)
            previous = len(parent) - 1
    return RootedFiniteTree(parent)


@lru_cache(maxsize=None)
def _rooted_trees_by_size(n: int) -> Tuple[RootedFiniteTree, ...]:
    if n == 1:
        return (RootedFiniteTree([None]),)
    shapes: Dict[str, RootedFiniteTree] = {}
    for smaller in _rooted_trees_by_size(n - 1):
        for v in range(smaller.n):
            grown = RootedFiniteTree(list(smaller.parent) + [v])
            shapes.setdefault(ahu_code(grown).text, grown)
    return tuple(shapes[text] for text in sorted(shapes))


def all_rooted_trees(n: int) -> List[RootedFiniteTree]:
    """
    One representative per rooted tree shape on n vertices, grown leaf by leaf and deduplicated on canonical codes
    :param n:
    :return:
    """
    if n < 1:
        return []
    return list(_rooted_trees_by_size(n))


def all_free_trees(n: int) -> List[FiniteTree]:
    shapes: Dict[str, FiniteTree] = {}
    for t in all_rooted_trees(n):
        f = to_unrooted(t)
        shapes.setdefault(unrooted_code(f).text, f)
    return [shapes[text] for text in sorted(shapes)]


def brute_force_iso_rooted(t1: RootedFiniteTree, t2: RootedFiniteTree) -> bool:
    """
    Search a root-preserving bijection keeping every parent link. Only for small trees.
    :param t1:
    :param t2:
    :return:
    """
    if t1.n != t2.n:
        return False
    others1 = [v for v in range(t1.n) if v != t1.root]
    others2 = [v for v in range(t2.n) if v != t2.root]
    for permutation in itertools.permutations(others2):
        bijection = dict(zip(others1, permutation))
        bijection[t1.root] = t2.root
        if all(
            t2.parent[bijection[v]] == bijection[t1.parent[v]] for v in others1
        ):
            return True
    return False


def embeds_rooted_by_search(s: RootedFiniteTree, t: RootedFiniteTree) -> bool:
    """
    Decide root-preserving embeddability by backtracking over child assignments, memoized on the pair of sub-codes.
    Independent of the matching engine, used to cross-check it.
    :param s:
    :param t:
    :return:
    """
    s_codes = [code.text for code in subtree_codes(s)]
    t_codes = [code.text for code in subtree_codes(t)]
    s_sizes = [1] * s.n
    for v in reversed(s.order):
        if s.parent[v] is not None:
            s_sizes[s.parent[v]] += s_sizes[v]
    memo: Dict[Tuple[str, str], bool] = {}

    def fits(u: int, x: int) -> bool:
        key = (s_codes[u], t_codes[x])
        if key not in memo:
            sources = sorted(s.children[u], key=lambda c: -s_sizes[c])
            memo[key] = len(sources) <= len(t.children[x]) and assign(
                sources, t.children[x], set()
            )
        return memo[key]

    def assign(sources: List[int], targets: Sequence[int], used: set) -> bool:
        if not sources:
            return True
        u, rest = sources[0], sources[1:]
        tried = set()
        for x in targets:
            if x in used or t_codes[x] in tried:
                continue
            tried.add(t_codes[x])
            if fits(u, x):
                used.add(x)
                if assign(rest, targets, used):
                    return True
                used.discard(x)
        return False

    return fits(s.root, t.root)
