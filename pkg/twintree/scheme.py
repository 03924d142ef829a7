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
Schemes: finite presentations of possibly infinite rooted trees.

A scheme has finitely many states. Every state lists its children as (state, multiplicity) entries, the multiplicity
being a positive int or OMEGA. The unfolding starts with one vertex of the root state and gives every vertex of
state q, for each entry (q', m) of q, m children of state q'.
"""
import re
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx
from ansible.utils.display import Display

from twintree.errors import (
    BadAddressError,
    BadParamsError,
    InfiniteUnfoldingError,
    SchemeValidationError,
    UnfoldingTooLargeError,
)
from twintree.finite_tree import CanonicalCode, RootedFiniteTree
from twintree.utils import (
    OMEGA,
    Multiplicity,
    fresh_name,
    is_multiplicity,
    is_omega,
    mult_add,
    mult_dec,
    mult_sum,
)

display = Display()

Entry = Tuple[str, Multiplicity]


class Scheme:
    """
    A finite-state presentation of a rooted tree
    """

    def __init__(
        self,
        root: str,
        children: Mapping[str, Iterable[Entry]],
        name: str = "scheme",
    ):
        """

        :param root: The state of the root vertex
        :param children: The child entries of every state. Stored sorted by target name, duplicates are kept so that
        the validation can report them.
        :param name: The name used in the DSL and the certificates
        """
        self.root = root
        self.name = name
        self.children: Dict[str, Tuple[Entry, ...]] = {
            state: tuple(sorted(entries, key=lambda entry: entry[0]))
            for state, entries in sorted(children.items())
        }

    @property
    def states(self) -> Tuple[str, ...]:
        return tuple(self.children)

    def entries(self, state: str) -> Tuple[Entry, ...]:
        return self.children[state]

    def total_children(self, state: str) -> Multiplicity:
        return mult_sum(m for _, m in self.children[state])

    def graph(self) -> nx.DiGraph:
        """
        The state graph: one edge per child entry whose target is declared
        :return:
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(self.children)
        for state, entries in self.children.items():
            for target, _ in entries:
                if target in self.children:
                    graph.add_edge(state, target)
        return graph

    def reachable_states(self) -> Set[str]:
        if self.root not in self.children:
            return set()
        return {self.root} | nx.descendants(self.graph(), self.root)

    def has_omega(self) -> bool:
        return any(
            is_omega(m)
            for state in self.reachable_states()
            for _, m in self.children[state]
        )

    def renamed(self, name: str) -> "Scheme":
        return Scheme(self.root, self.children, name)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Scheme)
            and self.root == other.root
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return hash((self.root, tuple(self.children.items())))

    def __repr__(self) -> str:
        return f"Scheme(name='{self.name}', root='{self.root}', states={len(self.children)})"


class VertexAddress:
    """
    A vertex of the unfolding, as the (child state, copy index) steps leading to it from the root
    """

    _STEP = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*):(\d+)$")

    def __init__(self, steps: Iterable[Tuple[str, int]] = ()):
        self.steps: Tuple[Tuple[str, int], ...] = tuple(
            (str(state), int(index)) for state, index in steps
        )

    @staticmethod
    def parse(text: str) -> "VertexAddress":
        """
        Read the text form "S:0/L:0". The root is ".".
        :param text:
        :return:
        """
        text = text.strip()
        if text in (".", ""):
            return VertexAddress()
        steps = []
        for part in text.split("/"):
            match = VertexAddress._STEP.match(part)
            if match is None:
                raise BadAddressError(f"Invalid address step '{part}' in '{text}'")
            steps.append((match.group(1), int(match.group(2))))
        return VertexAddress(steps)

    def child(self, state: str, index: int = 0) -> "VertexAddress":
        return VertexAddress(self.steps + ((state, index),))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __str__(self) -> str:
        if not self.steps:
            return "."
        return "/".join(f"{state}:{index}" for state, index in self.steps)

    def __repr__(self) -> str:
        return f"VertexAddress('{self}')"

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexAddress) and self.steps == other.steps

    def __hash__(self) -> int:
        return hash(self.steps)


class ClassificationReport:
    """
    Structural flags of the unfolding of a scheme, with the state-level witnesses
    """

    def __init__(
        self,
        finite: bool,
        locally_finite: bool,
        rayless: bool,
        contains_comb: bool,
        cycle_witness: Optional[Tuple[str, ...]] = None,
        comb_witness: Optional[Tuple[Tuple[str, ...], str]] = None,
    ):
        self.finite = finite
        self.locally_finite = locally_finite
        self.rayless = rayless
        self.contains_comb = contains_comb
        self.nearly_finite = locally_finite and not contains_comb
        self.cycle_witness = cycle_witness
        self.comb_witness = comb_witness

    def flags(self) -> Dict[str, bool]:
        return {
            "finite": self.finite,
            "locally_finite": self.locally_finite,
            "rayless": self.rayless,
            "contains_comb": self.contains_comb,
            "nearly_finite": self.nearly_finite,
        }

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ClassificationReport)
            and self.flags() == other.flags()
            and self.cycle_witness == other.cycle_witness
            and self.comb_witness == other.comb_witness
        )

    def __repr__(self) -> str:
        flags = ", ".join(f"{key}={value}" for key, value in self.flags().items())
        return f"ClassificationReport({flags})"


def diagnose(s: Scheme) -> Optional[str]:
    """
    Name the first violated scheme invariant
    :param s:
    :return: None when the scheme is valid
    """
    if not s.children:
        return "The scheme has no state"
    if s.root not in s.children:
        return f"The root state '{s.root}' is not declared"
    for state, entries in s.children.items():
        seen = set()
        for target, multiplicity in entries:
            if target not in s.children:
                return f"State '{state}' has a child '{target}' which is not declared"
            if not is_multiplicity(multiplicity):
                return f"State '{state}' has an invalid multiplicity {multiplicity} for '{target}'"
            if target in seen:
                return f"State '{state}' lists the child '{target}' more than once"
            seen.add(target)
    unreachable = sorted(set(s.children) - s.reachable_states())
    if unreachable:
        return f"The state '{unreachable[0]}' is not reachable from the root '{s.root}'"
    return None


def validate(s: Scheme) -> bool:
    problem = diagnose(s)
    if problem is not None:
        display.vvv(f"Scheme '{s.name}' is invalid: {problem}")
    return problem is None


def ensure_valid(s: Scheme) -> Scheme:
    problem = diagnose(s)
    if problem is not None:
        raise SchemeValidationError(f"Invalid scheme '{s.name}': {problem}")
    return s


def prune(s: Scheme, name: Optional[str] = None) -> Scheme:
    """
    Drop the states the root cannot reach
    :param s:
    :param name:
    :return:
    """
    reachable = s.reachable_states()
    return Scheme(
        s.root,
        {state: entries for state, entries in s.children.items() if state in reachable},
        name or s.name,
    )


def truncate(s: Scheme, n: int) -> Scheme:
    """
    The acyclic scheme of the depth-n truncation. State "<q>_<k>" is a vertex of state q with k levels left below it.
    :param s:
    :param n:
    :return:
    """
    if n < 0:
        raise BadParamsError(f"The truncation depth must be >= 0, got {n}")
    children: Dict[str, List[Entry]] = {}
    pending = [(s.root, n)]
    while pending:
        state, left = pending.pop()
        name = f"{state}_{left}"
        if name in children:
            continue
        if left == 0:
            children[name] = []
            continue
        children[name] = [(f"{target}_{left - 1}", m) for target, m in s.children[state]]
        pending.extend((target, left - 1) for target, _ in s.children[state])
    return Scheme(f"{s.root}_{n}", children, f"{s.name}_{n}")


def cycle_states(s: Scheme) -> Set[str]:
    """
    The reachable states lying on a cycle of the state graph
    :param s:
    :return:
    """
    graph = s.graph().subgraph(s.reachable_states())
    on_cycle = set()
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            on_cycle |= component
        else:
            (state,) = component
            if graph.has_edge(state, state):
                on_cycle.add(state)
    return on_cycle


def _cycle_through(s: Scheme, state: str) -> Tuple[str, ...]:
    graph = s.graph()
    best: Optional[List[str]] = None
    for successor in sorted(graph.successors(state)):
        if successor == state:
            return (state,)
        if nx.has_path(graph, successor, state):
            path = nx.shortest_path(graph, successor, state)
            if best is None or len(path) < len(best):
                best = path
    return (state,) + tuple(best[:-1])


def classify(s: Scheme) -> ClassificationReport:
    """
    Decide the structural flags of the unfolding. A comb exists iff a reachable cycle goes through a state with at
    least two children in total: every pass along the cycle leaves a disjoint tooth.
    :param s:
    :return:
    """
    reachable = s.reachable_states()
    on_cycle = cycle_states(s)
    locally_finite = not s.has_omega()
    rayless = not on_cycle
    comb_states = sorted(q for q in on_cycle if s.total_children(q) >= 2)

    cycle_witness = None
    comb_witness = None
    if on_cycle:
        cycle_witness = _cycle_through(s, min(on_cycle))
    if comb_states:
        comb_witness = (_cycle_through(s, comb_states[0]), comb_states[0])

    report = ClassificationReport(
        finite=rayless and locally_finite,
        locally_finite=locally_finite,
        rayless=rayless,
        contains_comb=bool(comb_states),
        cycle_witness=cycle_witness,
        comb_witness=comb_witness,
    )
    display.vv(f"Classified '{s.name}' ({len(reachable)} states): {report}")
    return report


def unfold_typed(
    s: Scheme, depth: Optional[int] = None, limit: Optional[int] = None
) -> List[Tuple[Optional[int], str, int, int]]:
    """
    Breadth-first unfolding with the type of every vertex
    :param s:
    :param depth: Stop at this depth. Without depth, the unfolding must be finite.
    :param limit: Raise UnfoldingTooLargeError beyond this number of vertices
    :return: One (parent, state, depth, entry index) record per vertex, in breadth-first order
    """
    if depth is None and cycle_states(s):
        raise InfiniteUnfoldingError(f"The unfolding of '{s.name}' contains a ray")
    records: List[Tuple[Optional[int], str, int, int]] = [(None, s.root, 0, -1)]
    for v, (_, state, level, _) in enumerate(records):
        if depth is not None and level >= depth:
            continue
        for index, (target, multiplicity) in enumerate(s.children[state]):
            if is_omega(multiplicity):
                raise InfiniteUnfoldingError(
                    f"State '{state}' of '{s.name}' has infinitely many children '{target}'"
                )
            for _ in range(int(multiplicity)):
                records.append((v, target, level + 1, index))
            if limit is not None and len(records) > limit:
                raise UnfoldingTooLargeError(
                    f"The unfolding of '{s.name}' has more than {limit} vertices"
                )
    return records


def materialize(s: Scheme, limit: Optional[int] = None) -> RootedFiniteTree:
    """
    The explicit unfolding of a finite scheme: breadth-first vertex order, children in stored order
    :param s:
    :param limit:
    :return:
    """
    if s.has_omega():
        raise InfiniteUnfoldingError(
            f"The unfolding of '{s.name}' has a vertex of infinite degree"
        )
    size = unfolding_size(s)
    if is_omega(size):
        raise InfiniteUnfoldingError(f"The unfolding of '{s.name}' contains a ray")
    if limit is not None and size > limit:
        raise UnfoldingTooLargeError(
            f"The unfolding of '{s.name}' has {size} vertices, the limit is {limit}"
        )
    return RootedFiniteTree([parent for parent, _, _, _ in unfold_typed(s)])


def materialize_to_depth(
    s: Scheme, depth: int, limit: Optional[int] = None
) -> RootedFiniteTree:
    """
    The depth-limited unfolding, isomorphic to materialize(truncate(s, depth))
    :param s:
    :param depth:
    :param limit:
    :return:
    """
    return RootedFiniteTree(
        [parent for parent, _, _, _ in unfold_typed(s, depth=depth, limit=limit)]
    )


def level_profile(s: Scheme, depth: int) -> List[Dict[str, Multiplicity]]:
    """
    Number of vertices of every state on every level 0..depth
    :param s:
    :param depth:
    :return:
    """
    levels = [{s.root: 1}]
    for _ in range(depth):
        following: Dict[str, Multiplicity] = {}
        for state, count in sorted(levels[-1].items()):
            for target, multiplicity in s.children[state]:
                following[target] = mult_add(
                    following.get(target, 0), count * multiplicity
                )
        levels.append(following)
    return levels


def unfolding_size(s: Scheme, depth: Optional[int] = None) -> Multiplicity:
    """
    Number of vertices of the unfolding, or of its truncation at the given depth
    :param s:
    :param depth:
    :return:
    """
    if depth is not None:
        return mult_sum(
            count for level in level_profile(s, depth) for count in level.values()
        )
    if cycle_states(s) or s.has_omega():
        return OMEGA
    sizes: Dict[str, Multiplicity] = {}
    for state in reversed(list(nx.topological_sort(s.graph().subgraph(s.reachable_states())))):
        sizes[state] = mult_add(
            1, *(m * sizes[target] for target, m in s.children[state])
        )
    return sizes[s.root]


def branching_vertex_count(s: Scheme, depth: int) -> Multiplicity:
    """
    Vertices of degree >= 3 in the truncation at the given depth. The deepest level only has leaves.
    :param s:
    :param depth:
    :return:
    """
    total: Multiplicity = 0
    for level, counts in enumerate(level_profile(s, depth)[:depth]):
        for state, count in counts.items():
            degree = mult_add(s.total_children(state), 0 if level == 0 else 1)
            if degree >= 3:
                total = mult_add(total, count)
    return total


def state_counts(s: Scheme) -> Dict[str, Multiplicity]:
    """
    Number of vertices of every state in the whole unfolding
    :param s:
    :return:
    """
    reachable = s.reachable_states()
    graph = s.graph().subgraph(reachable)
    sources = set(cycle_states(s))
    for state in reachable:
        sources |= {t for t, m in s.children[state] if is_omega(m)}
    infinite = set()
    if sources:
        infinite = set(nx.multi_source_dijkstra_path_length(graph, sources))

    counts: Dict[str, Multiplicity] = {state: OMEGA for state in infinite}
    finite_states = list(
        nx.topological_sort(graph.subgraph(q for q in reachable if q not in infinite))
    )
    for state in finite_states:
        counts[state] = 1 if state == s.root else 0
    for state in finite_states:
        for target, m in s.children[state]:
            if target not in infinite:
                counts[target] = mult_add(counts[target], counts[state] * m)
    return counts


def degree_census(s: Scheme) -> Dict[Multiplicity, Multiplicity]:
    """
    Number of vertices of each degree in the unfolding. Does not depend on the choice of the root.
    :param s:
    :return:
    """
    census: Dict[Multiplicity, Multiplicity] = {}

    def add(degree: Multiplicity, count: Multiplicity):
        if count:
            census[degree] = mult_add(census.get(degree, 0), count)

    for state, count in state_counts(s).items():
        total = s.total_children(state)
        if state == s.root:
            add(total, 1)
            count = mult_dec(count)
        add(mult_add(total, 1), count)
    return dict(sorted(census.items()))


def max_degree(s: Scheme) -> Multiplicity:
    return max(degree_census(s))


def acyclic_code(s: Scheme) -> CanonicalCode:
    """
    The canonical code of the unfolding of an acyclic scheme, omega groups included
    :param s:
    :return:
    """
    if cycle_states(s):
        raise InfiniteUnfoldingError(f"The unfolding of '{s.name}' contains a ray")
    codes: Dict[str, CanonicalCode] = {}
    for state in reversed(list(nx.topological_sort(s.graph().subgraph(s.reachable_states())))):
        codes[state] = CanonicalCode((codes[t], m) for t, m in s.children[state])
    return codes[s.root]


class ShapeInterner:
    """
    Hash-consing of rooted shapes: one integer per distinct canonical code, without building the code text
    """

    def __init__(self):
        self._ids: Dict[Tuple[Tuple[int, Multiplicity], ...], int] = {}

    def intern(self, groups: Iterable[Tuple[int, Multiplicity]]) -> int:
        merged: Dict[int, Multiplicity] = {}
        for shape, m in groups:
            merged[shape] = mult_add(merged.get(shape, 0), m)
        return self._ids.setdefault(tuple(sorted(merged.items())), len(self._ids))


def truncation_shape(s: Scheme, n: int, interner: ShapeInterner) -> int:
    """
    The interned shape of the truncation at depth n. Two truncations are isomorphic iff their shapes are equal in the
    same interner.
    :param s:
    :param n:
    :param interner:
    :return:
    """
    reachable = sorted(s.reachable_states())
    leaf = interner.intern(())
    shapes = {state: leaf for state in reachable}
    for _ in range(n):
        shapes = {
            state: interner.intern((shapes[t], m) for t, m in s.children[state])
            for state in reachable
        }
    return shapes[s.root]


def from_rooted_tree(t: RootedFiniteTree, name: str = "tree") -> Scheme:
    """
    One state per vertex
    :param t:
    :param name:
    :return:
    """
    return Scheme(
        f"v{t.root}",
        {f"v{v}": [(f"v{c}", 1) for c in t.children[v]] for v in range(t.n)},
        name,
    )


def branch_scheme(s: Scheme, state: str) -> Scheme:
    """
    The sub-scheme whose unfolding is the subtree below a vertex of the given state
    :param s:
    :param state:
    :return:
    """
    return prune(Scheme(state, s.children, f"{s.name}_{state}"))


def resolve(s: Scheme, address: VertexAddress) -> List[Tuple[str, int]]:
    """
    Follow an address in the unfolding
    :param s:
    :param address:
    :return: The (state, entry index) of every vertex on the path, the root having entry index -1
    """
    path = [(s.root, -1)]
    for target, copy_index in address:
        state = path[-1][0]
        found = [
            (index, m)
            for index, (child, m) in enumerate(s.children[state])
            if child == target
        ]
        if not found:
            raise BadAddressError(
                f"State '{state}' has no child '{target}' in '{s.name}' (address {address})"
            )
        index, multiplicity = found[0]
        if copy_index < 0 or (not is_omega(multiplicity) and copy_index >= multiplicity):
            raise BadAddressError(
                f"Copy {copy_index} of '{target}' does not exist under '{state}' (address {address})"
            )
        path.append((target, index))
    return path


def reroot_with_return(
    s: Scheme, address: VertexAddress
) -> Tuple[Scheme, VertexAddress]:
    """
    Reroot the unfolding at the addressed vertex.
    Every ancestor of that vertex becomes a context state: its own entries, minus the copy leading down the address,
    plus its parent context as one more child.
    :param s:
    :param address:
    :return: The rerooted scheme and the address of the former root in it
    """
    path = resolve(s, address)
    if len(path) == 1:
        return s, VertexAddress()

    taken = set(s.children)
    children: Dict[str, List[Entry]] = {
        state: list(entries) for state, entries in s.children.items()
    }
    contexts: List[str] = []
    for position, (state, _) in enumerate(path[:-1]):
        context = fresh_name(f"up{position}_{state}", taken)
        taken.add(context)
        down_index = path[position + 1][1]
        entries: List[Entry] = []
        for index, (target, multiplicity) in enumerate(s.children[state]):
            if index == down_index:
                multiplicity = mult_dec(multiplicity)
                if multiplicity == 0:
                    continue
            entries.append((target, multiplicity))
        if contexts:
            entries.append((contexts[-1], 1))
        children[context] = entries
        contexts.append(context)

    new_root = fresh_name(f"at_{path[-1][0]}", taken)
    children[new_root] = list(s.children[path[-1][0]]) + [(contexts[-1], 1)]
    rerooted = prune(Scheme(new_root, children, f"{s.name}_at"))
    back = VertexAddress((context, 0) for context in reversed(contexts))
    display.vvv(f"Rerooted '{s.name}' at {address}: {len(rerooted.states)} states")
    return rerooted, back


def reroot(s: Scheme, address: VertexAddress) -> Scheme:
    return reroot_with_return(s, address)[0]


def addresses_up_to(s: Scheme, depth: int) -> List[VertexAddress]:
    """
    One address per path of child entries up to the given depth, always through the copy 0. Other copies root
    isomorphic trees.
    :param s:
    :param depth:
    :return: Sorted by length, then by text
    """
    found = [(VertexAddress(), s.root)]
    frontier = list(found)
    for _ in range(depth):
        following = []
        for address, state in frontier:
            for target, _ in s.children[state]:
                following.append((address.child(target, 0), target))
        found.extend(following)
        frontier = following
    return sorted((address for address, _ in found), key=lambda a: (len(a), str(a)))


def local_iso_up_to(a: Scheme, b: Scheme, n: int) -> Optional[int]:
    """
    The first depth <= n where the truncations of a and b are not isomorphic
    :param a:
    :param b:
    :param n:
    :return: None when all the truncations up to n are isomorphic
    """
    # decide builds on this module
    from twintree.decide import Verdict, scheme_iso_rooted

    for depth in range(n + 1):
        certificate = scheme_iso_rooted(truncate(a, depth), truncate(b, depth))
        if certificate.verdict != Verdict.YES:
            display.vv(f"'{a.name}' and '{b.name}' differ at depth {depth}")
            return depth
    return None
