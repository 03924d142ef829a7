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
Assignment problems behind every embedding decision: injecting the children of a vertex into the children of its
image. Children come either one by one (explicit trees, bipartite matching) or grouped with capacities in N u {w}
(schemes, maximum flow).
"""
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from twintree.utils import Multiplicity, OMEGA, is_omega

Pair = Tuple[int, int]


def assignment_feasible(
    demands: Sequence[Multiplicity],
    capacities: Sequence[Multiplicity],
    allowed: Set[Pair],
) -> bool:
    """
    Decide whether every demand can be routed to allowed capacities without exceeding them.
    An omega demand needs an allowed omega capacity; omega capacities absorb any finite demand on top of that.
    :param demands: The child multiplicities of the source, by entry
    :param capacities: The child multiplicities of the target, by entry
    :param allowed: The (demand index, capacity index) pairs that may be used
    :return:
    """
    for i, demand in enumerate(demands):
        if is_omega(demand) and not any(
            (i, j) in allowed and is_omega(capacity)
            for j, capacity in enumerate(capacities)
        ):
            return False

    finite_total = sum(d for d in demands if not is_omega(d))
    if finite_total == 0:
        return True
    if finite_total > sum(min(c, finite_total) for c in capacities):
        return False
    finite_demands = [
        (i, d) for i, d in enumerate(demands) if not is_omega(d) and d > 0
    ]
    if len(finite_demands) == 1:
        i, demand = finite_demands[0]
        return (
            sum(
                min(capacity, demand)
                for j, capacity in enumerate(capacities)
                if (i, j) in allowed
            )
            >= demand
        )

    network = nx.DiGraph()
    network.add_node("sink")
    for i, demand in enumerate(demands):
        if is_omega(demand) or demand == 0:
            continue
        network.add_edge("source", ("demand", i), capacity=demand)
        for j in range(len(capacities)):
            if (i, j) in allowed:
                # no capacity attribute: unbounded
                network.add_edge(("demand", i), ("capacity", j))
    for j, capacity in enumerate(capacities):
        clamped = finite_total if is_omega(capacity) else capacity
        network.add_edge(("capacity", j), "sink", capacity=clamped)

    return nx.maximum_flow_value(network, "source", "sink") == finite_total


def lexicographic_assignment(
    demands: Sequence[Multiplicity],
    capacities: Sequence[Multiplicity],
    allowed: Set[Pair],
) -> Optional[List[Tuple[int, int, Multiplicity]]]:
    """
    The lexicographically smallest feasible assignment: demands in order, each one sending as much as possible to
    the lowest capacity index first. An omega demand goes entirely to its lowest allowed omega capacity.
    :param demands:
    :param capacities:
    :param allowed:
    :return: The list of (demand index, capacity index, amount) or None when infeasible
    """
    if not assignment_feasible(demands, capacities, allowed):
        return None

    remaining_demands = list(demands)
    remaining_capacities = list(capacities)
    open_pairs = set(allowed)
    result: List[Tuple[int, int, Multiplicity]] = []

    for i in range(len(demands)):
        if is_omega(remaining_demands[i]):
            j = min(
                j
                for j, capacity in enumerate(remaining_capacities)
                if (i, j) in open_pairs and is_omega(capacity)
            )
            result.append((i, j, OMEGA))
            remaining_demands[i] = 0
            continue

        for j in sorted(j for (d, j) in open_pairs if d == i):
            if remaining_demands[i] == 0:
                break
            upper = min(remaining_demands[i], remaining_capacities[j])
            open_pairs.discard((i, j))
            for amount in range(int(upper), -1, -1):
                trial_demands = list(remaining_demands)
                trial_capacities = list(remaining_capacities)
                trial_demands[i] -= amount
                if not is_omega(trial_capacities[j]):
                    trial_capacities[j] -= amount
                if assignment_feasible(trial_demands, trial_capacities, open_pairs):
                    break
            remaining_demands[i] -= amount
            if not is_omega(remaining_capacities[j]):
                remaining_capacities[j] -= amount
            if amount > 0:
                result.append((i, j, amount))

    return result


def saturating_matching_exists(
    left: Sequence[Hashable],
    right: Sequence[Hashable],
    allowed: Callable[[Hashable, Hashable], bool],
) -> bool:
    """
    True if every left item can be matched to a distinct allowed right item (Hopcroft-Karp)
    :param left:
    :param right:
    :param allowed:
    :return:
    """
    if not left:
        return True
    if len(left) > len(right):
        return False
    graph = nx.Graph()
    top_nodes = [("left", a) for a in left]
    graph.add_nodes_from(top_nodes)
    graph.add_nodes_from(("right", b) for b in right)
    for a in left:
        for b in right:
            if allowed(a, b):
                graph.add_edge(("left", a), ("right", b))
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top_nodes)
    return all(node in matching for node in top_nodes)


def lowest_index_matching(
    left: Sequence[Hashable],
    right: Sequence[Hashable],
    allowed: Callable[[Hashable, Hashable], bool],
) -> Optional[Dict[Hashable, Hashable]]:
    """
    Match every left item to a right item, each left item taking the lowest right item that still lets the others
    be matched.
    :param left: Items to match, in priority order
    :param right: Candidates, sorted by index
    :param allowed:
    :return: The matching or None when the left side cannot be saturated
    """
    if not saturating_matching_exists(left, right, allowed):
        return None

    matching: Dict[Hashable, Hashable] = {}
    free = list(right)
    for position, a in enumerate(left):
        rest = left[position + 1 :]
        for b in free:
            if not allowed(a, b):
                continue
            others = [c for c in free if c != b]
            if saturating_matching_exists(rest, others, allowed):
                matching[a] = b
                free = others
                break
    return matching
