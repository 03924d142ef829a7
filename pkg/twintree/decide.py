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
Decisions on scheme unfoldings.

Rooted isomorphism and rooted embedding are decided exactly and come with a certificate that can be checked again
without the engine. The unrooted questions are only semi-decided up to a bound on the depth of the new root.
"""
from abc import ABC, abstractmethod
from collections import defaultdict
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from ansible.utils.display import Display

from twintree.errors import InfiniteUnfoldingError, UnfoldingTooLargeError
from twintree.finite_tree import (
    ahu_code,
    embed_unrooted,
    embeds_rooted_by_search,
    iso_unrooted,
    root_at,
    to_unrooted,
    VertexMap,
    RootedFiniteTree,
)
from twintree.matching import assignment_feasible, lexicographic_assignment
from twintree.scheme import (
    Scheme,
    ShapeInterner,
    VertexAddress,
    addresses_up_to,
    classify,
    degree_census,
    materialize,
    materialize_to_depth,
    reroot,
    truncate,
    truncation_shape,
    unfold_typed,
    unfolding_size,
)
from twintree.utils import Multiplicity, is_omega, mult_add

display = Display()

# Explicit unfoldings above this size are not built by the exact finite paths and the certificate checks
DEFAULT_VERTEX_LIMIT = 20000

Node = Tuple[str, str]
Pair = Tuple[str, str]
Assignment = List[Tuple[int, int, Multiplicity]]


class Verdict(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {Verdict.YES: 0, Verdict.NO: 1, Verdict.UNKNOWN: 2}[self]

    @staticmethod
    def both(first: "Verdict", second: "Verdict") -> "Verdict":
        if Verdict.NO in (first, second):
            return Verdict.NO
        if first == second == Verdict.YES:
            return Verdict.YES
        return Verdict.UNKNOWN


class Certificate(ABC):
    """
    The verdict of a decision on two schemes, with what is needed to verify it
    """

    kind = "certificate"

    def __init__(self, a: Scheme, b: Scheme, verdict: Verdict):
        self.a = a
        self.b = b
        self.verdict = verdict
        self.failure_depth: Optional[int] = None

    @abstractmethod
    def check(self) -> bool:
        """
        Verify the witness again, independently of the engine that produced it
        :return:
        """
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}('{self.a.name}', '{self.b.name}', {self.verdict.value})"


def _truncations_isomorphic(a: Scheme, b: Scheme, depth: int) -> bool:
    interner = ShapeInterner()
    return truncation_shape(a, depth, interner) == truncation_shape(b, depth, interner)


class IsoCertificate(Certificate):
    """
    The stable partition of the states of both schemes. On "no", the first depth where the truncations differ.
    """

    kind = "iso"

    def __init__(
        self,
        a: Scheme,
        b: Scheme,
        verdict: Verdict,
        partition: Dict[Node, int],
        failure_depth: Optional[int],
        rounds: int,
    ):
        super().__init__(a, b, verdict)
        self.partition = partition
        self.failure_depth = failure_depth
        self.rounds = rounds

    def _class_signature(self, node: Node) -> Tuple:
        side, state = node
        scheme = self.a if side == "a" else self.b
        merged: Dict[int, Multiplicity] = {}
        for target, m in scheme.children[state]:
            key = self.partition[(side, target)]
            merged[key] = mult_add(merged.get(key, 0), m)
        return tuple(sorted(merged.items()))

    def check(self) -> bool:
        if self.verdict == Verdict.YES:
            if self.partition[("a", self.a.root)] != self.partition[("b", self.b.root)]:
                return False
            signatures: Dict[int, Tuple] = {}
            for node, block in self.partition.items():
                signature = self._class_signature(node)
                if signatures.setdefault(block, signature) != signature:
                    return False
            return True

        if self.failure_depth is None:
            return False
        if _truncations_isomorphic(self.a, self.b, self.failure_depth):
            return False
        return self.failure_depth == 0 or _truncations_isomorphic(
            self.a, self.b, self.failure_depth - 1
        )


def _refine(a: Scheme, b: Scheme) -> Tuple[Dict[Node, int], Optional[int], int]:
    """
    Synchronous partition refinement over the disjoint union of the states. After round k, two states share a block
    iff their depth-k truncations are isomorphic. Only the predecessors of the states that moved in a round are
    looked at again in the next one.
    :param a:
    :param b:
    :return: The stable partition, the round separating the roots, the number of rounds
    """
    schemes = {"a": a, "b": b}
    nodes: List[Node] = sorted(
        [("a", q) for q in a.reachable_states()] + [("b", q) for q in b.reachable_states()]
    )
    predecessors: Dict[Node, Set[Node]] = defaultdict(set)
    for side, state in nodes:
        for target, _ in schemes[side].children[state]:
            predecessors[(side, target)].add((side, state))

    block_of: Dict[Node, int] = {node: 0 for node in nodes}
    blocks: Dict[int, List[Node]] = {0: list(nodes)}
    signature: Dict[Node, Tuple] = {}
    next_block = 1
    root_a, root_b = ("a", a.root), ("b", b.root)
    failure_depth: Optional[int] = None
    rounds = 0
    dirty: Set[Node] = set(nodes)

    while dirty:
        rounds += 1
        for node in dirty:
            side, state = node
            merged: Dict[int, Multiplicity] = {}
            for target, m in schemes[side].children[state]:
                key = block_of[(side, target)]
                merged[key] = mult_add(merged.get(key, 0), m)
            signature[node] = tuple(sorted(merged.items()))

        moved: List[Node] = []
        for block in sorted({block_of[node] for node in dirty}):
            groups: Dict[Tuple, List[Node]] = defaultdict(list)
            for node in blocks[block]:
                groups[signature[node]].append(node)
            if len(groups) == 1:
                continue
            ordered = [groups[key] for key in sorted(groups)]
            blocks[block] = ordered[0]
            for group in ordered[1:]:
                blocks[next_block] = group
                for node in group:
                    block_of[node] = next_block
                    moved.append(node)
                next_block += 1

        display.vv(f"Refinement round {rounds}: {len(blocks)} blocks, {len(moved)} states moved")
        if failure_depth is None and block_of[root_a] != block_of[root_b]:
            failure_depth = rounds
        dirty = {p for node in moved for p in predecessors[node]}

    canonical: Dict[int, int] = {}
    partition = {}
    for node in nodes:
        partition[node] = canonical.setdefault(block_of[node], len(canonical))
    return partition, failure_depth, rounds


def scheme_iso_rooted(a: Scheme, b: Scheme) -> IsoCertificate:
    """
    Decide whether the unfoldings of a and b are isomorphic with roots preserved
    :param a:
    :param b:
    :return:
    """
    display.v(f"Deciding rooted isomorphism of '{a.name}' and '{b.name}'")
    partition, failure_depth, rounds = _refine(a, b)
    verdict = Verdict.YES if failure_depth is None else Verdict.NO
    return IsoCertificate(a, b, verdict, partition, failure_depth, rounds)


class EmbedCertificate(Certificate):
    """
    The surviving relation of state pairs and, for the pairs used from the root pair on, the assignment of the child
    entries of the source state to the child entries of the target state.
    """

    kind = "embed"

    def __init__(
        self,
        a: Scheme,
        b: Scheme,
        verdict: Verdict,
        relation: FrozenSet[Pair],
        matchings: Dict[Pair, Assignment],
        failure_depth: Optional[int],
        rounds: int,
    ):
        super().__init__(a, b, verdict)
        self.relation = relation
        self.matchings = matchings
        self.failure_depth = failure_depth
        self.rounds = rounds

    def _matching_respects_capacities(self, pair: Pair) -> bool:
        source, target = pair
        demands = [m for _, m in self.a.children[source]]
        capacities = [m for _, m in self.b.children[target]]
        assigned: Dict[int, Multiplicity] = defaultdict(int)
        used: Dict[int, Multiplicity] = defaultdict(int)
        for i, j, amount in self.matchings[pair]:
            child_pair = (self.a.children[source][i][0], self.b.children[target][j][0])
            if child_pair not in self.relation or child_pair not in self.matchings:
                return False
            if is_omega(amount) and not is_omega(capacities[j]):
                return False
            assigned[i] = mult_add(assigned[i], amount)
            used[j] = mult_add(used[j], amount)
        if any(assigned[i] != demand for i, demand in enumerate(demands)):
            return False
        return all(
            is_omega(capacities[j]) or count <= capacities[j] for j, count in used.items()
        )

    def check(self) -> bool:
        if self.verdict == Verdict.YES:
            root_pair = (self.a.root, self.b.root)
            return (
                root_pair in self.relation
                and root_pair in self.matchings
                and all(self._matching_respects_capacities(pair) for pair in self.matchings)
            )
        if self.failure_depth is None:
            return False
        return not _truncations_embed(self.a, self.b, self.failure_depth)


def _truncations_embed(a: Scheme, b: Scheme, depth: int) -> bool:
    """
    Root-preserving embeddability of the truncations at the given depth. Searched on the explicit trees when they are
    small enough, otherwise decided on the truncated schemes.
    :param a:
    :param b:
    :param depth:
    :return:
    """
    try:
        source = materialize_to_depth(a, depth, limit=DEFAULT_VERTEX_LIMIT)
        target = materialize_to_depth(b, depth, limit=DEFAULT_VERTEX_LIMIT)
        return embeds_rooted_by_search(source, target)
    except (InfiniteUnfoldingError, UnfoldingTooLargeError):
        return scheme_embed_rooted(truncate(a, depth), truncate(b, depth)).verdict == Verdict.YES


def _pair_space(a: Scheme, b: Scheme) -> Tuple[List[Pair], Dict[Pair, Set[Pair]]]:
    """
    The state pairs reachable from the pair of roots by pairing a child of each side. The pairs outside of it never
    influence the pair of roots.
    :param a:
    :param b:
    :return: The pairs, sorted, and the predecessors of every pair
    """
    root_pair = (a.root, b.root)
    seen = {root_pair}
    pending = [root_pair]
    predecessors: Dict[Pair, Set[Pair]] = defaultdict(set)
    while pending:
        pair = pending.pop()
        source, target = pair
        for child, _ in a.children[source]:
            for image, _ in b.children[target]:
                successor = (child, image)
                predecessors[successor].add(pair)
                if successor not in seen:
                    seen.add(successor)
                    pending.append(successor)
    return sorted(seen), predecessors


def _allowed(a: Scheme, b: Scheme, pair: Pair, alive: Set[Pair]) -> Set[Tuple[int, int]]:
    source, target = pair
    return {
        (i, j)
        for i, (child, _) in enumerate(a.children[source])
        for j, (image, _) in enumerate(b.children[target])
        if (child, image) in alive
    }


def _feasible(a: Scheme, b: Scheme, pair: Pair, alive: Set[Pair]) -> bool:
    source, target = pair
    return assignment_feasible(
        [m for _, m in a.children[source]],
        [m for _, m in b.children[target]],
        _allowed(a, b, pair, alive),
    )


def scheme_embed_rooted(a: Scheme, b: Scheme) -> EmbedCertificate:
    """
    Decide whether the unfolding of a embeds into the unfolding of b with roots preserved.
    Greatest fixpoint in synchronous rounds: round k deletes the pairs whose children cannot be injected through the
    pairs alive after round k - 1. A pair deleted in round k is a pair whose depth-k truncations do not embed.
    :param a:
    :param b:
    :return:
    """
    display.v(f"Deciding rooted embedding of '{a.name}' into '{b.name}'")
    pairs, predecessors = _pair_space(a, b)
    alive = set(pairs)
    deleted_in: Dict[Pair, int] = {}

    frontier = [pair for pair in pairs if not _feasible(a, b, pair, alive)]
    rounds = 0
    while frontier:
        rounds += 1
        for pair in frontier:
            alive.discard(pair)
            deleted_in[pair] = rounds
        display.vv(f"Fixpoint round {rounds}: {len(frontier)} pairs deleted, {len(alive)} alive")
        candidates = sorted({p for pair in frontier for p in predecessors[pair] if p in alive})
        frontier = [pair for pair in candidates if not _feasible(a, b, pair, alive)]

    root_pair = (a.root, b.root)
    relation = frozenset(alive)
    if root_pair not in alive:
        return EmbedCertificate(
            a, b, Verdict.NO, relation, {}, deleted_in[root_pair], rounds + 1
        )

    matchings: Dict[Pair, Assignment] = {}
    pending = [root_pair]
    while pending:
        pair = pending.pop()
        if pair in matchings:
            continue
        source, target = pair
        assignment = lexicographic_assignment(
            [m for _, m in a.children[source]],
            [m for _, m in b.children[target]],
            _allowed(a, b, pair, alive),
        )
        matchings[pair] = assignment
        for i, j, _ in assignment:
            pending.append((a.children[source][i][0], b.children[target][j][0]))
    return EmbedCertificate(a, b, Verdict.YES, relation, matchings, None, rounds + 1)


def replay_embedding(
    certificate: EmbedCertificate, depth: int, limit: Optional[int] = DEFAULT_VERTEX_LIMIT
) -> Tuple[RootedFiniteTree, RootedFiniteTree, VertexMap]:
    """
    Unfold the stored matchings top-down into an explicit embedding between the truncations at the given depth
    :param certificate: A "yes" embedding certificate
    :param depth:
    :param limit:
    :return: The source truncation, the target truncation and the vertex map
    """
    source = unfold_typed(certificate.a, depth=depth, limit=limit)
    target = unfold_typed(certificate.b, depth=depth, limit=limit)

    def grouped(records) -> Dict[Tuple[int, int], List[int]]:
        groups: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        for v, (parent, _, _, entry) in enumerate(records):
            if parent is not None:
                groups[(parent, entry)].append(v)
        return groups

    source_children = grouped(source)
    target_children = grouped(target)
    mapping = {0: 0}
    for v, (_, state, level, _) in enumerate(source):
        if level == depth:
            continue
        x = mapping[v]
        taken_source: Dict[int, int] = defaultdict(int)
        taken_target: Dict[int, int] = defaultdict(int)
        for i, j, amount in certificate.matchings[(state, target[x][1])]:
            for _ in range(int(amount)):
                child = source_children[(v, i)][taken_source[i]]
                image = target_children[(x, j)][taken_target[j]]
                mapping[child] = image
                taken_source[i] += 1
                taken_target[j] += 1

    return (
        RootedFiniteTree([parent for parent, _, _, _ in source]),
        RootedFiniteTree([parent for parent, _, _, _ in target]),
        VertexMap(mapping),
    )


class TwinCertificate(Certificate):
    """
    Embeddings in both directions
    """

    def __init__(self, forward: Certificate, backward: Certificate, rooted: bool = True):
        super().__init__(forward.a, forward.b, Verdict.both(forward.verdict, backward.verdict))
        self.forward = forward
        self.backward = backward
        self.rooted = rooted
        self.kind = "twin" if rooted else "twin-unrooted"

    def check(self) -> bool:
        return (
            self.verdict == Verdict.both(self.forward.verdict, self.backward.verdict)
            and self.forward.check()
            and self.backward.check()
        )


def twin_rooted(a: Scheme, b: Scheme) -> TwinCertificate:
    return TwinCertificate(scheme_embed_rooted(a, b), scheme_embed_rooted(b, a))


def _address_of(records: List[Tuple[Optional[int], str, int, int]], vertex: int) -> VertexAddress:
    """
    The address of a vertex of an explicit typed unfolding
    :param records: As returned by unfold_typed
    :param vertex:
    :return:
    """
    copy_index: Dict[int, int] = {}
    counters: Dict[Tuple[int, int], int] = defaultdict(int)
    for v, (parent, _, _, entry) in enumerate(records):
        if parent is not None:
            copy_index[v] = counters[(parent, entry)]
            counters[(parent, entry)] += 1
    steps = []
    while records[vertex][0] is not None:
        steps.append((records[vertex][1], copy_index[vertex]))
        vertex = records[vertex][0]
    return VertexAddress(reversed(steps))


class UnrootedEmbedCertificate(Certificate):
    """
    An embedding of the unrooted unfoldings, given as a rooted embedding into b rerooted at the image of the root of a
    """

    kind = "embed-unrooted"

    def __init__(
        self,
        a: Scheme,
        b: Scheme,
        verdict: Verdict,
        reason: str,
        depth_bound: int,
        address: Optional[VertexAddress] = None,
        rooted: Optional[EmbedCertificate] = None,
    ):
        super().__init__(a, b, verdict)
        self.reason = reason
        self.depth_bound = depth_bound
        self.address = address
        self.rooted = rooted

    def check(self) -> bool:
        if self.verdict != Verdict.YES:
            return True
        return (
            self.rooted is not None
            and self.rooted.verdict == Verdict.YES
            and self.rooted.b == reroot(self.b, self.address)
            and self.rooted.check()
        )


def _count_at_least(census: Dict[Multiplicity, Multiplicity], degree: Multiplicity) -> Multiplicity:
    return mult_add(*(count for d, count in census.items() if d >= degree))


def _embed_refutation(a: Scheme, b: Scheme) -> Optional[str]:
    """
    An invariant of unrooted trees that forbids every embedding of a into b
    :param a:
    :param b:
    :return: The reason, None when nothing refutes
    """
    source, target = classify(a), classify(b)
    if not source.locally_finite and target.locally_finite:
        return f"'{a.name}' has a vertex of infinite degree, '{b.name}' does not"
    if not source.rayless and target.rayless:
        return f"'{a.name}' contains a ray, '{b.name}' is rayless"
    if source.contains_comb and not target.contains_comb:
        return f"'{a.name}' contains a comb, '{b.name}' does not"
    source_census, target_census = degree_census(a), degree_census(b)
    for degree in source_census:
        if _count_at_least(source_census, degree) > _count_at_least(target_census, degree):
            return f"'{a.name}' has more vertices of degree >= {degree} than '{b.name}'"
    return None


def _finite_pair(a: Scheme, b: Scheme, limit: int) -> bool:
    return (
        classify(a).finite
        and classify(b).finite
        and unfolding_size(a) <= limit
        and unfolding_size(b) <= limit
    )


def scheme_embed_unrooted(
    a: Scheme, b: Scheme, depth_bound: int, limit: int = DEFAULT_VERTEX_LIMIT
) -> UnrootedEmbedCertificate:
    """
    Semi-decide whether the unrooted unfolding of a embeds into the unrooted unfolding of b.
    Yes when a embeds with roots preserved into b rerooted at a vertex of depth <= depth_bound. No when an invariant
    refutes, or when both trees are finite and an exhaustive search fails. Unknown otherwise.
    :param a:
    :param b:
    :param depth_bound:
    :param limit: The size up to which finite unfoldings are searched exhaustively
    :return:
    """
    display.v(f"Searching an unrooted embedding of '{a.name}' into '{b.name}' (bound {depth_bound})")
    reason = _embed_refutation(a, b)
    if reason is not None:
        return UnrootedEmbedCertificate(a, b, Verdict.NO, reason, depth_bound)

    if _finite_pair(a, b, limit):
        records = unfold_typed(b)
        found = embed_unrooted(to_unrooted(materialize(a)), to_unrooted(materialize(b)))
        if found is None:
            return UnrootedEmbedCertificate(
                a, b, Verdict.NO, "exhaustive search on the finite trees", depth_bound
            )
        address = _address_of(records, found[0])
        return UnrootedEmbedCertificate(
            a,
            b,
            Verdict.YES,
            "exhaustive search on the finite trees",
            depth_bound,
            address,
            scheme_embed_rooted(a, reroot(b, address)),
        )

    for address in addresses_up_to(b, depth_bound):
        rooted = scheme_embed_rooted(a, reroot(b, address))
        if rooted.verdict == Verdict.YES:
            display.vv(f"'{a.name}' embeds into '{b.name}' rerooted at {address}")
            return UnrootedEmbedCertificate(
                a, b, Verdict.YES, f"rooted embedding at {address}", depth_bound, address, rooted
            )
    return UnrootedEmbedCertificate(
        a,
        b,
        Verdict.UNKNOWN,
        f"no rerooting of depth <= {depth_bound} receives '{a.name}'",
        depth_bound,
    )


def twin_unrooted(a: Scheme, b: Scheme, depth_bound: int) -> TwinCertificate:
    return TwinCertificate(
        scheme_embed_unrooted(a, b, depth_bound),
        scheme_embed_unrooted(b, a, depth_bound),
        rooted=False,
    )


class UnrootedIsoCertificate(Certificate):
    """
    An isomorphism of the unrooted unfoldings, given as a rooted isomorphism with b rerooted at the image of the root
    of a
    """

    kind = "iso-unrooted"

    def __init__(
        self,
        a: Scheme,
        b: Scheme,
        verdict: Verdict,
        reason: str,
        depth_bound: int,
        address: Optional[VertexAddress] = None,
        rooted: Optional[IsoCertificate] = None,
    ):
        super().__init__(a, b, verdict)
        self.reason = reason
        self.depth_bound = depth_bound
        self.address = address
        self.rooted = rooted

    def check(self) -> bool:
        if self.verdict != Verdict.YES:
            return True
        return (
            self.rooted is not None
            and self.rooted.verdict == Verdict.YES
            and self.rooted.b == reroot(self.b, self.address)
            and self.rooted.check()
        )


def scheme_iso_unrooted(
    a: Scheme, b: Scheme, depth_bound: int, limit: int = DEFAULT_VERTEX_LIMIT
) -> UnrootedIsoCertificate:
    """
    Semi-decide whether the unrooted unfoldings of a and b are isomorphic.
    :param a:
    :param b:
    :param depth_bound: The deepest rerooting of b tried
    :param limit: The size up to which finite unfoldings are compared exhaustively
    :return:
    """
    display.v(f"Searching an unrooted isomorphism of '{a.name}' and '{b.name}' (bound {depth_bound})")
    source, target = classify(a), classify(b)
    if source.flags() != target.flags():
        return UnrootedIsoCertificate(
            a, b, Verdict.NO, "the classifications differ", depth_bound
        )
    if degree_census(a) != degree_census(b):
        return UnrootedIsoCertificate(
            a, b, Verdict.NO, "the degree censuses differ", depth_bound
        )

    if _finite_pair(a, b, limit):
        tree_a, tree_b = materialize(a), materialize(b)
        unrooted_b = to_unrooted(tree_b)
        if not iso_unrooted(to_unrooted(tree_a), unrooted_b):
            return UnrootedIsoCertificate(
                a, b, Verdict.NO, "exhaustive comparison of the finite trees", depth_bound
            )
        code = ahu_code(tree_a)
        image = next(x for x in range(tree_b.n) if ahu_code(root_at(unrooted_b, x)) == code)
        address = _address_of(unfold_typed(b), image)
        return UnrootedIsoCertificate(
            a,
            b,
            Verdict.YES,
            "exhaustive comparison of the finite trees",
            depth_bound,
            address,
            scheme_iso_rooted(a, reroot(b, address)),
        )

    for address in addresses_up_to(b, depth_bound):
        rooted = scheme_iso_rooted(a, reroot(b, address))
        if rooted.verdict == Verdict.YES:
            return UnrootedIsoCertificate(
                a, b, Verdict.YES, f"rooted isomorphism at {address}", depth_bound, address, rooted
            )
    return UnrootedIsoCertificate(
        a,
        b,
        Verdict.UNKNOWN,
        f"no rerooting of depth <= {depth_bound} is isomorphic",
        depth_bound,
    )


def oracle_embed_trunc(a: Scheme, b: Scheme, n: int, limit: Optional[int] = None) -> bool:
    """
    Ground truth for rooted embedding at a finite depth: backtracking search on the materialized truncations
    :param a:
    :param b:
    :param n:
    :param limit:
    :return:
    """
    return embeds_rooted_by_search(
        materialize(truncate(a, n), limit), materialize(truncate(b, n), limit)
    )
