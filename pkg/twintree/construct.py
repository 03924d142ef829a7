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
import math
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from ansible.utils.display import Display

from twintree.decide import (
    IsoCertificate,
    TwinCertificate,
    UnrootedIsoCertificate,
    Verdict,
    scheme_iso_rooted,
    scheme_iso_unrooted,
    twin_rooted,
    twin_unrooted,
)
from twintree.errors import BadIndexError, BadParamsError, CertificateFailureError
from twintree.scheme import (
    Entry,
    Scheme,
    branch_scheme,
    classify,
    cycle_states,
    prune,
)
from twintree.utils import (
    OMEGA,
    Multiplicity,
    fresh_name,
    is_multiplicity,
    mult_add,
    mult_dec,
)

display = Display()


class ToothPattern:
    """
    An eventually periodic 0/1 sequence: bit i says whether the spine vertex i carries a tooth
    """

    def __init__(self, preperiod: Sequence[int] = (), period: Sequence[int] = (1,)):
        self.preperiod: Tuple[int, ...] = tuple(int(bit) for bit in preperiod)
        self.period: Tuple[int, ...] = tuple(int(bit) for bit in period)
        if any(bit not in (0, 1) for bit in self.preperiod + self.period):
            raise BadParamsError(f"A tooth pattern only has 0 and 1 bits: {self}")
        if 1 not in self.period:
            raise BadParamsError(
                f"The period of a tooth pattern needs a 1 to keep infinitely many teeth: {self}"
            )

    @staticmethod
    def parse(text: str) -> "ToothPattern":
        """
        Read "<period>" or "<preperiod>:<period>", e.g. "10" or "0:1"
        :param text:
        :return:
        """
        preperiod, _, period = text.strip().rpartition(":")
        if not period or any(c not in "01" for c in preperiod + period):
            raise BadParamsError(f"Invalid tooth pattern '{text}'")
        return ToothPattern([int(c) for c in preperiod], [int(c) for c in period])

    def bit(self, position: int) -> int:
        if position < len(self.preperiod):
            return self.preperiod[position]
        return self.period[(position - len(self.preperiod)) % len(self.period)]

    def __str__(self) -> str:
        period = "".join(map(str, self.period))
        if not self.preperiod:
            return period
        return "".join(map(str, self.preperiod)) + ":" + period

    def __repr__(self) -> str:
        return f"ToothPattern('{self}')"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ToothPattern)
            and self.preperiod == other.preperiod
            and self.period == other.period
        )

    def __hash__(self) -> int:
        return hash((self.preperiod, self.period))


def _ray() -> Scheme:
    return Scheme("R", {"R": [("R", 1)]}, "ray")


def _d_ary(d: Multiplicity = 2) -> Scheme:
    if not is_multiplicity(d):
        raise BadParamsError(f"The arity must be >= 1, got {d}")
    return Scheme("D", {"D": [("D", d)]}, f"d_ary_{'w' if d == OMEGA else d}")


def _caterpillar() -> Scheme:
    return Scheme("S", {"S": [("L", 1), ("S", 1)], "L": []}, "caterpillar")


def _caterpillar_minus(k: int = 0) -> Scheme:
    """
    The caterpillar whose first k spine vertices lost their leaf
    :param k:
    :return:
    """
    if k < 0:
        raise BadParamsError(f"The number of removed leaves must be >= 0, got {k}")
    if k == 0:
        return _caterpillar().renamed("caterpillar_minus_0")
    children: Dict[str, List[Entry]] = {"S": [("L", 1), ("S", 1)], "L": []}
    for i in range(k):
        children[f"C{i}"] = [(f"C{i + 1}" if i + 1 < k else "S", 1)]
    return Scheme("C0", children, f"caterpillar_minus_{k}")


def _comb(pattern: ToothPattern = None) -> Scheme:
    """
    A ray with a single-vertex tooth at position i iff bit i of the pattern is 1
    :param pattern:
    :return:
    """
    pattern = pattern or ToothPattern()
    spine = [f"P{i}" for i in range(len(pattern.preperiod))] + [
        f"Q{i}" for i in range(len(pattern.period))
    ]
    children: Dict[str, List[Entry]] = {"T": []}
    for position, state in enumerate(spine):
        following = spine[position + 1] if position + 1 < len(spine) else "Q0"
        children[state] = [(following, 1)]
        if pattern.bit(position):
            children[state].append(("T", 1))
    return prune(Scheme(spine[0], children, f"comb_{str(pattern).replace(':', '_')}"))


def _path(n: int = 1) -> Scheme:
    if n < 1:
        raise BadParamsError(f"A path has at least one vertex, got {n}")
    children = {f"N{i}": [(f"N{i - 1}", 1)] if i else [] for i in range(n)}
    return Scheme(f"N{n - 1}", children, f"path_{n}")


def _star(k: int = 3) -> Scheme:
    if k < 0:
        raise BadParamsError(f"A star has at least 0 leaves, got {k}")
    if k == 0:
        return _leaf().renamed("star_0")
    return Scheme("O", {"O": [("L", k)], "L": []}, f"star_{k}")


def _cherry() -> Scheme:
    return _star(2).renamed("cherry")


def _leaf() -> Scheme:
    return Scheme("L", {"L": []}, "leaf")


_BUILDERS = {
    "ray": _ray,
    "d_ary": _d_ary,
    "caterpillar": _caterpillar,
    "caterpillar_minus": _caterpillar_minus,
    "comb": _comb,
    "path": _path,
    "star": _star,
    "cherry": _cherry,
    "leaf": _leaf,
}

KINDS = tuple(sorted(_BUILDERS))


def make(kind: str, **params) -> Scheme:
    """
    Build one of the named trees as a scheme
    :param kind: ray, d_ary (d), caterpillar, caterpillar_minus (k), comb (pattern), path (n), star (k), cherry, leaf
    :param params:
    :return:
    """
    if kind not in _BUILDERS:
        raise BadParamsError(f"Unknown kind '{kind}'. Supported kinds: {', '.join(KINDS)}")
    try:
        return _BUILDERS[kind](**params)
    except TypeError as e:
        raise BadParamsError(f"Invalid parameters {params} for '{kind}': {e}")


def _prefixed(s: Scheme, prefix: str) -> Tuple[str, Dict[str, List[Entry]]]:
    return f"{prefix}{s.root}", {
        f"{prefix}{state}": [(f"{prefix}{t}", m) for t, m in entries]
        for state, entries in s.children.items()
    }


def _max_children(s: Scheme) -> Multiplicity:
    return max(s.total_children(state) for state in s.reachable_states())


def default_host(*members: Scheme) -> Scheme:
    """
    A regular tree receiving every locally finite tree of the members
    :param members:
    :return:
    """
    return _d_ary(max(2, *(_max_children(member) for member in members)))


def hosted(host: Scheme, member: Scheme, name: str) -> Scheme:
    """
    A fresh root joined to the root of the host and to the root of the member
    :param host:
    :param member:
    :param name:
    :return:
    """
    host_root, host_children = _prefixed(host, "hs_")
    member_root, member_children = _prefixed(member, "cm_")
    children = {"top": [(host_root, 1), (member_root, 1)]}
    children.update(host_children)
    children.update(member_children)
    return Scheme("top", children, name)


class TwinFamily:
    """
    Members that are pairwise twins, with the certificates of every pair
    """

    def __init__(
        self,
        kind: str,
        members: List[Scheme],
        twins: Dict[Tuple[int, int], TwinCertificate],
        isos: Dict[Tuple[int, int], IsoCertificate],
        unrooted_isos: Dict[Tuple[int, int], UnrootedIsoCertificate],
        depth_bound: int,
        failure_depths: Optional[List[int]] = None,
        require_non_isomorphic: bool = True,
    ):
        self.kind = kind
        self.members = members
        self.twins = twins
        self.isos = isos
        self.unrooted_isos = unrooted_isos
        self.depth_bound = depth_bound
        self.failure_depths = failure_depths
        self.require_non_isomorphic = require_non_isomorphic

    @property
    def names(self) -> List[str]:
        return [member.name for member in self.members]

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return sorted(self.twins)

    def validate(self) -> "TwinFamily":
        """
        Raise CertificateFailureError when a pair contradicts the family invariants
        :return:
        """
        for pair in self.pairs:
            first, second = (self.members[i].name for i in pair)
            twin, iso = self.twins[pair], self.isos[pair]
            if twin.verdict != Verdict.YES:
                raise CertificateFailureError(
                    f"{self.kind}: '{first}' and '{second}' are not found twins ({twin.verdict.value})"
                )
            if self.require_non_isomorphic and iso.verdict != Verdict.NO:
                raise CertificateFailureError(
                    f"{self.kind}: '{first}' and '{second}' are isomorphic"
                )
            for certificate in (twin, iso, self.unrooted_isos[pair]):
                if not certificate.check():
                    raise CertificateFailureError(
                        f"{self.kind}: the {certificate.kind} certificate of '{first}' and '{second}' "
                        "does not check"
                    )
        if self.failure_depths is not None:
            if None in self.failure_depths or any(
                a >= b for a, b in zip(self.failure_depths, self.failure_depths[1:])
            ):
                raise CertificateFailureError(
                    f"{self.kind}: the failure depths {self.failure_depths} are not strictly increasing"
                )
        return self

    def __repr__(self) -> str:
        return f"TwinFamily('{self.kind}', {self.names})"


def _certify(
    kind: str,
    members: List[Scheme],
    depth_bound: int,
    failure_depths: bool = False,
    require_non_isomorphic: bool = True,
) -> TwinFamily:
    twins, isos, unrooted_isos = {}, {}, {}
    for i, j in combinations(range(len(members)), 2):
        display.vv(f"{kind}: certifying '{members[i].name}' and '{members[j].name}'")
        twins[(i, j)] = twin_unrooted(members[i], members[j], depth_bound)
        isos[(i, j)] = scheme_iso_rooted(members[i], members[j])
        unrooted_isos[(i, j)] = scheme_iso_unrooted(members[i], members[j], depth_bound)
    depths = None
    if failure_depths:
        depths = [isos[(i, i + 1)].failure_depth for i in range(len(members) - 1)]
    return TwinFamily(
        kind, members, twins, isos, unrooted_isos, depth_bound, depths, require_non_isomorphic
    )


def caterpillar_family(k: int, depth_bound: Optional[int] = None) -> TwinFamily:
    """
    The caterpillars with 0..k-1 leading leaves removed
    :param k:
    :param depth_bound: Depth of the reroots tried for the unrooted twin checks. Default: k
    :return:
    """
    if k < 1:
        raise BadParamsError(f"A family has at least one member, got {k}")
    members = [_caterpillar_minus(i) for i in range(k)]
    display.v(f"Building the caterpillar family of {k} members")
    return _certify("caterpillar-family", members, depth_bound or k).validate()


def comb_tooth_family(
    patterns: Sequence[ToothPattern],
    host: Optional[Scheme] = None,
    depth_bound: Optional[int] = None,
) -> TwinFamily:
    """
    Combs with some teeth removed, each joined with a host tree under a fresh root.
    The isomorphism verdicts are only recorded: shifted patterns may give isomorphic members.
    :param patterns:
    :param host: Default: the binary tree
    :param depth_bound: Default: the number of patterns
    :return:
    """
    if len(set(patterns)) != len(patterns):
        raise BadParamsError("The tooth patterns must be pairwise distinct")
    combs = [_comb(pattern) for pattern in patterns]
    host = host or default_host(*combs)
    members = [hosted(host, comb, f"hosted_{comb.name}") for comb in combs]
    display.v(f"Building the tooth family of {len(members)} members")
    return _certify(
        "tooth-family",
        members,
        depth_bound or len(members),
        require_non_isomorphic=False,
    ).validate()


def star_of_paths_truncation(n: int, with_ray: bool = False) -> Scheme:
    """
    The depth-n truncation of a root carrying countably many paths of every length, and optionally one more ray
    :param n:
    :param with_ray:
    :return:
    """
    if n < 1:
        raise BadParamsError(f"The truncation depth must be >= 1, got {n}")
    children: Dict[str, List[Entry]] = {
        f"N{j}": [(f"N{j - 1}", 1)] if j else [] for j in range(n)
    }
    children["O"] = [(f"N{length - 1}", OMEGA) for length in range(1, n + 1)]
    if with_ray:
        children.update({f"Y{j}": [(f"Y{j - 1}", 1)] if j else [] for j in range(n)})
        children["O"].append((f"Y{n - 1}", 1))
    return Scheme("O", children, f"star_of_paths_{n}{'_ray' if with_ray else ''}")


def replace_twin_branches(t: Scheme, pivot: int, replacement: Scheme) -> Scheme:
    """
    Replace by the replacement every root branch that is a rooted twin of the pivot branch
    :param t:
    :param pivot: Index of a child entry of the root
    :param replacement:
    :return:
    """
    root_entries = t.children[t.root]
    if not 0 <= pivot < len(root_entries):
        raise BadIndexError(
            f"The root of '{t.name}' has {len(root_entries)} child entries, no index {pivot}"
        )
    pivot_branch = branch_scheme(t, root_entries[pivot][0])

    taken = set(t.children)
    renaming = {}
    for state in replacement.children:
        renaming[state] = fresh_name(f"rp_{state}", taken)
        taken.add(renaming[state])
    children: Dict[str, List[Entry]] = {
        state: list(entries) for state, entries in t.children.items()
    }
    for state, entries in replacement.children.items():
        children[renaming[state]] = [(renaming[target], m) for target, m in entries]

    new_root = fresh_name("rt", taken)
    new_entries: List[Entry] = []
    for target, m in root_entries:
        if twin_rooted(branch_scheme(t, target), pivot_branch).verdict == Verdict.YES:
            display.vv(f"Replacing the branch '{target}' of '{t.name}'")
            new_entries.append((renaming[replacement.root], m))
        else:
            new_entries.append((target, m))

    merged: Dict[str, Multiplicity] = {}
    for target, m in new_entries:
        merged[target] = mult_add(merged.get(target, 0), m)
    children[new_root] = sorted(merged.items())
    return prune(Scheme(new_root, children, f"{t.name}_replaced"))


def _designated_ray(spine: Scheme) -> Tuple[List[Tuple[str, int]], int]:
    """
    The ray of the spine that takes, at every state, the first child entry still reaching a cycle
    :param spine:
    :return: The (state, entry index) of the positions up to the first repeated state, and the position where the
    repetition starts
    """
    on_cycle = cycle_states(spine)
    reaches_cycle = set(
        nx.multi_source_dijkstra_path_length(spine.graph().reverse(), on_cycle)
    )
    positions: List[Tuple[str, int]] = []
    seen: Dict[str, int] = {}
    state = spine.root
    while state not in seen:
        seen[state] = len(positions)
        index = next(
            i for i, (target, _) in enumerate(spine.children[state]) if target in reaches_cycle
        )
        positions.append((state, index))
        state = spine.children[state][index][0]
    return positions, seen[state]


def attach_along_ray(spine: Scheme, component: Scheme, modulus: int, name: str) -> Scheme:
    """
    The spine with a copy of the component joined by one edge to every vertex of its designated ray whose position is
    a multiple of the modulus
    :param spine:
    :param component:
    :param modulus:
    :param name:
    :return:
    """
    positions, start = _designated_ray(spine)
    period = len(positions) - start
    length = start + period * modulus // math.gcd(period, modulus)

    def ray_state(j: int) -> str:
        if j >= length:
            j = start + (j - start) % (length - start)
        state, _ = positions[start + (j - start) % period if j >= start else j]
        return f"ry{j}_{state}"

    component_root, component_children = _prefixed(component, "cm_")
    _, spine_children = _prefixed(spine, "sp_")
    children: Dict[str, List[Entry]] = dict(spine_children)
    children.update(component_children)
    for j in range(length):
        state, index = positions[start + (j - start) % period if j >= start else j]
        entries: List[Entry] = []
        for i, (target, m) in enumerate(spine.children[state]):
            if i == index:
                entries.append((ray_state(j + 1), 1))
                rest = mult_dec(m)
                if rest:
                    entries.append((f"sp_{target}", rest))
            else:
                entries.append((f"sp_{target}", m))
        if j % modulus == 0:
            entries.append((component_root, 1))
        children[ray_state(j)] = entries
    return prune(Scheme(ray_state(0), children, name))


def sandwich_family(
    spine: Scheme,
    components: Tuple[int, Scheme],
    k: int,
    host: Optional[Scheme] = None,
    depth_bound: Optional[int] = None,
) -> TwinFamily:
    """
    Trees squeezed between the spine and the full tree carrying a component at every p-th position of the spine ray.
    Member m keeps the components at the positions that are multiples of p * m, member 1 is the full tree.
    Every member is joined with a host tree under a fresh root.
    :param spine: A scheme with a ray
    :param components: The period p and the component
    :param k: Number of members
    :param host: Default: a regular tree receiving the full tree
    :param depth_bound: Default: k
    :return:
    """
    period, component = components
    if classify(spine).rayless:
        raise BadParamsError(f"The spine '{spine.name}' has no ray")
    if period < 1:
        raise BadParamsError(f"The attach period must be >= 1, got {period}")
    if k < 2:
        raise BadParamsError(f"A sandwich family has at least two members, got {k}")

    full = attach_along_ray(spine, component, period, "full")
    host = host or default_host(full)
    members = [
        hosted(host, attach_along_ray(spine, component, period * m, f"m{m}"), f"sandwich_{m}")
        for m in range(1, k + 1)
    ]
    display.v(f"Building the sandwich family of {k} members on '{spine.name}'")
    return _certify(
        "sandwich-family", members, depth_bound or k, failure_depths=True
    ).validate()
