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
Seeded random trees and schemes. Equal seeds give equal values on every platform.
"""
import random
from typing import Dict, List, Optional, Union

from ansible.utils.display import Display

from twintree.errors import BadParamsError
from twintree.finite_tree import RootedFiniteTree
from twintree.scheme import Entry, Scheme, prune
from twintree.utils import OMEGA, fresh_name, is_omega

display = Display()

Seed = Union[int, str]

# Chance that a state gets one more child entry than the spanning one
EXTRA_ENTRY_PROBABILITY = 0.5


def _rng(seed: Seed, purpose: str) -> random.Random:
    return random.Random(f"{seed}:{purpose}")


def random_rooted_tree(n: int, seed: Seed = 0) -> RootedFiniteTree:
    """
    Every vertex but the first of a random vertex order gets a uniform parent among the vertices before it
    :param n: Number of vertices, >= 1
    :param seed:
    :return:
    """
    if n < 1:
        raise BadParamsError(f"A tree has at least one vertex, got {n}")
    rng = _rng(seed, f"tree:{n}")
    order = list(range(n))
    rng.shuffle(order)
    parent: List[Optional[int]] = [None] * n
    for i in range(1, n):
        parent[order[i]] = order[rng.randrange(i)]
    return RootedFiniteTree(parent)


def random_relabeling(t: RootedFiniteTree, seed: Seed = 0) -> RootedFiniteTree:
    """
    The same tree with the vertices shuffled
    :param t:
    :param seed:
    :return:
    """
    labels = list(range(t.n))
    _rng(seed, "relabel").shuffle(labels)
    parent: List[Optional[int]] = [None] * t.n
    for v, p in enumerate(t.parent):
        parent[labels[v]] = None if p is None else labels[p]
    return RootedFiniteTree(parent)


def _multiplicity(rng: random.Random, max_mult: int, omega_prob: float):
    if rng.random() < omega_prob:
        return OMEGA
    return rng.randint(1, max_mult)


def random_scheme(
    states: int, max_mult: int = 3, omega_prob: float = 0.0, seed: Seed = 0
) -> Scheme:
    """
    A valid scheme on the states Q0..Q<states - 1>, rooted at Q0. Every other state hangs below an earlier one, then
    every state gets at most one more entry to any state, cycles included.
    :param states: Number of states, >= 1
    :param max_mult: Largest finite multiplicity
    :param omega_prob: Probability of an omega multiplicity per entry
    :param seed:
    :return:
    """
    if states < 1:
        raise BadParamsError(f"A scheme has at least one state, got {states}")
    if max_mult < 1:
        raise BadParamsError(f"The largest multiplicity must be >= 1, got {max_mult}")
    if not 0.0 <= omega_prob <= 1.0:
        raise BadParamsError(f"The omega probability must be in [0, 1], got {omega_prob}")

    rng = _rng(seed, f"scheme:{states}:{max_mult}:{omega_prob}")
    names = [f"Q{i}" for i in range(states)]
    children: Dict[str, Dict[str, object]] = {name: {} for name in names}
    for i in range(1, states):
        children[names[rng.randrange(i)]][names[i]] = _multiplicity(rng, max_mult, omega_prob)
    for name in names:
        if rng.random() < EXTRA_ENTRY_PROBABILITY:
            target = rng.choice(names)
            if target not in children[name]:
                children[name][target] = _multiplicity(rng, max_mult, omega_prob)

    return Scheme(
        names[0],
        {name: sorted(entries.items()) for name, entries in children.items()},
        f"random_{states}_{seed}",
    )


def _split_once(s: Scheme, rng: random.Random) -> Scheme:
    """
    Clone a state and move some of the copies pointing at it to the clone. Both have the same entries, so the
    unfolding does not change.
    :param s:
    :param rng:
    :return:
    """
    targets = sorted({target for entries in s.children.values() for target, _ in entries})
    if not targets:
        return s
    state = rng.choice(targets)
    clone = fresh_name(f"{state}_split", set(s.children))
    children: Dict[str, List[Entry]] = {q: list(entries) for q, entries in s.children.items()}
    children[clone] = list(s.children[state])

    occurrences = [
        (q, index)
        for q in sorted(children)
        for index, (target, _) in enumerate(children[q])
        if target == state
    ]
    moved = False
    for q, index in occurrences:
        _, m = children[q][index]
        choice = rng.randrange(3)
        if choice == 1:
            children[q][index] = (clone, m)
            moved = True
        elif choice == 2 and not is_omega(m) and m >= 2:
            kept = rng.randint(1, m - 1)
            children[q][index] = (state, kept)
            children[q].append((clone, m - kept))
            moved = True
    if not moved:
        q, index = occurrences[0]
        children[q][index] = (clone, children[q][index][1])

    return prune(Scheme(s.root, children, s.name))


def random_equivalent_scheme(s: Scheme, seed: Seed = 0, splits: int = 2) -> Scheme:
    """
    A scheme with the same unfolding up to isomorphism, obtained by splitting states
    :param s:
    :param seed:
    :param splits:
    :return:
    """
    rng = _rng(seed, "split")
    for _ in range(splits):
        s = _split_once(s, rng)
    display.vvv(f"Split '{s.name}' into {len(s.states)} states")
    return s.renamed(f"{s.name}_split")


def random_extension(s: Scheme, seed: Seed = 0, additions: int = 2) -> Scheme:
    """
    A scheme whose unfolding contains the unfolding of s with the same root: entries get more copies, or states get
    new children
    :param s:
    :param seed:
    :param additions:
    :return:
    """
    rng = _rng(seed, "extend")
    children: Dict[str, Dict[str, object]] = {q: dict(entries) for q, entries in s.children.items()}
    for _ in range(additions):
        state = rng.choice(sorted(children))
        entries = children[state]
        finite = sorted(target for target, m in entries.items() if not is_omega(m))
        if finite and rng.random() < 0.5:
            target = rng.choice(finite)
            entries[target] += 1
            continue
        candidates = sorted(set(children) - set(entries))
        if candidates and rng.random() < 0.5:
            entries[rng.choice(candidates)] = 1
        else:
            leaf = fresh_name("X", set(children))
            children[leaf] = {}
            children[state][leaf] = 1
    return Scheme(
        s.root,
        {q: sorted(entries.items()) for q, entries in children.items()},
        f"{s.name}_extended",
    )
