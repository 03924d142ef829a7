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
Check suites: the engines against brute-force oracles and against the known facts about the tree families.
Every case draws its randomness from "<seed>:<suite>:<case>", the reports are identical for equal seeds.
"""
import random
import time
from typing import Callable, Dict, Optional

from ansible.utils.display import Display

from twintree.construct import (
    ToothPattern,
    caterpillar_family,
    comb_tooth_family,
    make,
    sandwich_family,
    star_of_paths_truncation,
    KINDS,
)
from twintree.decide import (
    Verdict,
    oracle_embed_trunc,
    scheme_embed_rooted,
    scheme_iso_rooted,
    twin_rooted,
)
from twintree.errors import CapExceededError, CertificateFailureError, UnknownSuiteError
from twintree.finite_tree import (
    all_rooted_trees,
    embed_rooted,
    enumerate_root_self_embeddings,
    iso_rooted,
)
from twintree.generators import (
    random_equivalent_scheme,
    random_extension,
    random_relabeling,
    random_rooted_tree,
    random_scheme,
)
from twintree.parser import parse_dsl
from twintree.renderer import serialize
from twintree.report import CheckReport
from twintree.scheme import (
    Scheme,
    ShapeInterner,
    addresses_up_to,
    branching_vertex_count,
    classify,
    level_profile,
    reroot,
    reroot_with_return,
    truncation_shape,
    unfolding_size,
)
from twintree.utils import OMEGA

display = Display()

# Truncations with more vertices than this are not searched by the oracles
ORACLE_VERTEX_LIMIT = 4000

# Random pairs drawn per oracle case before the case is skipped
MAX_DRAWS = 50

# Share of skipped cases above which a report gets a warning
SKIPPED_SHARE_WARNING = 0.01

# Self-embeddings enumerated per tree
SELF_EMBEDDING_CAP = 10000

# Number of rooted trees on n vertices, n = 1..8
ROOTED_TREE_COUNTS = (1, 1, 2, 4, 9, 20, 48, 115)

DEFAULT_TOOTH_PATTERNS = ("1", "10", "100", "1000", "10000")


class CheckOptions:
    """
    What a suite runs on. Unset values take the default of the suite.
    """

    def __init__(
        self,
        seed: str = "0",
        max_n: Optional[int] = None,
        cases: Optional[int] = None,
        depth: int = 8,
        bound: Optional[int] = None,
    ):
        self.seed = str(seed)
        self.max_n = max_n
        self.cases = cases
        self.depth = depth
        self.bound = bound

    def rng(self, suite: str, case: int) -> random.Random:
        return random.Random(self.case_seed(suite, case))

    def case_seed(self, suite: str, case: int) -> str:
        return f"{self.seed}:{suite}:{case}"


def _small(s: Scheme, depth: int) -> bool:
    return unfolding_size(s, depth) <= ORACLE_VERTEX_LIMIT


def _random_pair(
    options: CheckOptions, suite: str, case: int, max_states: int, relate: Callable, draw: int = 0
):
    """
    A random scheme and either an unrelated random scheme or a related one
    :param draw: Index of the redraw for the same case
    :return:
    """
    seed = options.case_seed(suite, case) + (f":{draw}" if draw else "")
    rng = random.Random(seed)
    a = random_scheme(rng.randint(1, max_states), 3, 0.0, f"{seed}:a")
    if rng.random() < 0.5:
        b = relate(a, f"{seed}:b")
    else:
        b = random_scheme(rng.randint(1, max_states), 3, 0.0, f"{seed}:b")
    return a, b


def check_lemma6(report: CheckReport, options: CheckOptions):
    """
    Root-preserving self-embeddings of finite rooted trees are bijective
    """
    for n in range(1, (options.max_n or 8) + 1):
        trees = all_rooted_trees(n)
        if n <= len(ROOTED_TREE_COUNTS):
            expected = ROOTED_TREE_COUNTS[n - 1]
            report.case(len(trees) == expected, f"rooted trees on {n} vertices", expected, len(trees))
        for t in trees:
            try:
                maps = enumerate_root_self_embeddings(t, SELF_EMBEDDING_CAP)
            except CapExceededError:
                report.skip()
                continue
            bad = [m for m in maps if not (m.is_embedding(t, t) and m.is_bijective(t.n))]
            report.case(not bad, repr(t), "bijective", repr(bad[0]) if bad else "bijective")


def check_mutual_finite(report: CheckReport, options: CheckOptions):
    """
    Finite rooted trees embedding into each other are isomorphic
    """
    max_n = options.max_n or 10
    for case in range(options.cases or 1000):
        rng = options.rng("mutual-finite", case)
        seed = options.case_seed("mutual-finite", case)
        a = random_rooted_tree(rng.randint(2, max_n), f"{seed}:a")
        if rng.random() < 0.5:
            b = random_relabeling(a, f"{seed}:b")
        else:
            b = random_rooted_tree(rng.randint(2, max_n), f"{seed}:b")
        if embed_rooted(a, b) is None or embed_rooted(b, a) is None:
            continue
        report.case(iso_rooted(a, b), f"{a} / {b}", "isomorphic", "not isomorphic")


def check_iso_oracle(report: CheckReport, options: CheckOptions):
    """
    Rooted isomorphism against the isomorphism of deep truncations
    """
    for case in range(options.cases or 500):
        a, b = _random_pair(options, "iso-oracle", case, 5, random_equivalent_scheme)
        certificate = scheme_iso_rooted(a, b)
        depth = len(a.states) + len(b.states) + 1
        interner = ShapeInterner()
        expected = truncation_shape(a, depth, interner) == truncation_shape(b, depth, interner)
        got = certificate.verdict == Verdict.YES
        inputs = f"{serialize(a)}{serialize(b)}"
        if report.case(got == expected, inputs, expected, got):
            report.case(certificate.check(), inputs, "certificate checks", "certificate fails")


def _embed_oracle_pair(options: CheckOptions, case: int):
    """
    Draw random pairs until both truncations fit under the oracle limit at the deepest depth the case checks
    :return: (a, b, certificate), or None after MAX_DRAWS draws
    """
    for draw in range(MAX_DRAWS):
        a, b = _random_pair(options, "embed-oracle", case, 5, random_extension, draw)
        certificate = scheme_embed_rooted(a, b)
        deepest = options.depth if certificate.verdict == Verdict.YES else certificate.failure_depth
        if _small(a, deepest) and _small(b, deepest):
            return a, b, certificate
        display.vvv(f"embed-oracle case {case}: draw {draw} is too large at depth {deepest}")
    return None


def check_embed_oracle(report: CheckReport, options: CheckOptions):
    """
    Rooted embedding against the backtracking search on the truncations
    """
    for case in range(options.cases or 300):
        drawn = _embed_oracle_pair(options, case)
        if drawn is None:
            report.skip()
            continue
        a, b, certificate = drawn
        inputs = f"{serialize(a)}{serialize(b)}"
        if certificate.verdict == Verdict.YES:
            depths = range(1, options.depth + 1)
            expected = True
        else:
            depths = [certificate.failure_depth]
            expected = False
        for depth in depths:
            got = oracle_embed_trunc(a, b, depth, ORACLE_VERTEX_LIMIT)
            report.case(got == expected, f"{inputs}depth {depth}", expected, got)


def check_comb_oracle(report: CheckReport, options: CheckOptions):
    """
    The comb rule against the growth of the branching vertices of the truncations
    """
    for case in range(options.cases or 200):
        rng = options.rng("comb-oracle", case)
        s = random_scheme(
            rng.randint(1, 6), 3, 0.0, options.case_seed("comb-oracle", case)
        )
        k = len(s.states)
        growing = branching_vertex_count(s, 6 * k) > branching_vertex_count(s, 2 * k)
        got = classify(s).contains_comb
        report.case(got == growing, serialize(s), growing, got)


def check_lemma7_example(report: CheckReport, options: CheckOptions):
    """
    The truncations of the star of paths, with or without one more ray, are isomorphic
    """
    for n in range(1, (options.max_n or 8) + 1):
        certificate = scheme_iso_rooted(
            star_of_paths_truncation(n, False), star_of_paths_truncation(n, True)
        )
        report.case(
            certificate.verdict == Verdict.YES and certificate.check(),
            f"star of paths, depth {n}",
            "yes",
            certificate.verdict.value,
        )


def _family_cases(report: CheckReport, build: Callable, require_non_isomorphic: bool = True):
    try:
        family = build()
    except CertificateFailureError as e:
        report.case(False, "family", "valid family", e.message)
        return None
    for pair in family.pairs:
        names = " / ".join(family.members[i].name for i in pair)
        twin = family.twins[pair].verdict
        report.case(twin == Verdict.YES, names, "twins", twin.value)
        if require_non_isomorphic:
            iso = family.isos[pair].verdict
            report.case(iso == Verdict.NO, names, "not isomorphic", iso.value)
    return family


def check_caterpillar_family(report: CheckReport, options: CheckOptions):
    """
    The caterpillars minus leading leaves are pairwise twins and pairwise not isomorphic
    """
    k = options.max_n or 6
    family = _family_cases(report, lambda: caterpillar_family(k, options.bound))
    if family is None or not family.pairs:
        return
    rng = options.rng("caterpillar-family", 0)
    for pair in rng.sample(family.pairs, min(3, len(family.pairs))):
        a, b = (family.members[i] for i in pair)
        interner = ShapeInterner()
        differ = truncation_shape(a, options.depth, interner) != truncation_shape(
            b, options.depth, interner
        )
        report.case(differ, f"{a.name} / {b.name}", "truncations differ", "truncations isomorphic")
        for certificate in (family.twins[pair].forward, family.twins[pair].backward):
            target = reroot(certificate.b, certificate.address)
            embeds = oracle_embed_trunc(certificate.a, target, options.depth, ORACLE_VERTEX_LIMIT)
            report.case(
                embeds,
                f"{certificate.a.name} into {certificate.b.name} at {certificate.address}",
                True,
                embeds,
            )


def check_tooth_family(report: CheckReport, options: CheckOptions):
    """
    Hosted combs with teeth removed are pairwise twins and pairwise not isomorphic
    """
    patterns = [ToothPattern.parse(text) for text in DEFAULT_TOOTH_PATTERNS[: options.max_n]]
    _family_cases(report, lambda: comb_tooth_family(patterns, depth_bound=options.bound))


def check_sandwich_family(report: CheckReport, options: CheckOptions):
    """
    The members between the ray and the ray carrying cherries are pairwise twins with increasing failure depths
    """
    k = options.max_n or 5
    family = _family_cases(
        report,
        lambda: sandwich_family(make("ray"), (1, make("cherry")), k, depth_bound=options.bound),
    )
    if family is not None:
        depths = family.failure_depths
        increasing = all(a < b for a, b in zip(depths, depths[1:]))
        report.case(increasing, "failure depths", "strictly increasing", depths)


def check_classification(report: CheckReport, options: CheckOptions):
    """
    Classification of the named trees, and raylessness against the saturation of the truncations
    """
    expected_flags = {
        "ray": {"nearly_finite": True, "rayless": False},
        "caterpillar": {"contains_comb": True},
        "d_ary_2": {"contains_comb": True, "nearly_finite": False},
        "d_ary_3": {"contains_comb": True, "nearly_finite": False},
        "d_ary_w": {"locally_finite": False},
        "path": {"finite": True, "rayless": True},
        "star": {"finite": True, "contains_comb": False},
    }
    named = {
        "ray": make("ray"),
        "caterpillar": make("caterpillar"),
        "d_ary_2": make("d_ary", d=2),
        "d_ary_3": make("d_ary", d=3),
        "d_ary_w": make("d_ary", d=OMEGA),
        "path": make("path", n=4),
        "star": make("star", k=3),
    }
    for name, expected in expected_flags.items():
        flags = classify(named[name]).flags()
        got = {key: flags[key] for key in expected}
        report.case(got == expected, name, expected, got)

    for case in range(options.cases or 100):
        s = random_scheme(
            options.rng("classification", case).randint(1, 6),
            3,
            0.0,
            options.case_seed("classification", case),
        )
        saturated = not level_profile(s, len(s.states) + 1)[-1]
        got = classify(s).rayless
        report.case(got == saturated, serialize(s), saturated, got)


def check_dsl_roundtrip(report: CheckReport, options: CheckOptions):
    """
    Serialized schemes parse back to isomorphic schemes and serialize again to the same text
    """
    schemes = [make(kind) for kind in KINDS]
    schemes += [
        random_scheme(
            options.rng("dsl-roundtrip", case).randint(1, 6),
            3,
            0.2,
            options.case_seed("dsl-roundtrip", case),
        )
        for case in range(options.cases or 100)
    ]
    for s in schemes:
        text = serialize(s)
        parsed = parse_dsl(text)
        same = scheme_iso_rooted(s, parsed).verdict == Verdict.YES and serialize(parsed) == text
        report.case(same, text, text, serialize(parsed))


def check_locally_finite_twins(report: CheckReport, options: CheckOptions):
    """
    Rooted twins among locally finite schemes are isomorphic
    """
    for case in range(options.cases or 200):
        a, b = _random_pair(options, "locally-finite-twins", case, 5, random_equivalent_scheme)
        if twin_rooted(a, b).verdict != Verdict.YES:
            continue
        iso = scheme_iso_rooted(a, b).verdict
        report.case(iso == Verdict.YES, f"{serialize(a)}{serialize(b)}", "yes", iso.value)


def check_reroot_inverse(report: CheckReport, options: CheckOptions):
    """
    Rerooting back at the former root gives a tree isomorphic to the original
    """
    bound = options.bound or 4
    for case in range(options.cases or 100):
        rng = options.rng("reroot-inverse", case)
        s = random_scheme(rng.randint(1, 5), 3, 0.1, options.case_seed("reroot-inverse", case))
        address = rng.choice(addresses_up_to(s, bound))
        rerooted, back = reroot_with_return(s, address)
        verdict = scheme_iso_rooted(reroot(rerooted, back), s).verdict
        report.case(verdict == Verdict.YES, f"{serialize(s)}at {address}", "yes", verdict.value)


SUITES: Dict[str, Callable[[CheckReport, CheckOptions], None]] = {
    "lemma6": check_lemma6,
    "mutual-finite": check_mutual_finite,
    "iso-oracle": check_iso_oracle,
    "embed-oracle": check_embed_oracle,
    "comb-oracle": check_comb_oracle,
    "lemma7-example": check_lemma7_example,
    "caterpillar-family": check_caterpillar_family,
    "tooth-family": check_tooth_family,
    "sandwich-family": check_sandwich_family,
    "classification": check_classification,
    "dsl-roundtrip": check_dsl_roundtrip,
    "locally-finite-twins": check_locally_finite_twins,
    "reroot-inverse": check_reroot_inverse,
}


def check_suite(
    name: str,
    seed: str = "0",
    max_n: Optional[int] = None,
    cases: Optional[int] = None,
    depth: int = 8,
    bound: Optional[int] = None,
    timing: bool = False,
) -> CheckReport:
    """
    Run a check suite
    :param name: One of SUITES
    :param seed:
    :param max_n: Largest tree size, or number of family members
    :param cases: Number of random cases
    :param depth: Oracle depth
    :param bound: Depth bound of the rerootings
    :param timing: Record the wall time in the report
    :return:
    """
    if name not in SUITES:
        raise UnknownSuiteError(f"Unknown check suite '{name}'. Supported suites: {', '.join(SUITES)}")

    options = CheckOptions(seed, max_n, cases, depth, bound)
    report = CheckReport(name, options.seed)
    display.v(f"Running the check suite '{name}' with the seed '{options.seed}'")
    start = time.perf_counter()
    SUITES[name](report, options)
    if timing:
        report.wall_time = time.perf_counter() - start
    display.v(
        f"{name}: {report.cases} cases, {report.skipped} skipped, {len(report.failures)} failures"
    )
    total = report.cases + report.skipped
    if total and report.skipped > SKIPPED_SHARE_WARNING * total:
        display.warning(
            f"{name}: {report.skipped} of {total} cases were skipped"
        )
    for failure in report.failures:
        display.vvv(f"{name}: {failure}")
    return report
