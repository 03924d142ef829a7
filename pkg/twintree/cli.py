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
import os
import sys
from typing import List, Optional, Sequence

from ansible.cli import CLI
from ansible.cli.arguments import option_helpers
from ansible.errors import AnsibleError, AnsibleOptionsError
from ansible.release import __version__ as ansible_version
from ansible.utils.display import Display

from twintree import __prog__, __version__
from twintree.checks import SUITES, check_suite
from twintree.construct import (
    ToothPattern,
    caterpillar_family,
    comb_tooth_family,
    make,
    sandwich_family,
)
from twintree.decide import (
    Certificate,
    Verdict,
    oracle_embed_trunc,
    scheme_embed_rooted,
    scheme_embed_unrooted,
    scheme_iso_rooted,
    scheme_iso_unrooted,
    twin_rooted,
    twin_unrooted,
    DEFAULT_VERTEX_LIMIT,
)
from twintree.finite_tree import FiniteTree, RootedFiniteTree, root_at
from twintree.parser import parse_document
from twintree.renderer import serialize
from twintree.scheme import (
    Scheme,
    VertexAddress,
    classify,
    from_rooted_tree,
    local_iso_up_to,
    reroot,
    truncate,
)

# The display is a singleton. This instruction will NOT return a new instance.
# We explicitly set the verbosity after the init.
display = Display()

FAMILIES = ("caterpillar", "tooth", "sandwich")

# Exit code of usage, parse and validation errors
EXIT_ERROR = 3


class TwinTreeCLI(CLI):
    """
    The twintree CLI: decisions on schemes, families and check suites
    """

    name = __prog__

    def __init__(self, args, callback=None):
        super().__init__(args=args, callback=callback)
        self.options = None

    def run(self) -> int:
        super().run()

        display.verbosity = self.options.verbosity
        command = getattr(self, f"_run_{self.options.action}")
        return command()

    def _load(self, path: str) -> Scheme:
        """
        Read a .tree document as a scheme. Trees become one state per vertex, unrooted trees are rooted at 0.
        :param path:
        :return:
        """
        try:
            with open(path) as f:
                text = f.read()
        except OSError as e:
            raise AnsibleOptionsError(f"Unable to read '{path}': {e.strerror}")

        name, value = parse_document(text, path)
        if isinstance(value, FiniteTree):
            display.warning(f"The tree '{name}' of {path} has no root, rooting it at the vertex 0")
            value = root_at(value, 0)
        if isinstance(value, RootedFiniteTree):
            return from_rooted_tree(value, name)
        return value

    def _schemes(self) -> List[Scheme]:
        return [self._load(path) for path in self.options.documents]

    def _emit(self, value, text: str, inputs: Sequence[Scheme] = ()):
        if self.options.json:
            display.display(serialize(value, inputs=inputs))
        else:
            display.display(text)

    def _emit_certificate(self, certificate: Certificate) -> int:
        text = f"{certificate.kind} '{certificate.a.name}' '{certificate.b.name}': {certificate.verdict.value}"
        if certificate.failure_depth is not None:
            text += f" (failure depth {certificate.failure_depth})"
        reason = getattr(certificate, "reason", None)
        if reason:
            text += f": {reason}"
        self._emit(certificate, text)
        return certificate.verdict.exit_code

    def _run_iso(self) -> int:
        a, b = self._schemes()
        if self.options.unrooted:
            return self._emit_certificate(scheme_iso_unrooted(a, b, self.options.bound))
        return self._emit_certificate(scheme_iso_rooted(a, b))

    def _run_embed(self) -> int:
        a, b = self._schemes()
        if self.options.unrooted:
            return self._emit_certificate(scheme_embed_unrooted(a, b, self.options.bound))
        return self._emit_certificate(scheme_embed_rooted(a, b))

    def _run_twin(self) -> int:
        a, b = self._schemes()
        if self.options.rooted:
            return self._emit_certificate(twin_rooted(a, b))
        return self._emit_certificate(twin_unrooted(a, b, self.options.bound))

    def _run_classify(self) -> int:
        (s,) = self._schemes()
        report = classify(s)
        lines = [f"{key}: {str(value).lower()}" for key, value in report.flags().items()]
        if report.cycle_witness:
            lines.append(f"cycle: {' -> '.join(report.cycle_witness)}")
        if report.comb_witness:
            cycle, branching = report.comb_witness
            lines.append(f"comb: branching state {branching} on {' -> '.join(cycle)}")
        self._emit(report, "\n".join(lines), inputs=[s])
        return 0

    def _run_truncate(self) -> int:
        (s,) = self._schemes()
        display.display(serialize(truncate(s, self.options.depth)).rstrip("\n"))
        return 0

    def _run_reroot(self) -> int:
        (s,) = self._schemes()
        rerooted = reroot(s, VertexAddress.parse(self.options.address))
        display.display(serialize(rerooted).rstrip("\n"))
        return 0

    def _run_localiso(self) -> int:
        a, b = self._schemes()
        failure = local_iso_up_to(a, b, self.options.depth)
        verdict = Verdict.YES if failure is None else Verdict.NO
        document = {
            "kind": "localiso",
            "verdict": verdict.value,
            "witness": {"depth": self.options.depth},
            "failure_depth": failure,
        }
        if failure is None:
            text = f"the truncations of '{a.name}' and '{b.name}' agree up to depth {self.options.depth}"
        else:
            text = f"the truncations of '{a.name}' and '{b.name}' differ at depth {failure}"
        self._emit(document, text, inputs=[a, b])
        return verdict.exit_code

    def _run_oracle(self) -> int:
        a, b = self._schemes()
        embeds = oracle_embed_trunc(a, b, self.options.depth, DEFAULT_VERTEX_LIMIT)
        verdict = Verdict.YES if embeds else Verdict.NO
        document = {
            "kind": "oracle",
            "verdict": verdict.value,
            "witness": {"depth": self.options.depth},
            "failure_depth": None if embeds else self.options.depth,
        }
        text = f"oracle embed '{a.name}' '{b.name}' at depth {self.options.depth}: {verdict.value}"
        self._emit(document, text, inputs=[a, b])
        return verdict.exit_code

    def _run_family(self) -> int:
        kind, size, bound = self.options.family, self.options.max_n, self.options.family_bound
        if kind == "caterpillar":
            family = caterpillar_family(size or 6, bound)
        elif kind == "tooth":
            patterns = [ToothPattern.parse(text) for text in self.options.patterns]
            family = comb_tooth_family(patterns, depth_bound=bound)
        else:
            component = make(self.options.component)
            family = sandwich_family(
                make("ray"), (self.options.period, component), size or 5, depth_bound=bound
            )

        lines = [f"{family.kind}: {', '.join(family.names)}"]
        for pair in family.pairs:
            first, second = (family.members[i].name for i in pair)
            iso = family.isos[pair]
            lines.append(
                f"  {first} / {second}: twin {family.twins[pair].verdict.value}, iso {iso.verdict.value}"
                + (f" (failure depth {iso.failure_depth})" if iso.failure_depth is not None else "")
            )
        if family.failure_depths is not None:
            lines.append(f"failure depths: {family.failure_depths}")
        self._emit(family, "\n".join(lines))
        return 0

    def _run_check(self) -> int:
        report = check_suite(
            self.options.suite,
            seed=self.options.seed,
            max_n=self.options.max_n,
            cases=self.options.cases,
            depth=self.options.depth,
            bound=self.options.check_bound,
            timing=self.options.timing,
        )
        text = (
            f"{report.suite}: {'pass' if report.passed else 'fail'}, {report.cases} cases, "
            f"{report.skipped} skipped, {len(report.failures)} failures"
        )
        if report.wall_time is not None:
            text += f", {report.wall_time:.3f}s"
        for failure in report.failures:
            text += f"\n  expected {failure.expected}, got {failure.got}: {failure.inputs}"
        self._emit(report, text)
        return report.exit_code

    def _add_my_options(self):
        """
        Add the sub-commands and their options to the parser
        :return:
        """
        self.parser.prog = __prog__

        self.parser.add_argument(
            "--version",
            action="version",
            version=f"{__prog__} {__version__} (with ansible {ansible_version})",
        )

        common = option_helpers.ArgumentParser(add_help=False)
        option_helpers.add_verbosity_options(common)
        common.add_argument(
            "--json",
            action="store_true",
            default=False,
            help="Print the result as a JSON document.",
        )
        common.add_argument(
            "--depth",
            type=int,
            default=8,
            help="Truncation or oracle depth. Default: %(default)s",
        )
        common.add_argument(
            "--seed",
            default=os.environ.get("TWINTREE_SEED", "0"),
            help="Seed of the random cases. Default: $TWINTREE_SEED or 0",
        )

        bounded = option_helpers.ArgumentParser(add_help=False)
        bounded.add_argument(
            "--bound",
            type=int,
            default=4,
            help="Deepest rerooting tried by the unrooted semi-decisions. Default: %(default)s",
        )

        subparsers = self.parser.add_subparsers(dest="action", metavar="COMMAND")
        subparsers.required = True

        def pair_command(name: str, description: str):
            parser = subparsers.add_parser(name, help=description, parents=[common, bounded])
            parser.add_argument("documents", nargs=2, metavar="tree", help="Two .tree documents")
            return parser

        iso = pair_command("iso", "Decide whether two trees are isomorphic (rooted by default).")
        iso.add_argument(
            "--unrooted",
            action="store_true",
            default=False,
            help="Semi-decide the isomorphism of the unrooted trees up to --bound.",
        )
        embed = pair_command("embed", "Decide whether the first tree embeds into the second (rooted by default).")
        embed.add_argument(
            "--unrooted",
            action="store_true",
            default=False,
            help="Semi-decide the embedding of the unrooted trees up to --bound.",
        )
        twin = pair_command("twin", "Decide whether two trees embed into each other (unrooted by default).")
        twin.add_argument(
            "--rooted",
            action="store_true",
            default=False,
            help="Decide the rooted twinning exactly.",
        )
        pair_command("localiso", "First depth up to --depth where the truncations of two trees differ.")
        pair_command("oracle", "Backtracking embedding search on the truncations at --depth.")

        for name, description in (
            ("classify", "Finite, locally finite, rayless, comb and nearly finite flags of a tree."),
            ("truncate", "The truncation of a tree at --depth, as a .tree document."),
        ):
            parser = subparsers.add_parser(name, help=description, parents=[common])
            parser.add_argument("documents", nargs=1, metavar="tree", help="A .tree document")

        reroot_parser = subparsers.add_parser(
            "reroot", help="The tree rerooted at an address, as a .tree document.", parents=[common]
        )
        reroot_parser.add_argument("documents", nargs=1, metavar="tree", help="A .tree document")
        reroot_parser.add_argument("address", help="Address of the new root, like 'S:0/L:0' or '.'")

        family = subparsers.add_parser("family", help="Build and certify a twin family.", parents=[common])
        family.add_argument("family", choices=FAMILIES, help="The family to build")
        family.add_argument("--max-n", dest="max_n", type=int, default=None, help="Number of members")
        family.add_argument(
            "--bound",
            dest="family_bound",
            type=int,
            default=None,
            help="Deepest rerooting tried by the twin checks. Default: the number of members",
        )
        family.add_argument(
            "--pattern",
            dest="patterns",
            action="append",
            default=None,
            help="Tooth pattern of a member of the tooth family, like '10' or '0:1'. Repeatable.",
        )
        family.add_argument(
            "--period",
            type=int,
            default=1,
            help="Attach period of the sandwich family. Default: %(default)s",
        )
        family.add_argument(
            "--component",
            default="cherry",
            help="Named tree attached along the ray by the sandwich family. Default: %(default)s",
        )

        check = subparsers.add_parser("check", help="Run a check suite.", parents=[common])
        check.add_argument("suite", choices=list(SUITES), help="The suite to run")
        check.add_argument("--max-n", dest="max_n", type=int, default=None, help="Largest tree size or family size")
        check.add_argument("--cases", type=int, default=None, help="Number of random cases")
        check.add_argument(
            "--bound",
            dest="check_bound",
            type=int,
            default=None,
            help="Deepest rerooting tried by the twin checks",
        )
        check.add_argument(
            "--timing",
            action="store_true",
            default=False,
            help="Record the wall time in the report.",
        )

    def init_parser(self, usage="", desc=None, epilog=None):
        super().init_parser(
            usage=f"{__prog__} COMMAND [options] tree.tree ...",
            desc="Decide isomorphism, embedding and twinning of finitely presented infinite trees.",
            epilog=epilog,
        )

        self._add_my_options()

    def post_process_args(self, options):
        options = super().post_process_args(options)

        # init the options
        self.options = options

        if getattr(self.options, "family", None) == "tooth" and not self.options.patterns:
            self.options.patterns = ["1", "10", "100"]
        if getattr(self.options, "depth", 0) < 0:
            raise AnsibleOptionsError(f"The depth must be >= 0, got {self.options.depth}")

        return options


def run_command(argv: Sequence[str]) -> int:
    """
    Run a command line
    :param argv: The arguments, without the program name
    :return: 0 for yes or pass, 1 for no or fail, 2 for unknown, 3 for usage, parse and validation errors
    """
    cli = TwinTreeCLI([__prog__] + list(argv))
    try:
        return cli.run()
    except SystemExit as e:
        # argparse exits 0 after --help and --version, 2 on usage errors
        return 0 if e.code in (0, None) else EXIT_ERROR
    except AnsibleError as e:
        display.error(str(e), wrap_text=False)
        return EXIT_ERROR


def main(args: Optional[List[str]] = None):
    args = args or sys.argv
    sys.exit(run_command(args[1:]))


if __name__ == "__main__":
    main(sys.argv)
