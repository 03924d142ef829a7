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
JSON documents of the verdicts. Every document has the keys kind, verdict, witness, failure_depth and inputs.
"""
import json
from typing import Any, Dict, List, Optional, Sequence

from twintree.construct import TwinFamily
from twintree.decide import (
    Certificate,
    EmbedCertificate,
    IsoCertificate,
    TwinCertificate,
    UnrootedEmbedCertificate,
    UnrootedIsoCertificate,
)
from twintree.renderer import Renderer, display
from twintree.renderer.dsl import DslRenderer
from twintree.report import CheckReport
from twintree.scheme import ClassificationReport, Scheme
from twintree.utils import content_hash, multiplicity_to_json


def scheme_input(s: Scheme) -> Dict[str, str]:
    """
    How a scheme appears in the inputs of a document: name, content hash and DSL text
    :param s:
    :return:
    """
    text = DslRenderer.render_scheme(s)
    return {"name": s.name, "hash": content_hash(text), "dsl": text}


def _document(
    kind: str,
    verdict: Optional[str],
    witness: Any,
    failure_depth: Optional[int] = None,
    inputs: Sequence[Scheme] = (),
) -> Dict[str, Any]:
    return {
        "kind": kind,
        "verdict": verdict,
        "witness": witness,
        "failure_depth": failure_depth,
        "inputs": [scheme_input(s) for s in inputs],
    }


def _iso_witness(certificate: IsoCertificate) -> Dict[str, Any]:
    return {
        "partition": {
            f"{side}:{state}": block for (side, state), block in certificate.partition.items()
        },
        "rounds": certificate.rounds,
    }


def _embed_witness(certificate: EmbedCertificate) -> Dict[str, Any]:
    return {
        "relation": [list(pair) for pair in sorted(certificate.relation)],
        "matchings": [
            {
                "pair": list(pair),
                "assignment": [
                    {"source": i, "target": j, "copies": multiplicity_to_json(amount)}
                    for i, j, amount in certificate.matchings[pair]
                ],
            }
            for pair in sorted(certificate.matchings)
        ],
        "rounds": certificate.rounds,
    }


def _unrooted_witness(certificate) -> Dict[str, Any]:
    return {
        "reason": certificate.reason,
        "depth_bound": certificate.depth_bound,
        "address": None if certificate.address is None else str(certificate.address),
        "rooted": None if certificate.rooted is None else certificate_body(certificate.rooted),
    }


def certificate_body(certificate: Certificate) -> Dict[str, Any]:
    """
    The document of a certificate, without the inputs
    :param certificate:
    :return:
    """
    if isinstance(certificate, IsoCertificate):
        witness = _iso_witness(certificate)
    elif isinstance(certificate, EmbedCertificate):
        witness = _embed_witness(certificate)
    elif isinstance(certificate, TwinCertificate):
        witness = {
            "forward": certificate_body(certificate.forward),
            "backward": certificate_body(certificate.backward),
        }
    elif isinstance(certificate, (UnrootedEmbedCertificate, UnrootedIsoCertificate)):
        witness = _unrooted_witness(certificate)
    else:
        raise TypeError(f"Unsupported certificate {type(certificate).__name__}")
    body = _document(certificate.kind, certificate.verdict.value, witness, certificate.failure_depth)
    del body["inputs"]
    return body


class JsonRenderer(Renderer):
    """
    Render certificates, families and reports as JSON documents, sorted keys and two-space indent
    """

    def supports(self, value: Any) -> bool:
        return isinstance(value, (Certificate, TwinFamily, CheckReport, ClassificationReport, dict))

    def render(self, value: Any, inputs: Sequence[Scheme] = (), **kwargs) -> str:
        """

        :param value:
        :param inputs: The schemes a classification report or a plain document is about
        :param kwargs:
        :return:
        """
        display.vvv(f"Rendering {type(value).__name__} as JSON")
        return json.dumps(self.to_document(value, inputs), indent=2, sort_keys=True)

    def to_document(self, value: Any, inputs: Sequence[Scheme] = ()) -> Dict[str, Any]:
        if isinstance(value, Certificate):
            document = certificate_body(value)
            document["inputs"] = [scheme_input(s) for s in (value.a, value.b)]
            return document
        if isinstance(value, TwinFamily):
            return self._family(value)
        if isinstance(value, CheckReport):
            return self._report(value)
        if isinstance(value, ClassificationReport):
            return self._classification(value, inputs)
        if isinstance(value, dict):
            return _document(
                value["kind"],
                value.get("verdict"),
                value.get("witness"),
                value.get("failure_depth"),
                inputs,
            )
        raise TypeError(f"Unsupported value {type(value).__name__}")

    @staticmethod
    def _family(family: TwinFamily) -> Dict[str, Any]:
        pairs: List[Dict[str, Any]] = []
        for pair in family.pairs:
            iso = family.isos[pair]
            pairs.append(
                {
                    "members": [family.members[i].name for i in pair],
                    "twin": family.twins[pair].verdict.value,
                    "iso": iso.verdict.value,
                    "iso_failure_depth": iso.failure_depth,
                    "unrooted_iso": family.unrooted_isos[pair].verdict.value,
                }
            )
        witness = {
            "family": family.kind,
            "members": family.names,
            "depth_bound": family.depth_bound,
            "pairs": pairs,
            "failure_depths": family.failure_depths,
        }
        return _document("family", "yes", witness, inputs=family.members)

    @staticmethod
    def _report(report: CheckReport) -> Dict[str, Any]:
        witness = {
            "suite": report.suite,
            "seed": report.seed,
            "cases": report.cases,
            "skipped": report.skipped,
            "failures": [failure.to_dict() for failure in report.failures],
        }
        if report.wall_time is not None:
            witness["wall_time"] = round(report.wall_time, 3)
        return _document("check", "pass" if report.passed else "fail", witness)

    @staticmethod
    def _classification(report: ClassificationReport, inputs: Sequence[Scheme]) -> Dict[str, Any]:
        witness: Dict[str, Any] = dict(report.flags())
        witness["cycle_witness"] = None if report.cycle_witness is None else list(report.cycle_witness)
        if report.comb_witness is None:
            witness["comb_witness"] = None
        else:
            cycle, branching = report.comb_witness
            witness["comb_witness"] = {"cycle": list(cycle), "branching_state": branching}
        return _document("classification", None, witness, inputs=inputs)
