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
from typing import Any, Dict, List, Optional


class CheckFailure:
    """
    A case of a check suite where the engine and the oracle disagree
    """

    def __init__(self, inputs: Any, expected: Any, got: Any):
        self.inputs = inputs
        self.expected = expected
        self.got = got

    def to_dict(self) -> Dict[str, Any]:
        return {"inputs": self.inputs, "expected": self.expected, "got": self.got}

    def __repr__(self) -> str:
        return f"CheckFailure({self.inputs}: expected {self.expected}, got {self.got})"


class CheckReport:
    """
    The outcome of a check suite
    """

    kind = "check"

    def __init__(self, suite: str, seed: str):
        self.suite = suite
        self.seed = seed
        self.cases = 0
        self.skipped = 0
        self.failures: List[CheckFailure] = []
        # Only filled when the timing is requested, the reports stay byte-identical otherwise
        self.wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def case(self, ok: bool, inputs: Any, expected: Any, got: Any) -> bool:
        """
        Record a case
        :param ok: Whether the engine agrees with the oracle
        :param inputs: What the case was run on
        :param expected: The oracle answer
        :param got: The engine answer
        :return: ok
        """
        self.cases += 1
        if not ok:
            self.failures.append(CheckFailure(inputs, expected, got))
        return ok

    def skip(self):
        self.skipped += 1

    def __repr__(self) -> str:
        return (
            f"CheckReport('{self.suite}', cases={self.cases}, skipped={self.skipped}, "
            f"failures={len(self.failures)})"
        )
