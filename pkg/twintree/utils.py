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
import hashlib
from typing import Iterable, Set, Union

# A multiplicity is a positive int or OMEGA ("countably many").
# float("inf") gives the saturating arithmetic and the total order for free.
OMEGA = float("inf")

Multiplicity = Union[int, float]


def is_omega(value: Multiplicity) -> bool:
    return value == OMEGA


def is_multiplicity(value) -> bool:
    """
    Check that the value is a valid multiplicity: an int >= 1 or OMEGA
    :param value:
    :return:
    """
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return value >= 1
    return is_omega(value)


def mult_add(*values: Multiplicity) -> Multiplicity:
    """
    Saturating sum of multiplicities: w + k = w
    :param values:
    :return:
    """
    total = 0
    for value in values:
        if is_omega(value):
            return OMEGA
        total += value
    return total


def mult_sum(values: Iterable[Multiplicity]) -> Multiplicity:
    return mult_add(*values)


def mult_dec(value: Multiplicity) -> Multiplicity:
    """
    Remove one copy: w - 1 = w
    :param value:
    :return:
    """
    if is_omega(value):
        return OMEGA
    return value - 1


def format_multiplicity(value: Multiplicity) -> str:
    return "w" if is_omega(value) else str(int(value))


def multiplicity_to_json(value: Multiplicity) -> Union[int, str]:
    return "w" if is_omega(value) else int(value)


def content_hash(text: str, length: int = 12) -> str:
    """
    Hex prefix of the sha256 of a document, the "hash" of the certificate inputs
    :param text: The DSL text of an input
    :param length: Number of hex digits kept
    :return:
    """
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:length]


def fresh_name(base: str, taken: Set[str]) -> str:
    """
    Return a name derived from base that is not in taken
    :param base:
    :param taken:
    :return:
    """
    name = base
    counter = 1
    while name in taken:
        name = f"{base}_{counter}"
        counter += 1
    return name
