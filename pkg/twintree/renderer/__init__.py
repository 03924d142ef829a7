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
from abc import ABC, abstractmethod
from typing import Any

from ansible.utils.display import Display

display = Display()


class Renderer(ABC):
    """
    Turns the values of the library into text
    """

    @abstractmethod
    def supports(self, value: Any) -> bool:
        pass

    @abstractmethod
    def render(self, value: Any, **kwargs) -> str:
        """
        Render the value. The output is deterministic: equal values give byte-identical texts.
        :param value:
        :param kwargs:
        :return:
        """
        pass


from twintree.renderer.dsl import DslRenderer  # noqa: E402
from twintree.renderer.certificate import JsonRenderer  # noqa: E402

RENDERERS = [DslRenderer(), JsonRenderer()]


def serialize(value: Any, **kwargs) -> str:
    """
    Schemes and trees as DSL documents, everything else as JSON
    :param value:
    :param kwargs: Passed to the renderer
    :return:
    """
    for renderer in RENDERERS:
        if renderer.supports(value):
            return renderer.render(value, **kwargs)
    raise TypeError(f"No renderer for {type(value).__name__}")
