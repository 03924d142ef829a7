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
from ansible.errors import AnsibleError, AnsibleParserError


class TwinTreeError(AnsibleError):
    """
    Base class of all the errors raised by twintree
    """


class InvalidTreeError(TwinTreeError):
    pass


class NotALeafError(TwinTreeError):
    pass


class LastVertexError(TwinTreeError):
    pass


class CapExceededError(TwinTreeError):
    """
    More objects exist than the caller allowed to list
    """


class InfiniteUnfoldingError(TwinTreeError):
    pass


class UnfoldingTooLargeError(TwinTreeError):
    pass


class BadAddressError(TwinTreeError):
    pass


class BadParamsError(TwinTreeError):
    pass


class BadIndexError(TwinTreeError):
    pass


class CertificateFailureError(TwinTreeError):
    """
    A certificate contradicts the invariant it should satisfy. This is an engine bug.
    """


class UnknownSuiteError(TwinTreeError):
    pass


class DslParseError(AnsibleParserError):
    """
    Syntax error in a DSL document
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SchemeValidationError(AnsibleParserError):
    """
    The parsed scheme violates one of the scheme invariants
    """
