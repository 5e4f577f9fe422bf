"""Exception hierarchy.

Every failure raised by the package derives from :class:`CommdiffError`.
The two intermediate classes decide the CLI exit status: bad inputs exit
with 1, failures during computation exit with 2.
"""

from __future__ import annotations


class CommdiffError(Exception):
    """Base class for all package errors."""


class InputError(CommdiffError, ValueError):
    """Malformed, missing or inconsistent input data or configuration."""


class ComputationError(CommdiffError, ValueError):
    """A computation could not be carried out on otherwise valid input."""
