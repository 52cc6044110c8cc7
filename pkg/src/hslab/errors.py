"""Error taxonomy shared across the package.

Three failure families, mapped to CLI exit codes by hslab.cli:
invalid input (2), capacity guard (3), internal consistency (4).
"""

from __future__ import annotations


class DomainError(ValueError):
    """Input outside an operation's domain (bad index, wrong group kind, ...)."""


class CapacityError(RuntimeError):
    """Request exceeds a documented size guard for dense computation."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed; indicates a bug, not a user error."""
