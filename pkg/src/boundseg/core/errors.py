"""Exception roots shared by every boundseg module.

Modules define their own exception classes next to the code that raises
them; all of them derive from one of the two roots below so the CLI can
tell bad input (exit code 2) from a broken internal invariant (exit code 3).
"""


class BoundsegError(Exception):
    """Base class for all boundseg errors."""


class InputError(BoundsegError):
    """Raised when user-supplied input cannot be processed."""


class InvariantViolation(BoundsegError):
    """Raised when an internal invariant does not hold."""
