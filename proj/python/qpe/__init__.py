"""Python interface to the quantum probability estimation core."""

from ._qpe import *  # noqa: F401,F403
from ._qpe import DomainError, Family, TrialRole  # noqa: F401
