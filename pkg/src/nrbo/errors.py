"""Exception types shared across the package."""


class NrboError(Exception):
    """Base class for every package-specific error."""


class DomainError(NrboError, ValueError):
    """Input outside a declared domain (bounds, dimension, precondition)."""


class BudgetError(NrboError, ValueError):
    """A resource cap would be exceeded (e.g. candidate grid size)."""


class StateError(NrboError, RuntimeError):
    """Operation called in a phase or state that does not allow it."""


class ProtocolError(NrboError, RuntimeError):
    """Ask/tell pairing or external black-box exchange violated."""


class NumericalError(NrboError, RuntimeError):
    """Linear-algebra failure that jitter escalation could not repair."""


class ConfigError(NrboError, ValueError):
    """Run configuration invalid or inconsistent with existing artifacts."""
