"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so every error a command can
raise on bad input derives from :class:`EnvelopeToolError`.
"""

from __future__ import annotations


class EnvelopeToolError(Exception):
    """Base class for all package errors."""


class DomainError(EnvelopeToolError, ValueError):
    """A primitive was evaluated outside its real domain."""

    def __init__(self, primitive: str, message: str, offset: int | None = None,
                 point: tuple[float, float] | None = None):
        self.primitive = primitive
        self.message = message
        self.offset = offset
        self.point = point
        parts = [f"{primitive}: {message}"]
        if offset is not None:
            parts.append(f"at offset {offset}")
        if point is not None:
            parts.append(f"at (u, v) = ({point[0]!r}, {point[1]!r})")
        super().__init__(" ".join(parts))


class DslSyntaxError(EnvelopeToolError, ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        text = f"{message} at byte offset {offset}"
        if self.expected:
            text += "; expected one of: " + ", ".join(sorted(self.expected))
        super().__init__(text)


class UnknownIdentifierError(DslSyntaxError):
    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class SingularPointError(EnvelopeToolError):
    """No frame can be derived because x_u and x_v are dependent."""


class FramedAxiomError(EnvelopeToolError):
    """The supplied (x, n, s) violates the framed-surface conditions."""


class DegenerateJacobianError(EnvelopeToolError):
    pass


class NotApplicableError(EnvelopeToolError):
    pass


class NotCreativeError(EnvelopeToolError):
    pass


class BranchUnavailableError(EnvelopeToolError):
    pass


class NoOpenNeighborhoodError(EnvelopeToolError):
    pass


class HypothesisNotMetError(EnvelopeToolError):
    pass


class ConfigError(EnvelopeToolError, ValueError):
    pass
