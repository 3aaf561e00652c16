"""Domain error hierarchy.

Every error carries a machine-readable ``code`` (its class name); the CLI and
the HTTP service surface that code verbatim, so it is part of the wire format.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all domain failures."""

    code = "DomainError"

    def __init__(self, detail: str = ""):
        super().__init__(detail or self.code)
        self.detail = detail


class EmptyLabel(DomainError):
    code = "EmptyLabel"


class MalformedDocument(DomainError):
    code = "MalformedDocument"


class UnknownClass(DomainError):
    code = "UnknownClass"


class DuplicateSlideId(DomainError):
    code = "DuplicateSlideId"


class DanglingReference(DomainError):
    code = "DanglingReference"


class DeckCollision(DomainError):
    code = "DeckCollision"


class UnknownSlide(DomainError):
    code = "UnknownSlide"


class AmbiguousSlide(DomainError):
    code = "AmbiguousSlide"


class UnknownTopic(DomainError):
    code = "UnknownTopic"


class UnknownDeck(DomainError):
    code = "UnknownDeck"


class UnknownMap(DomainError):
    code = "UnknownMap"


class UnknownSession(DomainError):
    code = "UnknownSession"


class UnknownParticipant(DomainError):
    code = "UnknownParticipant"


class CycleDetected(DomainError):
    code = "CycleDetected"


class SessionNotLive(DomainError):
    code = "SessionNotLive"


class SessionEnded(DomainError):
    code = "SessionEnded"


class OutOfBounds(DomainError):
    code = "OutOfBounds"


class InvalidConfig(DomainError):
    code = "InvalidConfig"
