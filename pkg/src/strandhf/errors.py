"""Exception types shared across the package."""
from __future__ import annotations


class StrandError(Exception):
    """Base class for every error raised by strandhf."""


class MalformedMatching(StrandError):
    pass


class DisconnectedSurgery(StrandError):
    pass


class UnknownName(StrandError):
    pass


class SizeLimit(StrandError):
    """A basis or complex grew past the configured cap."""


class ClosureViolation(StrandError):
    """A product or differential left the span it should stay inside."""


class ChordOutOfRange(StrandError):
    pass


class WrongSize(StrandError):
    pass


class NotAComplex(StrandError):
    pass


class ShapeMismatch(StrandError):
    pass


class SlotMismatch(StrandError):
    pass


class ConvergenceRisk(StrandError):
    pass


class AlgebraMismatch(StrandError):
    pass


class ArityCap(StrandError):
    """A transferred operation would exceed the arity cap in strict mode."""


class DegreeBoundTooSmall(StrandError):
    pass
