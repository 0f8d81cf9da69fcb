"""Exception hierarchy shared by every module.

Each error carries the CLI exit code it maps to and an optional witness
(a small JSON-serializable dict naming the offending vertices, pairs or values).

Exit codes:
    2 - usage / I/O
    3 - validation (an input or intermediate object is not what it must be)
    4 - verification failure with witness
"""

from typing import Any


class BoxSpaceError(Exception):
    """Base class for all library errors."""

    exit_code = 3

    def __init__(self, message: str, witness: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "witness": self.witness,
        }


# === Usage / I/O ===


class InputError(BoxSpaceError):
    exit_code = 2


class SeedNotFound(InputError):
    """Neither a builtin name nor a readable graph file."""


class BadInput(InputError):
    """A file was readable but its contents do not parse."""


# === Validation ===


class DisconnectedGraph(BoxSpaceError):
    pass


class NotRegular(BoxSpaceError):
    pass


class SizeCapExceeded(BoxSpaceError):
    pass


class BadGenerator(BoxSpaceError):
    pass


class NotCayley(BoxSpaceError):
    """The multigraph is not the Cayley graph of a group on its labels."""


class NotBijective(BoxSpaceError):
    pass


class NotHomomorphic(BoxSpaceError):
    pass


class OrderCapExceeded(BoxSpaceError):
    pass


class NotDividing(BoxSpaceError):
    pass


class DiametersNotIncreasing(BoxSpaceError):
    pass


class SectionLengthMismatch(BoxSpaceError):
    """A chosen section does not preserve distance to the identity."""


class GapTooSmall(BoxSpaceError):
    pass


class NonIntegralGap(BoxSpaceError):
    pass


class MismatchedPointSets(BoxSpaceError):
    pass


class MissingWallData(BoxSpaceError):
    pass


class NotSymmetric(BoxSpaceError):
    pass


class NoConvergence(BoxSpaceError):
    pass


class KernelNotPSD(BoxSpaceError):
    pass


class NoValidS(BoxSpaceError):
    pass


# === Verification failures ===


class VerificationError(BoxSpaceError):
    exit_code = 4


class EtaEscapesH(VerificationError):
    pass


class InequalityViolated(VerificationError):
    pass


class ConditionViolated(VerificationError):
    pass
