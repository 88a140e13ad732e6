"""Exception hierarchy.

Input-shape problems derive from ``ValueError``; numerical breakdowns derive
from ``ArithmeticError`` so callers can tell bad input from bad luck.
"""


class OpAlgError(Exception):
    """Base class for every error raised by :mod:`opalg`."""


class InputError(OpAlgError, ValueError):
    pass


class NumericalError(OpAlgError, ArithmeticError):
    pass


# matkernel
class NotHermitian(InputError):
    pass


class NotNormal(InputError):
    pass


class NotCommuting(InputError):
    pass


class NoConvergence(NumericalError):
    pass


# algebra
class DimensionCap(NumericalError):
    pass


class NumericalRankAmbiguity(NumericalError):
    pass


class NotMember(InputError):
    pass


class AmbiguousMembership(NumericalError):
    pass


class NotUnital(InputError):
    pass


# spectral
class NotInAlgebra(InputError):
    pass


class NotSelfAdjoint(InputError):
    pass


class NotPositive(InputError):
    pass


class NotInvertible(InputError):
    pass


class FunctionUndefinedOnSpectrum(InputError):
    pass


# states / gns
class NotState(InputError):
    pass


class NotCommutative(InputError):
    pass


class EmptyList(InputError):
    pass


class NormBoundViolated(InputError):
    pass


class IntervalEmpty(NumericalError):
    pass


class NotSeparable(InputError):
    pass


class AmbiguousRank(NumericalError):
    pass


# projections
class SpectralGapViolation(InputError):
    pass


class NotRankOne(InputError):
    pass


class NetTooCoarse(InputError):
    pass


# russell
class LevelCap(InputError):
    pass


# trees
class TreeError(InputError):
    """A node set that is not a tree (not hereditary, mixed label kinds)."""


class NotFinite(InputError):
    pass


class SequenceTooShort(InputError):
    pass


# cli
class ParseError(InputError):
    def __init__(self, message, line=None, column=None, path=None):
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__(message + (f" ({'; '.join(where)})" if where else ""))
        self.line = line
        self.column = column
        self.path = path


class ShapeError(InputError):
    pass


class UnknownCommand(InputError):
    pass
