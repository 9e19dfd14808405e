"""
Exception hierarchy for the XY-Gamma chain toolkit
"""


class GammaChainError(Exception):
    """Base class for all package errors"""


class InvalidParameterError(GammaChainError, ValueError):
    """Raised when physical or numerical inputs are out of range"""


class NotReducibleError(InvalidParameterError):
    """Couplings cannot be mapped onto a uniform nearest-neighbour chain"""


class NumericError(GammaChainError, ArithmeticError):
    """Raised when a numerical procedure fails or loses consistency"""


class DegeneracyError(NumericError):
    """Ground state is degenerate and no sector was chosen"""


class NearResonanceError(NumericError):
    """Effective cavity detuning too close to zero"""


class UndefinedExponentError(NumericError):
    """Exponent ratio with a vanishing denominator"""


class StateValidationError(NumericError):
    """Density matrix fails trace or positivity checks"""
