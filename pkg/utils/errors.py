"""
Exception hierarchy for goldpoison
Library code raises these; the harness and CLI catch them per item and record failures
"""


class GoldPoisonError(Exception):
    """Base class for all goldpoison errors"""


class InvalidParameter(GoldPoisonError):
    """A parameter falls outside its admissible range"""


class NegativeRadicand(GoldPoisonError):
    """v lies outside the image V: v1*v2 + v2 - v1 < 0"""


class DegenerateDenominator(GoldPoisonError):
    """v lies outside the image V: beta - v2 vanishes"""


class EmptySample(GoldPoisonError):
    """An empirical CDF was requested on an empty sample"""


class SeriesTooShort(GoldPoisonError):
    """A consecutive-pair statistic needs at least two observations"""


class InvalidVariance(GoldPoisonError):
    """Non-positive variance or |correlation| >= 1"""


class GridMismatch(GoldPoisonError):
    """Fields combined pointwise do not share one grid"""


class SingularGram(GoldPoisonError):
    """The contrast Gram block is singular (T1 and T2 not linearly independent)"""


class InvalidBandwidth(GoldPoisonError):
    """Kernel bandwidth must be positive"""


class AllZeroMass(GoldPoisonError):
    """Every pair-pattern weight vanished, the pair cannot be decoded"""


class IoFailure(GoldPoisonError):
    """Writing or reading an artifact failed"""


class NumericalFailure(GoldPoisonError):
    """A numpy / scipy routine failed inside one repetition (wraps LinAlgError, ValueError, ...)"""
