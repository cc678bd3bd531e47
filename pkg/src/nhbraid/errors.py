"""Exception types shared across the package.

Validation failures (bad arguments, out-of-range requests) derive from
ValueError; failures of the numerics themselves derive from NumericalError
so callers can distinguish "you asked wrong" from "the computation broke".
"""


class NumericalError(RuntimeError):
    """A numerical procedure failed or produced an untrustworthy result."""


class EPOnLoop(NumericalError):
    """An exceptional point lies on (or too close to) the sampled loop."""


class TangentialCrossing(NumericalError):
    """A real-part crossing is non-transversal; perturb the loop."""


class DegenerateBands(NumericalError):
    """Two tracked bands coincide where a finite separation is required."""


class NonAdjacentCrossing(NumericalError):
    """A crossing involves bands that are not adjacent in real-part rank."""


class Inconclusive(NumericalError):
    """The bounded conjugacy search exhausted its budget without deciding."""


class PhaseStepTooLarge(NumericalError):
    """Phase unwrapping could not bring every step below pi/2."""


class NonIntegerWinding(NumericalError):
    """A winding integral deviates too far from an integer."""


class NotAnEp(NumericalError):
    """The given point is not (close enough to) an exceptional point."""


class ContinuationStalled(NumericalError):
    """Predictor-corrector continuation failed below the minimum step."""


class MetricDegenerate(NumericalError):
    """The dilation metric M(t) - I lost positive definiteness."""


class DegenerateSum(NumericalError):
    """Eigenvalue reconstruction hit the E1+E2+E3 = 0 parameterization hole."""


class AmbiguousSolution(NumericalError):
    """Two distinct eigenvalue triples fit the data equally well.

    The tied candidates are attached as ``candidates`` (list of length-3
    complex arrays) so the caller can inspect both.
    """

    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = candidates


class RankDeficient(NumericalError):
    """The measurement set does not constrain all fit parameters."""


class OutOfRange(ValueError):
    """A requested value lies outside the computed/supported range."""
