"""Exception types raised across the package."""


class GibbsFreeError(Exception):
    """Base class for all package errors."""


class UnsupportedPiece(GibbsFreeError):
    pass


class InsufficientNodes(GibbsFreeError):
    pass


class ShapeOutOfDomain(GibbsFreeError):
    pass


class NonRealResult(GibbsFreeError):
    """A reconstruction that should be real carries a large imaginary part."""


class DegenerateFit(GibbsFreeError):
    pass


class CardinalityMismatch(GibbsFreeError):
    """Estimated and true jump sets have different sizes."""

    def __init__(self, n_truth, n_estimate):
        self.n_truth = n_truth
        self.n_estimate = n_estimate
        super().__init__(f"cannot pair {n_estimate} estimated jumps with {n_truth} true jumps")


class TooFewSamples(GibbsFreeError):
    pass


class TooFewCoefficients(GibbsFreeError):
    pass


class IllConditioned(GibbsFreeError):
    pass


class BandMismatch(GibbsFreeError):
    pass


class DivergedRefinement(GibbsFreeError, UserWarning):
    """Refinement made no progress; issued as a warning, the candidates are kept."""


class ZeroSignal(GibbsFreeError):
    pass


class UndersampledColumn(GibbsFreeError):
    pass


class ZeroReference(GibbsFreeError):
    pass


class EmptySeries(GibbsFreeError):
    pass
