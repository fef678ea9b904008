"""Exception types raised by the geometry and verification routines."""


class RosetteFrontError(ValueError):
    """Base class for all package errors."""


class NotARosette(RosetteFrontError):
    def __init__(self, theta: float, rho: float):
        self.theta = theta
        self.rho = rho
        super().__init__(
            f"support function is not a rosette: radius of curvature {rho:.6g} <= 0 at theta={theta:.12g}"
        )


class DegenerateZero(RosetteFrontError):
    """A zero that does not change sign (non-generic input), or a function vanishing identically."""


class BadBracket(RosetteFrontError):
    pass


class NonConvergent(RosetteFrontError):
    pass


class CuspSingularity(RosetteFrontError):
    """Curvature requested at a cusp of the Centre Symmetry Set."""


class DegenerateSingularity(RosetteFrontError):
    """Singular point that is neither a cuspidal edge nor a swallowtail."""


class NearSingular(RosetteFrontError):
    """Point lies inside the guard band around the singular set."""


class SwallowtailPoint(RosetteFrontError):
    """Cuspidal-edge invariant requested at (or numerically at) a swallowtail."""


class NotOnSlice(RosetteFrontError):
    pass


class NoLimit(RosetteFrontError):
    pass


class HypothesisViolated(RosetteFrontError):
    pass


class CurveCrossesSigma(RosetteFrontError):
    pass


class NotPeriodic(RosetteFrontError):
    pass
