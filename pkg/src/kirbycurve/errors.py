"""Exception hierarchy shared by every stage of the pipeline."""


class KirbyCurveError(Exception):
    """Base class; ``stage`` names the pipeline step that failed."""

    stage = "unknown"


# curve
class PolynomialSyntaxError(KirbyCurveError, SyntaxError):
    stage = "parse"

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


class ZeroPolynomial(KirbyCurveError):
    stage = "parse"


class DiscriminantIdenticallyZero(KirbyCurveError):
    stage = "critical_values"


class GenericityFailure(KirbyCurveError):
    stage = "genericity"


class NonReducedCurve(KirbyCurveError):
    stage = "reducedness"


# tracking
class NoConvergence(KirbyCurveError):
    stage = "tracking"


class DegenerateFiber(KirbyCurveError):
    stage = "tracking"


class StepUnderflow(KirbyCurveError):
    stage = "tracking"


class AmbiguousCluster(KirbyCurveError):
    stage = "tracking"


class MultipleClusters(KirbyCurveError):
    stage = "tracking"


# braid
class PhaseDegeneracy(KirbyCurveError):
    stage = "braid"


class StrandMismatch(KirbyCurveError, ValueError):
    stage = "braid"


class RankMismatch(KirbyCurveError, ValueError):
    stage = "braid"


class ActionOverflow(KirbyCurveError):
    stage = "braid"


# monodromy / diagram
class ArcCrossing(KirbyCurveError):
    stage = "arc_system"


class InvariantViolation(KirbyCurveError):
    stage = "monodromy"


class PermutationNotIdentity(KirbyCurveError):
    stage = "diagram"
