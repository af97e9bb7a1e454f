"""Structured exception types shared across the package."""


class Cat5Error(Exception):
    """Base class for every structured error raised by this package."""


class MetricValidationError(Cat5Error):
    """A candidate distance matrix violates a metric axiom."""


class AsymmetricMatrix(MetricValidationError):
    pass


class NonzeroDiagonal(MetricValidationError):
    pass


class ZeroOffDiagonal(MetricValidationError):
    pass


class TriangleViolation(MetricValidationError):
    """d[i][k] exceeds d[i][j] + d[j][k] beyond tolerance."""

    def __init__(self, i, j, k, excess):
        self.indices = (i, j, k)
        self.excess = excess
        super().__init__(
            f"triangle inequality fails for ({i},{j},{k}): "
            f"d[{i}][{k}] > d[{i}][{j}] + d[{j}][{k}] by {excess:.3e}"
        )


class NotRealizable(Cat5Error):
    """Three lengths admit no planar triangle."""


class NoConvergence(Cat5Error):
    """The rotation eigensolver did not converge within the sweep cap."""


class NotPSD(Cat5Error):
    """A positive-semidefinite form was required but negative directions exist."""


class WrongSignature(Cat5Error):
    """A form with exactly one negative eigenvalue was required."""


class TooManyNegativeEigenvalues(WrongSignature):
    """The form has two or more negative eigenvalues.

    For inputs that passed the quadruple comparison this is an anomaly:
    such signatures cannot occur for comparison-satisfying five-point metrics.
    """

    def __init__(self, n_neg, message=None):
        self.n_neg = n_neg
        super().__init__(message or f"form has {n_neg} negative eigenvalues (at most 1 allowed)")


class DegenerateArray(Cat5Error):
    """A five-point array in 3-space is degenerate (collinear triple or all coplanar)."""


class NotTimelike(Cat5Error):
    """A projection direction must have negative form value."""


class DegenerateFacet(Cat5Error):
    """Facet vertices are affinely dependent beyond tolerance."""


class StratumA0(Cat5Error):
    """The projected vertex array classifies in the middle stratum A_0.

    Comparison-satisfying inputs never land here; when the comparison
    pre-check passed this is surfaced as a hard diagnostic.
    """


class EdgesNotCovered(Cat5Error):
    """Lower facets of the boundary complex fail to cover all ten edges."""

    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__(f"edges not covered by any lower facet: {self.missing}")


class ComparisonFailed(Cat5Error):
    """The quadruple comparison pre-check failed; carries the witness."""

    def __init__(self, report):
        self.report = report
        lab = report.worst_labeling
        super().__init__(
            f"comparison fails with slack {report.worst_slack:.6e} "
            f"for labeling {lab}"
        )


class UnknownGraph(Cat5Error):
    """Unrecognized builtin comparison-graph name."""


class BadDistances(Cat5Error):
    """Distance data for a graph instance is malformed."""


class RejectionBudgetExceeded(Cat5Error):
    """Rejection sampling failed to produce a valid metric within budget."""


class ParseError(Cat5Error):
    """Input file could not be parsed; carries a location."""

    def __init__(self, message, *, line=None, field=None):
        self.line = line
        self.field = field
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", field {field}" if field is not None else "")
        super().__init__(message + loc)
