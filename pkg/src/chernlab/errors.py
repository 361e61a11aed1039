"""Exception types shared across the toolkit.

Every failure mode that callers are expected to branch on gets its own
class; the CLI maps them onto its exit-code contract (2 = invalid input,
3 = numerical breakdown, 1 = a check that ran and failed).
"""


class ChernlabError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(ChernlabError):
    """Caller passed a structurally invalid argument (bad shape, bad range)."""


class DomainViolation(ChernlabError):
    """A finite-difference stencil or requested point exits the chart domain."""


class NonFinite(ChernlabError):
    """A field evaluation produced NaN or infinity."""


class HolomorphyViolation(ChernlabError):
    """Cauchy-Riemann residual of a supposedly holomorphic map exceeds tolerance."""


class SingularMetric(ChernlabError):
    """Metric matrix is not positive definite / invertible to tolerance."""


class RankDeficient(ChernlabError):
    """Operation requires singular values above the rank threshold."""


class KahlerRequired(ChernlabError):
    """Operation is only valid for a Kahler domain metric and the check failed."""


class HypothesisFail(ChernlabError):
    """Probed curvature hypotheses of an estimate are not met on this scene.

    This signals that the theorem being checked does not apply, not a
    software failure.
    """


class NotPeriodic(ChernlabError):
    """Fields supplied for a torus integral disagree at identified boundary points."""
