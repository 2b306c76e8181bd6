"""Exception types shared across the package.

Everything derives from DistrictVoteError so callers can catch library
failures with a single except clause. Validation errors carry enough
context (indices, offending values) to locate the bad input.
"""

from __future__ import annotations


class DistrictVoteError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------------
# instance construction / loading
# ---------------------------------------------------------------------------

class EmptyDistrict(DistrictVoteError):
    """A district contains no agents."""


class NoAlternatives(DistrictVoteError):
    """An instance was built with zero alternatives."""


class InvalidPartition(DistrictVoteError):
    """Districts do not form an exact partition of the agent set."""


class NegativeDistance(DistrictVoteError):
    """An explicit distance matrix contains a negative entry."""


class AsymmetricMatrix(DistrictVoteError):
    """An explicit distance matrix is not symmetric."""


class NonzeroDiagonal(DistrictVoteError):
    """An explicit distance matrix has a nonzero diagonal entry."""


class TriangleViolation(DistrictVoteError):
    """An explicit distance matrix violates the triangle inequality.

    Carries the first violating triple (i, j, x) with
    d(i, j) > d(i, x) + d(x, j) beyond tolerance.
    """

    def __init__(self, i: int, j: int, x: int, excess: float):
        self.triple = (i, j, x)
        self.excess = excess
        super().__init__(
            f"d({i},{j}) exceeds d({i},{x}) + d({x},{j}) by {excess:.3g}"
        )


class UnknownField(DistrictVoteError):
    """A serialized instance carries a field the schema does not define."""


class SchemaError(DistrictVoteError):
    """A serialized instance is structurally invalid."""


# ---------------------------------------------------------------------------
# objectives / rules
# ---------------------------------------------------------------------------

class IndexOutOfRange(DistrictVoteError):
    """An agent, district, or alternative index is out of range."""


class EmptyVoterSet(DistrictVoteError):
    """A voting rule was invoked on an empty electorate."""


class MissingAxis(DistrictVoteError):
    """An ordinal rule that needs the line ordering got a profile without one."""


class InternalNoWinner(DistrictVoteError):
    """A rule that must always produce a winner found none (indicates a bug)."""


# ---------------------------------------------------------------------------
# mechanisms
# ---------------------------------------------------------------------------

class IncompatibleRuleMetric(DistrictVoteError):
    """A mechanism component cannot run on the instance's metric type."""


class NotLineMetric(IncompatibleRuleMetric):
    """A line-only component (median, acceptable-set selection) met a
    non-line instance."""


class LambdaBelowOne(DistrictVoteError):
    """The acceptance threshold of a threshold-selection rule must be >= 1."""


class PropertyCheckFailed(DistrictVoteError):
    """A custom inner aggregator failed a required property check.

    ``property_name`` names the check that failed; ``witness`` is the
    counterexample found, if any.
    """

    def __init__(self, property_name: str, witness=None):
        self.property_name = property_name
        self.witness = witness
        super().__init__(f"inner aggregator failed the {property_name!r} check")


# ---------------------------------------------------------------------------
# search / generation
# ---------------------------------------------------------------------------

class GeneratorError(DistrictVoteError):
    """A random-instance generator specification is invalid."""


class TooLarge(DistrictVoteError):
    """A requested adversarial family would exceed the supported size."""


class ConfigError(DistrictVoteError):
    """An experiment configuration file is invalid."""
