"""Distributed metric social choice: two-step mechanisms and their distortion.

Agents and alternatives live in a shared metric space and agents are split
into districts. A two-step mechanism first picks a representative alternative
inside every district, then aggregates the representatives into a single
winner. This package builds such mechanisms from pluggable in-district and
over-districts rules, evaluates their distortion (winner cost over optimal
cost) under composed objectives like ``avg.max``, verifies claimed
worst-case bounds by randomized search, and certifies lower bounds with
hand-built adversarial instance families.
"""

from .adversarial import (
    FAMILY_NAMES,
    LowerBoundFamily,
    build_family,
    certify_details,
    certify_lower_bound,
    export_family,
    fibonacci,
    gen_avg_max_family,
    gen_cardinal_line_family,
    gen_max_avg_family,
    gen_max_max_instance,
)
from .distortion import (
    EvaluationReport,
    GeneratorSpec,
    SweepResult,
    evaluate,
    hill_climb,
    random_instance,
    report_to_json,
    sweep,
    sweep_result_from_json,
    sweep_result_to_json,
)
from .errors import (
    AsymmetricMatrix,
    ConfigError,
    DistrictVoteError,
    EmptyDistrict,
    EmptyVoterSet,
    GeneratorError,
    IncompatibleRuleMetric,
    IndexOutOfRange,
    InternalNoWinner,
    InvalidPartition,
    LambdaBelowOne,
    MissingAxis,
    NegativeDistance,
    NonzeroDiagonal,
    NoAlternatives,
    NotLineMetric,
    PropertyCheckFailed,
    SchemaError,
    TooLarge,
    TriangleViolation,
    UnknownField,
)
from .instances import (
    EUCLIDEAN,
    EXPLICIT,
    LINE,
    TRIANGLE_TOL,
    Instance,
    Metric,
    OrdinalProfile,
    build_euclidean_instance,
    build_explicit_instance,
    build_line_instance,
    instance_from_json,
    instance_to_json,
    load_instance,
    ordinal_profile,
    save_instance,
)
from .mechanisms import (
    ALL_ALTERNATIVES,
    REPRESENTATIVES_ONLY,
    ArbitraryOverRule,
    LeftmostRepRule,
    Mechanism,
    MechanismTrace,
    ThresholdSelectRule,
    arbitrary_dictator,
    arbitrary_median,
    arbitrary_over,
    claimed_bound,
    compose,
    lambda_acceptable_set,
    lambda_arl,
    parse_mechanism,
    run,
)
from .objectives import (
    AVG,
    AVG_AVG,
    AVG_MAX,
    ComposedObjective,
    InnerObjective,
    MAX,
    MAX_AVG,
    MAX_MAX,
    OuterObjective,
    PropertyCheckResult,
    check_consistent,
    check_monotone,
    check_single_peaked,
    check_subadditive,
    cost,
    cost_vector,
    inner_cost,
    optimal_alternative,
    parse_inner,
    parse_objective,
    power_mean,
    run_property_checks,
)
from .rules import (
    CARDINAL,
    DictatorRule,
    MedianLineRule,
    OptimalRule,
    ORDINAL,
    PluralityMatchingRule,
    dictator_rule,
    median_line_rule,
    optimal_rule,
    plurality_matching_rule,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_ALTERNATIVES",
    "AVG",
    "AVG_AVG",
    "AVG_MAX",
    "ArbitraryOverRule",
    "AsymmetricMatrix",
    "CARDINAL",
    "ComposedObjective",
    "ConfigError",
    "DictatorRule",
    "DistrictVoteError",
    "EUCLIDEAN",
    "EXPLICIT",
    "EmptyDistrict",
    "EmptyVoterSet",
    "EvaluationReport",
    "FAMILY_NAMES",
    "GeneratorError",
    "GeneratorSpec",
    "IncompatibleRuleMetric",
    "IndexOutOfRange",
    "InnerObjective",
    "Instance",
    "InternalNoWinner",
    "InvalidPartition",
    "LINE",
    "LambdaBelowOne",
    "LeftmostRepRule",
    "LowerBoundFamily",
    "MAX",
    "MAX_AVG",
    "MAX_MAX",
    "MechanismTrace",
    "Mechanism",
    "MedianLineRule",
    "Metric",
    "MissingAxis",
    "NegativeDistance",
    "NoAlternatives",
    "NonzeroDiagonal",
    "NotLineMetric",
    "OptimalRule",
    "ORDINAL",
    "OrdinalProfile",
    "OuterObjective",
    "PluralityMatchingRule",
    "PropertyCheckFailed",
    "PropertyCheckResult",
    "REPRESENTATIVES_ONLY",
    "SchemaError",
    "SweepResult",
    "ThresholdSelectRule",
    "TooLarge",
    "TriangleViolation",
    "TRIANGLE_TOL",
    "UnknownField",
    "arbitrary_dictator",
    "arbitrary_median",
    "arbitrary_over",
    "build_euclidean_instance",
    "build_explicit_instance",
    "build_family",
    "build_line_instance",
    "certify_details",
    "certify_lower_bound",
    "check_consistent",
    "check_monotone",
    "check_single_peaked",
    "check_subadditive",
    "claimed_bound",
    "compose",
    "cost",
    "cost_vector",
    "dictator_rule",
    "evaluate",
    "export_family",
    "fibonacci",
    "gen_avg_max_family",
    "gen_cardinal_line_family",
    "gen_max_avg_family",
    "gen_max_max_instance",
    "hill_climb",
    "inner_cost",
    "instance_from_json",
    "instance_to_json",
    "lambda_acceptable_set",
    "lambda_arl",
    "load_instance",
    "median_line_rule",
    "optimal_alternative",
    "optimal_rule",
    "ordinal_profile",
    "parse_inner",
    "parse_mechanism",
    "parse_objective",
    "plurality_matching_rule",
    "power_mean",
    "random_instance",
    "report_to_json",
    "run",
    "run_property_checks",
    "save_instance",
    "sweep",
    "sweep_result_from_json",
    "sweep_result_to_json",
]
