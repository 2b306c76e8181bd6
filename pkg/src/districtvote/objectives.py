"""Composed cost objectives and aggregator property checks.

A composed objective scores an alternative in two stages: an inner
aggregator g turns each district's distance vector into one number, and an
outer aggregator F (average or maximum) combines the k district numbers.
The four canonical combinations are spelled ``avg.avg``, ``avg.max``,
``max.max`` and ``max.avg`` (outer first), and ``max.pmean:<p>`` composes a
power mean of exponent p >= 1 inside a maximum.

Custom inner aggregators participate if they behave like a cost: the
property checks in this module probe monotonicity, subadditivity (with
scaling), consistency on constant vectors, and single-peakedness of the
induced cost along a line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import IndexOutOfRange, NotLineMetric
from .instances import Instance

#: Tolerance for arithmetic identities this package controls end to end.
EXACT_TOL = 1e-12
#: Tolerance applied to user-supplied floating point data.
USER_TOL = 1e-9

MONOTONE = "monotone"
SUBADDITIVE = "subadditive"
CONSISTENT = "consistent"
SINGLE_PEAKED = "single_peaked"
ALL_PROPERTIES = frozenset({MONOTONE, SUBADDITIVE, CONSISTENT, SINGLE_PEAKED})

AVG_KIND = "avg"
MAX_KIND = "max"
CUSTOM_KIND = "custom"


@dataclass(frozen=True)
class InnerObjective:
    """Aggregates one district's distance vector into one number.

    ``kind`` is ``avg``, ``max`` or ``custom``. Custom aggregators supply
    ``fn`` (vector -> float), may declare the cost-like properties they
    satisfy, and may supply ``columns_fn`` (matrix -> per-column values) to
    speed up batch evaluation.
    """

    kind: str
    name: str = ""
    fn: Callable[[np.ndarray], float] | None = field(default=None, compare=False)
    columns_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    declared_properties: frozenset = frozenset()

    def value(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=np.float64)
        if self.kind == AVG_KIND:
            return float(v.mean())
        if self.kind == MAX_KIND:
            return float(v.max())
        return float(self.fn(v))

    def over_columns(self, mat: np.ndarray) -> np.ndarray:
        """Apply the aggregator to every column of a (voters x candidates) block."""
        mat = np.asarray(mat, dtype=np.float64)
        if self.kind == AVG_KIND:
            return mat.mean(axis=0)
        if self.kind == MAX_KIND:
            return mat.max(axis=0)
        if self.columns_fn is not None:
            return np.asarray(self.columns_fn(mat), dtype=np.float64)
        return np.array([float(self.fn(mat[:, c])) for c in range(mat.shape[1])])

    @property
    def spec(self) -> str:
        return self.name or self.kind


@dataclass(frozen=True)
class OuterObjective:
    """Combines per-district numbers; only average and maximum exist."""

    kind: str

    def value(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=np.float64)
        return float(v.mean()) if self.kind == AVG_KIND else float(v.max())

    def over_rows(self, mat: np.ndarray) -> np.ndarray:
        mat = np.asarray(mat, dtype=np.float64)
        return mat.mean(axis=0) if self.kind == AVG_KIND else mat.max(axis=0)

    @property
    def spec(self) -> str:
        return self.kind


@dataclass(frozen=True)
class ComposedObjective:
    """Outer aggregator over districts of an inner aggregator over agents."""

    outer: OuterObjective
    inner: InnerObjective

    @property
    def spec(self) -> str:
        return f"{self.outer.spec}.{self.inner.spec}"


AVG = InnerObjective(kind=AVG_KIND, name="avg",
                     declared_properties=ALL_PROPERTIES)
MAX = InnerObjective(kind=MAX_KIND, name="max",
                     declared_properties=ALL_PROPERTIES)
OUTER_AVG = OuterObjective(kind=AVG_KIND)
OUTER_MAX = OuterObjective(kind=MAX_KIND)

AVG_AVG = ComposedObjective(OUTER_AVG, AVG)
AVG_MAX = ComposedObjective(OUTER_AVG, MAX)
MAX_MAX = ComposedObjective(OUTER_MAX, MAX)
MAX_AVG = ComposedObjective(OUTER_MAX, AVG)


def power_mean(p: float) -> InnerObjective:
    """The power mean ((1/n) sum v_i^p)^(1/p); p >= 1 keeps it cost-like."""
    p = float(p)
    if p < 1:
        raise ValueError("power mean exponent must be >= 1")

    def fn(v: np.ndarray) -> float:
        v = np.asarray(v, dtype=np.float64)
        return float(np.mean(v ** p) ** (1.0 / p))

    def columns_fn(mat: np.ndarray) -> np.ndarray:
        return np.mean(mat ** p, axis=0) ** (1.0 / p)

    label = f"pmean:{p:g}"
    return InnerObjective(kind=CUSTOM_KIND, name=label, fn=fn,
                          columns_fn=columns_fn,
                          declared_properties=ALL_PROPERTIES)


# ---------------------------------------------------------------------------
# cost evaluation
# ---------------------------------------------------------------------------

def inner_cost(instance: Instance, district: int, inner: InnerObjective,
               alternative: int) -> float:
    """Inner aggregate of one district's distances to one alternative."""
    if not (0 <= district < instance.num_districts):
        raise IndexOutOfRange(f"district {district} out of range")
    if not (0 <= alternative < instance.num_alternatives):
        raise IndexOutOfRange(f"alternative {alternative} out of range")
    members = instance.district_arrays()[district]
    return inner.value(instance.agent_alt[members, alternative])


def cost(instance: Instance, objective: ComposedObjective, alternative: int) -> float:
    """Composed cost of one alternative."""
    if not (0 <= alternative < instance.num_alternatives):
        raise IndexOutOfRange(f"alternative {alternative} out of range")
    per_district = np.array([
        objective.inner.value(instance.agent_alt[members, alternative])
        for members in instance.district_arrays()
    ])
    return objective.outer.value(per_district)


def cost_vector(instance: Instance, objective: ComposedObjective) -> np.ndarray:
    """Composed cost of every alternative at once."""
    per_district = np.empty((instance.num_districts, instance.num_alternatives))
    for d, members in enumerate(instance.district_arrays()):
        per_district[d] = objective.inner.over_columns(instance.agent_alt[members])
    return objective.outer.over_rows(per_district)


def optimal_alternative(instance: Instance,
                        objective: ComposedObjective) -> tuple[int, float]:
    """Exhaustive minimizer of the composed cost; ties go to the lowest id."""
    costs = cost_vector(instance, objective)
    best = int(np.argmin(costs))
    return best, float(costs[best])


# ---------------------------------------------------------------------------
# property checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropertyCheckResult:
    """Outcome of one randomized property check."""

    property_name: str
    passed: bool
    samples: int
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.passed


DEFAULT_SAMPLES = 10_000


def _check_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _floats(values: np.ndarray) -> tuple[float, ...]:
    return tuple(float(x) for x in values)


def check_monotone(g: InnerObjective, samples: int = DEFAULT_SAMPLES,
                   dims: int = 8, seed: int = 0) -> PropertyCheckResult:
    """g(v) <= g(u) whenever v <= u coordinatewise (sampled)."""
    rng = _check_rng(seed)
    for _ in range(samples):
        length = int(rng.integers(1, dims + 1))
        v = rng.uniform(0.0, 10.0, length)
        u = v + rng.uniform(0.0, 5.0, length)
        if g.value(v) > g.value(u) + EXACT_TOL:
            return PropertyCheckResult(MONOTONE, False, samples,
                                       (_floats(v), _floats(u)))
    return PropertyCheckResult(MONOTONE, True, samples)


def check_subadditive(g: InnerObjective, samples: int = DEFAULT_SAMPLES,
                      dims: int = 8, seed: int = 0) -> PropertyCheckResult:
    """g(v + u) <= g(v) + g(u), and g(c v) <= c g(v) for sampled c >= 1."""
    rng = _check_rng(seed)
    for _ in range(samples):
        length = int(rng.integers(1, dims + 1))
        v = rng.uniform(0.0, 10.0, length)
        u = rng.uniform(0.0, 10.0, length)
        if g.value(v + u) > g.value(v) + g.value(u) + EXACT_TOL:
            return PropertyCheckResult(SUBADDITIVE, False, samples,
                                       (_floats(v), _floats(u)))
        c = float(rng.uniform(1.0, 5.0))
        if g.value(c * v) > c * g.value(v) + EXACT_TOL:
            return PropertyCheckResult(SUBADDITIVE, False, samples,
                                       (c, _floats(v)))
    return PropertyCheckResult(SUBADDITIVE, True, samples)


def check_consistent(g: InnerObjective, samples: int = DEFAULT_SAMPLES,
                     dims: int = 8, seed: int = 0) -> PropertyCheckResult:
    """g of a constant vector (c, ..., c) equals c."""
    rng = _check_rng(seed)
    for _ in range(samples):
        length = int(rng.integers(1, dims + 1))
        c = float(rng.uniform(0.0, 10.0))
        got = g.value(np.full(length, c))
        if abs(got - c) > EXACT_TOL:
            return PropertyCheckResult(CONSISTENT, False, samples,
                                       (c, length, got))
    return PropertyCheckResult(CONSISTENT, True, samples)


#: Grid resolution for the single-peakedness scan, as a fraction of the span.
_PEAK_GRID_STEP = 1e-3


def check_single_peaked(g: InnerObjective, instance: Instance,
                        district: int) -> PropertyCheckResult:
    """Scan the induced cost x -> g(distances from x to the district's agents)
    along the line; it must fall then rise (plateaus allowed).

    The scan grid is the instance's coordinate span at step 1e-3 of the span,
    augmented with every agent and alternative position. The witness of a
    failure is a triple of positions exhibiting a local rise before the
    global minimum (or fall after it).
    """
    if not instance.is_line:
        raise NotLineMetric("single-peakedness is defined along a line metric")
    if not (0 <= district < instance.num_districts):
        raise IndexOutOfRange(f"district {district} out of range")
    members = instance.district_arrays()[district]
    agent_pos = instance.agent_positions[members]
    all_points = np.concatenate([instance.agent_positions,
                                 instance.alternative_positions])
    lo, hi = float(all_points.min()), float(all_points.max())
    span = hi - lo
    if span > 0:
        grid = np.arange(lo, hi, span * _PEAK_GRID_STEP)
    else:
        grid = np.array([lo])
    grid = np.unique(np.concatenate([grid, all_points]))
    values = np.array([g.value(np.abs(x - agent_pos)) for x in grid])
    imin = int(np.argmin(values))
    # left of the minimum: non-increasing; right of it: non-decreasing
    for i in range(imin):
        if values[i + 1] > values[i] + USER_TOL:
            return PropertyCheckResult(SINGLE_PEAKED, False, grid.size,
                                       (float(grid[i]), float(grid[i + 1]),
                                        float(grid[imin])))
    for i in range(imin, grid.size - 1):
        if values[i + 1] < values[i] - USER_TOL:
            return PropertyCheckResult(SINGLE_PEAKED, False, grid.size,
                                       (float(grid[i]), float(grid[i + 1]),
                                        float(grid[imin])))
    return PropertyCheckResult(SINGLE_PEAKED, True, grid.size)


def run_property_checks(g: InnerObjective, samples: int = DEFAULT_SAMPLES,
                        seed: int = 0) -> list[PropertyCheckResult]:
    """The three vector-space checks, in a fixed order."""
    return [
        check_monotone(g, samples=samples, seed=seed),
        check_subadditive(g, samples=samples, seed=seed),
        check_consistent(g, samples=samples, seed=seed),
    ]


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_PMEAN_RE = re.compile(r"^pmean:([0-9]+(?:\.[0-9]+)?)$")


def parse_inner(spec: str) -> InnerObjective:
    """Parse an inner aggregator name: ``avg``, ``max`` or ``pmean:<p>``."""
    if spec == "avg":
        return AVG
    if spec == "max":
        return MAX
    match = _PMEAN_RE.match(spec)
    if match:
        return power_mean(float(match.group(1)))
    raise ValueError(f"unknown inner aggregator {spec!r}")


def parse_objective(spec: str) -> ComposedObjective:
    """Parse ``<outer>.<inner>``, e.g. ``avg.max`` or ``max.pmean:2``."""
    outer_name, sep, inner_name = spec.partition(".")
    if not sep or outer_name not in (AVG_KIND, MAX_KIND):
        raise ValueError(f"objective spec {spec!r} must look like 'avg.max'")
    outer = OUTER_AVG if outer_name == AVG_KIND else OUTER_MAX
    return ComposedObjective(outer, parse_inner(inner_name))
