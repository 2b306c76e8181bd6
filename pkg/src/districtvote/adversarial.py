"""Adversarial instance families that force high distortion.

Each family packages the instances of one worst-case construction, the
objective it targets, the ratio it forces on the mechanisms it applies to,
and a prose decision script describing the case analysis. Because this
package derives rankings from metrics (ties toward the lower alternative
id), each family includes the relabeled variants of its geometry needed to
realize every branch of the case analysis against index-based tie-breaking;
certification simply takes the worst ratio across the members.

Alternative roles are tracked by name ('a' is the low-cost alternative of
the analysis, 'b' the high-cost one) so tests can recompute the advertised
costs through the objectives module regardless of which id a role carries
in a given member.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .distortion import evaluate
from .errors import TooLarge
from .instances import Instance, build_line_instance, save_instance
from .mechanisms import Mechanism
from .objectives import (
    AVG_MAX,
    ComposedObjective,
    MAX_AVG,
    MAX_MAX,
    parse_objective,
)

#: Largest member size any generator will emit (districts or agents).
SIZE_CAP = 10_000
#: fib indices above this would break the size cap for the golden families.
_MAX_FIB_INDEX = 19
_MIN_FIB_INDEX = 5


@dataclass(frozen=True)
class LowerBoundFamily:
    """A reusable worst-case construction."""

    name: str
    objective: ComposedObjective
    target_ratio: float
    instances: tuple[Instance, ...]
    decision_script: str
    roles: tuple[dict, ...]
    role_costs: tuple[dict, ...]


def fibonacci(i: int) -> int:
    """F(1) = F(2) = 1, F(i) = F(i-1) + F(i-2)."""
    if i < 1:
        raise ValueError("fibonacci index must be >= 1")
    a, b = 1, 1
    for _ in range(i - 2):
        a, b = b, a + b
    return b if i > 1 else a


def _check_fib_index(fib_index: int) -> None:
    if fib_index < _MIN_FIB_INDEX:
        raise ValueError(f"fib_index must be >= {_MIN_FIB_INDEX}")
    if fib_index > _MAX_FIB_INDEX:
        raise TooLarge(
            f"fib_index {fib_index} would exceed {SIZE_CAP} districts"
        )


# ---------------------------------------------------------------------------
# family: average-of-max, ratio -> 2 + sqrt(5)
# ---------------------------------------------------------------------------

def gen_avg_max_family(fib_index: int = 10) -> LowerBoundFamily:
    """Three-member family pushing avg.max distortion toward 2 + sqrt(5).

    With x = F(fib_index - 1) and y = F(fib_index) (consecutive Fibonacci
    numbers, so y/x approximates the golden ratio):

    * member 0: two districts over alternatives a at 0 and b at 1 -- one
      mixed district at {0.5, 1.5} and one at {1, 1}. Rules that only see
      rankings must make a the mixed district's representative; electing a
      costs 5/4 against an optimum of 1/4 (ratio 5).
    * member 1: x singleton districts at 0.5 and y at 1. Electing a here
      yields ratio 1 + 2y/x.
    * member 2: the relabeled geometry (b carries the lower id) with x
      two-agent districts at 0 and y districts at {-0.5, 0.5}. The same
      over-step pseudo-electorate as member 1 now makes electing b yield
      ratio 3 + 2x/y.

    A mechanism whose over step resolves the {a^x, b^y} pseudo-electorate
    the same way on members 1 and 2 loses min(1 + 2y/x, 3 + 2x/y) on one of
    them; that minimum is the target and climbs toward 2 + sqrt(5).
    """
    _check_fib_index(fib_index)
    x = fibonacci(fib_index - 1)
    y = fibonacci(fib_index)

    member0 = build_line_instance([[0.5, 1.5], [1.0, 1.0]], [0.0, 1.0])
    member1 = build_line_instance([[0.5]] * x + [[1.0]] * y, [0.0, 1.0])
    member2 = build_line_instance([[0.0, 0.0]] * x + [[-0.5, 0.5]] * y,
                                  [1.0, 0.0])

    denom = Fraction(x + y)
    costs = (
        {"a": 5 / 4, "b": 1 / 4},
        {"a": float((Fraction(x, 2) + y) / denom), "b": float(Fraction(x, 2) / denom)},
        {"a": float(Fraction(y, 2) / denom), "b": float((x + Fraction(3 * y, 2)) / denom)},
    )
    ratio_if_a = 1 + Fraction(2 * y, x)
    ratio_if_b = 3 + Fraction(2 * x, y)
    return LowerBoundFamily(
        name="avg-max-golden",
        objective=AVG_MAX,
        target_ratio=float(min(ratio_if_a, ratio_if_b)),
        instances=(member0, member1, member2),
        decision_script=(
            "If the mechanism elects a on member 0, it pays ratio 5 there. "
            "Otherwise its over step, shown x representatives at a and y at b, "
            f"elects one of them; electing a loses {float(ratio_if_a):.6g} on "
            f"member 1 and electing b loses {float(ratio_if_b):.6g} on member 2."
        ),
        roles=({"a": 0, "b": 1}, {"a": 0, "b": 1}, {"a": 1, "b": 0}),
        role_costs=costs,
    )


# ---------------------------------------------------------------------------
# family: max-of-max vs unanimity, ratio 3
# ---------------------------------------------------------------------------

def gen_max_max_instance(x: int = 1) -> LowerBoundFamily:
    """Unanimity trap for max.max: two districts of x agents, ratio 3.

    The geometry puts alternatives at 1 and 3 with one district of agents at
    the midpoint 2 (indifferent between the two) and one district strictly
    preferring the good alternative. Unanimity forces one representative per
    alternative, and whichever the over step returns, some labeling of the
    four shipped variants (two mirror geometries x two district orders)
    makes it the alternative of cost 3 against an optimum of 1.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    if 2 * x > SIZE_CAP:
        raise TooLarge(f"2x = {2 * x} agents would exceed {SIZE_CAP}")

    strict_lo, tied, strict_hi = [0.0] * x, [2.0] * x, [4.0] * x
    members = (
        build_line_instance([strict_lo, tied], [3.0, 1.0]),
        build_line_instance([tied, strict_lo], [3.0, 1.0]),
        build_line_instance([strict_hi, tied], [1.0, 3.0]),
        build_line_instance([tied, strict_hi], [1.0, 3.0]),
    )
    roles = ({"a": 1, "b": 0},) * 4
    costs = ({"a": 1.0, "b": 3.0},) * 4
    return LowerBoundFamily(
        name="max-max-unanimity",
        objective=MAX_MAX,
        target_ratio=3.0,
        instances=members,
        decision_script=(
            "Unanimity pins the representatives to (a, b) in some order. "
            "Whichever of the two the over step elects, one of the four "
            "labelings makes that choice cost 3 while the other costs 1."
        ),
        roles=roles,
        role_costs=costs,
    )


# ---------------------------------------------------------------------------
# family: max-of-avg, ratio -> 2 + sqrt(5)
# ---------------------------------------------------------------------------

def gen_max_avg_family(fib_index: int = 10) -> LowerBoundFamily:
    """Two-member family pushing max.avg distortion toward 2 + sqrt(5).

    With p = F(fib_index - 1) and q = F(fib_index) (so p/q approximates the
    inverse golden ratio):

    * member 0: a single district with p agents at alternative a (position
      0) and q - p agents at the midpoint 0.5 of a at 0 and b at 1. Electing
      b costs (q+p)/(2q) against (q-p)/(2q), ratio (q+p)/(q-p).
    * member 1: the same abstract profile reappears as district 1 (p at the
      midpoint, q - p at b) next to a district of q agents at 1 + p/(2q)
      unanimously behind b. A rule that elected a on member 0 elects a as
      district 1's representative here; with representatives (a, b) an
      index-consistent or position-based over step elects a, which costs
      (2q+p)/(2q) against p/(2q), ratio (2q+p)/p.
    """
    _check_fib_index(fib_index)
    p = fibonacci(fib_index - 1)
    q = fibonacci(fib_index)

    member0 = build_line_instance([[0.0] * p + [0.5] * (q - p)], [1.0, 0.0])
    far = 1.0 + p / (2.0 * q)
    member1 = build_line_instance(
        [[0.5] * p + [1.0] * (q - p), [far] * q],
        [0.0, 1.0],
    )
    costs = (
        {"a": float(Fraction(q - p, 2 * q)), "b": float(Fraction(q + p, 2 * q))},
        {"a": float(Fraction(2 * q + p, 2 * q)), "b": float(Fraction(p, 2 * q))},
    )
    ratio_if_b = Fraction(q + p, q - p)
    ratio_if_a = Fraction(2 * q + p, p)
    return LowerBoundFamily(
        name="max-avg-golden",
        objective=MAX_AVG,
        target_ratio=float(min(ratio_if_b, ratio_if_a)),
        instances=(member0, member1),
        decision_script=(
            "On the profile 'p voters top one alternative, q - p top the "
            f"other', electing the minority side loses {float(ratio_if_b):.6g} "
            "on member 0; electing the majority side makes it the district 1 "
            f"representative on member 1, where electing it loses "
            f"{float(ratio_if_a):.6g}."
        ),
        roles=({"a": 1, "b": 0}, {"a": 0, "b": 1}),
        role_costs=costs,
    )


# ---------------------------------------------------------------------------
# family: cardinal mechanisms on a line, ratio 1 + sqrt(2)
# ---------------------------------------------------------------------------

def gen_cardinal_line_family() -> LowerBoundFamily:
    """Single-agent-district family forcing 1 + sqrt(2) for max composed costs.

    Alternatives sit at 0 and 2. Members 0 and 1 are single districts with
    one agent at 2 - sqrt(2) and 2 + sqrt(2) respectively; both make a and b
    cost 2 -+ sqrt(2) and sqrt(2). Member 2 pairs the two agents in separate
    districts, so the representatives reproduce the single-district choices
    and both alternatives cost {2 + sqrt(2), sqrt(2)}; member 3 is the same
    geometry with alternative ids swapped. Any mechanism that represents
    each singleton by its optimum and then resolves the resulting tie the
    same way in both labelings pays sqrt(2) / (2 - sqrt(2)) = 1 + sqrt(2)
    somewhere in the family.
    """
    s = math.sqrt(2.0)
    left, right = 2.0 - s, 2.0 + s
    member0 = build_line_instance([[left]], [0.0, 2.0])
    member1 = build_line_instance([[right]], [0.0, 2.0])
    member2 = build_line_instance([[left], [right]], [0.0, 2.0])
    member3 = build_line_instance([[left], [right]], [2.0, 0.0])
    costs = (
        {"a": left, "b": s},
        {"a": right, "b": s},
        {"a": right, "b": s},
        {"a": right, "b": s},
    )
    return LowerBoundFamily(
        name="cardinal-line",
        objective=MAX_MAX,
        target_ratio=1.0 + s,
        instances=(member0, member1, member2, member3),
        decision_script=(
            "Representing either singleton district by the far alternative "
            "already costs ratio 1 + sqrt(2) on members 0-1. Representing "
            "each by its optimum leaves the over step a tie between a and b "
            "on members 2-3, and the two labelings punish either consistent "
            "resolution with ratio 1 + sqrt(2)."
        ),
        roles=({"a": 0, "b": 1}, {"a": 0, "b": 1},
               {"a": 0, "b": 1}, {"a": 1, "b": 0}),
        role_costs=costs,
    )


# ---------------------------------------------------------------------------
# certification and export
# ---------------------------------------------------------------------------

def certify_details(family: LowerBoundFamily,
                    mechanism: Mechanism) -> list[float]:
    """Distortion ratio of the mechanism on each family member, in order."""
    return [evaluate(mechanism, instance, family.objective).ratio
            for instance in family.instances]


def certify_lower_bound(family: LowerBoundFamily, mechanism: Mechanism) -> float:
    """Worst ratio the family's members actually force on the mechanism.

    The family members enumerate every branch (including relabelings) of the
    underlying case analysis, so the maximum over members is exactly what the
    analysis extracts from this mechanism's observed decisions.
    """
    return max(1.0, max(certify_details(family, mechanism)))


FAMILY_NAMES = ("avg-max-golden", "max-max-unanimity", "max-avg-golden",
                "cardinal-line")


def build_family(name: str, fib_index: int = 10, x: int = 2) -> LowerBoundFamily:
    """Build a family by registry name with the standard parameters."""
    if name == "avg-max-golden":
        return gen_avg_max_family(fib_index)
    if name == "max-max-unanimity":
        return gen_max_max_instance(x)
    if name == "max-avg-golden":
        return gen_max_avg_family(fib_index)
    if name == "cardinal-line":
        return gen_cardinal_line_family()
    raise ValueError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")


def export_family(family: LowerBoundFamily, out_dir: str) -> str:
    """Write the family as a JSON bundle; returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for i, instance in enumerate(family.instances):
        fname = f"instance_{i:02d}.json"
        save_instance(instance, os.path.join(out_dir, fname))
        files.append(fname)
    manifest = {
        "family": family.name,
        "objective": family.objective.spec,
        "target_ratio": family.target_ratio,
        "decision_script": family.decision_script,
        "instances": files,
        "roles": [dict(r) for r in family.roles],
        "role_costs": [dict(c) for c in family.role_costs],
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path
