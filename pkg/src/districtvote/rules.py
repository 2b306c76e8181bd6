"""Single-winner voting rules used inside and across districts.

Two information models exist. Cardinal rules see a distance block
(voters x candidates). Ordinal rules see only an :class:`OrdinalProfile`
restricted to their electorate -- rankings plus, on line metrics, the
left-to-right order of alternatives -- and never raw distances; the call
signatures enforce this.

All four rules here are unanimous: when every voter ranks the same
alternative first, that alternative wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyVoterSet,
    IndexOutOfRange,
    InternalNoWinner,
    MissingAxis,
)
from .instances import Instance, OrdinalProfile
from .objectives import AVG_KIND, MAX_KIND, InnerObjective, OuterObjective

CARDINAL = "cardinal"
ORDINAL = "ordinal"


# ---------------------------------------------------------------------------
# functional rule cores
# ---------------------------------------------------------------------------

def optimal_rule(instance: Instance, voters: Iterable[int],
                 inner: InnerObjective) -> int:
    """Alternative minimizing the inner aggregate over the given voters.

    Ties break toward the lowest alternative id. This is the cardinal
    benchmark rule: its approximation factor for its own aggregator is 1.
    """
    ids = sorted(int(v) for v in voters)
    if not ids:
        raise EmptyVoterSet("optimal rule needs at least one voter")
    for v in ids:
        if not (0 <= v < instance.num_agents):
            raise IndexOutOfRange(f"voter {v} out of range")
    values = inner.over_columns(instance.agent_alt[np.array(ids)])
    return int(np.argmin(values))


def median_line_rule(profile: OrdinalProfile,
                     voter_peaks: Sequence[int] | None = None) -> int:
    """Lower median of the voters' peaks along the line axis.

    Each voter contributes one peak (by default their top-ranked
    alternative); peaks are sorted left to right and the ceil(v/2)-th one
    (1-indexed) wins. Among alternatives, this choice minimizes the total
    distance to the peak multiset.
    """
    if profile.line_axis is None:
        raise MissingAxis("median rule needs the line ordering of alternatives")
    peaks = [int(p) for p in (voter_peaks if voter_peaks is not None
                              else profile.tops)]
    if not peaks:
        raise EmptyVoterSet("median rule needs at least one peak")
    axis_rank = {alt: r for r, alt in enumerate(profile.line_axis)}
    try:
        keys = sorted(axis_rank[p] for p in peaks)
    except KeyError as exc:
        raise IndexOutOfRange(f"peak {exc.args[0]} is not on the line axis") from exc
    lower_median_rank = keys[(len(keys) - 1) // 2]
    return int(profile.line_axis[lower_median_rank])


def dictator_rule(profile: OrdinalProfile, dictator_index: int = 0) -> int:
    """Top choice of one fixed voter (default: the lowest agent id)."""
    if profile.num_voters == 0:
        raise EmptyVoterSet("dictator rule needs at least one voter")
    if not (0 <= dictator_index < profile.num_voters):
        raise IndexOutOfRange(
            f"dictator index {dictator_index} out of range for "
            f"{profile.num_voters} voters"
        )
    return int(profile.rankings[dictator_index, 0])


def plurality_matching_rule(profile: OrdinalProfile) -> int:
    """Lowest-id alternative admitting a voter-to-top-slot perfect matching.

    Every voter j opens one slot labeled with j's top choice. Alternative a
    wins if the voters can be matched one-to-one onto the slots so that each
    voter i takes a slot labeled t only when i weakly prefers a to t (a
    appears no later than t in i's ranking). Scanning ids in ascending order
    makes the rule deterministic. A winner always exists; the top choice of
    any single voter trivially matches that voter's own slot pool when all
    else fails, so exhausting all candidates indicates a bug.
    """
    if profile.num_voters == 0:
        raise EmptyVoterSet("plurality matching needs at least one voter")
    cands = profile.candidates()
    local_rankings = np.searchsorted(cands, profile.rankings)
    winner_local = _plurality_matching_core(local_rankings)
    return int(cands[winner_local])


def _plurality_matching_core(rankings: np.ndarray) -> int:
    """Matching scan over local candidate indices 0..c-1."""
    v, c = rankings.shape
    rank_of = np.empty((v, c), dtype=np.int64)
    np.put_along_axis(rank_of, rankings,
                      np.broadcast_to(np.arange(c), (v, c)).copy(), axis=1)
    tops = rankings[:, 0]
    capacity = np.bincount(tops, minlength=c)
    open_class = capacity > 0
    for a in range(c):
        accept = (rank_of >= rank_of[:, a:a + 1]) & open_class[None, :]
        accept_ids = [np.flatnonzero(accept[i]) for i in range(v)]
        if all(ids.size for ids in accept_ids) and \
                _saturating_matching_exists(accept_ids, capacity, v, c):
            return a
    raise InternalNoWinner("no alternative admitted a perfect matching")


def _saturating_matching_exists(accept_ids: list[np.ndarray],
                                capacity: np.ndarray, v: int, c: int) -> bool:
    """Augmenting-path matching of v voters into capacitated top classes."""
    owners: list[list[int]] = [[] for _ in range(c)]

    def try_place(i: int, seen: list[bool]) -> bool:
        for t in accept_ids[i]:
            if seen[t]:
                continue
            seen[t] = True
            if len(owners[t]) < capacity[t]:
                owners[t].append(i)
                return True
            for slot, j in enumerate(owners[t]):
                if try_place(j, seen):
                    owners[t][slot] = i
                    return True
        return False

    return all(try_place(i, [False] * c) for i in range(v))


# ---------------------------------------------------------------------------
# rule objects (used to assemble mechanisms)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimalRule:
    """Cardinal rule: minimize a fixed inner aggregator over the electorate."""

    inner: InnerObjective
    info: ClassVar[str] = CARDINAL
    unanimous: ClassVar[bool] = True
    line_only: ClassVar[bool] = False

    @property
    def name(self) -> str:
        return "optimal"

    def select_cardinal(self, dist: np.ndarray, candidates: np.ndarray,
                        positions: np.ndarray | None) -> int:
        if dist.shape[0] == 0:
            raise EmptyVoterSet("optimal rule needs at least one voter")
        values = self.inner.over_columns(dist)
        return int(candidates[int(np.argmin(values))])

    def claimed_in(self, inner: InnerObjective) -> float | None:
        return 1.0 if inner.spec == self.inner.spec else None

    def claimed_over(self, outer: OuterObjective) -> float | None:
        return 1.0 if outer.kind == self.inner.kind else None


@dataclass(frozen=True)
class MedianLineRule:
    """Ordinal line rule: lower median of voter peaks."""

    info: ClassVar[str] = ORDINAL
    unanimous: ClassVar[bool] = True
    line_only: ClassVar[bool] = True

    @property
    def name(self) -> str:
        return "median"

    def select_ordinal(self, profile: OrdinalProfile,
                       peaks: Sequence[int] | None = None) -> int:
        return median_line_rule(profile, peaks)

    def claimed_in(self, inner: InnerObjective) -> float | None:
        return None

    def claimed_over(self, outer: OuterObjective) -> float | None:
        # over pseudo-voters standing exactly at alternatives, the median
        # peak attains the line-wide optimum of total (hence average) distance
        return 1.0 if outer.kind == AVG_KIND else None


@dataclass(frozen=True)
class PluralityMatchingRule:
    """Ordinal rule with constant-factor guarantees for both avg and max."""

    info: ClassVar[str] = ORDINAL
    unanimous: ClassVar[bool] = True
    line_only: ClassVar[bool] = False

    @property
    def name(self) -> str:
        return "plurality-matching"

    def select_ordinal(self, profile: OrdinalProfile,
                       peaks: Sequence[int] | None = None) -> int:
        return plurality_matching_rule(profile)

    def claimed_in(self, inner: InnerObjective) -> float | None:
        return 3.0 if inner.kind in (AVG_KIND, MAX_KIND) else None

    def claimed_over(self, outer: OuterObjective) -> float | None:
        # pseudo-voters sit at distance 0 from their favorite candidate,
        # which sharpens the guarantee to 2
        return 2.0 if outer.kind in (AVG_KIND, MAX_KIND) else None


@dataclass(frozen=True)
class DictatorRule:
    """Ordinal rule returning one fixed voter's top choice."""

    dictator_index: int = 0
    info: ClassVar[str] = ORDINAL
    unanimous: ClassVar[bool] = True
    line_only: ClassVar[bool] = False

    @property
    def name(self) -> str:
        return ("dictator" if self.dictator_index == 0
                else f"dictator:{self.dictator_index}")

    def select_ordinal(self, profile: OrdinalProfile,
                       peaks: Sequence[int] | None = None) -> int:
        return dictator_rule(profile, self.dictator_index)

    def claimed_in(self, inner: InnerObjective) -> float | None:
        # any single voter's top is a 3-approximation of the worst-case
        # (max) district cost; nothing comparable holds for averages
        return 3.0 if inner.kind == MAX_KIND else None

    def claimed_over(self, outer: OuterObjective) -> float | None:
        return None


def parse_direct_rule(token: str) -> object:
    """Parse an ordinal in-rule token: median / plurality-matching / dictator[:i]."""
    if token == "median":
        return MedianLineRule()
    if token == "plurality-matching":
        return PluralityMatchingRule()
    if token == "dictator":
        return DictatorRule(0)
    if token.startswith("dictator:"):
        return DictatorRule(int(token.split(":", 1)[1]))
    raise ValueError(f"unknown rule {token!r}")
