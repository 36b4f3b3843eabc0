"""Clustered strategy profiles and exact candidate/deviation scores.

Voters are uniform on [0, 1] and rank candidates by distance; candidates
sharing a position are ordered by a fair lottery, so each one collects the
mean of the scores over the shared rank block.  A candidate's total score
is therefore an integral of a step function: the unit interval splits at
the midpoints between the candidate's position and every other occupied
position, and inside each region the rank block is constant.  All values
here are exact rationals; voters exactly equidistant between two distinct
positions form a measure-zero set and never contribute.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import (
    CountMismatchError,
    InvalidTargetError,
    PositionOutOfRangeError,
)
from .rulekit import ScoringRule

__all__ = [
    "Cluster",
    "Profile",
    "AtCluster",
    "LeftLimit",
    "RightLimit",
    "FreePoint",
    "DeviationTarget",
    "Piece",
    "PiecewiseLinear",
    "make_profile",
    "candidate_score",
    "deviation_score",
    "score_pieces",
]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Cluster:
    position: Fraction
    count: int


@dataclass(frozen=True)
class Profile:
    """Distinct positions with multiplicities, strictly increasing."""

    clusters: tuple[Cluster, ...]

    @property
    def q(self) -> int:
        return len(self.clusters)

    @property
    def m(self) -> int:
        return sum(c.count for c in self.clusters)

    @property
    def positions(self) -> tuple[Fraction, ...]:
        return tuple(c.position for c in self.clusters)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(c.count for c in self.clusters)

    def mirrored(self) -> "Profile":
        """Reflection through 1/2."""
        return Profile(
            tuple(Cluster(1 - c.position, c.count) for c in reversed(self.clusters))
        )

    def __str__(self) -> str:
        return ";".join(f"{c.position}*{c.count}" for c in self.clusters)


# Deviation targets.  Cluster indices refer to the clusters of the original
# profile (0-based); the mover is always removed from its own cluster before
# the target is evaluated.
@dataclass(frozen=True)
class AtCluster:
    cluster: int


@dataclass(frozen=True)
class LeftLimit:
    cluster: int


@dataclass(frozen=True)
class RightLimit:
    cluster: int


@dataclass(frozen=True)
class FreePoint:
    point: Fraction


DeviationTarget = AtCluster | LeftLimit | RightLimit | FreePoint


@dataclass(frozen=True)
class Piece:
    """One affine piece of a deviation payoff, on the open interval (lo, hi).

    ``at_lo`` and ``at_hi`` are the one-sided limit values at the ends; the
    payoff itself may jump at occupied positions.
    """

    lo: Fraction
    hi: Fraction
    slope: Fraction
    at_lo: Fraction
    at_hi: Fraction


@dataclass(frozen=True)
class PiecewiseLinear:
    pieces: tuple[Piece, ...]

    def piece_containing(self, t: Fraction) -> Piece:
        for p in self.pieces:
            if p.lo < t < p.hi:
                return p
        raise KeyError(f"{t} is not interior to any piece")


def _as_fraction(value) -> Fraction:
    # Floats are read through their shortest decimal representation so that
    # 0.3 means 3/10, not the binary float it would otherwise denote.
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, Rational):
        return Fraction(value)
    return Fraction(str(value))


def make_profile(entries, rule: ScoringRule) -> Profile:
    """Build a validated profile; entries with equal positions are merged.

    ``entries`` is an iterable of (position, count).  Counts must be
    positive and sum to the rule's candidate number.
    """
    merged: dict[Fraction, int] = {}
    for position, count in entries:
        pos = _as_fraction(position)
        count = int(count)
        if count <= 0:
            raise CountMismatchError(f"count {count} at {pos} is not positive")
        if not ZERO <= pos <= ONE:
            raise PositionOutOfRangeError(f"position {pos} outside [0, 1]")
        merged[pos] = merged.get(pos, 0) + count
    if not merged:
        raise CountMismatchError("profile needs at least one cluster")
    total = sum(merged.values())
    if total != rule.m:
        raise CountMismatchError(f"counts sum to {total}, rule has m={rule.m}")
    clusters = tuple(Cluster(p, merged[p]) for p in sorted(merged))
    return Profile(clusters)


def _block_mean(scores: tuple[Fraction, ...], first_rank: int, size: int) -> Fraction:
    """Mean score over ranks first_rank .. first_rank+size-1 (1-based)."""
    return sum(scores[first_rank - 1 : first_rank - 1 + size]) / size


def _member_score(
    scores: tuple[Fraction, ...], clusters: tuple[Cluster, ...], idx: int
) -> Fraction:
    """Score of one candidate in clusters[idx].

    Regions are delimited by the midpoints between clusters[idx] and every
    other cluster, in position order.  Walking left to right, the set of
    clusters nearer to the voter than clusters[idx] starts as all clusters
    to its left and flips one cluster per midpoint crossed.
    """
    home = clusters[idx]
    others = [c for k, c in enumerate(clusters) if k != idx]
    closer = sum(c.count for c in others if c.position < home.position)
    total = ZERO
    lo = ZERO
    for nxt in others + [None]:
        hi = ONE if nxt is None else (home.position + nxt.position) / 2
        if hi > lo:
            total += _block_mean(scores, closer + 1, home.count) * (hi - lo)
        if nxt is not None:
            closer += nxt.count if nxt.position > home.position else -nxt.count
        lo = hi
    return total


def _limit_score(
    scores: tuple[Fraction, ...],
    clusters: tuple[Cluster, ...],
    idx: int,
    from_left: bool,
) -> Fraction:
    """Limit score of a lone mover approaching clusters[idx].

    In the limit the mover sits at the cluster's position but is ranked
    ahead of the residents by voters on its own side of the position and
    behind all of them by voters on the far side; comparisons against every
    other cluster are as from the position itself.
    """
    target = clusters[idx]
    others = [c for k, c in enumerate(clusters) if k != idx]
    closer = sum(c.count for c in others if c.position < target.position)
    boundaries: list[tuple[Fraction, Cluster | None]] = []
    for c in others:
        if c.position < target.position:
            boundaries.append(((target.position + c.position) / 2, c))
    boundaries.append((target.position, None))
    for c in others:
        if c.position > target.position:
            boundaries.append(((target.position + c.position) / 2, c))
    boundaries.append((ONE, None))

    total = ZERO
    lo = ZERO
    left_of_target = True
    for boundary, crossing in boundaries:
        if boundary > lo:
            ahead = left_of_target if from_left else not left_of_target
            rank = closer + 1 if ahead else closer + target.count + 1
            total += scores[rank - 1] * (boundary - lo)
        if crossing is None:
            left_of_target = False
        else:
            closer += crossing.count if crossing.position > target.position else -crossing.count
        lo = boundary
    return total


def _depart(profile: Profile, mover_cluster: int) -> tuple[Cluster, ...]:
    """Remove one candidate from the mover's cluster; drop it if emptied."""
    if not 0 <= mover_cluster < profile.q:
        raise InvalidTargetError(f"no cluster {mover_cluster}")
    out = []
    for k, c in enumerate(profile.clusters):
        if k == mover_cluster:
            if c.count > 1:
                out.append(Cluster(c.position, c.count - 1))
        else:
            out.append(c)
    return tuple(out)


def _post_index(profile: Profile, mover_cluster: int, cluster: int) -> int:
    """Map an original cluster index into the post-departure tuple."""
    if not 0 <= cluster < profile.q:
        raise InvalidTargetError(f"no cluster {cluster}")
    vacated = profile.clusters[mover_cluster].count == 1
    if vacated and cluster == mover_cluster:
        raise InvalidTargetError("target references the mover's vacated position")
    if vacated and cluster > mover_cluster:
        return cluster - 1
    return cluster


def candidate_score(profile: Profile, rule: ScoringRule, cluster: int) -> Fraction:
    """Exact score of any one candidate in the given cluster."""
    if profile.m != rule.m:
        raise CountMismatchError(f"profile has {profile.m} candidates, rule {rule.m}")
    if not 0 <= cluster < profile.q:
        raise InvalidTargetError(f"no cluster {cluster}")
    return _member_score(rule.scores, profile.clusters, cluster)


def deviation_score(
    profile: Profile,
    rule: ScoringRule,
    mover_cluster: int,
    target: DeviationTarget,
) -> Fraction:
    """Exact score the mover earns at the target, everyone else fixed.

    The mover's departure is modelled first: its cluster count drops by one
    (the cluster disappears when emptied), and the target is evaluated in
    that configuration.  One-sided limits are first-class targets rather
    than epsilon evaluations.  Limits that would approach a cluster from
    outside the issue space (left of 0, right of 1) are invalid.
    """
    if profile.m != rule.m:
        raise CountMismatchError(f"profile has {profile.m} candidates, rule {rule.m}")
    post = _depart(profile, mover_cluster)

    if isinstance(target, FreePoint):
        t = _as_fraction(target.point)
        if not ZERO <= t <= ONE:
            raise InvalidTargetError(f"free point {t} outside [0, 1]")
        if any(c.position == t for c in post):
            raise InvalidTargetError(f"free point {t} is occupied")
        merged = tuple(sorted(post + (Cluster(t, 1),), key=lambda c: c.position))
        idx = next(k for k, c in enumerate(merged) if c.position == t)
        return _member_score(rule.scores, merged, idx)

    idx = _post_index(profile, mover_cluster, target.cluster)
    if isinstance(target, AtCluster):
        joined = tuple(
            Cluster(c.position, c.count + 1) if k == idx else c
            for k, c in enumerate(post)
        )
        return _member_score(rule.scores, joined, idx)
    if isinstance(target, LeftLimit):
        if post[idx].position == ZERO:
            raise InvalidTargetError("no approach from the left of position 0")
        return _limit_score(rule.scores, post, idx, from_left=True)
    if isinstance(target, RightLimit):
        if post[idx].position == ONE:
            raise InvalidTargetError("no approach from the right of position 1")
        return _limit_score(rule.scores, post, idx, from_left=False)
    raise InvalidTargetError(f"unknown target {target!r}")


def score_pieces(
    profile: Profile, rule: ScoringRule, mover_cluster: int
) -> PiecewiseLinear:
    """Full piecewise-linear description of the mover's payoff in its position.

    With the mover removed, its payoff as a function of its new position t
    is affine on every open interval between consecutive occupied positions
    (and between the boundary and the nearest one).  With j candidates to
    the left of the interval and k to the right the slope is
    ``(s_{j+1} - s_{k+1}) / 2``; on the two end intervals this specialises
    to ``+(s_1 - s_m)/2`` and ``-(s_1 - s_m)/2``.
    """
    if profile.m != rule.m:
        raise CountMismatchError(f"profile has {profile.m} candidates, rule {rule.m}")
    post = _depart(profile, mover_cluster)
    s = rule.scores
    bounds = [ZERO] + [c.position for c in post] + [ONE]
    pieces = []
    left_count = 0
    total = sum(c.count for c in post)
    for i in range(len(bounds) - 1):
        lo, hi = bounds[i], bounds[i + 1]
        if i > 0:
            left_count += post[i - 1].count
        if lo >= hi:
            continue
        slope = (s[left_count] - s[total - left_count]) / 2
        rep = (lo + hi) / 2
        value = deviation_score(profile, rule, mover_cluster, FreePoint(rep))
        pieces.append(
            Piece(
                lo=lo,
                hi=hi,
                slope=slope,
                at_lo=value - slope * (rep - lo),
                at_hi=value + slope * (hi - rep),
            )
        )
    return PiecewiseLinear(tuple(pieces))
