"""Independent equilibrium oracle.

Certifies or refutes a claimed equilibrium by evaluating every dominating
deviation exactly.  The scoring path here is deliberately different from
the one in :mod:`scoreline.profiles` and from the search's symbolic
constraint builder: the unit interval is cut at *every* pairwise midpoint
between stations, and inside each cell the full distance ranking is
rebuilt by sorting.  A bug in the incremental region walk used elsewhere
cannot silently certify itself against this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import CountMismatchError
from .profiles import (
    AtCluster,
    DeviationTarget,
    FreePoint,
    LeftLimit,
    Profile,
    RightLimit,
)
from .rulekit import ScoringRule

__all__ = [
    "Status",
    "LedgerEntry",
    "EquilibriumReport",
    "verify_profile",
    "grid_cross_check",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# Tie ranks order co-located stations: the mover's limit approach decides
# whether it sits just ahead of or just behind the resident block.
_AHEAD, _RESIDENT, _BEHIND = 0, 1, 2


class Status(enum.Enum):
    EQUILIBRIUM = "equilibrium"
    NOT_EQUILIBRIUM = "not-equilibrium"


@dataclass(frozen=True)
class _Station:
    position: Fraction
    count: int
    # tie_side: None for ordinary stations; for a limit mover, "left" or
    # "right" marks the approach side.
    tie_side: str | None = None
    is_subject: bool = False


@dataclass(frozen=True)
class LedgerEntry:
    mover: int
    target: DeviationTarget
    score: Fraction
    slack: Fraction


@dataclass(frozen=True)
class EquilibriumReport:
    status: Status
    cluster_scores: tuple[Fraction, ...]
    ledger: tuple[LedgerEntry, ...]

    @property
    def violations(self) -> tuple[LedgerEntry, ...]:
        return tuple(e for e in self.ledger if e.slack < 0)


def _cells(stations: list[_Station]) -> list[tuple[Fraction, Fraction]]:
    """Cut [0, 1] at every pairwise midpoint and at the positions themselves.

    The positions are needed as cuts because a limit mover ties with the
    residents at its own station: which side of the position a voter is on
    decides the tie, so the ranking is only constant between such cuts.
    """
    cuts = {ZERO, ONE}
    positions = sorted({st.position for st in stations})
    for i, p in enumerate(positions):
        if ZERO < p < ONE:
            cuts.add(p)
        for other in positions[i + 1 :]:
            mid = (p + other) / 2
            if ZERO < mid < ONE:
                cuts.add(mid)
    ordered = sorted(cuts)
    return list(zip(ordered, ordered[1:]))


def _tie_rank(st: _Station, rep: Fraction) -> int:
    if st.tie_side is None:
        return _RESIDENT
    on_approach_side = rep < st.position if st.tie_side == "left" else rep > st.position
    return _AHEAD if on_approach_side else _BEHIND


def _scan_score(scores: tuple[Fraction, ...], stations: list[_Station]) -> Fraction:
    """Score of the subject station's members via full per-cell sorting.

    Within a cell all voters rank the stations identically, so one
    representative point determines the rank blocks; the subject block
    contributes its mean score times the cell length.
    """
    total = ZERO
    for lo, hi in _cells(stations):
        rep = (lo + hi) / 2
        order = sorted(
            stations, key=lambda st: (abs(rep - st.position), _tie_rank(st, rep))
        )
        rank = 1
        for st in order:
            if st.is_subject:
                block = sum(scores[rank - 1 : rank - 1 + st.count]) / st.count
                total += block * (hi - lo)
                break
            rank += st.count
    return total


def _baseline(profile: Profile, idx: int) -> list[_Station]:
    return [
        _Station(c.position, c.count, is_subject=(k == idx))
        for k, c in enumerate(profile.clusters)
    ]


def _departed(profile: Profile, mover: int) -> list[_Station]:
    out = []
    for k, c in enumerate(profile.clusters):
        if k == mover:
            if c.count > 1:
                out.append(_Station(c.position, c.count - 1))
        else:
            out.append(_Station(c.position, c.count))
    return out


def _deviation(
    rule: ScoringRule, profile: Profile, mover: int, target: DeviationTarget
) -> Fraction:
    rest = _departed(profile, mover)
    if isinstance(target, FreePoint):
        stations = rest + [_Station(target.point, 1, is_subject=True)]
        return _scan_score(rule.scores, stations)
    pos = profile.clusters[target.cluster].position
    if isinstance(target, AtCluster):
        stations = []
        for st in rest:
            if st.position == pos:
                stations.append(_Station(pos, st.count + 1, is_subject=True))
            else:
                stations.append(st)
        return _scan_score(rule.scores, stations)
    side = "left" if isinstance(target, LeftLimit) else "right"
    stations = rest + [_Station(pos, 1, tie_side=side, is_subject=True)]
    return _scan_score(rule.scores, stations)


def _dominating_targets(profile: Profile, mover: int) -> list[DeviationTarget]:
    """Joining or flanking every still-occupied cluster.

    The mover's own cluster only appears when residents remain; rejoining
    it is the status quo and is omitted.  Limits that would approach a
    cluster from outside [0, 1] are omitted as well: no real move lives
    there, and the adjacent positions are covered by the other targets.
    """
    vacated = profile.clusters[mover].count == 1
    targets: list[DeviationTarget] = []
    for k, c in enumerate(profile.clusters):
        if k == mover and vacated:
            continue
        if k != mover:
            targets.append(AtCluster(k))
        if c.position > ZERO:
            targets.append(LeftLimit(k))
        if c.position < ONE:
            targets.append(RightLimit(k))
    return targets


def verify_profile(rule: ScoringRule, profile: Profile) -> EquilibriumReport:
    """Certify or refute a profile by exhaustive dominating-set deviation.

    Equilibrium iff no mover earns more at any target than at home.  The
    ledger records every (mover, target) pair with its exact score and
    slack; negative slack entries are the violations.
    """
    if profile.m != rule.m:
        raise CountMismatchError(f"profile has {profile.m} candidates, rule {rule.m}")
    cluster_scores = tuple(
        _scan_score(rule.scores, _baseline(profile, k)) for k in range(profile.q)
    )
    ledger: list[LedgerEntry] = []
    for mover in range(profile.q):
        base = cluster_scores[mover]
        for target in _dominating_targets(profile, mover):
            score = _deviation(rule, profile, mover, target)
            ledger.append(LedgerEntry(mover, target, score, base - score))
    status = (
        Status.EQUILIBRIUM
        if all(e.slack >= 0 for e in ledger)
        else Status.NOT_EQUILIBRIUM
    )
    return EquilibriumReport(status, cluster_scores, tuple(ledger))


def grid_cross_check(
    rule: ScoringRule, profile: Profile, resolution: int
) -> EquilibriumReport:
    """Dominating-set check plus exact free-point probes at k/resolution.

    The grid adds nothing in theory (each probe lands inside an affine
    piece whose endpoints the dominating set already covers) and must never
    find a violation that :func:`verify_profile` missed; it exists as an
    independent safety net under that argument.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    base_report = verify_profile(rule, profile)
    occupied = set(profile.positions)
    ledger = list(base_report.ledger)
    for mover in range(profile.q):
        base = base_report.cluster_scores[mover]
        for k in range(resolution + 1):
            t = Fraction(k, resolution)
            if t in occupied:
                continue
            target = FreePoint(t)
            score = _deviation(rule, profile, mover, target)
            ledger.append(LedgerEntry(mover, target, score, base - score))
    status = (
        Status.EQUILIBRIUM
        if all(e.slack >= 0 for e in ledger)
        else Status.NOT_EQUILIBRIUM
    )
    return EquilibriumReport(status, base_report.cluster_scores, tuple(ledger))
