"""Equilibrium search: enumerate cluster types, build one exact LP per
type, and collect every nonconvergent equilibrium with a certified witness.

For a fixed assignment of candidate counts (n_1, ..., n_q) to ordered
positions x^1 < ... < x^q, every candidate score and every deviation score
is an affine function of the positions: the voter regions are delimited by
midpoints (affine in the positions) and the rank block inside each region
depends only on the cluster order.  Deviation-proofness is therefore a
system of linear inequalities, and strictness is recovered by maximising
the minimum gap between neighbouring positions and to the boundary.

Dominating deviation set
------------------------
The mover's payoff as a function of its new position is affine on every
open interval between consecutive occupied positions, so its supremum over
each interval is attained at a one-sided limit toward an endpoint.  The
two boundary intervals have slopes +(s_1 - s_m)/2 and -(s_1 - s_m)/2,
which point toward the interior, so they are dominated by the limit at
the innermost endpoint.  Hence it suffices to constrain, for every mover
and every cluster of the post-departure configuration, the two one-sided
limit scores and the score from joining the cluster outright.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from . import verify as verify_mod
from .analytic import Conclusion, Interval, cne_interval, flat_middle_analysis, prune_cluster_type
from .errors import CompositionMismatchError, InternalVerificationError
from .lpcore import LEQ, GEQ, LinearProgram, LpOutcome, LpStatus, solve
from .profiles import Cluster, Profile
from .rulekit import ScoringRule, canonicalize

__all__ = [
    "ClusterType",
    "TypeEntry",
    "TypeOutcome",
    "SearchOptions",
    "SearchResult",
    "enumerate_cluster_types",
    "build_deviation_lp",
    "find_ncne",
]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ClusterType:
    """Composition (n_1, ..., n_q) of the candidate count."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts or any(p <= 0 for p in self.parts):
            raise CompositionMismatchError(f"{self.parts} has nonpositive parts")

    @property
    def q(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    def mirrored(self) -> "ClusterType":
        return ClusterType(tuple(reversed(self.parts)))

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class TypeEntry:
    """One enumerated cluster type, tagged when a pruner rejected it."""

    ctype: ClusterType
    pruned: bool = False
    prune_reasons: tuple[str, ...] = ()


def enumerate_cluster_types(
    m: int, pruner: Callable[[tuple[int, ...]], tuple[bool, list[str]]] | None = None
) -> list[TypeEntry]:
    """All 2^(m-1) compositions of m, ordered by q then lexicographically.

    Pruned types stay in the list with their reasons so that reports can
    show why a type was never sent to the solver.
    """
    if m < 2:
        raise CompositionMismatchError("need at least two candidates")
    entries: list[TypeEntry] = []
    for q in range(1, m + 1):
        for cuts in combinations(range(1, m), q - 1):
            edges = (0,) + cuts + (m,)
            parts = tuple(edges[i + 1] - edges[i] for i in range(q))
            if pruner is None:
                entries.append(TypeEntry(ClusterType(parts)))
            else:
                keep, reasons = pruner(parts)
                entries.append(TypeEntry(ClusterType(parts), not keep, tuple(reasons)))
    return entries


@dataclass(frozen=True)
class _Aff:
    """Affine form coeffs . x + const over the position variables."""

    coeffs: tuple[Fraction, ...]
    const: Fraction

    def __add__(self, other: "_Aff") -> "_Aff":
        return _Aff(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            self.const + other.const,
        )

    def __sub__(self, other: "_Aff") -> "_Aff":
        return _Aff(
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
            self.const - other.const,
        )

    def scaled(self, k: Fraction) -> "_Aff":
        return _Aff(tuple(k * a for a in self.coeffs), k * self.const)


def _aff_const(q: int, value: Fraction) -> _Aff:
    return _Aff((ZERO,) * q, value)


def _aff_pos(q: int, var: int) -> _Aff:
    return _Aff(tuple(ONE if j == var else ZERO for j in range(q)), ZERO)


def _aff_mid(q: int, a: int, b: int) -> _Aff:
    half = Fraction(1, 2)
    return (_aff_pos(q, a) + _aff_pos(q, b)).scaled(half)


@dataclass(frozen=True)
class _Station:
    """A cluster in a (possibly post-departure) configuration: which
    position variable it sits on and how many candidates it holds."""

    var: int
    count: int


def _block_mean(scores: Sequence[Fraction], first_rank: int, size: int) -> Fraction:
    return sum(scores[first_rank - 1 : first_rank - 1 + size]) / size


def _sym_member_score(
    scores: Sequence[Fraction], stations: Sequence[_Station], idx: int, q: int
) -> _Aff:
    """Affine score of one candidate at stations[idx].

    Mirrors the numeric region walk: boundaries are the midpoints with the
    other stations in variable order, and the closer-count starts at the
    total count left of the home station, flipping once per boundary.
    """
    home = stations[idx]
    others = [st for k, st in enumerate(stations) if k != idx]
    closer = sum(st.count for st in others if st.var < home.var)
    total = _aff_const(q, ZERO)
    lo = _aff_const(q, ZERO)
    for nxt in others + [None]:
        hi = _aff_const(q, ONE) if nxt is None else _aff_mid(q, home.var, nxt.var)
        mean = _block_mean(scores, closer + 1, home.count)
        total = total + (hi - lo).scaled(mean)
        if nxt is not None:
            closer += nxt.count if nxt.var > home.var else -nxt.count
        lo = hi
    return total


def _sym_limit_score(
    scores: Sequence[Fraction],
    stations: Sequence[_Station],
    idx: int,
    from_left: bool,
    q: int,
) -> _Aff:
    """Affine one-sided limit score of a lone mover approaching a station."""
    target = stations[idx]
    others = [st for k, st in enumerate(stations) if k != idx]
    closer = sum(st.count for st in others if st.var < target.var)
    boundaries: list[tuple[_Aff, _Station | None]] = []
    for st in others:
        if st.var < target.var:
            boundaries.append((_aff_mid(q, target.var, st.var), st))
    boundaries.append((_aff_pos(q, target.var), None))
    for st in others:
        if st.var > target.var:
            boundaries.append((_aff_mid(q, target.var, st.var), st))
    boundaries.append((_aff_const(q, ONE), None))

    total = _aff_const(q, ZERO)
    lo = _aff_const(q, ZERO)
    left_of_target = True
    for boundary, crossing in boundaries:
        ahead = left_of_target if from_left else not left_of_target
        rank = closer + 1 if ahead else closer + target.count + 1
        total = total + (boundary - lo).scaled(scores[rank - 1])
        if crossing is None:
            left_of_target = False
        else:
            closer += crossing.count if crossing.var > target.var else -crossing.count
        lo = boundary
    return total


def build_deviation_lp(rule: ScoringRule, ctype: ClusterType) -> LinearProgram:
    """The max-min-gap LP whose strictly positive optimum certifies a
    nonconvergent equilibrium of the given type.

    Variables are the q positions plus the gap delta.  Structural rows keep
    the positions ordered with gap at least delta between neighbours and to
    both boundaries (any equilibrium has strictly interior positions, so
    this costs no solutions).  One row per mover and dominating-set target
    requires the deviation score not to exceed the mover's current score.
    """
    q = ctype.q
    if ctype.total != rule.m:
        raise CompositionMismatchError(
            f"type {ctype} does not partition {rule.m} candidates"
        )
    scores = rule.scores
    names = tuple(f"x{i + 1}" for i in range(q)) + ("delta",)
    nvars = q + 1
    # Positions are >= delta >= 0 at any feasible point, so the solver may
    # treat all variables as nonnegative.
    lp = LinearProgram(
        names, (ZERO,) * q + (ONE,), nonnegative=True
    )

    def row(aff: _Aff, delta_coeff: Fraction, relation: str, bound: Fraction):
        lp.add(aff.coeffs + (delta_coeff,), relation, bound - aff.const)

    row(_aff_pos(q, 0), -ONE, GEQ, ZERO)  # x1 - delta >= 0
    for l in range(q - 1):
        row(_aff_pos(q, l + 1) - _aff_pos(q, l), -ONE, GEQ, ZERO)
    row(_aff_pos(q, q - 1).scaled(-ONE), -ONE, GEQ, -ONE)  # 1 - xq >= delta
    lp.add((ZERO,) * q + (ONE,), GEQ, ZERO)  # delta >= 0

    full = [_Station(i, n) for i, n in enumerate(ctype.parts)]
    seen: set[tuple] = set()
    for j in range(q):
        original = _sym_member_score(scores, full, j, q)
        post = [
            _Station(st.var, st.count - 1 if st.var == j else st.count)
            for st in full
            if not (st.var == j and st.count == 1)
        ]
        deviations: list[_Aff] = []
        for k, st in enumerate(post):
            if st.var != j:
                joined = [
                    _Station(p.var, p.count + 1 if i == k else p.count)
                    for i, p in enumerate(post)
                ]
                deviations.append(_sym_member_score(scores, joined, k, q))
            deviations.append(_sym_limit_score(scores, post, k, True, q))
            deviations.append(_sym_limit_score(scores, post, k, False, q))
        for dev in deviations:
            diff = dev - original
            key = (diff.coeffs, -diff.const)
            if all(c == 0 for c in diff.coeffs) and diff.const <= 0:
                continue  # vacuously satisfied
            if key in seen:
                continue
            seen.add(key)
            row(diff, ZERO, LEQ, ZERO)
    return lp


@dataclass(frozen=True)
class TypeOutcome:
    """Search result for one cluster type."""

    ctype: ClusterType
    pruned: bool = False
    prune_reasons: tuple[str, ...] = ()
    lp_outcome: LpOutcome | None = None
    gap: Fraction | None = None
    witness: Profile | None = None
    is_equilibrium: bool = False


@dataclass(frozen=True)
class SearchOptions:
    prune: bool = True
    include_single_cluster: bool = False
    jobs: int = 1


@dataclass(frozen=True)
class SearchResult:
    rule: ScoringRule
    outcomes: tuple[TypeOutcome, ...]
    ncne_types: tuple[ClusterType, ...]
    cne: Interval | None

    def witnesses(self) -> list[Profile]:
        return [o.witness for o in self.outcomes if o.is_equilibrium and o.witness]


def _make_pruner(rule: ScoringRule):
    flat = flat_middle_analysis(rule)
    cap = (
        flat.details.get("max_cluster_size")
        if flat is not None and flat.conclusion is Conclusion.INCONCLUSIVE
        else None
    )

    def pruner(parts: tuple[int, ...]) -> tuple[bool, list[str]]:
        keep, reasons = prune_cluster_type(rule, parts)
        if cap is not None and any(p > cap for p in parts):
            keep = False
            reasons = reasons + [f"flat-middle rule allows at most {cap} per position"]
        return keep, reasons

    return pruner


def _solve_type(rule: ScoringRule, entry: TypeEntry) -> TypeOutcome:
    if entry.pruned:
        return TypeOutcome(entry.ctype, True, entry.prune_reasons)
    lp = build_deviation_lp(rule, entry.ctype)
    outcome = solve(lp)
    gap = outcome.value if outcome.status is LpStatus.OPTIMAL else None
    witness = None
    is_eq = False
    if outcome.status is LpStatus.OPTIMAL and outcome.value > 0:
        positions = outcome.point[: entry.ctype.q]
        witness = Profile(
            tuple(Cluster(p, n) for p, n in zip(positions, entry.ctype.parts))
        )
        is_eq = True
    return TypeOutcome(entry.ctype, False, (), outcome, gap, witness, is_eq)


def _worker(payload) -> TypeOutcome:
    scores, entry = payload
    return _solve_type(ScoringRule(scores), entry)


def find_ncne(rule: ScoringRule, options: SearchOptions | None = None) -> SearchResult:
    """Run the full search and certify every witness with the independent
    oracle before reporting it.

    Types whose LP is infeasible or tops out at gap zero are never reported
    as equilibria (a zero gap means the only candidates sit on a boundary
    or coincide, which no equilibrium does).  With ``include_single_cluster``
    the q = 1 type is solved as well, reproducing the single-cluster
    existence interval as a cross-check of the constraint builder.
    """
    opts = options or SearchOptions()
    canon = canonicalize(rule)
    pruner = _make_pruner(canon) if opts.prune else None
    entries = [
        e
        for e in enumerate_cluster_types(canon.m, pruner)
        if opts.include_single_cluster or e.ctype.q >= 2
    ]
    jobs = max(1, int(opts.jobs))
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as pool:
            outcomes = list(pool.map(_worker, [(canon.scores, e) for e in entries]))
    else:
        outcomes = [_solve_type(canon, e) for e in entries]

    outcomes.sort(key=lambda o: (o.ctype.q, o.ctype.parts))
    checked: list[TypeOutcome] = []
    ncne: list[ClusterType] = []
    for out in outcomes:
        if out.is_equilibrium:
            report = verify_mod.verify_profile(canon, out.witness)
            if report.status is not verify_mod.Status.EQUILIBRIUM:
                raise InternalVerificationError(
                    f"search witness for type {out.ctype} failed the oracle"
                )
            if out.ctype.q >= 2:
                ncne.append(out.ctype)
        checked.append(out)
    return SearchResult(canon, tuple(checked), tuple(ncne), cne_interval(canon))
