"""Exact-arithmetic equilibrium analysis for positional scoring rules in
the unit-interval candidate positioning game.

Candidates pick positions on [0, 1]; voters, uniform on the interval, rank
them by distance and a nonincreasing score vector pays each rank.  This
package decides existence of convergent and nonconvergent pure Nash
equilibria, constructs witnesses, and certifies every witness with an
independent oracle.  All arithmetic is exact rational.
"""

from .analytic import (
    Conclusion,
    Interval,
    StructuralBounds,
    Verdict,
    bipositional_solve,
    characterize_small_election,
    cne_interval,
    flat_middle_analysis,
    impossibility_verdicts,
    multipositional_check,
    multipositional_construct,
    prune_cluster_type,
    structural_bounds,
)
from .errors import ScorelineError
from .lpcore import LinearProgram, LpOutcome, LpStatus, solve
from .profiles import (
    AtCluster,
    Cluster,
    DeviationTarget,
    FreePoint,
    LeftLimit,
    PiecewiseLinear,
    Profile,
    RightLimit,
    candidate_score,
    deviation_score,
    make_profile,
    score_pieces,
)
from .rulekit import (
    RuleCategory,
    RuleClass,
    ScoringRule,
    ShapeProfile,
    canonicalize,
    classify,
    cox_threshold,
    is_borda_equivalent,
    parse_rule,
    plateaus,
    shape_profile,
    subrule,
)
from .search import (
    ClusterType,
    SearchOptions,
    SearchResult,
    build_deviation_lp,
    enumerate_cluster_types,
    find_ncne,
)
from .verify import EquilibriumReport, Status, grid_cross_check, verify_profile

__version__ = "0.1.0"

__all__ = [
    "AtCluster",
    "bipositional_solve",
    "build_deviation_lp",
    "candidate_score",
    "canonicalize",
    "characterize_small_election",
    "classify",
    "Cluster",
    "ClusterType",
    "cne_interval",
    "Conclusion",
    "cox_threshold",
    "deviation_score",
    "DeviationTarget",
    "enumerate_cluster_types",
    "EquilibriumReport",
    "find_ncne",
    "flat_middle_analysis",
    "FreePoint",
    "grid_cross_check",
    "impossibility_verdicts",
    "Interval",
    "is_borda_equivalent",
    "LeftLimit",
    "LinearProgram",
    "LpOutcome",
    "LpStatus",
    "make_profile",
    "multipositional_check",
    "multipositional_construct",
    "parse_rule",
    "PiecewiseLinear",
    "plateaus",
    "Profile",
    "prune_cluster_type",
    "RightLimit",
    "RuleCategory",
    "RuleClass",
    "ScorelineError",
    "score_pieces",
    "ScoringRule",
    "SearchOptions",
    "SearchResult",
    "shape_profile",
    "ShapeProfile",
    "solve",
    "Status",
    "structural_bounds",
    "StructuralBounds",
    "subrule",
    "Verdict",
    "verify_profile",
]
