"""Exact rational linear programming via two-phase simplex.

Maximises a linear objective subject to <=, = and >= constraints with all
data exact rationals.  Pivoting uses Bland's smallest-index rule, which
rules out cycling and guarantees termination; instance sizes in this
library are tiny, so speed is a secondary concern.  When gmpy2 is
installed its ``mpq`` type is used for the tableau arithmetic (5-10x faster
than ``fractions.Fraction``); inputs and outputs are plain Fractions and
results are identical either way.

Optimal points are re-substituted into every constraint before they are
returned; an inexact answer is a bug, not a tolerance issue.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionMismatchError, InternalVerificationError

try:  # pragma: no cover - exercised implicitly when gmpy2 is present
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

__all__ = [
    "Relation",
    "Constraint",
    "LinearProgram",
    "LpStatus",
    "LpOutcome",
    "solve",
    "satisfies",
    "dump_text",
]

LEQ = "<="
EQ = "="
GEQ = ">="
Relation = str


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: Relation
    bound: Fraction


@dataclass
class LinearProgram:
    """maximise objective . x subject to the constraints.

    Variables are free by default; set ``nonnegative`` when every variable
    is known to be >= 0 at any feasible point (this halves the simplex
    width by skipping the free-variable split).
    """

    variables: tuple[str, ...]
    objective: tuple[Fraction, ...]
    constraints: list[Constraint] = field(default_factory=list)
    nonnegative: bool = False

    def add(self, coeffs, relation: Relation, bound) -> None:
        self.constraints.append(
            Constraint(tuple(Fraction(c) for c in coeffs), relation, Fraction(bound))
        )

    def validate(self) -> None:
        n = len(self.variables)
        if n < 1:
            raise DimensionMismatchError("need at least one variable")
        if len(self.objective) != n:
            raise DimensionMismatchError("objective width != variable count")
        for row in self.constraints:
            if len(row.coeffs) != n:
                raise DimensionMismatchError("constraint width != variable count")
            if row.relation not in (LEQ, EQ, GEQ):
                raise DimensionMismatchError(f"bad relation {row.relation!r}")


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None


def satisfies(lp: LinearProgram, point) -> bool:
    """Exact check that a point meets every constraint."""
    for row in lp.constraints:
        lhs = sum(c * x for c, x in zip(row.coeffs, point))
        if row.relation == LEQ and lhs > row.bound:
            return False
        if row.relation == GEQ and lhs < row.bound:
            return False
        if row.relation == EQ and lhs != row.bound:
            return False
    return True


def dump_text(lp: LinearProgram) -> str:
    """Plain-text debug rendering, one constraint per line."""

    def term(c, name):
        return f"{'+' if c >= 0 else '-'} {abs(c)}*{name}"

    lines = [
        "max " + " ".join(term(c, v) for c, v in zip(lp.objective, lp.variables))
    ]
    for row in lp.constraints:
        lhs = " ".join(term(c, v) for c, v in zip(row.coeffs, lp.variables) if c != 0)
        lines.append(f"{lhs or '0'} {row.relation} {row.bound}")
    return "\n".join(lines)


def _pivot(tableau: list[list], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    pivot_row = tableau[row]
    for r, tab_row in enumerate(tableau):
        if r == row:
            continue
        factor = tab_row[col]
        if factor:
            tableau[r] = [v - factor * p for v, p in zip(tab_row, pivot_row)]
    basis[row] = col


def _bland_run(tableau: list[list], basis: list[int], ncols: int) -> LpStatus:
    """Run simplex iterations on a tableau whose last row is the (maximise)
    objective in reduced form: entry j is (z_j - c_j), entry -1 the value.

    Entering column: smallest index with negative reduced cost; leaving
    row: lexicographic Bland tie-break on the basic variable index.
    """
    zero = _Q(0)
    while True:
        cost = tableau[-1]
        col = -1
        for j in range(ncols):
            if cost[j] < zero:
                col = j
                break
        if col < 0:
            return LpStatus.OPTIMAL
        row = -1
        best = None
        for i in range(len(basis)):
            a = tableau[i][col]
            if a > zero:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best = ratio
                    row = i
        if row < 0:
            return LpStatus.UNBOUNDED
        _pivot(tableau, basis, row, col)


def solve(lp: LinearProgram) -> LpOutcome:
    """Exact two-phase simplex.  Deterministic for identical inputs."""
    lp.validate()
    n = len(lp.variables)

    # Standard form: free variables split as x = x+ - x-, then one slack or
    # surplus per inequality and artificials where the origin basis fails.
    if lp.nonnegative:
        width = n

        def expand(coeffs):
            return [_Q(c) for c in coeffs]

    else:
        width = 2 * n

        def expand(coeffs):
            out = []
            for c in coeffs:
                q = _Q(c)
                out.append(q)
                out.append(-q)
            return out

    rows = []
    for con in lp.constraints:
        coeffs = expand(con.coeffs)
        b = _Q(con.bound)
        rel = con.relation
        if b < 0:
            coeffs = [-c for c in coeffs]
            b = -b
            rel = {LEQ: GEQ, GEQ: LEQ, EQ: EQ}[rel]
        rows.append((coeffs, rel, b))

    nslack = sum(1 for _, rel, _ in rows if rel != EQ)
    nart = sum(1 for _, rel, _ in rows if rel != LEQ)
    ncols = width + nslack + nart
    tableau: list[list] = []
    basis: list[int] = []
    art_cols: list[int] = []
    slack_at = width
    art_at = width + nslack
    zero, one = _Q(0), _Q(1)
    for coeffs, rel, b in rows:
        row = coeffs + [zero] * (nslack + nart) + [b]
        if rel == LEQ:
            row[slack_at] = one
            basis.append(slack_at)
            slack_at += 1
        elif rel == GEQ:
            row[slack_at] = -one
            slack_at += 1
            row[art_at] = one
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        else:
            row[art_at] = one
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        tableau.append(row)

    if art_cols:
        # Phase 1: maximise -(sum of artificials); feasible iff optimum 0.
        cost = [zero] * (ncols + 1)
        for j in art_cols:
            cost[j] = one
        tableau.append(cost)
        for i, bcol in enumerate(basis):
            if bcol in art_cols:
                tableau[-1] = [v - r for v, r in zip(tableau[-1], tableau[i])]
        status = _bland_run(tableau, basis, ncols)
        if status is not LpStatus.OPTIMAL:
            raise InternalVerificationError("feasibility phase cannot be unbounded")
        if tableau[-1][-1] != zero:
            # Some artificial variable is stuck positive.
            return LpOutcome(LpStatus.INFEASIBLE)
        tableau.pop()
        # Pivot remaining (zero-valued) artificials out of the basis; rows
        # with no eligible column are redundant and are dropped.
        for i in range(len(basis) - 1, -1, -1):
            if basis[i] not in art_cols:
                continue
            col = next(
                (j for j in range(width + nslack) if tableau[i][j] != zero), -1
            )
            if col >= 0:
                _pivot(tableau, basis, i, col)
            else:
                tableau.pop(i)
                basis.pop(i)

    # Phase 2 objective, priced out for the current basis.
    full_obj = expand(lp.objective) + [zero] * (nslack + nart)
    cost = [-c for c in full_obj] + [zero]
    tableau.append(cost)
    for i, bcol in enumerate(basis):
        if cost[bcol] != zero:
            factor = cost[bcol]
            tableau[-1] = [v - factor * r for v, r in zip(tableau[-1], tableau[i])]
            cost = tableau[-1]

    # Artificial columns sit beyond width + nslack, so they can never
    # re-enter the basis here.
    status = _bland_run(tableau, basis, width + nslack)
    if status is LpStatus.UNBOUNDED:
        return LpOutcome(LpStatus.UNBOUNDED)

    values = [zero] * ncols
    for i, bcol in enumerate(basis):
        values[bcol] = tableau[i][-1]
    if lp.nonnegative:
        point = tuple(_to_fraction(values[j]) for j in range(n))
    else:
        point = tuple(
            _to_fraction(values[2 * j] - values[2 * j + 1]) for j in range(n)
        )
    value = sum(c * x for c, x in zip(lp.objective, point))
    if not satisfies(lp, point):
        raise InternalVerificationError("simplex returned an infeasible point")
    return LpOutcome(LpStatus.OPTIMAL, Fraction(value), point)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(int(v.numerator), int(v.denominator))
