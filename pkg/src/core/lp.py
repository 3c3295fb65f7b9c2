import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.core.arith import RatVec, parse_rat, vec
from src.core.errors import InputError

logger = logging.getLogger(__name__)

Row = Tuple[RatVec, Fraction]


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearSystem:
    """Equalities a·x = r and weak inequalities a·x >= r over free variables."""

    nvars: int
    equalities: Tuple[Row, ...] = ()
    inequalities: Tuple[Row, ...] = ()

    def __post_init__(self) -> None:
        for kind, rows in (("equality", self.equalities), ("inequality", self.inequalities)):
            for i, (coeffs, _) in enumerate(rows):
                if len(coeffs) != self.nvars:
                    raise InputError(
                        f"Invalid {kind} {i}: {len(coeffs)} coefficients for {self.nvars} variables"
                    )

    @classmethod
    def build(
        cls,
        nvars: int,
        equalities: Sequence[Tuple[Sequence, object]] = (),
        inequalities: Sequence[Tuple[Sequence, object]] = (),
    ) -> "LinearSystem":
        return cls(
            nvars=nvars,
            equalities=tuple((vec(a), parse_rat(r)) for a, r in equalities),
            inequalities=tuple((vec(a), parse_rat(r)) for a, r in inequalities),
        )


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    optimum: Optional[Fraction] = None
    witness: Optional[RatVec] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == LPStatus.OPTIMAL


@dataclass
class SimplexTableau:
    """Equality-form tableau A y = b, y >= 0, pivoted with Bland's rule."""

    A: List[List[Fraction]]
    b: List[Fraction]
    basis: List[int]
    pivots: int = field(default=0)

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0]) if self.A else 0

    def pivot(self, i: int, j: int) -> None:
        piv = self.A[i][j]
        self.A[i] = [a / piv for a in self.A[i]]
        self.b[i] /= piv
        for k in range(self.m):
            if k != i and self.A[k][j] != 0:
                f = self.A[k][j]
                self.A[k] = [a - f * p for a, p in zip(self.A[k], self.A[i])]
                self.b[k] -= f * self.b[i]
        self.basis[i] = j
        self.pivots += 1

    def reduced_costs(self, cost: Sequence[Fraction]) -> List[Fraction]:
        out = list(cost)
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = self.A[i]
                out = [o - cb * a for o, a in zip(out, row)]
        return out

    def bland_step(self, cost: Sequence[Fraction], allowed: int) -> str:
        reduced = self.reduced_costs(cost)
        basic = set(self.basis)
        try:
            j = min(j for j in range(allowed) if j not in basic and reduced[j] > 0)
        except ValueError:
            return "optimal"
        try:
            _, _, i = min(
                (self.b[i] / self.A[i][j], self.basis[i], i)
                for i in range(self.m)
                if self.A[i][j] > 0
            )
        except ValueError:
            return "unbounded"
        self.pivot(i, j)
        return "go_on"

    def maximize(self, cost: Sequence[Fraction], allowed: int) -> str:
        while True:
            ret = self.bland_step(cost, allowed)
            if ret in ("optimal", "unbounded"):
                return ret

    def value(self, cost: Sequence[Fraction]) -> Fraction:
        return sum((cost[bv] * self.b[i] for i, bv in enumerate(self.basis)), Fraction(0))

    def solution(self, n: int) -> List[Fraction]:
        y = [Fraction(0)] * n
        for i, bv in enumerate(self.basis):
            if bv < n:
                y[bv] = self.b[i]
        return y

    def drive_out_artificials(self, first_artificial: int) -> None:
        i = 0
        while i < self.m:
            if self.basis[i] >= first_artificial:
                j = next((j for j in range(first_artificial) if self.A[i][j] != 0), None)
                if j is None:
                    # redundant equality
                    del self.A[i]
                    del self.b[i]
                    del self.basis[i]
                    continue
                self.pivot(i, j)
            i += 1


def _standard_form(system: LinearSystem) -> Tuple[List[List[Fraction]], List[Fraction], int]:
    """Columns: x+ (n), x- (n), one surplus per inequality."""
    n = system.nvars
    k = len(system.inequalities)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for a, r in system.equalities:
        rows.append(list(a) + [-c for c in a] + [Fraction(0)] * k)
        rhs.append(r)
    for s, (a, r) in enumerate(system.inequalities):
        surplus = [Fraction(0)] * k
        surplus[s] = Fraction(-1)
        rows.append(list(a) + [-c for c in a] + surplus)
        rhs.append(r)
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-c for c in rows[i]]
            rhs[i] = -rhs[i]
    return rows, rhs, 2 * n + k


def lp_extremize(objective: Sequence, system: LinearSystem, maximize: bool = True) -> LPResult:
    """Exact two-phase simplex with Bland's rule over free variables."""
    c = vec(objective)
    if len(c) != system.nvars:
        raise InputError(f"Objective has {len(c)} coefficients for {system.nvars} variables")
    n = system.nvars
    rows, rhs, width = _standard_form(system)
    m = len(rows)

    if m == 0:
        if all(a == 0 for a in c):
            return LPResult(LPStatus.OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in range(n)))
        return LPResult(LPStatus.UNBOUNDED)

    tableau = SimplexTableau(
        A=[row + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(rows)],
        b=list(rhs),
        basis=[width + i for i in range(m)],
    )
    phase1 = [Fraction(0)] * width + [Fraction(-1)] * m
    tableau.maximize(phase1, allowed=width + m)
    if tableau.value(phase1) < 0:
        logger.debug(f"LP infeasible after {tableau.pivots} phase-1 pivots")
        return LPResult(LPStatus.INFEASIBLE)
    tableau.drive_out_artificials(width)

    sign = Fraction(1) if maximize else Fraction(-1)
    cost = [sign * a for a in c] + [-sign * a for a in c] + [Fraction(0)] * (width - 2 * n + m)
    status = tableau.maximize(cost, allowed=width)
    if status == "unbounded":
        logger.debug(f"LP unbounded after {tableau.pivots} pivots")
        return LPResult(LPStatus.UNBOUNDED)
    y = tableau.solution(width)
    x = tuple(y[j] - y[n + j] for j in range(n))
    optimum = sum((a * xi for a, xi in zip(c, x)), Fraction(0))
    logger.debug(f"LP optimal value {optimum} after {tableau.pivots} pivots")
    return LPResult(LPStatus.OPTIMAL, optimum, x)


def feasible_point(system: LinearSystem) -> Optional[RatVec]:
    result = lp_extremize([0] * system.nvars, system)
    return result.witness if result.is_optimal else None


def strict_feasible(
    nvars: int,
    equalities: Sequence[Row] = (),
    stricts: Sequence[Row] = (),
    weaks: Sequence[Row] = (),
) -> Optional[RatVec]:
    """Point with equalities exact, strict rows > and weak rows >=, or None.

    One auxiliary slack t is shared by all strict rows (a·x - t >= r), capped by t <= 1.
    """
    if not stricts:
        return feasible_point(LinearSystem.build(nvars, equalities, weaks))
    zero = Fraction(0)
    lifted = LinearSystem.build(
        nvars + 1,
        equalities=[(list(a) + [zero], r) for a, r in equalities],
        inequalities=[(list(a) + [Fraction(-1)], r) for a, r in stricts]
        + [(list(a) + [zero], r) for a, r in weaks]
        + [([zero] * nvars + [Fraction(-1)], Fraction(-1))],
    )
    result = lp_extremize([zero] * nvars + [Fraction(1)], lifted)
    if not result.is_optimal or result.optimum <= 0:
        return None
    return result.witness[:nvars]
