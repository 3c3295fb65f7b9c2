import logging
from fractions import Fraction
from itertools import combinations, zip_longest
from typing import List

from src.core.arith import add, dot, format_rat, scale, solve_affine
from src.core.errors import InputError
from src.modules.family.interval import EpsInterval
from src.modules.family.parametric import (
    IndexSet,
    ParametricFamily,
    omega_intervals,
)
from src.modules.family.sweep import (
    ABSORBED,
    OPEN,
    SINGLETON,
    START,
    TERMINAL,
    ClassDecomposition,
    FamilyClass,
    split_pieces,
    merge_pieces,
)
from src.modules.polytope.hpolyhedron import (
    CombinatorialType,
    HPolyhedron,
    combinatorial_type,
    facets,
    implicit_rows,
)

logger = logging.getLogger(__name__)


def vertex_crossings(fam: ParametricFamily, window: EpsInterval) -> List[Fraction]:
    """Parameters in `window` where more than n rows are tight at one point of the polytope.

    Every n rows with an invertible A_J trace a vertex path x_J(eps); a crossing is a zero
    of another row's slack along that path at which the path point is still feasible.
    """
    rows = sorted(fam.rows)
    found = set()
    for J in combinations(rows, fam.n):
        A_J = fam.A.select(J)
        base = solve_affine(A_J, [fam.B[j] for j in J])
        if base is None or base.kernel_basis:
            continue
        drift = solve_affine(A_J, [fam.C[j] for j in J]).witness
        for i in rows:
            if i in J:
                continue
            a = fam.A.row(i)
            p = dot(a, base.witness) - fam.B[i]
            q = dot(a, drift) - fam.C[i]
            if q == 0:
                continue
            eps = -p / q
            if eps in found or not window.contains(eps):
                continue
            x = add(base.witness, scale(eps, drift))
            if all(dot(fam.A.row(k), x) >= fam.rhs(k, eps) for k in rows):
                found.add(eps)
    logger.debug(f"{len(found)} vertex crossing(s): {[format_rat(e) for e in sorted(found)]}")
    return sorted(found)


def essential_rows(fam: ParametricFamily, P: HPolyhedron) -> IndexSet:
    """K rows plus the rows outside K defining a facet that no K row defines."""
    keep = set(fam.K & fam.rows)
    implicit = implicit_rows(P)
    for f in facets(P):
        definers = f.active - implicit
        if not definers & fam.K:
            keep |= definers
    return frozenset(keep)


def essential_type(fam: ParametricFamily, eps: Fraction) -> CombinatorialType:
    P = fam.at(eps)
    return combinatorial_type(P).restricted(essential_rows(fam, P)).with_walls(fam.walls)


def brute_force_decomposition(fam: ParametricFamily, start: Fraction = Fraction(0)) -> ClassDecomposition:
    """Dense scan over all rows at once: no Ω^max bookkeeping, no row dropping."""
    interior = omega_intervals(fam, ()).omega1
    if not interior.contains(start):
        raise InputError(f"Invalid start {format_rat(start)}: polytope not full-dimensional there")
    hi = interior.hi
    window = EpsInterval.make(start, hi, True, True)
    cuts = vertex_crossings(fam, window)
    pieces = split_pieces(start, cuts, hi, include_start=True)
    if hi is not None:
        pieces.append((EpsInterval.point(hi), hi))
    typed = [(iv, s, essential_type(fam, s)) for iv, s in pieces]

    out = ClassDecomposition(eps_max=hi, terminal_case="subspace" if hi is not None else "unbounded")
    merged = merge_pieces(typed)
    for k, (interval, sample, ctype) in enumerate(merged):
        if hi is not None and k == len(merged) - 1 and interval.is_point:
            boundary = TERMINAL
        elif interval.is_point:
            boundary = SINGLETON
        elif interval.lo_open:
            boundary = OPEN
        elif k == 0:
            boundary = START
        else:
            boundary = ABSORBED
        out.classes.append(FamilyClass(interval, ctype, fam.rows, -1, sample, boundary, fam))
    logger.debug(f"Oracle decomposition: {out.labels()}")
    return out


def compare_decompositions(a: ClassDecomposition, b: ClassDecomposition) -> List[str]:
    """Interval-by-interval disagreements between two decompositions (empty when they agree)."""
    problems = []
    for k, (x, y) in enumerate(zip_longest(a.labels(), b.labels())):
        if x != y:
            problems.append(f"class {k}: {x} vs {y}")
    if a.eps_max != b.eps_max:
        left = "+inf" if a.eps_max is None else format_rat(a.eps_max)
        right = "+inf" if b.eps_max is None else format_rat(b.eps_max)
        problems.append(f"eps_max: {left} vs {right}")
    return problems
