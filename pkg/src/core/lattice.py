import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import List, Sequence, Tuple

from src.core.arith import RatMatrix, RatVec, inverse, primitive

logger = logging.getLogger(__name__)

IntVec = Tuple[int, ...]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    # invariants: x * a + y * b == g and next_x * a + next_y * b == next_g
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def integer_rows(A: RatMatrix) -> List[List[int]]:
    """Scale every row to a primitive integer row (zero rows stay zero)."""
    out = []
    for r in A.rows:
        if all(a == 0 for a in r):
            out.append([0] * A.ncols)
        else:
            out.append(list(primitive(r)))
    return out


def column_hermite(A: RatMatrix) -> Tuple[List[List[int]], List[List[int]], int]:
    """Unimodular column reduction: returns (H, U, r) with A·U = H and columns r.. of H zero."""
    n = A.ncols
    H = integer_rows(A)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def combine(a: int, b: int, s: int, t: int, u: int, v: int) -> None:
        # (col_a, col_b) <- (s col_a + t col_b, u col_a + v col_b)
        for M in (H, U):
            for row in M:
                ca, cb = row[a], row[b]
                row[a] = s * ca + t * cb
                row[b] = u * ca + v * cb

    k = 0
    for i in range(len(H)):
        if k == n:
            break
        for j in range(k + 1, n):
            x, y = H[i][k], H[i][j]
            if y == 0:
                continue
            s, t, g = xgcd(x, y)
            combine(k, j, s, t, -y // g, x // g)
        if H[i][k] < 0:
            for M in (H, U):
                for row in M:
                    row[k] = -row[k]
        if H[i][k] != 0:
            k += 1
    return H, U, k


def hermite_rows(vectors: Sequence[Sequence[int]], n: int) -> List[IntVec]:
    """Row Hermite normal form of the lattice spanned by integer vectors."""
    rows = [list(v) for v in vectors if any(v)]
    out: List[List[int]] = []
    for c in range(n):
        live = [r for r in rows if r[c] != 0]
        if not live:
            continue
        rows = [r for r in rows if r[c] == 0]
        pivot = live[0]
        for other in live[1:]:
            s, t, g = xgcd(pivot[c], other[c])
            a, b = pivot[c] // g, other[c] // g
            pivot, reduced = (
                [s * p + t * o for p, o in zip(pivot, other)],
                [a * o - b * p for p, o in zip(pivot, other)],
            )
            if any(reduced):
                rows.append(reduced)
        if pivot[c] < 0:
            pivot = [-p for p in pivot]
        out.append(pivot)
    for i, row in enumerate(out):
        c = next(j for j, a in enumerate(row) if a != 0)
        for prev in range(i):
            q = out[prev][c] // row[c]
            if q:
                out[prev] = [p - q * r for p, r in zip(out[prev], row)]
    return [tuple(r) for r in out]


def integer_kernel(A: RatMatrix) -> List[IntVec]:
    """Basis of ker(A) ∩ ℤⁿ in row Hermite form."""
    _, U, r = column_hermite(A)
    n = A.ncols
    kernel = [[U[i][j] for i in range(n)] for j in range(r, n)]
    return hermite_rows(kernel, n)


def _det(rows: List[List[Fraction]]) -> Fraction:
    work = [list(r) for r in rows]
    n = len(work)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if work[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            work[c], work[p] = work[p], work[c]
            det = -det
        det *= work[c][c]
        for i in range(c + 1, n):
            f = work[i][c] / work[c][c]
            work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    return det


@dataclass(frozen=True)
class QuotientMap:
    """Surjection ℤⁿ → ℤʳ with a prescribed saturated kernel, plus a section."""

    projection: RatMatrix  # r x n
    section: RatMatrix  # n x r, projection · section = identity
    kernel: Tuple[IntVec, ...]

    @property
    def rank(self) -> int:
        return self.projection.m


def quotient_projection(A: RatMatrix) -> QuotientMap:
    """Quotient of ℤⁿ by ker(A) ∩ ℤⁿ, in coordinates of a coordinate complement when one exists."""
    n = A.ncols
    kernel = integer_kernel(A)
    k = len(kernel)
    r = n - k
    for pivots in combinations(range(n), k):
        minor = [[Fraction(kernel[i][j]) for j in pivots] for i in range(k)]
        if k and abs(_det(minor)) != 1:
            continue
        others = [j for j in range(n) if j not in pivots]
        # x = sum c_i k_i + s with s supported on `others`: c = (K_T^T)^-1 x_T, s = x_S - K_S^T c
        if k:
            kt_inv = inverse(RatMatrix.from_rows(
                [[kernel[i][t] for i in range(k)] for t in pivots], ncols=k
            ))
        rows = []
        for s_idx in others:
            row = [Fraction(int(j == s_idx)) for j in range(n)]
            if k:
                ks = [Fraction(kernel[i][s_idx]) for i in range(k)]
                # coefficient on x_t is -(ks · column t' of kt_inv)
                for t_pos, t in enumerate(pivots):
                    row[t] -= sum((ks[i] * kt_inv.rows[i][t_pos] for i in range(k)), Fraction(0))
            rows.append(tuple(row))
        section = RatMatrix.from_rows(
            [[int(j == s_idx) for s_idx in others] for j in range(n)], ncols=r
        )
        logger.debug(f"Quotient by rank-{k} kernel uses coordinates {others}")
        return QuotientMap(
            projection=RatMatrix(rows=tuple(rows), ncols=n),
            section=section,
            kernel=tuple(kernel),
        )

    _, U, rk = column_hermite(A)
    U_mat = RatMatrix.from_rows(U, ncols=n)
    U_inv = inverse(U_mat)
    projection = RatMatrix(rows=U_inv.rows[:rk], ncols=n)
    section = RatMatrix.from_rows([[U[i][j] for j in range(rk)] for i in range(n)], ncols=rk)
    logger.debug(f"Quotient by rank-{k} kernel uses a unimodular completion")
    return QuotientMap(projection=projection, section=section, kernel=tuple(kernel))


def primitive_or_zero(v: RatVec) -> IntVec:
    if all(a == 0 for a in v):
        return tuple(0 for _ in v)
    return primitive(v)


def content(v: Sequence[int]) -> int:
    g = 0
    for a in v:
        g = gcd(g, abs(a))
    return g
