import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from src.core.errors import InputError

logger = logging.getLogger(__name__)

Rat = Fraction
RatVec = Tuple[Fraction, ...]
RatLike = Union[int, Fraction, str]

_RAT_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rat(value: RatLike) -> Fraction:
    """Parse an int, Fraction or "p"/"p/q" string into a reduced Fraction."""
    if isinstance(value, bool):
        raise InputError(f"Invalid rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RAT_PATTERN.match(value)
        if not match:
            raise InputError(f"Invalid rational string: {value!r}")
        num = int(match.group(1))
        den = int(match.group(2)) if match.group(2) else 1
        if den == 0:
            raise InputError(f"Invalid rational string (zero denominator): {value!r}")
        return Fraction(num, den)
    raise InputError(f"Invalid rational: {value!r} (floats are not accepted)")


def format_rat(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vec(values: Iterable[RatLike]) -> RatVec:
    return tuple(parse_rat(v) for v in values)


def zeros(n: int) -> RatVec:
    return tuple(Fraction(0) for _ in range(n))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise InputError(f"Dimension mismatch in dot product: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> RatVec:
    if len(u) != len(v):
        raise InputError(f"Dimension mismatch in sum: {len(u)} vs {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> RatVec:
    if len(u) != len(v):
        raise InputError(f"Dimension mismatch in difference: {len(u)} vs {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def scale(c: Fraction, v: Sequence[Fraction]) -> RatVec:
    return tuple(c * a for a in v)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


@dataclass(frozen=True)
class RatMatrix:
    """Dense rational matrix with explicit shape; zero rows and zero-row matrices are allowed."""

    rows: Tuple[RatVec, ...]
    ncols: int

    def __post_init__(self) -> None:
        for i, row in enumerate(self.rows):
            if len(row) != self.ncols:
                raise InputError(
                    f"Invalid matrix: row {i} has {len(row)} entries, expected {self.ncols}"
                )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RatLike]], ncols: Optional[int] = None) -> "RatMatrix":
        parsed = tuple(vec(r) for r in rows)
        if ncols is None:
            if not parsed:
                raise InputError("Column count required for a matrix with no rows")
            ncols = len(parsed[0])
        return cls(rows=parsed, ncols=ncols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(
            rows=tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)),
            ncols=n,
        )

    @property
    def m(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> RatVec:
        return self.rows[i]

    def column(self, j: int) -> RatVec:
        return tuple(r[j] for r in self.rows)

    def select(self, indices: Iterable[int]) -> "RatMatrix":
        return RatMatrix(rows=tuple(self.rows[i] for i in indices), ncols=self.ncols)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            rows=tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols)),
            ncols=self.m,
        )

    def mul_vec(self, x: Sequence[Fraction]) -> RatVec:
        if len(x) != self.ncols:
            raise InputError(f"Dimension mismatch: matrix has {self.ncols} columns, vector {len(x)}")
        return tuple(dot(r, x) for r in self.rows)

    def matmul(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.m:
            raise InputError(f"Dimension mismatch: {self.m}x{self.ncols} times {other.m}x{other.ncols}")
        cols = [other.column(j) for j in range(other.ncols)]
        return RatMatrix(
            rows=tuple(tuple(dot(r, c) for c in cols) for r in self.rows),
            ncols=other.ncols,
        )

    def is_zero_row(self, i: int) -> bool:
        return is_zero(self.rows[i])


@dataclass(frozen=True)
class AffineSet:
    """Solution set witness + span(kernel_basis) of an exact linear system."""

    witness: RatVec
    kernel_basis: Tuple[RatVec, ...]

    @property
    def dim(self) -> int:
        return len(self.kernel_basis)

    def point(self, coeffs: Sequence[Fraction]) -> RatVec:
        if len(coeffs) != len(self.kernel_basis):
            raise InputError(f"Expected {len(self.kernel_basis)} coefficients, got {len(coeffs)}")
        p = self.witness
        for c, k in zip(coeffs, self.kernel_basis):
            p = add(p, scale(c, k))
        return p


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form; returns the nonzero rows and their pivot columns."""
    work = [[Fraction(a) for a in r] for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        p = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        piv = work[r][c]
        work[r] = [a / piv for a in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rank(A: RatMatrix) -> int:
    if A.m == 0:
        return 0
    _, pivots = rref(A.rows, A.ncols)
    return len(pivots)


def kernel_basis(A: RatMatrix) -> Tuple[RatVec, ...]:
    reduced, pivots = rref(A.rows, A.ncols)
    free = [j for j in range(A.ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(tuple(v))
    return tuple(basis)


def solve_affine(A: RatMatrix, b: Sequence[Fraction]) -> Optional[AffineSet]:
    """Solve A x = b exactly; None iff b is not in the image of A."""
    if len(b) != A.m:
        raise InputError(f"Dimension mismatch: matrix has {A.m} rows, right-hand side {len(b)}")
    augmented = [list(r) + [Fraction(bi)] for r, bi in zip(A.rows, b)]
    reduced, pivots = rref(augmented, A.ncols + 1)
    if pivots and pivots[-1] == A.ncols:
        return None
    witness = [Fraction(0)] * A.ncols
    for r, p in enumerate(pivots):
        witness[p] = reduced[r][A.ncols]
    return AffineSet(witness=tuple(witness), kernel_basis=kernel_basis(A))


def in_image(A: RatMatrix, b: Sequence[Fraction]) -> bool:
    return solve_affine(A, b) is not None


def inverse(A: RatMatrix) -> RatMatrix:
    if A.m != A.ncols:
        raise InputError(f"Cannot invert a {A.m}x{A.ncols} matrix")
    n = A.m
    augmented = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A.rows)]
    reduced, pivots = rref(augmented, 2 * n)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise InputError("Matrix is singular")
    return RatMatrix(rows=tuple(tuple(r[n:]) for r in reduced), ncols=n)


def primitive(v: Sequence[Fraction]) -> Tuple[int, ...]:
    """Primitive integer vector on the ray of a nonzero rational vector."""
    if is_zero(v):
        raise InputError("Zero vector has no primitive representative")
    den = 1
    for a in v:
        den = den * a.denominator // gcd(den, a.denominator)
    ints = [int(a * den) for a in v]
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    return tuple(a // g for a in ints)


def lattice_length(d: Sequence[Fraction]) -> Fraction:
    """The t >= 0 with d = t * primitive(d); zero for the zero vector."""
    if is_zero(d):
        return Fraction(0)
    p = primitive(d)
    k = next(i for i, a in enumerate(p) if a != 0)
    return Fraction(d[k]) / p[k]


def format_vec(v: Sequence[Fraction]) -> List[str]:
    return [format_rat(Fraction(a)) for a in v]
