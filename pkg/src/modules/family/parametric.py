import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from src.core.arith import (
    RatMatrix,
    RatVec,
    add,
    dot,
    format_rat,
    scale,
    solve_affine,
    vec,
    zeros,
)
from src.core.errors import ConsistencyError, InputError
from src.core.lattice import integer_kernel
from src.core.lp import LinearSystem, LPStatus, lp_extremize, strict_feasible
from src.modules.family.interval import EpsInterval
from src.modules.polytope.hpolyhedron import (
    CombinatorialType,
    HPolyhedron,
    combinatorial_type,
    implicit_rows,
    is_bounded,
)

logger = logging.getLogger(__name__)

IndexSet = FrozenSet[int]


@dataclass(frozen=True)
class AmbientMap:
    """x = base + (eps - origin) * drift + basis · y, from intrinsic y to the original coordinates."""

    base: RatVec
    drift: RatVec
    basis: RatMatrix
    origin: Fraction = Fraction(0)
    pinned: Optional[Fraction] = None

    def lift(self, eps: Fraction, y: Sequence[Fraction]) -> RatVec:
        return add(add(self.base, scale(eps - self.origin, self.drift)), self.basis.mul_vec(y))

    def then(self, inner: "AmbientMap") -> "AmbientMap":
        """Compose with a map from deeper intrinsic coordinates into this map's y."""
        shift = scale(inner.origin - self.origin, self.drift)
        return AmbientMap(
            base=add(add(self.base, shift), self.basis.mul_vec(inner.base)),
            drift=add(self.drift, self.basis.mul_vec(inner.drift)),
            basis=self.basis.matmul(inner.basis),
            origin=inner.origin,
            pinned=inner.pinned if inner.pinned is not None else self.pinned,
        )


@dataclass(frozen=True)
class ParametricFamily:
    """P^eps = {x : A_i x >= B_i + eps C_i, i in rows}; rows in K may fail to be facets."""

    A: RatMatrix
    B: RatVec
    C: RatVec
    rows: IndexSet
    K: IndexSet = frozenset()
    labels: Tuple[str, ...] = ()
    ambient: Optional[AmbientMap] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        m = self.A.m
        if len(self.B) != m or len(self.C) != m:
            raise InputError(f"Invalid family: A has {m} rows, B has {len(self.B)}, C has {len(self.C)}")
        for name, idx in (("rows", self.rows), ("K", self.K)):
            bad = [i for i in idx if i < 0 or i >= m]
            if bad:
                raise InputError(f"Invalid family: {name} indices {sorted(bad)} out of range 0..{m - 1}")
        missing = [i for i in self.zero_rows if i not in self.K]
        if missing:
            raise InputError(f"Invalid family: zero rows {sorted(missing)} must belong to K")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"r{i + 1}" for i in range(m)))
        elif len(self.labels) != m:
            raise InputError(f"Invalid family: {len(self.labels)} labels for {m} rows")

    @classmethod
    def build(
        cls,
        A: Iterable[Iterable],
        B: Iterable,
        C: Iterable,
        K: Iterable[int] = (),
        rows: Optional[Iterable[int]] = None,
        labels: Sequence[str] = (),
        ncols: Optional[int] = None,
        check_bounded: bool = True,
    ) -> "ParametricFamily":
        A_mat = RatMatrix.from_rows(A, ncols=ncols)
        row_set = frozenset(range(A_mat.m)) if rows is None else frozenset(rows)
        zero = frozenset(i for i in row_set if A_mat.is_zero_row(i))
        fam = cls(
            A=A_mat,
            B=vec(B),
            C=vec(C),
            rows=row_set,
            K=frozenset(K) | zero,
            labels=tuple(labels),
        )
        if check_bounded and not fam.is_bounded():
            raise InputError("Invalid family: some non-zero x satisfies A x >= 0")
        logger.debug(f"Built family with {A_mat.m} rows in dimension {A_mat.ncols}, K={sorted(fam.K)}")
        return fam

    @property
    def n(self) -> int:
        return self.A.ncols

    @property
    def m(self) -> int:
        return self.A.m

    @property
    def zero_rows(self) -> IndexSet:
        return frozenset(i for i in self.rows if self.A.is_zero_row(i))

    @property
    def walls(self) -> IndexSet:
        return (self.K & self.rows) - self.zero_rows

    @property
    def free_rows(self) -> IndexSet:
        """Rows that must stay facets: in force and outside K."""
        return self.rows - self.K

    def rhs(self, i: int, eps: Fraction) -> Fraction:
        return self.B[i] + eps * self.C[i]

    def at(self, eps: Fraction) -> HPolyhedron:
        b = tuple(self.B[i] + eps * self.C[i] for i in range(self.m))
        return HPolyhedron(A=self.A, b=b, rows=self.rows)

    def is_bounded(self) -> bool:
        return is_bounded(HPolyhedron(A=self.A, b=zeros(self.m), rows=self.rows))

    def with_rows(self, rows: Iterable[int]) -> "ParametricFamily":
        return replace(self, rows=frozenset(rows))

    def negated(self) -> "ParametricFamily":
        return replace(self, C=tuple(-c for c in self.C))

    def describe_rows(self, rows: Iterable[int]) -> List[str]:
        return [self.labels[i] for i in sorted(rows)]


@dataclass(frozen=True)
class OmegaPair:
    omega0: EpsInterval
    omega1: EpsInterval


def family_type(fam: ParametricFamily, eps: Fraction) -> CombinatorialType:
    return combinatorial_type(fam.at(eps)).with_walls(fam.walls)


def _check_subset(fam: ParametricFamily, I: Iterable[int]) -> IndexSet:
    I = frozenset(I)
    if not I <= fam.rows:
        raise InputError(f"Invalid index set {sorted(I)}: rows {sorted(I - fam.rows)} are not in force")
    return I


def strictly_feasible_at(fam: ParametricFamily, I: IndexSet, eps: Fraction) -> bool:
    eqs = [(fam.A.row(i), fam.rhs(i, eps)) for i in sorted(I)]
    stricts = [(fam.A.row(i), fam.rhs(i, eps)) for i in sorted(fam.rows - I)]
    return strict_feasible(fam.n, equalities=eqs, stricts=stricts) is not None


@lru_cache(maxsize=8192)
def _omega(fam: ParametricFamily, I: IndexSet) -> OmegaPair:
    n = fam.n
    lifted = LinearSystem(
        nvars=n + 1,
        equalities=tuple((fam.A.row(i) + (-fam.C[i],), fam.B[i]) for i in sorted(I)),
        inequalities=tuple((fam.A.row(i) + (-fam.C[i],), fam.B[i]) for i in sorted(fam.rows - I)),
    )
    objective = [Fraction(0)] * n + [Fraction(1)]
    top = lp_extremize(objective, lifted, maximize=True)
    if top.status == LPStatus.INFEASIBLE:
        return OmegaPair(EpsInterval.nothing(), EpsInterval.nothing())
    bottom = lp_extremize(objective, lifted, maximize=False)
    lo = bottom.optimum if bottom.is_optimal else None
    hi = top.optimum if top.is_optimal else None
    omega0 = EpsInterval.make(lo, hi, lo_open=lo is None, hi_open=hi is None)

    if omega0.is_point:
        omega1 = omega0 if strictly_feasible_at(fam, I, omega0.lo) else EpsInterval.nothing()
    else:
        inner = omega0.interior()
        omega1 = inner if strictly_feasible_at(fam, I, inner.sample()) else EpsInterval.nothing()
    logger.debug(f"Omega for {fam.describe_rows(I)}: omega0={omega0}, omega1={omega1}")
    return OmegaPair(omega0, omega1)


def omega_intervals(fam: ParametricFamily, I: Iterable[int]) -> OmegaPair:
    """Ω⁰_I (face F_I nonempty) and Ω¹_I (I is exactly the maximal active set of F_I)."""
    return _omega(fam, _check_subset(fam, I))


@lru_cache(maxsize=2048)
def _omega_max(fam: ParametricFamily) -> EpsInterval:
    window = _omega(fam, frozenset()).omega1
    for i in sorted(fam.free_rows):
        if window.empty:
            break
        window = window.intersect(_omega(fam, frozenset([i])).omega1)
    return window


def omega_max(fam: ParametricFamily) -> EpsInterval:
    """Parameters where P is full-dimensional and every row outside K is a facet."""
    return _omega_max(fam)


def unique_eps(fam: ParametricFamily, J: Sequence[int]) -> Optional[Fraction]:
    """The eps with B_J + eps C_J in Im(A_J) when there is exactly one, else None."""
    lifted = RatMatrix(
        rows=tuple(fam.A.row(j) + (-fam.C[j],) for j in J),
        ncols=fam.n + 1,
    )
    sol = solve_affine(lifted, [fam.B[j] for j in J])
    if sol is None:
        return None
    if any(k[-1] != 0 for k in sol.kernel_basis):
        return None
    return sol.witness[-1]


@lru_cache(maxsize=256)
def _all_candidates(fam: ParametricFamily, max_size: int) -> Tuple[Fraction, ...]:
    found = set()
    rows = sorted(fam.rows)
    for size in range(1, min(max_size, len(rows)) + 1):
        for J in combinations(rows, size):
            eps = unique_eps(fam, J)
            if eps is not None:
                found.add(eps)
    for i in rows:
        omega0 = _omega(fam, frozenset([i])).omega0
        for end in (omega0.lo, omega0.hi):
            if end is not None:
                found.add(end)
    omega0 = _omega(fam, frozenset()).omega0
    for end in (omega0.lo, omega0.hi):
        if end is not None:
            found.add(end)
    return tuple(sorted(found))


def candidate_breakpoints(
    fam: ParametricFamily,
    window: Optional[EpsInterval] = None,
    max_size: Optional[int] = None,
) -> List[Fraction]:
    """Every eps where some face system changes solvability, restricted to `window`."""
    size = fam.n + 1 if max_size is None else max_size
    out = [c for c in _all_candidates(fam, size) if window is None or window.contains(c)]
    logger.debug(f"{len(out)} candidate breakpoints: {[format_rat(c) for c in out]}")
    return out


def restrict_to_subspace(fam: ParametricFamily, J: Iterable[int], eps: Fraction) -> ParametricFamily:
    """Re-express the family on the affine subspace where the rows of J are tight at eps.

    The subspace moves with eps when C_J lies in Im(A_J); otherwise the result is pinned at eps.
    """
    J = sorted(_check_subset(fam, J))
    A_J = fam.A.select(J)
    base_sol = solve_affine(A_J, [fam.rhs(j, eps) for j in J])
    if base_sol is None:
        raise InputError(f"Invalid restriction: rows {fam.describe_rows(J)} are not simultaneously tight at {eps}")
    drift_sol = solve_affine(A_J, [fam.C[j] for j in J])
    drift = drift_sol.witness if drift_sol is not None else zeros(fam.n)
    kernel = integer_kernel(A_J)
    basis = RatMatrix.from_rows(
        [[k[i] for k in kernel] for i in range(fam.n)], ncols=len(kernel)
    )
    base = base_sol.witness
    A_new = fam.A.matmul(basis)
    C_new = tuple(fam.C[i] - dot(fam.A.row(i), drift) for i in range(fam.m))
    B_new = tuple(
        fam.rhs(i, eps) - dot(fam.A.row(i), base) - eps * C_new[i] for i in range(fam.m)
    )
    step = AmbientMap(
        base=base,
        drift=drift,
        basis=basis,
        origin=eps,
        pinned=None if drift_sol is not None else eps,
    )
    ambient = step if fam.ambient is None else fam.ambient.then(step)
    rows = fam.rows - frozenset(J)
    zero = frozenset(i for i in rows if A_new.is_zero_row(i))
    logger.debug(
        f"Restricted to subspace of dimension {len(kernel)} at eps={format_rat(eps)}, "
        f"dropping {fam.describe_rows(J)}"
    )
    return ParametricFamily(
        A=A_new,
        B=B_new,
        C=C_new,
        rows=rows,
        K=(fam.K & rows) | zero,
        labels=fam.labels,
        ambient=ambient,
    )


def full_dimensional_family(fam: ParametricFamily) -> ParametricFamily:
    """Move a family whose polytopes all lie in a proper affine subspace into intrinsic coordinates."""
    pair = _omega(fam, frozenset())
    if not pair.omega1.empty or pair.omega0.empty:
        return fam
    eps = pair.omega0.sample()
    J = implicit_rows(fam.at(eps))
    return restrict_to_subspace(fam, J, eps)


@dataclass(frozen=True)
class ExtensionResult:
    case: str  # "full_dim" | "subspace"
    epsilon: Fraction
    dropped: IndexSet
    family: ParametricFamily


def extend_family(fam: ParametricFamily, eps1: Fraction) -> ExtensionResult:
    window = omega_max(fam)
    if window.empty or window.hi is None or window.hi != eps1:
        raise InputError(f"Invalid extension point {format_rat(eps1)}: Ω^max is {window}")

    if _omega(fam, frozenset()).omega1.contains(eps1):
        dropped = frozenset(
            i for i in fam.free_rows if not _omega(fam, frozenset([i])).omega1.contains(eps1)
        )
        extended = fam.with_rows(fam.rows - dropped)
        if not omega_max(extended).contains(eps1):
            raise ConsistencyError(
                f"Extension at {format_rat(eps1)} dropping {fam.describe_rows(dropped)} "
                f"does not contain {format_rat(eps1)} in its Ω^max {omega_max(extended)}"
            )
        logger.info(f"Family extended at eps={format_rat(eps1)}, dropping {fam.describe_rows(dropped)}")
        return ExtensionResult(case="full_dim", epsilon=eps1, dropped=dropped, family=extended)

    tight = implicit_rows(fam.at(eps1))
    restricted = restrict_to_subspace(fam, tight, eps1)
    logger.info(
        f"Polytope drops dimension at eps={format_rat(eps1)}; "
        f"rows tight everywhere: {fam.describe_rows(tight)}"
    )
    return ExtensionResult(case="subspace", epsilon=eps1, dropped=tight, family=restricted)
