import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

from src.core.arith import RatMatrix, RatVec, add, format_vec, in_image, rank, sub
from src.core.errors import InvariantError
from src.modules.family.parametric import ParametricFamily
from src.modules.horo.embedding import PolarizedEmbedding, anticanonical_column
from src.modules.horo.ghpolytope import GHPolytope
from src.modules.horo.singularity import is_q_gorenstein

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MomentSide:
    """The family written directly on moment points: {A y >= B + eps C}, y in M coordinates."""

    B: RatVec
    C: RatVec
    v0: RatVec
    vK: RatVec


@dataclass(frozen=True)
class MMPFamily:
    """(A, B~, C~) of an embedding: Q~^eps = {A x >= B~ + eps C~} with K the color rows."""

    embedding: PolarizedEmbedding = field(compare=False)
    family: ParametricFamily
    anticanonical: RatVec
    moment: Optional[MomentSide] = None

    @property
    def m(self) -> int:
        return self.embedding.m

    def v_eps(self, eps: Fraction) -> RatVec:
        """Sum (a_alpha - eps c_alpha) w_alpha in fundamental-weight coordinates."""
        space = self.embedding.space
        t = [Fraction(0)] * space.M_basis.ncols
        for alpha in space.colors:
            t[alpha] = self.embedding.divisor.colors[alpha] - eps * space.c[alpha]
        return tuple(t)

    def polytope(self, fam: ParametricFamily, eps: Fraction) -> GHPolytope:
        return GHPolytope.standard(self.embedding.space, fam.at(eps), self.m)


def build_family(emb: PolarizedEmbedding) -> MMPFamily:
    space = emb.space
    A = emb.row_system()
    C_tilde = anticanonical_column(space, emb.m)
    check = is_q_gorenstein(emb.polytope.pseudo, C_tilde)
    if not check:
        point = emb.polytope.moment_point(check.failing.witness)
        raise InvariantError(
            f"Not Q-Gorenstein: anticanonical system unsolvable at vertex {format_vec(point)} "
            f"(rows {[emb.labels[i] for i in sorted(check.failing.active)]})"
        )
    B_tilde = tuple(-a for a in emb.divisor.coefficients(space))
    colors = range(emb.m, emb.m + len(space.colors))
    fam = ParametricFamily.build(
        A=A.rows,
        B=B_tilde,
        C=C_tilde,
        K=colors,
        labels=emb.labels,
        ncols=space.n,
    )

    v0 = emb.polytope.translation()
    vK = [Fraction(0)] * space.M_basis.ncols
    for alpha in space.colors:
        vK[alpha] = space.c[alpha]
    moment = None
    v0_m = space.from_weight(v0)
    vK_m = space.from_weight(tuple(vK))
    if v0_m is not None and vK_m is not None:
        moment = MomentSide(
            B=add(B_tilde, A.mul_vec(v0_m)),
            C=sub(C_tilde, A.mul_vec(vK_m)),
            v0=v0_m,
            vK=vK_m,
        )
    logger.info(
        f"Family built: {A.m} rows ({emb.m} G-stable, {len(space.colors)} colors) in rank {space.n}"
    )
    return MMPFamily(embedding=emb, family=fam, anticanonical=C_tilde, moment=moment)


@dataclass(frozen=True)
class Genericity:
    q_factorial_generic: bool
    fiber_generic: bool
    q_factorial_witnesses: Tuple[Tuple[int, ...], ...] = ()
    fiber_witnesses: Tuple[Tuple[int, ...], ...] = ()


def is_general_divisor(fam: ParametricFamily) -> Genericity:
    """Scan row subsets for the two genericity conditions on B~.

    Q-factorial: no J with |J| > n and B~_J in Im A_J (subsets of size n+1 suffice).
    Fiber: no J with |J| >= rank A_J + 2 and B~_J in Im A_J + Q C~_J (sizes up to n+2 suffice).
    """
    n = fam.n
    rows = sorted(fam.rows)
    q_bad: List[Tuple[int, ...]] = []
    for J in combinations(rows, n + 1):
        if in_image(fam.A.select(J), [fam.B[j] for j in J]):
            q_bad.append(J)
    f_bad: List[Tuple[int, ...]] = []
    for size in range(2, n + 3):
        for J in combinations(rows, size):
            A_J = fam.A.select(J)
            if size < rank(A_J) + 2:
                continue
            lifted = RatMatrix(rows=tuple(A_J.row(k) + (fam.C[j],) for k, j in enumerate(J)), ncols=n + 1)
            if in_image(lifted, [fam.B[j] for j in J]):
                f_bad.append(J)
    logger.debug(f"Genericity witnesses: q-factorial {q_bad}, fiber {f_bad}")
    return Genericity(
        q_factorial_generic=not q_bad,
        fiber_generic=not f_bad,
        q_factorial_witnesses=tuple(q_bad),
        fiber_witnesses=tuple(f_bad),
    )
