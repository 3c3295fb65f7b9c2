import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from src.core.arith import RatMatrix, RatVec, dot, rank, solve_affine
from src.core.errors import InputError, InvariantError
from src.modules.roots.root_system import RootSystemData, resolve_root_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HoroSpace:
    """Combinatorial data of G/H: root datum, the simple roots R of P and a basis of M.

    M_basis rows are in fundamental-weight coordinates; for a torus they live in a
    standard lattice and there are no walls.
    """

    roots: RootSystemData
    R: FrozenSet[int]
    M_basis: RatMatrix
    c: Dict[int, Fraction] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.roots.is_torus:
            if self.R:
                raise InvariantError("Invalid space: a torus has no simple roots to put in R")
            if self.M_basis.m > self.M_basis.ncols:
                raise InvariantError(
                    f"Invalid space: {self.M_basis.m} basis vectors in a {self.M_basis.ncols}-dimensional character lattice"
                )
        elif self.M_basis.ncols != self.roots.rank:
            raise InvariantError(
                f"Invalid space: M basis vectors have {self.M_basis.ncols} weight coordinates, "
                f"root system has rank {self.roots.rank}"
            )
        for alpha in self.R:
            if any(row[alpha] != 0 for row in self.M_basis.rows):
                raise InvariantError(
                    f"Invalid space: M is not in X(P), basis pairs non-trivially with coroot of {self.name_of(alpha)}"
                )
        if rank(self.M_basis) != self.M_basis.m:
            raise InvariantError("Invalid space: M basis vectors are linearly dependent")
        if not self.c:
            object.__setattr__(self, "c", self.roots.rho_pairings(self.R))

    @classmethod
    def build(
        cls,
        kind: str,
        rank_: int,
        R: Iterable[str] = (),
        M_basis: Sequence[Sequence] = (),
    ) -> "HoroSpace":
        system = RootSystemData.build(kind, rank_)
        r_idx = frozenset(resolve_root_name(a, system.rank) for a in R)
        basis = RatMatrix.from_rows(M_basis, ncols=len(M_basis[0]) if M_basis else system.rank)
        space = cls(roots=system, R=r_idx, M_basis=basis)
        logger.debug(f"Space {system.name}, R={sorted(r_idx)}, rank M = {space.n}")
        return space

    @property
    def n(self) -> int:
        return self.M_basis.m

    @property
    def colors(self) -> Tuple[int, ...]:
        """S minus R, in Bourbaki order."""
        return tuple(a for a in range(self.roots.rank) if a not in self.R)

    def name_of(self, alpha: int) -> str:
        return f"a{alpha + 1}"

    def color_names(self, colors: Optional[Iterable[int]] = None) -> List[str]:
        return [self.name_of(a) for a in sorted(self.colors if colors is None else colors)]

    def coroot_restriction(self, alpha: int) -> RatVec:
        if alpha in self.R or alpha < 0 or alpha >= self.roots.rank:
            raise InputError(f"Invalid color {self.name_of(alpha)}: coroot restriction needs a root outside R")
        return tuple(row[alpha] for row in self.M_basis.rows)

    def to_weight(self, m: Sequence[Fraction]) -> RatVec:
        """Coordinates of m in M_Q (given in the M basis) in the fundamental-weight basis."""
        if len(m) != self.n:
            raise InputError(f"Dimension mismatch: point has {len(m)} coordinates, M has rank {self.n}")
        return self.M_basis.transpose().mul_vec(m)

    def from_weight(self, w: Sequence[Fraction]) -> Optional[RatVec]:
        """The point of M_Q with weight coordinates w, or None when w is outside M_Q."""
        sol = solve_affine(self.M_basis.transpose(), list(w))
        return None if sol is None else sol.witness

    def pairing(self, m: Sequence[Fraction], alpha: int) -> Fraction:
        """<m, alpha^v> for m in M_Q."""
        return dot(m, self.coroot_restriction(alpha))


def coroot_restriction(space: HoroSpace, alpha: int) -> RatVec:
    return space.coroot_restriction(alpha)
