import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Optional, Tuple

from src.core.arith import RatMatrix, RatVec, format_rat, primitive
from src.core.errors import ConsistencyError
from src.core.lattice import IntVec, QuotientMap, integer_kernel, quotient_projection
from src.modules.family.parametric import IndexSet, ParametricFamily, restrict_to_subspace
from src.modules.horo.fan import weights_of_simplex_fan
from src.modules.horo.ghpolytope import GHPolytope
from src.modules.mmp.family import MMPFamily
from src.modules.polytope.hpolyhedron import (
    HPolyhedron,
    dimension,
    facet_row,
    facets,
    implicit_rows,
    is_simple,
)
from src.modules.roots.horo_space import HoroSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiberData:
    """General fiber of the Mori fibration, in the quotient M^2 = M / M^1.

    rows are the original row indices kept by the fiber (the rows tight along the
    terminal polytope); walls holds the colors whose wall the fiber polytope meets.
    """

    quotient: QuotientMap
    rows: Tuple[int, ...]
    polytope: HPolyhedron
    walls: FrozenSet[int]
    dimension: int
    is_simplex: bool
    walls_are_facets: bool
    picard: Optional[int] = None
    weights: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class TerminalData:
    epsilon: Fraction
    tight_rows: IndexSet
    M1_basis: Tuple[IntVec, ...]
    R1: FrozenSet[int]
    moment_vertices: Tuple[RatVec, ...]
    fiber: FiberData
    base: Optional[GHPolytope] = None
    base_lattice: Optional[RatMatrix] = None

    @property
    def base_dimension(self) -> int:
        return len(self.M1_basis)


def _lattice_columns(kernel: Tuple[IntVec, ...], n: int) -> RatMatrix:
    return RatMatrix.from_rows([[k[i] for k in kernel] for i in range(n)], ncols=len(kernel))


def _base_polytope(
    mmp: MMPFamily,
    fam: ParametricFamily,
    I: IndexSet,
    eps: Fraction,
    kernel: Tuple[IntVec, ...],
    R1: FrozenSet[int],
) -> GHPolytope:
    space = mmp.embedding.space
    basis = RatMatrix.from_rows([space.to_weight(k) for k in kernel], ncols=space.M_basis.ncols)
    base_space = HoroSpace(roots=space.roots, R=R1, M_basis=basis)
    restricted = restrict_to_subspace(fam, I, eps)
    pairs = tuple(
        (mmp.m + k, alpha) for k, alpha in enumerate(space.colors) if alpha not in R1
    )
    return GHPolytope(space=base_space, pseudo=restricted.at(eps), color_rows=pairs)


def _fiber(fam: ParametricFamily, I: Tuple[int, ...], wall_rows: dict) -> FiberData:
    """Q~^2 = {A^2 z >= B~_I} with A^2 = A_I composed with a section of M -> M^2."""
    A_I = fam.A.select(I)
    q = quotient_projection(A_I)
    A2 = A_I.matmul(q.section)
    P2 = HPolyhedron(A=A2, b=tuple(fam.B[i] for i in I))
    d = dimension(P2)
    fs = sorted(facets(P2), key=lambda f: facet_row(P2, f))

    # local index in I -> color
    local_walls = {k: wall_rows[i] for k, i in enumerate(I) if i in wall_rows}
    walls = frozenset(local_walls.values())
    walls_are_facets = all(any(k in f.active for f in fs) for k in local_walls)
    full = d == q.rank
    simplex = full and len(fs) == d + 1

    picard = None
    if full and walls_are_facets and is_simple(P2):
        on_walls = sum(1 for f in fs if any(k in f.active for k in local_walls))
        picard = (len(fs) - on_walls) + len(walls) - d
    weights = None
    if simplex and d > 0:
        weights = weights_of_simplex_fan([primitive(A2.row(facet_row(P2, f))) for f in fs])
    return FiberData(
        quotient=q,
        rows=I,
        polytope=P2,
        walls=walls,
        dimension=d,
        is_simplex=simplex,
        walls_are_facets=walls_are_facets,
        picard=picard,
        weights=weights,
    )


def terminal_data(
    mmp: MMPFamily,
    fam: ParametricFamily,
    eps_max: Fraction,
    expect_simplex: bool = False,
) -> TerminalData:
    """Base and general fiber of the Mori fibration read off the polytope at eps_max.

    fam is the family in force at eps_max, in the coordinates of the embedding.
    With expect_simplex the tight rows must number one more than the fiber dimension.
    """
    space = mmp.embedding.space
    P = fam.at(eps_max)
    I = frozenset(implicit_rows(P))
    rows = tuple(sorted(I))
    kernel = tuple(integer_kernel(fam.A.select(rows)))

    wall_rows = {mmp.m + k: alpha for k, alpha in enumerate(space.colors)}
    R1 = space.R | frozenset(wall_rows[i] for i in rows if i in wall_rows)

    moment = GHPolytope.standard(space, P, mmp.m).moment_vertices()
    fiber = _fiber(fam, rows, wall_rows)

    base = None
    lattice = None
    if kernel:
        base = _base_polytope(mmp, fam, I, eps_max, kernel, R1)
        lattice = _lattice_columns(kernel, space.n)

    if expect_simplex and len(rows) != fiber.dimension + 1:
        raise ConsistencyError(
            f"Fiber at eps={format_rat(eps_max)} has dimension {fiber.dimension} "
            f"but {len(rows)} tight rows {fam.describe_rows(rows)}"
        )
    logger.info(
        f"Terminal polytope at eps={format_rat(eps_max)}: base rank {len(kernel)}, "
        f"fiber dimension {fiber.dimension}, new colors {space.color_names(R1 - space.R)}"
    )
    return TerminalData(
        epsilon=eps_max,
        tight_rows=I,
        M1_basis=kernel,
        R1=R1,
        moment_vertices=tuple(moment),
        fiber=fiber,
        base=base,
        base_lattice=lattice,
    )
