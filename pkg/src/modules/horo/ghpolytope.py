import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.core.arith import RatVec, add, primitive
from src.core.errors import InvariantError
from src.modules.horo.fan import ColoredCone, ColoredFan
from src.modules.polytope.hpolyhedron import (
    FaceRecord,
    HPolyhedron,
    dimension,
    facet_row,
    facets,
    faces,
    implicit_rows,
    vertices,
)
from src.modules.roots.horo_space import HoroSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GHPolytope:
    """A moment polytope Q = v + Q~, kept as its pseudo-moment H-representation.

    color_rows pairs a row of the pseudo polytope with the color whose wall it encodes;
    the row reads <m, alpha^v_M> >= -<v, alpha^v>, so tightness means contact with the wall.
    """

    space: HoroSpace
    pseudo: HPolyhedron
    color_rows: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def standard(cls, space: HoroSpace, pseudo: HPolyhedron, m: int) -> "GHPolytope":
        """Rows 0..m-1 are G-stable divisors, then one row per color in S minus R order."""
        pairs = tuple((m + k, alpha) for k, alpha in enumerate(space.colors))
        return cls(space=space, pseudo=pseudo, color_rows=pairs)

    @property
    def n(self) -> int:
        return self.pseudo.n

    def wall_rows(self) -> Dict[int, int]:
        """color -> row, for the color rows in force."""
        live = set(self.pseudo.in_force)
        return {alpha: row for row, alpha in self.color_rows if row in live}

    def translation(self) -> RatVec:
        t = [Fraction(0)] * self.space.M_basis.ncols
        for row, alpha in self.color_rows:
            t[alpha] = -self.pseudo.b[row]
        return tuple(t)

    def moment_point(self, x: Sequence[Fraction]) -> RatVec:
        return add(self.translation(), self.space.to_weight(x))

    def moment_vertices(self) -> List[RatVec]:
        return sorted(self.moment_point(v.witness) for v in vertices(self.pseudo))

    def touched_walls(self) -> FrozenSet[int]:
        out = set()
        for v in vertices(self.pseudo):
            out |= self.colors_at(v)
        return frozenset(out)

    def contained_walls(self) -> FrozenSet[int]:
        implicit = implicit_rows(self.pseudo)
        return frozenset(alpha for alpha, row in self.wall_rows().items() if row in implicit)

    def colors_at(self, face: FaceRecord) -> FrozenSet[int]:
        return frozenset(alpha for alpha, row in self.wall_rows().items() if row in face.active)


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    reasons: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def gh_valid(Q: GHPolytope) -> ValidityReport:
    """Q is a G/H-polytope: of maximal dimension in M_Q and contained in no wall."""
    reasons = []
    d = dimension(Q.pseudo)
    if d < 0:
        reasons.append("polytope is empty")
    elif d != Q.space.n:
        reasons.append(f"dimension {d} differs from rank of M {Q.space.n}")
    if d >= 0:
        for alpha in sorted(Q.contained_walls()):
            reasons.append(f"polytope lies in the wall of {Q.space.name_of(alpha)}")
    return ValidityReport(valid=not reasons, reasons=tuple(reasons))


def _facet_normals(Q: GHPolytope) -> Dict[FrozenSet[int], Tuple[int, ...]]:
    return {f.active: primitive(Q.pseudo.A.row(facet_row(Q.pseudo, f))) for f in facets(Q.pseudo)}


def _face_signature(Q: GHPolytope) -> FrozenSet[Tuple[int, FrozenSet[Tuple[int, ...]], FrozenSet[int]]]:
    normals = _facet_normals(Q)
    out = set()
    for face in faces(Q.pseudo):
        around = frozenset(u for act, u in normals.items() if act <= face.active)
        out.add((face.dim, around, Q.colors_at(face)))
    return frozenset(out)


def gh_equivalent(Q: GHPolytope, other: GHPolytope) -> bool:
    """Same facet directions meeting in the same pattern, and the same wall contacts."""
    if not gh_valid(Q) or not gh_valid(other):
        return False
    if Q.space != other.space:
        return False
    return _face_signature(Q) == _face_signature(other)


def fan_from_polytope(Q: GHPolytope) -> ColoredFan:
    """One maximal colored cone per vertex: facet normals around it and the walls it touches."""
    report = gh_valid(Q)
    if not report:
        raise InvariantError(f"Invalid G/H-polytope: {'; '.join(report.reasons)}")
    normals = _facet_normals(Q)
    cones = set()
    for v in vertices(Q.pseudo):
        rays = sorted({u for act, u in normals.items() if act <= v.active})
        cones.add(ColoredCone(rays=tuple(rays), colors=Q.colors_at(v)))
    fan = ColoredFan(cones=frozenset(cones))
    logger.debug(f"Fan with {len(fan.cones)} maximal cones and colors {Q.space.color_names(fan.colors)}")
    return fan


def face_of(Q: GHPolytope, active: FrozenSet[int]) -> Optional[FaceRecord]:
    return next((f for f in faces(Q.pseudo) if f.active == active), None)
