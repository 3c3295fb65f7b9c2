import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from src.core.arith import RatVec, lattice_length, sub
from src.modules.horo.ghpolytope import GHPolytope
from src.modules.polytope.hpolyhedron import IndexSet, edges, vertices

logger = logging.getLogger(__name__)

EDGE = "edge"
SCHUBERT = "schubert"


@dataclass(frozen=True)
class Curve:
    """A B-stable curve: C_mu for an edge of Q, or C_{alpha,v} for a vertex off the wall of alpha.

    anchors keeps the active rows of the vertices involved so the curve can be followed
    as the polytope moves.
    """

    kind: str
    points: Tuple[RatVec, ...]
    anchors: Tuple[IndexSet, ...]
    color: Optional[int] = None

    def describe(self, Q: GHPolytope) -> str:
        pts = [[str(a) for a in Q.moment_point(p)] for p in self.points]
        if self.kind == EDGE:
            return f"C_mu edge {pts[0]}--{pts[1]}"
        return f"C_{Q.space.name_of(self.color)},v at {pts[0]}"


@dataclass(frozen=True)
class CurveIntersection:
    curve: Curve
    degree: Fraction
    label: str = field(default="", compare=False)


def curves_with_intersections(Q: GHPolytope) -> List[CurveIntersection]:
    """Every C_mu with D.C the integral length of mu, and every C_{alpha,v} with D.C = <v, alpha^v>."""
    out: List[CurveIntersection] = []
    active = {v.witness: v.active for v in vertices(Q.pseudo)}
    for e in edges(Q.pseudo):
        p, q = e.vertices
        curve = Curve(kind=EDGE, points=(p, q), anchors=(active[p], active[q]))
        out.append(CurveIntersection(curve, lattice_length(sub(q, p)), curve.describe(Q)))
    walls = Q.wall_rows()
    for v in vertices(Q.pseudo):
        for alpha in Q.space.colors:
            row = walls.get(alpha)
            if row is None:
                continue
            pairing = Q.pseudo.slack(row, v.witness)
            if pairing > 0:
                curve = Curve(kind=SCHUBERT, points=(v.witness,), anchors=(v.active,), color=alpha)
                out.append(CurveIntersection(curve, pairing, curve.describe(Q)))
    logger.debug(f"{len(out)} B-stable curves")
    return out
