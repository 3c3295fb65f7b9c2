import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from src.core.arith import in_image
from src.modules.horo.ghpolytope import GHPolytope, gh_valid
from src.modules.polytope.hpolyhedron import FaceRecord, HPolyhedron, faces, facets, is_simple, vertices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QGorensteinCheck:
    ok: bool
    failing: Optional[FaceRecord] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class QFactorialCheck:
    ok: bool
    picard: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_q_gorenstein(pseudo: HPolyhedron, anticanonical: Sequence[Fraction]) -> QGorensteinCheck:
    """K_X is Q-Cartier iff A_{I_v} y = C~_{I_v} is solvable at every vertex v."""
    for v in vertices(pseudo):
        rows = sorted(v.active)
        if not in_image(pseudo.A.select(rows), [anticanonical[i] for i in rows]):
            logger.debug(f"Not Q-Gorenstein at vertex {[str(a) for a in v.witness]}, rows {rows}")
            return QGorensteinCheck(ok=False, failing=v)
    return QGorensteinCheck(ok=True)


def picard_number(Q: GHPolytope) -> int:
    """(G-stable divisors) + (colors) - rank M; G-stable divisors are the facets off the walls."""
    wall = set(Q.wall_rows().values())
    fs = facets(Q.pseudo)
    on_walls = sum(1 for f in fs if f.active & wall)
    return (len(fs) - on_walls) + len(Q.space.colors) - Q.n


def is_q_factorial(Q: GHPolytope) -> QFactorialCheck:
    """Simple, meets each wall along a single facet, and no facet lies in two walls."""
    report = gh_valid(Q)
    if not report:
        return QFactorialCheck(ok=False, reason="; ".join(report.reasons))
    if not is_simple(Q.pseudo):
        return QFactorialCheck(ok=False, reason="polytope is not simple")
    walls = Q.wall_rows()
    fs = faces(Q.pseudo)
    for alpha in sorted(Q.touched_walls()):
        contact = max(f.dim for f in fs if walls[alpha] in f.active)
        if contact != Q.n - 1:
            return QFactorialCheck(
                ok=False,
                reason=f"wall of {Q.space.name_of(alpha)} meets the polytope in dimension {contact}",
            )
    for f in facets(Q.pseudo):
        inside = [alpha for alpha, row in walls.items() if row in f.active]
        if len(inside) > 1:
            return QFactorialCheck(
                ok=False, reason=f"a facet lies in the walls of {Q.space.color_names(inside)}"
            )
    return QFactorialCheck(ok=True, picard=picard_number(Q))

