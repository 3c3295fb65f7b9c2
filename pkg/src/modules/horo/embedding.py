import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.arith import RatMatrix, RatVec, dot, is_zero, primitive, sub, vec
from src.core.errors import AmplenessError, InputError
from src.modules.horo.fan import ColoredFan
from src.modules.horo.ghpolytope import GHPolytope, fan_from_polytope
from src.modules.polytope.hpolyhedron import HPolyhedron, dimension, vertices
from src.modules.roots.horo_space import HoroSpace

logger = logging.getLogger(__name__)

IntVec = Tuple[int, ...]


@dataclass(frozen=True)
class BDivisor:
    """D = sum a_i X_i + sum a_alpha D_alpha."""

    g_stable: RatVec
    colors: Dict[int, Fraction] = field(default_factory=dict)

    def coefficients(self, space: HoroSpace) -> RatVec:
        """(a_1..a_m, a_alpha in S minus R order)."""
        return self.g_stable + tuple(self.colors[a] for a in space.colors)


def row_labels(space: HoroSpace, m: int) -> Tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(m)) + tuple(space.color_names())


def row_system(space: HoroSpace, rays: Sequence[Sequence[int]]) -> RatMatrix:
    """The rays x_i, then the restricted coroots of the colors."""
    rows = [vec(x) for x in rays] + [space.coroot_restriction(a) for a in space.colors]
    return RatMatrix(rows=tuple(rows), ncols=space.n)


def anticanonical_column(space: HoroSpace, m: int) -> RatVec:
    """-K_X = sum X_i + sum c_alpha D_alpha."""
    return tuple(Fraction(1) for _ in range(m)) + tuple(space.c[a] for a in space.colors)


def moment_polytopes(
    space: HoroSpace,
    rays: Sequence[Sequence[int]],
    divisor: BDivisor,
) -> Tuple[GHPolytope, HPolyhedron, RatVec]:
    """(Q, Q~, v0): Q~ = {<m, x_i> >= -a_i, <m, alpha^v_M> >= -a_alpha} and Q = v0 + Q~."""
    if len(divisor.g_stable) != len(rays):
        raise InputError(
            f"Invalid divisor: {len(divisor.g_stable)} G-stable coefficients for {len(rays)} rays"
        )
    missing = set(space.colors) - set(divisor.colors)
    extra = set(divisor.colors) - set(space.colors)
    if missing or extra:
        raise InputError(
            f"Invalid divisor: colors missing {space.color_names(missing)}, unexpected {space.color_names(extra)}"
        )
    A = row_system(space, rays)
    b = tuple(-a for a in divisor.coefficients(space))
    pseudo = HPolyhedron(A=A, b=b)
    Q = GHPolytope.standard(space, pseudo, len(rays))
    d = dimension(pseudo)
    if d != space.n:
        raise AmplenessError(
            f"Divisor not ample: pseudo-moment polytope has dimension {d}, expected {space.n}"
        )
    return Q, pseudo, Q.translation()


def divisor_from_polytopes(
    space: HoroSpace,
    moment: Sequence[Sequence[Fraction]],
    pseudo: HPolyhedron,
    m: int,
) -> BDivisor:
    """Coefficients of the B-divisor whose moment polytope is `moment` = t + `pseudo`."""
    pseudo_pts = [v.witness for v in vertices(pseudo)]
    if not pseudo_pts:
        raise InputError("Invalid polytopes: pseudo-moment polytope is empty")
    shifted = sorted(space.to_weight(x) for x in pseudo_pts)
    target = sorted(vec(p) for p in moment)
    if len(shifted) != len(target):
        raise InputError(f"Invalid polytopes: {len(target)} moment vertices, {len(shifted)} pseudo vertices")
    t = sub(target[0], shifted[0])
    if any(sub(p, q) != t for p, q in zip(target, shifted)):
        raise InputError("Invalid polytopes: moment polytope is not a translate of the pseudo-moment polytope")
    stray = [a for a in range(len(t)) if t[a] != 0 and a not in space.colors]
    if stray:
        raise InputError(f"Invalid polytopes: translation has weight components outside the colors at {stray}")
    g_stable = tuple(-min(dot(pseudo.A.row(i), x) for x in pseudo_pts) for i in range(m))
    return BDivisor(g_stable=g_stable, colors={a: t[a] for a in space.colors})


@dataclass(frozen=True)
class PolarizedEmbedding:
    """A projective G/H-embedding with an ample B-divisor, checked against its moment polytope."""

    space: HoroSpace
    rays: Tuple[IntVec, ...]
    fan: ColoredFan
    divisor: BDivisor
    polytope: Optional[GHPolytope] = field(default=None, compare=False)

    @classmethod
    def build(
        cls,
        space: HoroSpace,
        rays: Sequence[Sequence[int]],
        fan: ColoredFan,
        divisor: BDivisor,
    ) -> "PolarizedEmbedding":
        clean: List[IntVec] = []
        for i, x in enumerate(rays):
            x = vec(x)
            if len(x) != space.n:
                raise InputError(f"Invalid ray x{i + 1}: {len(x)} coordinates, M has rank {space.n}")
            if is_zero(x) or any(a.denominator != 1 for a in x) or primitive(x) != tuple(int(a) for a in x):
                raise InputError(f"Invalid ray x{i + 1}: {[str(a) for a in x]} is not a primitive lattice vector")
            clean.append(tuple(int(a) for a in x))
        if len(set(clean)) != len(clean):
            raise InputError("Invalid rays: the same edge is listed twice")
        Q, _, _ = moment_polytopes(space, clean, divisor)
        derived = fan_from_polytope(Q)
        if derived != fan:
            logger.debug(f"Input fan cones {fan.sorted_cones()} vs polytope cones {derived.sorted_cones()}")
            raise AmplenessError(
                "Divisor not ample: the normal fan of its moment polytope differs from the input colored fan"
            )
        logger.info(f"Embedding of {space.roots.name} with {len(clean)} edges and {len(fan.cones)} maximal cones")
        return cls(space=space, rays=tuple(clean), fan=fan, divisor=divisor, polytope=Q)

    @property
    def m(self) -> int:
        return len(self.rays)

    @property
    def labels(self) -> Tuple[str, ...]:
        return row_labels(self.space, self.m)

    def row_system(self) -> RatMatrix:
        return row_system(self.space, self.rays)
