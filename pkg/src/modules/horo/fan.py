import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from src.core.arith import RatMatrix, is_zero, primitive, vec
from src.core.errors import InputError, InvariantError
from src.core.lattice import integer_kernel
from src.core.lp import LinearSystem, feasible_point
from src.modules.roots.horo_space import HoroSpace

logger = logging.getLogger(__name__)

IntVec = Tuple[int, ...]


@dataclass(frozen=True)
class ColoredCone:
    """Extreme rays (primitive, sorted) of a cone of N_Q and its colors."""

    rays: Tuple[IntVec, ...]
    colors: FrozenSet[int] = frozenset()

    @property
    def dim(self) -> int:
        if not self.rays:
            return 0
        return len(self.rays[0]) - len(integer_kernel(RatMatrix.from_rows(self.rays)))

    @property
    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim


@dataclass(frozen=True)
class ColoredFan:
    cones: FrozenSet[ColoredCone] = field(default_factory=frozenset)

    @property
    def edges(self) -> Tuple[IntVec, ...]:
        return tuple(sorted({r for c in self.cones for r in c.rays}))

    @property
    def colors(self) -> FrozenSet[int]:
        return frozenset(a for c in self.cones for a in c.colors)

    def sorted_cones(self) -> List[ColoredCone]:
        return sorted(self.cones, key=lambda c: (c.rays, sorted(c.colors)))


def cone_contains(rays: Sequence[Sequence], x: Sequence) -> bool:
    """x = sum of nonnegative multiples of the rays."""
    k = len(rays)
    if k == 0:
        return is_zero(vec(x))
    n = len(x)
    zero = Fraction(0)
    equalities = [([Fraction(r[j]) for r in rays], Fraction(x[j])) for j in range(n)]
    nonneg = [([Fraction(int(i == t)) for t in range(k)], zero) for i in range(k)]
    return feasible_point(LinearSystem.build(k, equalities, nonneg)) is not None


def colored_cone_normalize(
    space: HoroSpace,
    generators: Iterable[Sequence],
    colors: Iterable[int] = (),
) -> ColoredCone:
    """Cone spanned by the generators and the coroots of its colors, reduced to extreme rays."""
    colors = frozenset(colors)
    gens: List[IntVec] = []
    for g in generators:
        g = vec(g)
        if len(g) != space.n:
            raise InputError(f"Invalid cone generator {list(g)}: expected {space.n} coordinates")
        if is_zero(g):
            raise InputError("Invalid cone generator: zero vector")
        gens.append(primitive(g))
    for alpha in sorted(colors):
        coroot = space.coroot_restriction(alpha)
        if is_zero(coroot):
            raise InvariantError(
                f"Invalid colored cone: color {space.name_of(alpha)} has zero restriction to N"
            )
        gens.append(primitive(coroot))
    gens = sorted(set(gens))
    extreme = list(gens)
    for g in gens:
        others = [h for h in extreme if h != g]
        if cone_contains(others, g):
            extreme = others
    return ColoredCone(rays=tuple(sorted(extreme)), colors=colors)


def _sample_directions(n: int) -> List[Tuple[int, ...]]:
    span = range(-2, 3) if n <= 3 else range(-1, 2)
    return [d for d in product(span, repeat=n) if any(d)]


def fan_is_complete(fan: ColoredFan, n: int) -> bool:
    """Sampled cover test: every sampled direction lies in some cone."""
    samples = _sample_directions(n)
    for c in fan.cones:
        if c.rays:
            interior = tuple(sum(r[j] for r in c.rays) for j in range(n))
            samples.append(tuple(-a for a in interior))
    for d in samples:
        if not any(cone_contains(c.rays, d) for c in fan.cones):
            logger.debug(f"Direction {d} is outside every cone")
            return False
    return True


def weights_of_simplex_fan(rays: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Positive primitive weights w with sum w_i x_i = 0 for the n+1 rays of a complete simplicial fan."""
    if not rays:
        raise InputError("Invalid simplex fan: no rays")
    n = len(rays[0])
    if len(rays) != n + 1:
        raise InputError(f"Invalid simplex fan: {len(rays)} rays in rank {n}, expected {n + 1}")
    relations = integer_kernel(RatMatrix.from_rows([[r[j] for r in rays] for j in range(n)], ncols=n + 1))
    if len(relations) != 1:
        raise InputError(f"Invalid simplex fan: rays satisfy {len(relations)} independent relations")
    w = relations[0]
    if all(a < 0 for a in w):
        w = tuple(-a for a in w)
    if not all(a > 0 for a in w):
        raise InputError(f"Invalid simplex fan: relation {list(w)} is not positive, the fan is not complete")
    return tuple(w)
