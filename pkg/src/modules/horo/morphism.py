import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from src.core.arith import RatMatrix, dot, rank
from src.core.errors import InputError
from src.modules.horo.ghpolytope import GHPolytope
from src.modules.polytope.hpolyhedron import facet_row, facets, vertices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MorphismCheck:
    """Result of the dominant-morphism criterion.

    psi sends each facet of the source (keyed by its active rows) to the face of the
    target it slides onto, given as the indices of the target vertices it contains.
    """

    exists: bool
    psi: Dict[FrozenSet[int], FrozenSet[int]] = field(default_factory=dict)
    failures: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.exists


def morphism_exists(
    source: GHPolytope,
    target: GHPolytope,
    lattice: Optional[RatMatrix] = None,
) -> MorphismCheck:
    """Is there a dominant G-equivariant morphism from the source embedding to the target one?

    `lattice` has one column per basis vector of the target lattice M', written in the
    source M basis (M' is a sublattice of M); it defaults to the identity.
    """
    n, n2 = source.n, target.n
    if lattice is None:
        if n != n2:
            raise InputError(f"Incompatible lattices: rank {n} vs {n2} and no inclusion given")
        lattice = RatMatrix.identity(n)
    if lattice.m != n or lattice.ncols != n2:
        raise InputError(f"Incompatible lattices: inclusion is {lattice.m}x{lattice.ncols}, expected {n}x{n2}")
    if rank(lattice) != n2:
        raise InputError("Incompatible lattices: the inclusion of M' into M is not injective")
    if source.space.roots != target.space.roots or not source.space.R <= target.space.R:
        raise InputError(
            f"Incompatible spaces: R={sorted(source.space.R)} must be contained in R'={sorted(target.space.R)}"
        )

    restrict = lattice.transpose()
    target_pts = [v.witness for v in vertices(target.pseudo)]
    psi: Dict[FrozenSet[int], FrozenSet[int]] = {}
    for f in facets(source.pseudo):
        u = restrict.mul_vec(source.pseudo.A.row(facet_row(source.pseudo, f)))
        values = [dot(u, p) for p in target_pts]
        low = min(values)
        psi[f.active] = frozenset(k for k, val in enumerate(values) if val == low)

    failures: List[str] = []
    for v in vertices(source.pseudo):
        images = [img for act, img in psi.items() if act <= v.active]
        common = frozenset(range(len(target_pts)))
        for img in images:
            common &= img
        if not common:
            failures.append(
                f"facets through vertex {[str(a) for a in source.moment_point(v.witness)]} "
                f"have no common point in the target"
            )
    reachable = target.touched_walls() | target.space.R
    lost = source.touched_walls() - reachable
    if lost:
        failures.append(f"walls {source.space.color_names(lost)} touched by the source but not by the target")

    check = MorphismCheck(exists=not failures, psi=psi, failures=tuple(failures))
    logger.debug(f"Morphism check: exists={check.exists}, failures={list(check.failures)}")
    return check
