import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from src.core.arith import RatMatrix, RatVec, dot, inverse, primitive, rank, solve_affine
from src.core.errors import InputError, UnboundedError
from src.core.lp import LinearSystem, feasible_point, lp_extremize

logger = logging.getLogger(__name__)

IndexSet = FrozenSet[int]


@dataclass(frozen=True)
class FaceRecord:
    active: IndexSet
    dim: int
    witness: RatVec
    vertices: Tuple[RatVec, ...] = field(default=(), compare=False)

    def contains_face(self, other: "FaceRecord") -> bool:
        return self.active <= other.active


@dataclass(frozen=True)
class CombinatorialType:
    """Maximal active sets of all nonempty faces, plus the touched walls."""

    faces: FrozenSet[IndexSet]
    dimension: int
    walls: IndexSet = frozenset()

    @property
    def is_empty(self) -> bool:
        return not self.faces

    def canonical(self) -> List[Tuple[int, ...]]:
        return sorted((tuple(sorted(f)) for f in self.faces), key=lambda t: (len(t), t))

    def restricted(self, rows: Iterable[int]) -> "CombinatorialType":
        keep = frozenset(rows)
        return CombinatorialType(
            faces=frozenset(f & keep for f in self.faces),
            dimension=self.dimension,
            walls=self.walls & keep,
        )

    def with_walls(self, wall_rows: Iterable[int]) -> "CombinatorialType":
        wall_rows = frozenset(wall_rows)
        touched = frozenset(i for f in self.faces for i in f if i in wall_rows)
        return CombinatorialType(faces=self.faces, dimension=self.dimension, walls=touched)


@dataclass(frozen=True)
class HPolyhedron:
    """{x : A_i x >= b_i for i in rows}; rows outside `rows` are carried but ignored."""

    A: RatMatrix
    b: RatVec
    rows: Optional[IndexSet] = None

    def __post_init__(self) -> None:
        if len(self.b) != self.A.m:
            raise InputError(f"Invalid polyhedron: {self.A.m} rows but {len(self.b)} right-hand sides")
        if self.rows is not None and any(i < 0 or i >= self.A.m for i in self.rows):
            raise InputError(f"Invalid polyhedron: row mask {sorted(self.rows)} out of range")

    @property
    def n(self) -> int:
        return self.A.ncols

    @property
    def in_force(self) -> Tuple[int, ...]:
        if self.rows is None:
            return tuple(range(self.A.m))
        return tuple(sorted(self.rows))

    def slack(self, i: int, x: Sequence[Fraction]) -> Fraction:
        return dot(self.A.row(i), x) - self.b[i]

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(self.slack(i, x) >= 0 for i in self.in_force)

    def tight_rows(self, x: Sequence[Fraction]) -> IndexSet:
        return frozenset(i for i in self.in_force if self.slack(i, x) == 0)

    def system(self) -> LinearSystem:
        return LinearSystem(
            nvars=self.n,
            inequalities=tuple((self.A.row(i), self.b[i]) for i in self.in_force),
        )


@lru_cache(maxsize=4096)
def _basis_inverses(A: RatMatrix, rows: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], RatMatrix], ...]:
    n = A.ncols
    nonzero = [i for i in rows if not A.is_zero_row(i)]
    out = []
    for subset in combinations(nonzero, n):
        sub = A.select(subset)
        if rank(sub) == n:
            out.append((subset, inverse(sub)))
    return tuple(out)


@lru_cache(maxsize=1024)
def _recession_is_trivial(A: RatMatrix, rows: Tuple[int, ...]) -> bool:
    n = A.ncols
    zero = Fraction(0)
    cone = [(A.row(i), zero) for i in rows]
    box = []
    for j in range(n):
        e = [Fraction(int(k == j)) for k in range(n)]
        box.append((tuple(e), Fraction(-1)))
        box.append((tuple(-a for a in e), Fraction(-1)))
    system = LinearSystem(nvars=n, inequalities=tuple(cone + box))
    for j in range(n):
        e = [Fraction(int(k == j)) for k in range(n)]
        for direction in (e, [-a for a in e]):
            result = lp_extremize(direction, system)
            if result.optimum is not None and result.optimum > 0:
                return False
    return True


def is_bounded(P: HPolyhedron) -> bool:
    """True iff {x : A x >= 0} = {0} on the rows in force."""
    return _recession_is_trivial(P.A, P.in_force)


def vertices(P: HPolyhedron) -> List[FaceRecord]:
    n = P.n
    found: Dict[RatVec, IndexSet] = {}
    if n == 0:
        if all(P.b[i] <= 0 for i in P.in_force):
            found[()] = P.tight_rows(())
    else:
        for subset, inv in _basis_inverses(P.A, P.in_force):
            x = inv.mul_vec([P.b[i] for i in subset])
            if x in found:
                continue
            if P.contains(x):
                found[x] = P.tight_rows(x)
    if not found:
        if n > 0 and feasible_point(P.system()) is not None:
            raise UnboundedError("Polyhedron is nonempty but has no vertex (unbounded)")
        return []
    if not is_bounded(P):
        raise UnboundedError("Vertex enumeration requested on an unbounded polyhedron")
    return [
        FaceRecord(active=act, dim=0, witness=x, vertices=(x,))
        for x, act in sorted(found.items())
    ]


def _face_dim(P: HPolyhedron, active: IndexSet) -> int:
    if not active:
        return P.n
    return P.n - rank(P.A.select(sorted(active)))


def faces(P: HPolyhedron) -> List[FaceRecord]:
    """Every nonempty face with its maximal active set; the whole polytope comes last."""
    verts = vertices(P)
    if not verts:
        return []
    vertex_sets = [v.active for v in verts]
    known = set(vertex_sets)
    frontier = set(vertex_sets)
    while frontier:
        fresh = set()
        for s in frontier:
            for t in vertex_sets:
                u = s & t
                if u not in known:
                    fresh.add(u)
        known |= fresh
        frontier = fresh
    out = []
    for act in known:
        pts = tuple(v.witness for v in verts if act <= v.active)
        k = len(pts)
        witness = tuple(sum((p[j] for p in pts), Fraction(0)) / k for j in range(P.n))
        out.append(FaceRecord(active=act, dim=_face_dim(P, act), witness=witness, vertices=pts))
    out.sort(key=lambda f: (f.dim, sorted(f.active)))
    return out


def combinatorial_type(P: HPolyhedron) -> CombinatorialType:
    fs = faces(P)
    if not fs:
        return CombinatorialType(faces=frozenset(), dimension=-1)
    return CombinatorialType(faces=frozenset(f.active for f in fs), dimension=fs[-1].dim)


def dimension(P: HPolyhedron) -> int:
    fs = faces(P)
    return fs[-1].dim if fs else -1


def implicit_rows(P: HPolyhedron) -> IndexSet:
    """Rows tight on the whole polyhedron."""
    fs = faces(P)
    return fs[-1].active if fs else frozenset()


def facets(P: HPolyhedron) -> List[FaceRecord]:
    fs = faces(P)
    if not fs:
        return []
    d = fs[-1].dim
    return [f for f in fs if f.dim == d - 1]


def irredundant_rows(P: HPolyhedron) -> IndexSet:
    implicit = implicit_rows(P)
    return frozenset(i for f in facets(P) for i in f.active - implicit)


def edges(P: HPolyhedron) -> List[FaceRecord]:
    return [f for f in faces(P) if f.dim == 1]


def facet_row(P: HPolyhedron, facet: FaceRecord) -> int:
    """Lowest row index defining a facet."""
    return min(facet.active - implicit_rows(P))


def is_simple(P: HPolyhedron) -> bool:
    fs = facets(P)
    d = dimension(P)
    for v in vertices(P):
        count = sum(1 for f in fs if f.active <= v.active)
        if count != d:
            return False
    return True


def normal_cone(P: HPolyhedron, v: FaceRecord) -> List[Tuple[int, ...]]:
    """Primitive inward normals of the facets containing a vertex."""
    verts = vertices(P)
    if v.active not in {w.active for w in verts} or v.dim != 0:
        raise InputError(f"Not a vertex of the polyhedron: active set {sorted(v.active)}")
    out: List[Tuple[int, ...]] = []
    for f in facets(P):
        if f.active <= v.active:
            normal = primitive(P.A.row(facet_row(P, f)))
            if normal not in out:
                out.append(normal)
    return sorted(out)


def point_in_affine_hull(P: HPolyhedron, x: Sequence[Fraction]) -> bool:
    implicit = sorted(implicit_rows(P))
    if not implicit:
        return True
    sol = solve_affine(P.A.select(implicit), [P.b[i] for i in implicit])
    return sol is not None and all(P.slack(i, x) == 0 for i in implicit)
