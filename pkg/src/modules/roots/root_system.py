import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Tuple

from sympy.liealgebras.cartan_type import CartanType

from src.core.errors import InputError
from src.setting import MAX_ROOT_RANK

logger = logging.getLogger(__name__)

IntVec = Tuple[int, ...]

ALIASES = ("alpha", "beta", "gamma", "delta")

# Positive-root counts per type, checked after generation.
ROOT_COUNTS = {
    "A": lambda n: n * (n + 1) // 2,
    "B": lambda n: n * n,
    "C": lambda n: n * n,
    "D": lambda n: n * (n - 1),
    "E": lambda n: {6: 36, 7: 63, 8: 120}[n],
    "F": lambda n: 24,
    "G": lambda n: 6,
}

VALID_RANKS = {
    "A": range(1, MAX_ROOT_RANK + 1),
    "B": range(2, MAX_ROOT_RANK + 1),
    "C": range(2, MAX_ROOT_RANK + 1),
    "D": range(4, MAX_ROOT_RANK + 1),
    "E": range(6, 9),
    "F": range(4, 5),
    "G": range(2, 3),
}


@lru_cache(maxsize=64)
def cartan_matrix(kind: str, rank: int) -> Tuple[IntVec, ...]:
    """Cartan matrix with entry [i][j] = <alpha_i, alpha_j^v>, Bourbaki numbering."""
    kind = kind.upper()
    if kind not in VALID_RANKS:
        raise InputError(f"Invalid root system type: {kind!r}")
    if rank not in VALID_RANKS[kind]:
        raise InputError(f"Invalid rank {rank} for type {kind}")
    m = CartanType(f"{kind}{rank}").cartan_matrix()
    return tuple(tuple(int(m[i, j]) for j in range(rank)) for i in range(rank))


def simple_root_names(rank: int) -> List[str]:
    return [f"a{i + 1}" for i in range(rank)]


def resolve_root_name(name: str, rank: int) -> int:
    """Index of a simple root given as "a3", "3" or a positional alias such as "beta"."""
    key = name.strip().lower()
    if key in ALIASES and ALIASES.index(key) < rank:
        return ALIASES.index(key)
    if key.startswith("a") and key[1:].isdigit():
        key = key[1:]
    if key.isdigit() and 1 <= int(key) <= rank:
        return int(key) - 1
    raise InputError(f"Invalid simple root name {name!r} for rank {rank}")


def coroot_pairing(cartan: Tuple[IntVec, ...], root: IntVec, j: int) -> int:
    """<root, alpha_j^v> for a root in simple-root coordinates."""
    return sum(k * cartan[i][j] for i, k in enumerate(root))


def weyl_reflection(cartan: Tuple[IntVec, ...], root: IntVec, i: int) -> IntVec:
    p = coroot_pairing(cartan, root, i)
    return tuple(k - p if t == i else k for t, k in enumerate(root))


@lru_cache(maxsize=64)
def positive_roots(cartan: Tuple[IntVec, ...]) -> Tuple[IntVec, ...]:
    """Closure of the simple roots under simple reflections, kept positive."""
    rank = len(cartan)
    simple = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        fresh = []
        for root in frontier:
            for i in range(rank):
                image = weyl_reflection(cartan, root, i)
                if all(k >= 0 for k in image) and any(image) and image not in seen:
                    seen.add(image)
                    fresh.append(image)
        frontier = fresh
    return tuple(sorted(seen, key=lambda r: (sum(r), r)))


@dataclass(frozen=True)
class RootSystemData:
    kind: str
    rank: int
    cartan: Tuple[IntVec, ...] = ()
    positive: Tuple[IntVec, ...] = ()

    @classmethod
    def build(cls, kind: str, rank: int) -> "RootSystemData":
        kind = kind.strip()
        if kind.lower() in ("torus", "t"):
            if rank != 0:
                raise InputError(f"Invalid rank {rank} for a torus: the root datum has rank 0")
            return cls(kind="torus", rank=0)
        cartan = cartan_matrix(kind, rank)
        roots = positive_roots(cartan)
        expected = ROOT_COUNTS[kind.upper()](rank)
        if len(roots) != expected:
            raise InputError(
                f"Invalid root generation for {kind.upper()}{rank}: {len(roots)} positive roots, expected {expected}"
            )
        logger.debug(f"Root system {kind.upper()}{rank} with {len(roots)} positive roots")
        return cls(kind=kind.upper(), rank=rank, cartan=cartan, positive=roots)

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    @property
    def name(self) -> str:
        return "torus" if self.is_torus else f"{self.kind}{self.rank}"

    def names(self) -> List[str]:
        return simple_root_names(self.rank)

    def weight_coordinates(self, root: IntVec) -> IntVec:
        """Fundamental-weight coordinates: the pairings with every simple coroot."""
        return tuple(coroot_pairing(self.cartan, root, j) for j in range(self.rank))

    def levi_roots(self, R: Iterable[int]) -> List[IntVec]:
        R = frozenset(R)
        return [r for r in self.positive if all(k == 0 or i in R for i, k in enumerate(r))]

    def rho_pairings(self, R: Iterable[int] = ()) -> Dict[int, Fraction]:
        """<2 rho_P, alpha^v> for alpha outside R, where 2 rho_P sums the positive roots not in the Levi part."""
        R = frozenset(R)
        levi = set(self.levi_roots(R))
        out = {}
        for j in range(self.rank):
            if j in R:
                continue
            out[j] = Fraction(sum(coroot_pairing(self.cartan, r, j) for r in self.positive if r not in levi))
        return out


@dataclass(frozen=True)
class RootData:
    system: RootSystemData
    R: FrozenSet[int] = field(default_factory=frozenset)
    c: Dict[int, Fraction] = field(default_factory=dict, compare=False, hash=False)


def root_data(kind: str, rank: int, R: Iterable[int] = ()) -> RootData:
    system = RootSystemData.build(kind, rank)
    R = frozenset(R)
    bad = [i for i in R if i < 0 or i >= system.rank]
    if bad:
        raise InputError(f"Invalid parabolic subset: indices {sorted(bad)} outside 0..{system.rank - 1}")
    return RootData(system=system, R=R, c=system.rho_pairings(R))
