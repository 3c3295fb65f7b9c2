import os
import random
from dataclasses import replace
from fractions import Fraction
from typing import Optional

import pytest

from src.cli.schema import parse_input
from src.core.arith import RatMatrix, primitive
from src.modules.family.interval import EpsInterval
from src.modules.family.sweep import ClassDecomposition
from src.modules.mmp import engine
from src.modules.mmp.engine import run_mmp
from src.modules.polytope.hpolyhedron import HPolyhedron, is_bounded
from src.setting import FIXTURES_DIR, POLYMMP_SEED


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, f"{name}.json")


@pytest.fixture
def fixture_file():
    return fixture_path


@pytest.fixture(scope="session")
def embedding():
    """Loader for the example embeddings shipped in fixtures/, parsed once per session."""
    cache = {}

    def _load(name: str):
        if name not in cache:
            cache[name] = parse_input(fixture_path(name))
        return cache[name]

    return _load


@pytest.fixture(scope="session")
def trace(embedding):
    """Loader for the full MMP trace of an example, computed once per session."""
    cache = {}

    def _run(name: str):
        if name not in cache:
            cache[name] = run_mmp(embedding(name))
        return cache[name]

    return _run


@pytest.fixture
def rng():
    return random.Random(POLYMMP_SEED)


@pytest.fixture
def random_polytope():
    """Builder of random bounded polytopes {x : A x >= b} with 0 in the interior, or None."""

    def _build(rng, n: int, max_rows: int = 8, bound: int = 3, depth: int = 5) -> Optional[HPolyhedron]:
        rows = set()
        for _ in range(rng.randint(n + 1, max_rows)):
            r = tuple(rng.randint(-bound, bound) for _ in range(n))
            if any(r):
                rows.add(primitive(r))
        if len(rows) < n + 1:
            return None
        rows = sorted(rows)
        P = HPolyhedron(A=RatMatrix.from_rows(rows), b=tuple(Fraction(-rng.randint(1, depth)) for _ in rows))
        return P if is_bounded(P) else None

    return _build


@pytest.fixture
def nef_at_start(monkeypatch):
    """Make run_mmp see a sweep whose first class never ends, as when K is nef at eps = 0."""
    real = engine.iterated_decomposition

    def _start_class_only(fam, start=Fraction(0), bus=None):
        first = real(fam, start, bus=bus).classes[0]
        forever = replace(first, interval=EpsInterval.make(first.interval.lo, None, lo_open=False))
        return ClassDecomposition(classes=[forever], eps_max=None, terminal_case="unbounded")

    monkeypatch.setattr(engine, "iterated_decomposition", _start_class_only)
