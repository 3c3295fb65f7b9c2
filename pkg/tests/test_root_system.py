from fractions import Fraction

import pytest

from src.core.errors import InputError
from src.modules.roots.root_system import (
    RootSystemData,
    cartan_matrix,
    positive_roots,
    resolve_root_name,
    root_data,
)


def test_cartan_matrices():
    assert cartan_matrix("A", 2) == ((2, -1), (-1, 2))
    assert cartan_matrix("B", 2) == ((2, -2), (-1, 2))
    assert cartan_matrix("G", 2) == ((2, -1), (-3, 2))
    d4 = cartan_matrix("D", 4)
    assert d4[1] == (-1, 2, -1, -1), "the branch node of D4 is a2"


def test_exceptional_cartan_matrices_are_integral():
    assert cartan_matrix("F", 4) == ((2, -1, 0, 0), (-1, 2, -2, 0), (0, -1, 2, -1), (0, 0, -1, 2))
    e6 = cartan_matrix("E", 6)
    assert all(type(a) is int for row in e6 for a in row)
    assert [sum(1 for a in row if a == -1) for row in e6] == [1, 1, 2, 3, 2, 1], "a4 is the branch node"


@pytest.mark.parametrize(
    "kind, rank, count",
    [
        ("A", 1, 1), ("A", 2, 3), ("A", 3, 6), ("B", 2, 4), ("C", 3, 9),
        ("G", 2, 6), ("D", 4, 12), ("E", 6, 36), ("E", 7, 63), ("F", 4, 24),
    ],
)
def test_positive_root_counts(kind, rank, count):
    assert len(RootSystemData.build(kind, rank).positive) == count


def test_highest_root_of_g2():
    roots = positive_roots(cartan_matrix("G", 2))
    assert roots[-1] == (3, 2)


@pytest.mark.parametrize("kind, rank", [("H", 2), ("D", 3), ("E", 5), ("G", 3), ("A", 0)])
def test_invalid_types_and_ranks(kind, rank):
    with pytest.raises(InputError):
        cartan_matrix(kind, rank)


def test_torus_has_rank_zero():
    torus = RootSystemData.build("torus", 0)
    assert torus.is_torus
    assert torus.name == "torus"
    with pytest.raises(InputError):
        RootSystemData.build("torus", 1)


def test_resolve_root_name():
    assert resolve_root_name("a3", 3) == 2
    assert resolve_root_name("2", 3) == 1
    assert resolve_root_name("Beta", 2) == 1
    for bad in ("a5", "delta", "x1", "0"):
        with pytest.raises(InputError):
            resolve_root_name(bad, 3)


def test_rho_pairings_on_a2():
    a2 = RootSystemData.build("A", 2)
    assert a2.rho_pairings() == {0: Fraction(2), 1: Fraction(2)}
    assert a2.rho_pairings([0]) == {1: Fraction(3)}
    assert a2.levi_roots([0]) == [(1, 0)]
    assert a2.weight_coordinates((1, 1)) == (1, 1)


def test_rho_pairings_on_the_full_flag_are_two():
    """Without a Levi part <2 rho, alpha^v> = 2 for every simple root."""
    for kind, rank in (("B", 3), ("G", 2), ("D", 4)):
        pairings = RootSystemData.build(kind, rank).rho_pairings()
        assert set(pairings.values()) == {2}, f"{kind}{rank}: {pairings}"


def test_root_data_checks_the_parabolic_subset():
    data = root_data("A", 2, [0])
    assert data.c == {1: Fraction(3)}
    with pytest.raises(InputError):
        root_data("A", 2, [5])
