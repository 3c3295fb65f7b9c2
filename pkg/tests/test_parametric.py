from fractions import Fraction

import pytest

from src.core.errors import InputError
from src.modules.family.parametric import (
    ParametricFamily,
    candidate_breakpoints,
    extend_family,
    family_type,
    full_dimensional_family,
    omega_intervals,
    omega_max,
    restrict_to_subspace,
    unique_eps,
)
from src.modules.mmp.family import build_family
from src.modules.polytope.hpolyhedron import dimension


def segment_family() -> ParametricFamily:
    """{x >= eps, -x >= -2 + eps}: the segment [eps, 2 - eps]."""
    return ParametricFamily.build(A=[[1], [-1]], B=[0, -2], C=[1, 1])


@pytest.fixture
def toric_pyramid(embedding):
    return build_family(embedding("ex_toric1")).family


def test_build_checks_shapes_and_boundedness():
    with pytest.raises(InputError):
        ParametricFamily.build(A=[[1], [-1]], B=[0], C=[1, 1])
    with pytest.raises(InputError):
        ParametricFamily.build(A=[[1, 0], [0, 1]], B=[0, 0], C=[0, 0])


def test_zero_rows_join_k():
    fam = ParametricFamily.build(A=[[1], [-1], [0]], B=[0, -1, -1], C=[0, 0, 0])
    assert fam.K == frozenset({2})
    assert fam.free_rows == frozenset({0, 1})
    assert fam.walls == frozenset(), "zero rows are not walls"


def test_omega_of_a_shrinking_segment():
    pair = omega_intervals(segment_family(), ())
    assert str(pair.omega1) == "(-inf,1)"
    assert str(pair.omega0) == "(-inf,1]"


def test_omega_max_of_constant_family_is_everything():
    fam = ParametricFamily.build(A=[[1], [-1]], B=[0, -1], C=[0, 0])
    assert str(omega_max(fam)) == "(-inf,+inf)"


def test_omega_point_case_on_the_pyramid(toric_pyramid):
    """x2..x6 meet at the apex of the pyramid for eps = 1 only."""
    pair = omega_intervals(toric_pyramid, [1, 2, 3, 4, 5])
    assert pair.omega0 == pair.omega1
    assert str(pair.omega1) == "{1}"


def test_omega_intervals_rejects_rows_not_in_force():
    fam = segment_family().with_rows([0, 1])
    with pytest.raises(InputError):
        omega_intervals(fam.with_rows([0]), [1])


def test_omega_max_upper_end(toric_pyramid, embedding):
    window = omega_max(toric_pyramid)
    assert window.hi == 1 and window.hi_open
    assert window.contains(Fraction(0))

    horo = build_family(embedding("ex_horo5")).family
    assert omega_max(horo).hi == 1
    assert omega_intervals(horo, [1]).omega1.hi == 1, "x2 collides with the wall of a1 at eps = 1"


def test_unique_eps():
    fam = segment_family()
    assert unique_eps(fam, [0, 1]) == 1
    assert unique_eps(fam, [0]) is None


@pytest.mark.parametrize(
    "name, expected",
    [
        ("ex_toric1", {Fraction(1), Fraction(2)}),
        ("ex_toric2", {Fraction(1, 2), Fraction(3, 2), Fraction(2)}),
        ("ex_horo5", {Fraction(1), Fraction(5, 4)}),
    ],
)
def test_candidate_breakpoints_cover_class_changes(embedding, name, expected):
    fam = build_family(embedding(name)).family
    found = set(candidate_breakpoints(fam))
    assert expected <= found, f"missing {sorted(expected - found)}"


def test_extend_family_full_dimensional_then_subspace(toric_pyramid):
    first = extend_family(toric_pyramid, Fraction(1))
    assert first.case == "full_dim"
    assert first.dropped == frozenset({1}), "x2 stops being a facet"

    assert omega_max(first.family).hi == 2
    last = extend_family(first.family, Fraction(2))
    assert last.case == "subspace"
    assert last.dropped == frozenset({0, 2, 3, 4, 5}), "the polytope is a point"


def test_extend_family_rejects_other_points(toric_pyramid):
    with pytest.raises(InputError):
        extend_family(toric_pyramid, Fraction(3))


def test_flat_family_moves_to_intrinsic_coordinates():
    """A segment lying on y = 0 for every eps."""
    fam = ParametricFamily.build(
        A=[[1, 0], [-1, 0], [0, 1], [0, -1]],
        B=[0, -2, 0, 0],
        C=[1, 1, 0, 0],
    )
    flat = full_dimensional_family(fam)
    assert flat.n == 1
    assert flat.rows == frozenset({0, 1})
    assert dimension(flat.at(Fraction(0))) == 1
    assert flat.ambient.lift(Fraction(0), (Fraction(2),))[1] == 0


def test_restrict_to_subspace_keeps_the_polytope():
    fam = ParametricFamily.build(
        A=[[1, 0], [-1, 0], [0, 1], [0, -1]],
        B=[0, -2, 0, -2],
        C=[0, 0, 1, 1],
    )
    # at eps = 1 the square [0,2] x [1,1] is flat along y = 1
    restricted = restrict_to_subspace(fam, [2, 3], Fraction(1))
    P = restricted.at(Fraction(1))
    assert restricted.n == 1
    assert dimension(P) == 1
    lifted = sorted(restricted.ambient.lift(Fraction(1), (x,)) for x in (Fraction(0), Fraction(2)))
    assert lifted == [(0, 1), (2, 1)]


def test_family_type_tracks_walls(embedding):
    fam = build_family(embedding("ex_horo5")).family
    assert family_type(fam, Fraction(1, 2)).walls == frozenset({4}), "the wall of a2 is touched"
    assert family_type(fam, Fraction(9, 8)).walls == frozenset({3})
