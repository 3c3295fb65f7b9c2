from src.core.arith import RatMatrix, vec
from src.modules.horo.ghpolytope import GHPolytope, fan_from_polytope, gh_equivalent, gh_valid
from src.modules.polytope.hpolyhedron import HPolyhedron


def test_moment_polytope_of_the_triangle(embedding):
    Q = embedding("ex_horo5").polytope
    assert Q.moment_vertices() == [(1, 0), (1, 4), (5, 4)]
    assert Q.translation() == (1, 1)
    assert Q.touched_walls() == frozenset({1}), "only the wall of a2 is touched"
    assert Q.contained_walls() == frozenset()
    assert Q.wall_rows() == {0: 3, 1: 4}
    assert gh_valid(Q)


def test_segment_in_rank_one(embedding):
    Q = embedding("ex_horo4").polytope
    assert Q.moment_vertices() == [(1, 0), (5, 8)]
    assert Q.touched_walls() == frozenset({1})


def test_normal_fan_matches_the_input_fan(embedding):
    for name in ("ex_horo4", "ex_horo5", "ex_toric2"):
        emb = embedding(name)
        assert fan_from_polytope(emb.polytope) == emb.fan, name


def test_polytope_inside_a_wall_is_not_valid(embedding):
    space = embedding("ex_horo4").space
    # -m >= -1, m >= -1 and the wall of a2 pinned at 2m >= 2: the single point m = 1
    pseudo = HPolyhedron(A=RatMatrix.from_rows([[-1], [1], [2]]), b=vec([-1, -1, 2]))
    Q = GHPolytope(space=space, pseudo=pseudo, color_rows=((2, 1),))
    report = gh_valid(Q)
    assert not report
    assert any("dimension 0" in r for r in report.reasons)
    assert any("wall of a2" in r for r in report.reasons)


def test_equivalence_is_reflexive_and_sees_walls(embedding):
    Q = embedding("ex_horo4").polytope
    assert gh_equivalent(Q, Q)

    moved = HPolyhedron(A=Q.pseudo.A, b=vec([-3, -1, -3]))
    other = GHPolytope(space=Q.space, pseudo=moved, color_rows=Q.color_rows)
    assert other.touched_walls() == frozenset({0})
    assert not gh_equivalent(Q, other), "the segment now ends on the wall of a1"
