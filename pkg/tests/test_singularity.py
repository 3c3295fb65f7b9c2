from src.core.arith import RatMatrix, vec
from src.modules.horo.embedding import anticanonical_column
from src.modules.horo.singularity import is_q_factorial, is_q_gorenstein, picard_number
from src.modules.polytope.hpolyhedron import HPolyhedron


def pyramid() -> HPolyhedron:
    return HPolyhedron(
        A=RatMatrix.from_rows([[0, 0, 1], [-1, 0, -1], [1, 0, -1], [0, -1, -1], [0, 1, -1]]),
        b=vec([0, -1, -1, -1, -1]),
    )


def test_q_gorenstein_at_the_apex():
    assert is_q_gorenstein(pyramid(), vec([1, 1, 1, 1, 1]))

    check = is_q_gorenstein(pyramid(), vec([1, 2, 1, 1, 1]))
    assert not check
    assert check.failing.witness == (0, 0, 1), "the four side facets meet at the apex"


def test_smooth_toric_pyramid(embedding):
    emb = embedding("ex_toric1")
    Q = emb.polytope
    assert is_q_gorenstein(Q.pseudo, anticanonical_column(emb.space, emb.m))
    check = is_q_factorial(Q)
    assert check
    assert check.picard == 3
    assert picard_number(Q) == 3


def test_wall_touched_at_a_vertex_breaks_q_factoriality(embedding):
    emb = embedding("ex_horo5")
    Q = emb.polytope
    assert is_q_gorenstein(Q.pseudo, anticanonical_column(emb.space, emb.m))
    check = is_q_factorial(Q)
    assert not check
    assert check.picard is None
    assert check.reason == "wall of a2 meets the polytope in dimension 0"
    assert picard_number(Q) == 3


def test_wall_along_a_facet_keeps_q_factoriality(embedding):
    Q = embedding("ex_horo4").polytope
    check = is_q_factorial(Q)
    assert check
    assert check.picard == 2
