from fractions import Fraction

from src.modules.family.interval import EpsInterval

half = Fraction(1, 2)


def test_labels():
    assert str(EpsInterval.make(Fraction(0), half, False, True)) == "[0,1/2)"
    assert str(EpsInterval.point(Fraction(2))) == "{2}"
    assert str(EpsInterval.make(None, Fraction(1))) == "(-inf,1)"
    assert str(EpsInterval.make(Fraction(0), None, False)) == "[0,+inf)"
    assert str(EpsInterval.nothing()) == "{}"


def test_kinds_and_membership():
    closed = EpsInterval.make(Fraction(0), Fraction(1), False, False)
    assert closed.kind == "closed"
    assert closed.contains(Fraction(1))
    assert not EpsInterval.make(Fraction(0), Fraction(1)).contains(Fraction(1))
    assert EpsInterval.make(Fraction(1), Fraction(1), True, False).empty, "(1,1] is empty"
    assert EpsInterval.point(half).is_point


def test_intersect_keeps_the_tighter_ends():
    a = EpsInterval.make(Fraction(0), Fraction(2), False, True)
    b = EpsInterval.make(Fraction(1), Fraction(3), True, False)
    assert str(a.intersect(b)) == "(1,2)"
    assert a.intersect(EpsInterval.make(Fraction(5), None)).empty


def test_interior_closure_and_mirror():
    a = EpsInterval.make(Fraction(0), Fraction(1), False, True)
    assert str(a.interior()) == "(0,1)"
    assert str(a.closure()) == "[0,1]"
    assert str(EpsInterval.make(None, Fraction(1)).closure()) == "(-inf,1]"
    assert str(a.mirrored()) == "(-1,0]"


def test_sample_stays_inside():
    assert EpsInterval.make(Fraction(0), Fraction(1)).sample() == half
    assert EpsInterval.make(None, Fraction(1)).sample() == 0
    assert EpsInterval.make(Fraction(3), None).sample() == 4
    assert EpsInterval.everything().sample() == 0
