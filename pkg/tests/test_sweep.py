from fractions import Fraction

import pytest

from src.core.errors import AmplenessError, InputError
from src.core.event_bus import EventBus
from src.core.events import CLASS_FOUND, HOP_EXTENDED, ClassFoundPayload
from src.modules.family.interval import EpsInterval
from src.modules.family.oracle import brute_force_decomposition, compare_decompositions, vertex_crossings
from src.modules.family.parametric import ParametricFamily, full_dimensional_family
from src.modules.family.sweep import (
    ABSORBED,
    OPEN,
    SINGLETON,
    START,
    TERMINAL,
    class_decomposition,
    iterated_decomposition,
    left_decomposition,
)
from src.modules.mmp.family import build_family


def segment_family() -> ParametricFamily:
    return ParametricFamily.build(A=[[1], [-1]], B=[0, -2], C=[1, 1])


def test_segment_shrinks_to_a_point():
    dec = iterated_decomposition(segment_family())
    assert dec.labels() == ["[0,1)", "{1}"]
    assert [c.boundary for c in dec.classes] == [START, TERMINAL]
    assert dec.eps_max == 1
    assert dec.terminal_case == "subspace"


def test_constant_family_never_terminates():
    fam = ParametricFamily.build(A=[[1], [-1]], B=[0, -1], C=[0, 0])
    dec = iterated_decomposition(fam)
    assert dec.labels() == ["[0,+inf)"]
    assert dec.eps_max is None
    assert dec.terminal_case == "unbounded"


def test_start_outside_omega_max_is_not_ample():
    empty_at_zero = ParametricFamily.build(A=[[1], [-1]], B=[1, -1], C=[1, 1])
    with pytest.raises(AmplenessError):
        iterated_decomposition(empty_at_zero)
    with pytest.raises(InputError):
        class_decomposition(segment_family(), Fraction(5))


@pytest.mark.parametrize(
    "name, labels, eps_max",
    [
        ("ex_toric1", ["[0,1)", "[1,2)", "{2}"], Fraction(2)),
        ("ex_toric2", ["[0,1/2)", "{1/2}", "(1/2,3/2)", "[3/2,2)", "{2}"], Fraction(2)),
        ("ex_horo1", ["[0,1)", "[1,4/3)", "{4/3}"], Fraction(4, 3)),
        ("ex_horo2", ["[0,1)", "[1,4/3)", "{4/3}"], Fraction(4, 3)),
        ("ex_horo3", ["[0,1/2)", "{1/2}"], Fraction(1, 2)),
        ("ex_horo4", ["[0,1)", "{1}", "(1,5/3)", "{5/3}"], Fraction(5, 3)),
        ("ex_horo5", ["[0,1)", "{1}", "(1,5/4)", "{5/4}"], Fraction(5, 4)),
    ],
)
def test_iterated_decomposition_of_examples(embedding, name, labels, eps_max):
    dec = iterated_decomposition(build_family(embedding(name)).family)
    assert dec.labels() == labels
    assert dec.eps_max == eps_max


def test_boundary_kinds_on_the_cut_pyramid(embedding):
    dec = iterated_decomposition(build_family(embedding("ex_toric2")).family)
    kinds = [c.boundary for c in dec.classes]
    assert kinds == [START, SINGLETON, OPEN, ABSORBED, TERMINAL]
    assert [(h.epsilon, h.case) for h in dec.hops] == [(Fraction(3, 2), "full_dim"), (Fraction(2), "subspace")]
    assert dec.hop_at(Fraction(3, 2)).dropped == frozenset({1})
    assert dec.class_at(Fraction(1)).interval == dec.classes[2].interval


def test_classes_have_constant_type(embedding):
    """Two points inside one class give the same type; neighbouring classes differ."""
    from src.modules.family.parametric import family_type

    dec = iterated_decomposition(build_family(embedding("ex_toric2")).family)
    for cls in dec.classes:
        iv = cls.interval
        if iv.is_point or iv.hi is None:
            continue
        other = iv.lo + (iv.hi - iv.lo) / 3
        assert family_type(cls.family, other) == cls.ctype, f"type changes inside {iv}"
    for a, b in zip(dec.classes, dec.classes[1:]):
        if a.family == b.family:
            assert a.ctype != b.ctype


def test_events_are_published(embedding):
    bus = EventBus()
    found = []
    hops = []
    bus.subscribe(CLASS_FOUND, lambda event, data: found.append(data))
    bus.subscribe(HOP_EXTENDED, lambda event, data: hops.append(data))
    iterated_decomposition(build_family(embedding("ex_toric1")).family, bus=bus)
    assert [p.interval for p in found] == ["[0,1)", "[1,2)", "{2}"]
    assert isinstance(found[0], ClassFoundPayload)
    assert [h.epsilon for h in hops] == ["1", "2"]
    assert hops[0].dropped_rows == [1]


def test_left_sweep_runs_on_the_mirrored_family():
    dec = left_decomposition(segment_family())
    assert dec.direction == "left"
    assert dec.labels() == ["(-inf,0]"]
    assert dec.terminal_case == "unbounded"


def test_brute_force_oracle_agrees_on_the_segment():
    fam = segment_family()
    assert compare_decompositions(iterated_decomposition(fam), brute_force_decomposition(fam)) == []


@pytest.mark.parametrize("name", ["ex_toric1", "ex_toric2"])
def test_brute_force_oracle_agrees(embedding, name):
    fam = build_family(embedding(name)).family
    sweep = iterated_decomposition(fam)
    brute = brute_force_decomposition(full_dimensional_family(fam))
    assert compare_decompositions(sweep, brute) == []


def test_vertex_crossings_mark_only_degenerate_parameters():
    """A shrinking square only degenerates when it collapses to a point."""
    square = ParametricFamily.build(A=[[1, 0], [0, 1], [-1, 0], [0, -1]], B=[0, 0, -2, -2], C=[0, 0, 1, 1])
    assert vertex_crossings(square, EpsInterval.make(Fraction(0), Fraction(2), False, True)) == []
    assert vertex_crossings(square, EpsInterval.make(Fraction(0), Fraction(2), False, False)) == [2]


def test_vertex_crossings_contain_the_steps_of_the_cut_pyramid(embedding):
    fam = full_dimensional_family(build_family(embedding("ex_toric2")).family)
    found = vertex_crossings(fam, EpsInterval.make(Fraction(0), Fraction(2), False, False))
    assert {Fraction(1, 2), Fraction(3, 2)} <= set(found)
    assert all(0 <= e <= 2 for e in found)


def test_compare_decompositions_reports_differences():
    short = iterated_decomposition(segment_family())
    longer = iterated_decomposition(ParametricFamily.build(A=[[1], [-1]], B=[0, -4], C=[1, 1]))
    problems = compare_decompositions(short, longer)
    assert problems
    assert any("eps_max" in p for p in problems)
