from fractions import Fraction

import pytest

from src.core.errors import ConsistencyError, InvariantError
from src.core.event_bus import EventBus
from src.core.events import STEP_CLASSIFIED, TERMINAL_REACHED
from src.modules.horo.ghpolytope import fan_from_polytope
from src.modules.horo.morphism import morphism_exists
from src.modules.mmp import engine
from src.modules.mmp.engine import DIVISORIAL, FLIP, MORI_FIBRATION, fingerprint, run_mmp

EXAMPLES = ("ex_toric1", "ex_toric2", "ex_horo1", "ex_horo2", "ex_horo3", "ex_horo4", "ex_horo5")

# rays of the toric pyramid fixtures, x1..x6
PYRAMID_RAYS = {1: (0, 0, 1), 2: (-1, -1, -2), 3: (2, 0, -1), 4: (-2, 0, -1), 5: (0, 2, -1), 6: (0, -2, -1)}


def pyramid_cones(*cones):
    return {tuple(sorted(PYRAMID_RAYS[i] for i in cone)) for cone in cones}


def cone_rays(fan):
    return {cone.rays for cone in fan.cones}


GOLDEN = {
    "ex_toric1": {
        "classes": ["[0,1)", "[1,2)", "{2}"],
        "steps": [(DIVISORIAL, Fraction(1), ("x2",)), (MORI_FIBRATION, Fraction(2), ())],
        "picard": [3, None],
    },
    "ex_toric2": {
        "classes": ["[0,1/2)", "{1/2}", "(1/2,3/2)", "[3/2,2)", "{2}"],
        "steps": [
            (FLIP, Fraction(1, 2), ()),
            (DIVISORIAL, Fraction(3, 2), ("x2",)),
            (MORI_FIBRATION, Fraction(2), ()),
        ],
        "picard": [3, 3, 2],
    },
    "ex_horo1": {
        "classes": ["[0,1)", "[1,4/3)", "{4/3}"],
        "steps": [(DIVISORIAL, Fraction(1), ("x1",)), (MORI_FIBRATION, Fraction(4, 3), ())],
        "picard": [3, None],
    },
    "ex_horo2": {
        "classes": ["[0,1)", "[1,4/3)", "{4/3}"],
        "steps": [(DIVISORIAL, Fraction(1), ("x1",)), (MORI_FIBRATION, Fraction(4, 3), ())],
        "picard": [3, 2],
    },
    "ex_horo3": {
        "classes": ["[0,1/2)", "{1/2}"],
        "steps": [(MORI_FIBRATION, Fraction(1, 2), ())],
        "picard": [3],
    },
    "ex_horo4": {
        "classes": ["[0,1)", "{1}", "(1,5/3)", "{5/3}"],
        "steps": [(FLIP, Fraction(1), ()), (MORI_FIBRATION, Fraction(5, 3), ())],
        "picard": [2, 2],
    },
    "ex_horo5": {
        "classes": ["[0,1)", "{1}", "(1,5/4)", "{5/4}"],
        "steps": [(FLIP, Fraction(1), ("x2",)), (MORI_FIBRATION, Fraction(5, 4), ())],
        "picard": [None, 2],
    },
}


@pytest.mark.parametrize("name", EXAMPLES)
def test_golden_traces(trace, name):
    t = trace(name)
    golden = GOLDEN[name]
    assert t.decomposition.labels() == golden["classes"]
    assert [(s.kind, s.epsilon, s.dropped) for s in t.steps] == golden["steps"]
    assert t.picard_sequence == golden["picard"]
    assert not t.minimal_model
    assert t.terminal is not None


def test_toric_pyramid_details(trace):
    t = trace("ex_toric1")
    X, Y = t.varieties[0], t.varieties[1]
    assert X.q_factorial and X.q_gorenstein
    assert Y.q_gorenstein and not Y.q_factorial
    assert cone_rays(Y.fan) == pyramid_cones((1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6), (3, 4, 5, 6))
    assert not t.genericity.q_factorial_generic
    assert t.terminal.base_dimension == 0


def test_cut_pyramid_details(trace):
    t = trace("ex_toric2")
    assert t.genericity.q_factorial_generic
    X, Y, X_plus, Z = (t.varieties[k].fan for k in range(4))
    assert cone_rays(X) == pyramid_cones(
        (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6), (2, 3, 5), (2, 3, 6), (2, 4, 5), (2, 4, 6)
    )
    assert cone_rays(Y) == pyramid_cones(
        (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6), (2, 4, 5), (2, 4, 6), (2, 3, 5, 6)
    )
    assert cone_rays(X_plus) == pyramid_cones(
        (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6), (2, 4, 5), (2, 4, 6), (2, 5, 6), (3, 5, 6)
    )
    assert cone_rays(Z) == pyramid_cones((1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6), (3, 5, 6), (4, 5, 6))
    assert not t.varieties[1].q_gorenstein, "the flipping contraction is not Q-Gorenstein"
    flip = t.steps[0]
    assert (flip.source, flip.intermediate, flip.target) == (0, 1, 2)
    assert t.terminal.base_dimension == 1


def test_color_walls_through_a_flip(trace):
    t = trace("ex_horo4")
    flip = t.steps[0]
    assert flip.colors_before == (1,)
    assert t.varieties[flip.intermediate].walls == (0, 1)
    assert flip.colors_after == (0,)

    t = trace("ex_horo5")
    flip = t.steps[0]
    assert flip.colors_before == (1,)
    assert t.varieties[flip.intermediate].walls == (0, 1)
    assert flip.colors_after == (0,)


@pytest.mark.parametrize("name", EXAMPLES)
def test_fan_is_constant_on_each_class(trace, name):
    t = trace(name)
    mmp = t.family
    for cls, record in zip(t.decomposition.classes, t.varieties):
        iv = cls.interval
        if iv.is_point or iv.hi is None or record.fan is None:
            continue
        other = iv.hi - (iv.hi - iv.lo) / 4
        assert fan_from_polytope(mmp.polytope(cls.family, other)) == record.fan, f"fan moves inside {iv}"


@pytest.mark.parametrize("name", EXAMPLES)
def test_contracted_curves_are_k_negative(trace, name):
    """Contracted curves have K.C < 0, except the flipped side where K.C > 0."""
    for step in trace(name).steps:
        assert step.curves, f"{step.kind} at {step.epsilon} contracts nothing"
        for curve in step.curves:
            assert curve.degree_at_boundary == 0
            if curve.morphism == "flipped":
                assert curve.k_degree > 0, curve.label
            else:
                assert curve.k_degree < 0, curve.label


@pytest.mark.parametrize("name", ["ex_toric1", "ex_toric2", "ex_horo1"])
def test_divisorial_contractions_do_not_reverse(trace, name):
    t = trace(name)
    step = next(s for s in t.steps if s.kind == DIVISORIAL)
    source, target = t.varieties[step.source], t.varieties[step.target]
    assert morphism_exists(source.polytope, target.polytope)
    assert not morphism_exists(target.polytope, source.polytope)


def test_require_q_factorial(embedding):
    with pytest.raises(InvariantError):
        run_mmp(embedding("ex_horo5"), require_q_factorial=True)


def test_step_events(embedding):
    bus = EventBus()
    kinds = []
    done = []
    bus.subscribe(STEP_CLASSIFIED, lambda event, data: kinds.append((data.kind, data.epsilon)))
    bus.subscribe(TERMINAL_REACHED, lambda event, data: done.append(data))
    run_mmp(embedding("ex_horo4"), bus=bus)
    assert kinds == [(FLIP, "1"), (MORI_FIBRATION, "5/3")]
    assert done[0].epsilon == "5/3"
    assert not done[0].minimal_model


def test_fingerprint_is_stable(embedding):
    emb = embedding("ex_horo5")
    assert fingerprint(emb) == fingerprint(emb)
    assert len(fingerprint(emb)) == 64
    assert fingerprint(emb) != fingerprint(embedding("ex_horo4"))


def test_non_q_gorenstein_class_stops_the_run(embedding, monkeypatch):
    monkeypatch.setattr(engine, "is_q_gorenstein", lambda P, column: False)
    with pytest.raises(ConsistencyError, match="not Q-Gorenstein"):
        run_mmp(embedding("ex_toric1"))


def test_nef_canonical_class_gives_a_minimal_model_without_steps(embedding, nef_at_start):
    bus = EventBus()
    result = run_mmp(embedding("ex_toric2"), bus=bus)
    assert result.minimal_model
    assert result.steps == []
    assert result.terminal is None
    assert [v.interval for v in result.varieties] == ["[0,+inf)"]
    assert bus.events(STEP_CLASSIFIED) == []
    (reached,) = bus.events(TERMINAL_REACHED)
    assert reached.minimal_model and reached.epsilon is None
