import hashlib
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.core.arith import RatVec, format_rat, primitive, solve_affine, sub
from src.core.errors import ConsistencyError, InvariantError
from src.core.event_bus import EventBus
from src.core.events import (
    STEP_CLASSIFIED,
    TERMINAL_REACHED,
    StepClassifiedPayload,
    TerminalReachedPayload,
)
from src.modules.family.parametric import ParametricFamily
from src.modules.family.sweep import (
    ABSORBED,
    SINGLETON,
    TERMINAL,
    ClassDecomposition,
    FamilyClass,
    iterated_decomposition,
)
from src.modules.horo.curves import EDGE, Curve, curves_with_intersections
from src.modules.horo.embedding import PolarizedEmbedding
from src.modules.horo.fan import ColoredFan
from src.modules.horo.ghpolytope import GHPolytope, fan_from_polytope, gh_valid
from src.modules.horo.morphism import MorphismCheck, morphism_exists
from src.modules.horo.singularity import is_q_factorial, is_q_gorenstein
from src.modules.mmp.family import Genericity, MMPFamily, build_family, is_general_divisor
from src.modules.mmp.terminal import TerminalData, terminal_data

logger = logging.getLogger(__name__)

# Step kinds
DIVISORIAL = "divisorial"
FLIP = "flip"
MORI_FIBRATION = "mori_fibration"


@dataclass(frozen=True)
class VarietyRecord:
    """The variety X_eps of one class, read off its representative polytope."""

    interval: str
    sample: Fraction
    boundary: str
    rows: Tuple[int, ...]
    polytope: GHPolytope = field(compare=False)
    q_gorenstein: bool
    q_factorial: bool
    picard: Optional[int] = None
    walls: Tuple[int, ...] = ()
    fan: Optional[ColoredFan] = field(default=None, compare=False)


@dataclass(frozen=True)
class ContractedCurve:
    label: str
    kind: str
    morphism: str
    degree_at_source: Fraction
    degree_at_boundary: Fraction
    k_degree: Fraction


@dataclass
class MMPStep:
    kind: str
    epsilon: Fraction
    source: int
    target: Optional[int]
    intermediate: Optional[int] = None
    dropped: Tuple[str, ...] = ()
    colors_before: Tuple[int, ...] = ()
    colors_after: Tuple[int, ...] = ()
    curves: List[ContractedCurve] = field(default_factory=list)
    morphisms: Dict[str, MorphismCheck] = field(default_factory=dict)


@dataclass
class MMPTrace:
    fingerprint: str
    family: MMPFamily
    decomposition: ClassDecomposition
    genericity: Genericity
    varieties: List[VarietyRecord] = field(default_factory=list)
    steps: List[MMPStep] = field(default_factory=list)
    terminal: Optional[TerminalData] = None
    minimal_model: bool = False

    @property
    def embedding(self) -> PolarizedEmbedding:
        return self.family.embedding

    @property
    def picard_sequence(self) -> List[Optional[int]]:
        """Picard numbers of X and of every variety reached by a step, in order."""
        if not self.varieties:
            return []
        out = [self.varieties[0].picard]
        for step in self.steps:
            if step.target is not None:
                out.append(self.varieties[step.target].picard)
        return out


def fingerprint(emb: PolarizedEmbedding) -> str:
    space = emb.space
    data = {
        "root_system": space.roots.name,
        "R": sorted(space.R),
        "M_basis": [[str(a) for a in row] for row in space.M_basis.rows],
        "rays": [list(x) for x in emb.rays],
        "divisor": [str(a) for a in emb.divisor.coefficients(space)],
    }
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode("utf-8")).hexdigest()


def vertex_at(fam: ParametricFamily, anchor, eps: Fraction) -> RatVec:
    """The point cut out by a vertex's active rows at another parameter value."""
    rows = sorted(anchor)
    sol = solve_affine(fam.A.select(rows), [fam.rhs(i, eps) for i in rows])
    if sol is None:
        raise ConsistencyError(
            f"Vertex rows {fam.describe_rows(rows)} have no common point at eps={format_rat(eps)}"
        )
    return sol.witness


def curve_degree(fam: ParametricFamily, curve: Curve, eps: Fraction, wall_rows: Dict[int, int]) -> Fraction:
    """(D + eps K).C, following the curve's vertices linearly in eps."""
    points = [vertex_at(fam, a, eps) for a in curve.anchors]
    if curve.kind == EDGE:
        direction = primitive(sub(curve.points[1], curve.points[0]))
        diff = sub(points[1], points[0])
        j = next(k for k, a in enumerate(direction) if a != 0)
        return diff[j] / direction[j]
    row = wall_rows[curve.color]
    return fam.at(eps).slack(row, points[0])


def _variety(mmp: MMPFamily, cls: FamilyClass) -> VarietyRecord:
    space = mmp.embedding.space
    Q = mmp.polytope(cls.family, cls.sample)
    qg = bool(is_q_gorenstein(Q.pseudo, mmp.anticanonical))
    fan = None
    qf = False
    picard = None
    if cls.boundary != TERMINAL and gh_valid(Q):
        fan = fan_from_polytope(Q)
        check = is_q_factorial(Q)
        qf = check.ok
        picard = check.picard
    return VarietyRecord(
        interval=str(cls.interval),
        sample=cls.sample,
        boundary=cls.boundary,
        rows=tuple(sorted(cls.rows)),
        polytope=Q,
        q_gorenstein=qg,
        q_factorial=qf,
        picard=picard,
        walls=tuple(sorted(Q.touched_walls())),
        fan=fan,
    )


def _contracted(
    mmp: MMPFamily,
    record: VarietyRecord,
    fam: ParametricFamily,
    eps: Fraction,
    morphism: str,
) -> List[ContractedCurve]:
    wall_rows = record.polytope.wall_rows()
    out = []
    for item in curves_with_intersections(record.polytope):
        at_boundary = curve_degree(fam, item.curve, eps, wall_rows)
        if at_boundary != 0:
            continue
        out.append(ContractedCurve(
            label=item.label,
            kind=item.curve.kind,
            morphism=morphism,
            degree_at_source=item.degree,
            degree_at_boundary=at_boundary,
            k_degree=(at_boundary - item.degree) / (eps - record.sample),
        ))
    return out


def _check_morphism(step: MMPStep, name: str, check: MorphismCheck) -> None:
    step.morphisms[name] = check
    if not check:
        raise ConsistencyError(
            f"No {name} morphism for the {step.kind} at eps={format_rat(step.epsilon)}: "
            f"{'; '.join(check.failures)}"
        )


def _flip(mmp: MMPFamily, classes: List[FamilyClass], varieties: List[VarietyRecord], k: int) -> MMPStep:
    eps = classes[k].interval.lo
    if k + 1 >= len(classes) or classes[k + 1].boundary == TERMINAL:
        raise ConsistencyError(f"Singleton class at eps={format_rat(eps)} has no class after it")
    source, Y, target = varieties[k - 1], varieties[k], varieties[k + 1]
    if Y.q_gorenstein:
        raise ConsistencyError(
            f"Intermediate variety at eps={format_rat(eps)} is Q-Gorenstein: the boundary is not a flip"
        )
    dropped = classes[k - 1].rows - classes[k + 1].rows
    step = MMPStep(
        kind=FLIP,
        epsilon=eps,
        source=k - 1,
        target=k + 1,
        intermediate=k,
        dropped=tuple(mmp.family.describe_rows(dropped)),
        colors_before=source.walls,
        colors_after=target.walls,
    )
    _check_morphism(step, "flipping", morphism_exists(source.polytope, Y.polytope))
    _check_morphism(step, "flipped", morphism_exists(target.polytope, Y.polytope))
    step.curves = _contracted(mmp, source, classes[k - 1].family, eps, "flipping")
    step.curves += _contracted(mmp, target, classes[k + 1].family, eps, "flipped")
    return step


def _divisorial(
    mmp: MMPFamily,
    decomposition: ClassDecomposition,
    varieties: List[VarietyRecord],
    k: int,
) -> MMPStep:
    classes = decomposition.classes
    eps = classes[k].interval.lo
    hop = decomposition.hop_at(eps)
    dropped = hop.dropped if hop is not None else frozenset()
    if not dropped:
        raise ConsistencyError(f"Divisorial contraction at eps={format_rat(eps)} drops no G-stable divisor")
    source, target = varieties[k - 1], varieties[k]
    if not target.q_gorenstein:
        raise ConsistencyError(
            f"Target of the contraction at eps={format_rat(eps)} is not Q-Gorenstein"
        )
    step = MMPStep(
        kind=DIVISORIAL,
        epsilon=eps,
        source=k - 1,
        target=k,
        dropped=tuple(mmp.family.describe_rows(dropped)),
        colors_before=source.walls,
        colors_after=target.walls,
    )
    _check_morphism(step, "contraction", morphism_exists(source.polytope, target.polytope))
    step.curves = _contracted(mmp, source, classes[k - 1].family, eps, "contraction")
    return step


def _fibration(
    mmp: MMPFamily,
    classes: List[FamilyClass],
    varieties: List[VarietyRecord],
    k: int,
    expect_simplex: bool,
) -> Tuple[MMPStep, TerminalData]:
    eps = classes[k].interval.lo
    source = varieties[k - 1]
    data = terminal_data(mmp, classes[k].family, eps, expect_simplex=expect_simplex)
    step = MMPStep(
        kind=MORI_FIBRATION,
        epsilon=eps,
        source=k - 1,
        target=None,
        colors_before=source.walls,
        colors_after=tuple(sorted(data.base.touched_walls())) if data.base is not None else (),
    )
    if data.base is not None:
        _check_morphism(
            step, "fibration", morphism_exists(source.polytope, data.base, lattice=data.base_lattice)
        )
    step.curves = _contracted(mmp, source, classes[k - 1].family, eps, "fibration")
    return step, data


def _publish_step(bus: Optional[EventBus], mmp: MMPFamily, step: MMPStep) -> None:
    if bus is None:
        return
    space = mmp.embedding.space
    bus.publish(STEP_CLASSIFIED, StepClassifiedPayload(
        kind=step.kind,
        epsilon=format_rat(step.epsilon),
        dropped_rows=list(step.dropped),
        colors_before=space.color_names(step.colors_before),
        colors_after=space.color_names(step.colors_after),
    ))


def run_mmp(
    emb: PolarizedEmbedding,
    bus: Optional[EventBus] = None,
    require_q_factorial: bool = False,
) -> MMPTrace:
    """Run the K-MMP of (X, D): sweep D + eps K and classify every boundary of the sweep."""
    if require_q_factorial:
        check = is_q_factorial(emb.polytope)
        if not check:
            raise InvariantError(f"Input variety is not Q-factorial: {check.reason}")
    mmp = build_family(emb)
    genericity = is_general_divisor(mmp.family)
    decomposition = iterated_decomposition(mmp.family, Fraction(0), bus=bus)
    classes = decomposition.classes
    varieties = [_variety(mmp, cls) for cls in classes]

    trace = MMPTrace(
        fingerprint=fingerprint(emb),
        family=mmp,
        decomposition=decomposition,
        genericity=genericity,
        varieties=varieties,
    )
    for cls, record in zip(classes, varieties):
        if cls.boundary in (SINGLETON, TERMINAL):
            continue
        if require_q_factorial and not record.q_factorial:
            raise InvariantError(f"Variety of class {record.interval} is not Q-factorial")
        if not record.q_gorenstein:
            raise ConsistencyError(
                f"Variety of class {record.interval} is not Q-Gorenstein: the sweep and the geometry disagree"
            )

    expect_simplex = (
        genericity.q_factorial_generic and genericity.fiber_generic and varieties[0].q_factorial
    )
    for k, cls in enumerate(classes):
        if k == 0:
            continue
        try:
            if cls.boundary == SINGLETON:
                step = _flip(mmp, classes, varieties, k)
            elif cls.boundary == ABSORBED:
                step = _divisorial(mmp, decomposition, varieties, k)
            elif cls.boundary == TERMINAL:
                step, trace.terminal = _fibration(mmp, classes, varieties, k, expect_simplex)
            else:
                continue
        except ConsistencyError as e:
            logger.error(f"Step at class {str(cls.interval)} failed: {e}")
            raise
        trace.steps.append(step)
        logger.info(
            f"{step.kind} at eps={format_rat(step.epsilon)}, dropping {list(step.dropped)}, "
            f"{len(step.curves)} contracted curve(s)"
        )
        _publish_step(bus, mmp, step)

    trace.minimal_model = decomposition.terminal_case == "unbounded"
    if bus is not None:
        bus.publish(TERMINAL_REACHED, TerminalReachedPayload(
            epsilon=None if trace.terminal is None else format_rat(trace.terminal.epsilon),
            base_dimension=0 if trace.terminal is None else trace.terminal.base_dimension,
            fiber_dimension=0 if trace.terminal is None else trace.terminal.fiber.dimension,
            minimal_model=trace.minimal_model,
        ))
    if trace.minimal_model and not trace.steps:
        logger.info("K nef at 0: no step")
    return trace
