import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from src.core.arith import format_rat
from src.core.errors import AmplenessError, InputError
from src.core.event_bus import EventBus
from src.core.events import (
    CLASS_FOUND,
    HOP_EXTENDED,
    ClassFoundPayload,
    HopExtendedPayload,
)
from src.modules.family.interval import EpsInterval
from src.modules.family.parametric import (
    IndexSet,
    ParametricFamily,
    candidate_breakpoints,
    extend_family,
    family_type,
    full_dimensional_family,
    omega_max,
)
from src.modules.polytope.hpolyhedron import CombinatorialType

logger = logging.getLogger(__name__)

# Boundary kinds of a class: how its left end relates to the class before it.
START = "start"
OPEN = "open"
SINGLETON = "singleton"
ABSORBED = "absorbed"
TERMINAL = "terminal"


@dataclass(frozen=True)
class FamilyClass:
    interval: EpsInterval
    ctype: CombinatorialType
    rows: IndexSet
    hop: int
    sample: Fraction
    boundary: str
    family: ParametricFamily = field(compare=False)


@dataclass(frozen=True)
class HopRecord:
    epsilon: Fraction
    case: str
    dropped: IndexSet
    source: ParametricFamily
    target: ParametricFamily


@dataclass
class ClassDecomposition:
    classes: List[FamilyClass] = field(default_factory=list)
    eps_max: Optional[Fraction] = None
    hops: List[HopRecord] = field(default_factory=list)
    terminal_case: str = "subspace"
    direction: str = "right"

    def labels(self) -> List[str]:
        return [str(c.interval) for c in self.classes]

    def class_at(self, eps: Fraction) -> Optional[FamilyClass]:
        return next((c for c in self.classes if c.interval.contains(eps)), None)

    def hop_at(self, eps: Fraction) -> Optional[HopRecord]:
        return next((h for h in self.hops if h.epsilon == eps), None)


def split_pieces(
    start: Fraction,
    cuts: List[Fraction],
    hi: Optional[Fraction],
    include_start: bool,
) -> List[Tuple[EpsInterval, Fraction]]:
    """Alternating point and open pieces from start up to (not including) hi."""
    pieces: List[Tuple[EpsInterval, Fraction]] = []
    marks = [start] + cuts
    for k, c in enumerate(marks):
        if k > 0 or include_start:
            pieces.append((EpsInterval.point(c), c))
        nxt = marks[k + 1] if k + 1 < len(marks) else hi
        gap = EpsInterval.make(c, nxt, True, True)
        pieces.append((gap, gap.sample()))
    return pieces


def merge_pieces(
    typed: List[Tuple[EpsInterval, Fraction, CombinatorialType]],
) -> List[Tuple[EpsInterval, Fraction, CombinatorialType]]:
    """Merge adjacent pieces with equal types into classes."""
    groups: List[List[Tuple[EpsInterval, Fraction, CombinatorialType]]] = []
    for piece in typed:
        if groups and groups[-1][-1][2] == piece[2]:
            groups[-1].append(piece)
        else:
            groups.append([piece])
    merged = []
    for group in groups:
        first, last = group[0][0], group[-1][0]
        interval = EpsInterval.make(first.lo, last.hi, first.lo_open, last.hi_open)
        if interval.is_point:
            sample = interval.lo
        else:
            sample = next(s for iv, s, _ in group if not iv.is_point)
        merged.append((interval, sample, group[0][2]))
    return merged


def class_decomposition(
    fam: ParametricFamily,
    start: Fraction,
    hop: int = 0,
    include_start: bool = True,
) -> List[FamilyClass]:
    """Equivalence classes of P^eps for eps in Ω^max ∩ [start, ∞)."""
    window = omega_max(fam)
    if not window.contains(start):
        raise InputError(f"Invalid start {format_rat(start)}: outside Ω^max {window}")
    span = EpsInterval.make(start, window.hi, True, True)
    cuts = candidate_breakpoints(fam, span)
    typed = [(iv, s, family_type(fam, s)) for iv, s in split_pieces(start, cuts, window.hi, include_start)]

    out = []
    for k, (interval, sample, ctype) in enumerate(merge_pieces(typed)):
        if interval.is_point:
            boundary = SINGLETON
        elif interval.lo_open:
            boundary = OPEN
        elif k == 0 and hop == 0:
            boundary = START
        else:
            boundary = ABSORBED
        out.append(FamilyClass(interval, ctype, fam.rows, hop, sample, boundary, fam))
    logger.debug(f"Span from {format_rat(start)} (hop {hop}): {[str(c.interval) for c in out]}")
    return out


def iterated_decomposition(
    fam: ParametricFamily,
    start: Fraction = Fraction(0),
    bus: Optional[EventBus] = None,
) -> ClassDecomposition:
    """Sweep eps rightward, hopping to the reduced family at each Ω^max boundary."""
    current = full_dimensional_family(fam)
    if not omega_max(current).contains(start):
        raise AmplenessError(
            f"Divisor not ample or not Q-Cartier: {format_rat(start)} is outside Ω^max {omega_max(current)}"
        )

    result = ClassDecomposition()
    hop = 0
    eps = start
    while True:
        for cls in class_decomposition(current, eps, hop=hop):
            result.classes.append(cls)
            _publish_class(bus, cls)

        hi = omega_max(current).hi
        if hi is None:
            result.terminal_case = "unbounded"
            logger.info("Sweep never leaves Ω^max: no terminal parameter")
            return result

        ext = extend_family(current, hi)
        result.hops.append(HopRecord(hi, ext.case, ext.dropped, current, ext.family))
        if bus is not None:
            bus.publish(HOP_EXTENDED, HopExtendedPayload(
                epsilon=format_rat(hi),
                case=ext.case,
                dropped_rows=sorted(ext.dropped),
                hop=hop,
            ))
        if ext.case == "full_dim":
            current = ext.family
            eps = hi
            hop += 1
            continue

        last = FamilyClass(
            interval=EpsInterval.point(hi),
            ctype=family_type(current, hi),
            rows=current.rows,
            hop=hop,
            sample=hi,
            boundary=TERMINAL,
            family=current,
        )
        result.classes.append(last)
        _publish_class(bus, last)
        result.eps_max = hi
        result.terminal_case = "subspace"
        logger.info(f"Sweep finished at eps_max={format_rat(hi)} after {hop} hop(s): {result.labels()}")
        return result


def left_decomposition(
    fam: ParametricFamily,
    start: Fraction = Fraction(0),
    bus: Optional[EventBus] = None,
) -> ClassDecomposition:
    """The same sweep toward -∞, run on the family with C negated; intervals come back ascending."""
    mirrored = iterated_decomposition(fam.negated(), start=-start, bus=bus)
    classes = [
        FamilyClass(
            interval=c.interval.mirrored(),
            ctype=c.ctype,
            rows=c.rows,
            hop=c.hop,
            sample=-c.sample,
            boundary=c.boundary,
            family=c.family,
        )
        for c in reversed(mirrored.classes)
    ]
    hops = [
        HopRecord(-h.epsilon, h.case, h.dropped, h.source, h.target) for h in mirrored.hops
    ]
    return ClassDecomposition(
        classes=classes,
        eps_max=None if mirrored.eps_max is None else -mirrored.eps_max,
        hops=hops,
        terminal_case=mirrored.terminal_case,
        direction="left",
    )


def _publish_class(bus: Optional[EventBus], cls: FamilyClass) -> None:
    if bus is None:
        return
    bus.publish(CLASS_FOUND, ClassFoundPayload(
        interval=str(cls.interval),
        boundary_kind=cls.boundary,
        rows_in_force=sorted(cls.rows),
        hop=cls.hop,
    ))
