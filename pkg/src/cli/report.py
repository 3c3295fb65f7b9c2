import json
import logging
from typing import Any, Dict, List, Optional, Sequence

from src.core.arith import format_rat
from src.core.errors import InputError
from src.modules.family.sweep import ClassDecomposition
from src.modules.mmp.engine import MMPStep, MMPTrace, VarietyRecord
from src.modules.mmp.family import Genericity, MMPFamily
from src.modules.mmp.terminal import TerminalData
from src.modules.roots.horo_space import HoroSpace
from src.cli.schema import describe
from src.setting import TRACE_SCHEMA_VERSION

logger = logging.getLogger(__name__)

NO_STEP = "K nef at 0: no step"


def _rats(values: Sequence) -> List[str]:
    return [format_rat(a) for a in values]


def _eps(value) -> Optional[str]:
    return None if value is None else format_rat(value)


def family_document(mmp: MMPFamily) -> Dict[str, Any]:
    fam = mmp.family
    doc: Dict[str, Any] = {
        "labels": list(fam.labels),
        "A": [_rats(row) for row in fam.A.rows],
        "B_tilde": _rats(fam.B),
        "C_tilde": _rats(fam.C),
        "K": fam.describe_rows(fam.K),
    }
    if mmp.moment is not None:
        doc["moment"] = {
            "B": _rats(mmp.moment.B),
            "C": _rats(mmp.moment.C),
            "v0": _rats(mmp.moment.v0),
            "vK": _rats(mmp.moment.vK),
        }
    return doc


def genericity_document(g: Genericity, mmp: MMPFamily) -> Dict[str, Any]:
    return {
        "q_factorial_generic": g.q_factorial_generic,
        "fiber_generic": g.fiber_generic,
        "q_factorial_witnesses": [mmp.family.describe_rows(J) for J in g.q_factorial_witnesses],
        "fiber_witnesses": [mmp.family.describe_rows(J) for J in g.fiber_witnesses],
    }


def variety_document(record: VarietyRecord, space: HoroSpace) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "interval": record.interval,
        "boundary": record.boundary,
        "sample": format_rat(record.sample),
        "q_gorenstein": record.q_gorenstein,
        "q_factorial": record.q_factorial,
        "picard": record.picard,
        "walls": space.color_names(record.walls),
        "moment_vertices": [_rats(v) for v in record.polytope.moment_vertices()],
    }
    if record.fan is not None:
        doc["fan"] = [
            {"rays": [list(r) for r in cone.rays], "colors": space.color_names(cone.colors)}
            for cone in record.fan.sorted_cones()
        ]
    return doc


def step_document(step: MMPStep, trace: MMPTrace) -> Dict[str, Any]:
    space = trace.embedding.space
    names = [v.interval for v in trace.varieties]
    return {
        "kind": step.kind,
        "epsilon": format_rat(step.epsilon),
        "source": names[step.source],
        "intermediate": None if step.intermediate is None else names[step.intermediate],
        "target": None if step.target is None else names[step.target],
        "dropped_rows": list(step.dropped),
        "colors_before": space.color_names(step.colors_before),
        "colors_after": space.color_names(step.colors_after),
        "morphisms": {name: check.exists for name, check in step.morphisms.items()},
        "contracted_curves": [
            {
                "curve": c.label,
                "kind": c.kind,
                "morphism": c.morphism,
                "degree_at_source": format_rat(c.degree_at_source),
                "degree_at_boundary": format_rat(c.degree_at_boundary),
                "K_degree": format_rat(c.k_degree),
            }
            for c in step.curves
        ],
    }


def terminal_document(data: TerminalData, mmp: MMPFamily) -> Dict[str, Any]:
    space = mmp.embedding.space
    fiber = data.fiber
    doc: Dict[str, Any] = {
        "epsilon": format_rat(data.epsilon),
        "tight_rows": mmp.family.describe_rows(data.tight_rows),
        "M1_basis": [list(k) for k in data.M1_basis],
        "R1": space.color_names(data.R1),
        "new_colors": space.color_names(data.R1 - space.R),
        "moment_vertices": [_rats(v) for v in data.moment_vertices],
        "base_dimension": data.base_dimension,
        "fiber": {
            "dimension": fiber.dimension,
            "rows": mmp.family.describe_rows(fiber.rows),
            "A": [_rats(row) for row in fiber.polytope.A.rows],
            "b": _rats(fiber.polytope.b),
            "walls": space.color_names(fiber.walls),
            "is_simplex": fiber.is_simplex,
            "walls_are_facets": fiber.walls_are_facets,
            "picard": fiber.picard,
            "weights": None if fiber.weights is None else list(fiber.weights),
        },
    }
    return doc


def decomposition_document(dec: ClassDecomposition, mmp: MMPFamily) -> Dict[str, Any]:
    return {
        "schema_version": TRACE_SCHEMA_VERSION,
        "direction": dec.direction,
        "classes": dec.labels(),
        "boundaries": [c.boundary for c in dec.classes],
        "eps_max": _eps(dec.eps_max),
        "terminal_case": dec.terminal_case,
        "hops": [
            {"epsilon": format_rat(h.epsilon), "case": h.case, "dropped_rows": mmp.family.describe_rows(h.dropped)}
            for h in dec.hops
        ],
    }


def trace_document(trace: MMPTrace) -> Dict[str, Any]:
    space = trace.embedding.space
    doc: Dict[str, Any] = {
        "schema_version": TRACE_SCHEMA_VERSION,
        "fingerprint": trace.fingerprint,
        "input": describe(trace.embedding),
        "family": family_document(trace.family),
        "genericity": genericity_document(trace.genericity, trace.family),
        "classes": [v.interval for v in trace.varieties],
        "varieties": [variety_document(v, space) for v in trace.varieties],
        "steps": [step_document(s, trace) for s in trace.steps],
        "picard_sequence": trace.picard_sequence,
        "minimal_model": trace.minimal_model,
        "terminal": None if trace.terminal is None else terminal_document(trace.terminal, trace.family),
    }
    if trace.minimal_model and not trace.steps:
        doc["message"] = NO_STEP
    return doc


def _text_lines(value: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item and not _is_flat(item):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_inline(item)}")
        return lines
    if isinstance(value, list):
        lines = []
        for item in value:
            if isinstance(item, dict) and item:
                sub = _text_lines(item, indent + 1)
                lines.append(f"{pad}- {sub[0].strip()}")
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_inline(item)}")
        return lines
    return [f"{pad}{_inline(value)}"]


def _is_flat(value: Any) -> bool:
    if isinstance(value, dict):
        return False
    return all(not isinstance(v, (dict, list)) or (isinstance(v, list) and _is_flat(v)) for v in value)


def _inline(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, list):
        return "[" + ", ".join(_inline(v) for v in value) + "]"
    return str(value)


def emit(document: Dict[str, Any], fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        lines = []
        if "message" in document:
            lines.append(document["message"])
        lines.extend(_text_lines({k: v for k, v in document.items() if k != "message"}))
        return "\n".join(lines) + "\n"
    raise InputError(f"Invalid format: {fmt}. Must be 'json' or 'text'")
