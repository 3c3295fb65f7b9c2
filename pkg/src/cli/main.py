import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from src.core.errors import ConsistencyError, PolyMMPError
from src.core.event_bus import EventBus
from src.core.events import CLASS_FOUND, STEP_CLASSIFIED
from src.modules.family.oracle import brute_force_decomposition, compare_decompositions
from src.modules.family.parametric import full_dimensional_family
from src.modules.family.sweep import ClassDecomposition, iterated_decomposition, left_decomposition
from src.modules.horo.embedding import anticanonical_column
from src.modules.horo.singularity import is_q_factorial, is_q_gorenstein
from src.modules.mmp.engine import run_mmp
from src.modules.mmp.family import MMPFamily, build_family, is_general_divisor
from src.cli.render import render_family
from src.cli.report import (
    NO_STEP,
    decomposition_document,
    emit,
    family_document,
    genericity_document,
    terminal_document,
    trace_document,
)
from src.cli.schema import describe, parse_input
from src.setting import LOG_FORMAT, LOG_LEVEL, OUTPUT_DIR, TRACE_SCHEMA_VERSION

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run.py",
        description="Run the minimal model program of a polarized horospherical or toric variety.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "full MMP trace: classes, steps, contracted curves and the Mori fibration"),
        ("classes", "class decomposition of the family D + eps K only"),
        ("check", "Q-Gorenstein, Q-factorial and genericity tests of the input"),
        ("fiber", "base and general fiber of the final Mori fibration"),
        ("render", "SVG frames and vertex CSV of the moment polytopes"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="variety/divisor JSON document")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--oracle", choices=("sweep", "brute", "both"), default="sweep",
                       help="decomposition method; 'both' fails on any disagreement")
        p.add_argument("--out", default=None, help=f"output directory (default {OUTPUT_DIR})")
        p.add_argument("--log-level", default=None, help=f"logging level (default {LOG_LEVEL})")
        if name in ("run", "fiber"):
            p.add_argument("--q-factorial", action="store_true",
                           help="refuse non Q-factorial inputs and check every variety on the way")
        if name == "classes":
            p.add_argument("--direction", choices=("right", "left"), default="right")
    return parser


def _progress(event: str, data: Any) -> None:
    logger.info(f"[{event}] {data}")


def _decompose(mmp: MMPFamily, oracle: str, bus: Optional[EventBus], direction: str = "right") -> ClassDecomposition:
    fam = mmp.family
    if direction == "left":
        return left_decomposition(fam, bus=bus)
    if oracle == "brute":
        return brute_force_decomposition(full_dimensional_family(fam))
    dec = iterated_decomposition(fam, bus=bus)
    if oracle == "both":
        _cross_check(mmp, dec)
    return dec


def _cross_check(mmp: MMPFamily, dec: ClassDecomposition) -> None:
    brute = brute_force_decomposition(full_dimensional_family(mmp.family))
    problems = compare_decompositions(dec, brute)
    if problems:
        raise ConsistencyError(f"Sweep and brute-force decompositions disagree: {'; '.join(problems)}")
    logger.info("Sweep and brute-force decompositions agree")


def _check_document(emb) -> Dict[str, Any]:
    space = emb.space
    qg = is_q_gorenstein(emb.polytope.pseudo, anticanonical_column(space, emb.m))
    qf = is_q_factorial(emb.polytope)
    doc: Dict[str, Any] = {
        "schema_version": TRACE_SCHEMA_VERSION,
        "input": describe(emb),
        "q_gorenstein": qg.ok,
        "q_factorial": qf.ok,
        "q_factorial_reason": qf.reason or None,
        "picard": qf.picard,
    }
    if qg:
        mmp = build_family(emb)
        doc["family"] = family_document(mmp)
        doc["genericity"] = genericity_document(is_general_divisor(mmp.family), mmp)
    else:
        doc["failing_vertex"] = [str(a) for a in emb.polytope.moment_point(qg.failing.witness)]
    return doc


def _write(text: str, out: Optional[str], name: str) -> None:
    sys.stdout.write(text)
    if out:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Report written to {path}")


def dispatch(args: argparse.Namespace) -> int:
    bus = EventBus()
    if args.format == "text":
        bus.subscribe("*", _progress, owner="cli")
    emb = parse_input(args.input)
    ext = "json" if args.format == "json" else "txt"

    if args.command == "check":
        _write(emit(_check_document(emb), args.format), args.out, f"check.{ext}")
        return 0

    if args.command == "classes":
        mmp = build_family(emb)
        dec = _decompose(mmp, args.oracle, bus, direction=args.direction)
        _write(emit(decomposition_document(dec, mmp), args.format), args.out, f"classes.{ext}")
        return 0

    if args.command == "render":
        mmp = build_family(emb)
        dec = _decompose(mmp, args.oracle, bus)
        result = render_family(mmp, dec, args.out or OUTPUT_DIR)
        doc = {
            "schema_version": TRACE_SCHEMA_VERSION,
            "frames": result.frames,
            "csv": result.csv_path,
            "supported": result.supported,
            "projection": result.projection,
            "message": result.message,
        }
        sys.stdout.write(emit(doc, args.format))
        return 0

    trace = run_mmp(emb, bus=bus, require_q_factorial=args.q_factorial)
    logger.info(
        f"Run finished: {len(bus.events(CLASS_FOUND))} class(es), {len(bus.events(STEP_CLASSIFIED))} step(s)"
    )
    if args.oracle in ("brute", "both"):
        _cross_check(trace.family, trace.decomposition)
    if args.command == "fiber":
        if trace.terminal is None:
            doc = {"schema_version": TRACE_SCHEMA_VERSION, "terminal": None, "message": NO_STEP}
        else:
            doc = {
                "schema_version": TRACE_SCHEMA_VERSION,
                "terminal": terminal_document(trace.terminal, trace.family),
            }
        _write(emit(doc, args.format), args.out, f"fiber.{ext}")
        return 0
    _write(emit(trace_document(trace), args.format), args.out, f"trace.{ext}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (args.log_level or LOG_LEVEL).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
    try:
        return dispatch(args)
    except PolyMMPError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        return 5
