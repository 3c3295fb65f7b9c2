from dataclasses import dataclass, field
from typing import List, Optional


# --- Event type constants ---

CLASS_FOUND = "class_found"
HOP_EXTENDED = "hop_extended"
STEP_CLASSIFIED = "step_classified"
TERMINAL_REACHED = "terminal_reached"


# --- Payload dataclasses ---
# Rationals travel as "p/q" strings so payloads can be logged or serialized as-is.

@dataclass
class ClassFoundPayload:
    interval: str
    boundary_kind: str = "interior"
    rows_in_force: List[int] = field(default_factory=list)
    hop: int = 0


@dataclass
class HopExtendedPayload:
    epsilon: str
    case: str
    dropped_rows: List[int] = field(default_factory=list)
    hop: int = 0


@dataclass
class StepClassifiedPayload:
    kind: str
    epsilon: str
    dropped_rows: List[str] = field(default_factory=list)
    colors_before: List[str] = field(default_factory=list)
    colors_after: List[str] = field(default_factory=list)


@dataclass
class TerminalReachedPayload:
    epsilon: Optional[str]
    base_dimension: int = 0
    fiber_dimension: int = 0
    minimal_model: bool = False
