import json
import logging
from typing import Annotated, Any, Dict, List, Optional, Union

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError

from src.core.arith import format_rat, parse_rat, vec
from src.core.errors import InputError, InvariantError, SchemaError
from src.modules.horo.embedding import BDivisor, PolarizedEmbedding
from src.modules.horo.fan import ColoredFan, colored_cone_normalize, fan_is_complete
from src.modules.roots.horo_space import HoroSpace
from src.modules.roots.root_system import resolve_root_name
from src.setting import MAX_ROOT_RANK

logger = logging.getLogger(__name__)


def _check_rational(value: Union[int, str]) -> Union[int, str]:
    try:
        parse_rat(value)
    except InputError as e:
        raise ValueError(str(e))
    return value


Rational = Annotated[Union[int, str], AfterValidator(_check_rational)]


class RootSystemSpec(BaseModel):
    type: str = Field(..., min_length=1, examples=["A", "torus"])
    rank: int = Field(default=0, ge=0, le=MAX_ROOT_RANK)


class ConeSpec(BaseModel):
    generators: List[List[int]] = Field(default_factory=list, description="Edges of the cone, as N-vectors")
    colors: List[str] = Field(default_factory=list, examples=[["beta"]])


class DivisorSpec(BaseModel):
    g_stable: List[Rational] = Field(..., description="Coefficients of X_1..X_m, in ray order")
    colors: Dict[str, Rational] = Field(default_factory=dict)


class InputDocument(BaseModel):
    """A projective horospherical embedding with a B-divisor; rationals travel as strings."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    notes: Optional[str] = None
    root_system: RootSystemSpec
    R: List[str] = Field(default_factory=list)
    M_basis: List[List[Rational]] = Field(..., description="Basis of M in fundamental-weight coordinates")
    rays: List[List[int]] = Field(..., min_length=1)
    fan: List[ConeSpec] = Field(..., min_length=1)
    divisor: DivisorSpec


def parse_document(data: Dict[str, Any]) -> PolarizedEmbedding:
    try:
        doc = InputDocument.model_validate(data)
    except ValidationError as e:
        raise SchemaError(f"Invalid input document: {e}")

    rs = doc.root_system
    space = HoroSpace.build(rs.type, rs.rank, R=doc.R, M_basis=doc.M_basis)
    cones = []
    for k, cone in enumerate(doc.fan):
        colors = [resolve_root_name(a, space.roots.rank) for a in cone.colors]
        stray = [a for a in colors if a not in space.colors]
        if stray:
            raise InvariantError(f"Invalid cone {k + 1}: colors {space.color_names(stray)} are not in S minus R")
        cones.append(colored_cone_normalize(space, cone.generators, colors))
    fan = ColoredFan(cones=frozenset(cones))
    if not fan_is_complete(fan, space.n):
        raise InvariantError("Invalid fan: the cones do not cover N_Q, the embedding is not complete")

    divisor = BDivisor(
        g_stable=vec(doc.divisor.g_stable),
        colors={resolve_root_name(a, space.roots.rank): parse_rat(v) for a, v in doc.divisor.colors.items()},
    )
    emb = PolarizedEmbedding.build(space, doc.rays, fan, divisor)
    if doc.notes:
        logger.warning(f"Document note: {doc.notes}")
    return emb


def parse_input(path: str) -> PolarizedEmbedding:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InputError(f"Input file not found: {path}")
    except json.JSONDecodeError as e:
        raise SchemaError(f"Invalid JSON in {path}: {e}")
    if not isinstance(data, dict):
        raise SchemaError(f"Invalid input document in {path}: top level must be an object")
    logger.info(f"Loading {path}")
    return parse_document(data)


def describe(emb: PolarizedEmbedding) -> Dict[str, Any]:
    """The embedding as an input document; parse_document reads it back."""
    space = emb.space
    return {
        "root_system": {"type": space.roots.kind, "rank": space.roots.rank},
        "R": space.color_names(space.R),
        "M_basis": [[format_rat(a) for a in row] for row in space.M_basis.rows],
        "rays": [list(x) for x in emb.rays],
        "fan": [
            {"generators": [list(r) for r in cone.rays], "colors": space.color_names(cone.colors)}
            for cone in emb.fan.sorted_cones()
        ],
        "divisor": {
            "g_stable": [format_rat(a) for a in emb.divisor.g_stable],
            "colors": {space.name_of(a): format_rat(v) for a, v in sorted(emb.divisor.colors.items())},
        },
    }
