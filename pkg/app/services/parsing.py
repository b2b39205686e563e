import math
from typing import List, Optional

from pydantic import ValidationError

from app.errors import StructureInputError
from app.schemas.structure import NonUnimodularStructure, UnimodularStructure
from app.services.algebra import AnyStructure


def parse_reals(text: str, count: int, what: str) -> List[float]:
    """Comma-separated reals without spaces, e.g. `1,0,-1`."""
    parts = text.split(",")
    if len(parts) != count or any(p != p.strip() or not p for p in parts):
        raise StructureInputError(f"{what} expects {count} comma-separated reals, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise StructureInputError(f"{what} expects {count} comma-separated reals, got {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise StructureInputError(f"{what} values must be finite, got {text!r}")
    return values


def parse_structure(unimodular: Optional[str], nonunimodular: Optional[str]) -> AnyStructure:
    if (unimodular is None) == (nonunimodular is None):
        raise StructureInputError("give exactly one of --unimodular c1,c2,c3 or --nonunimodular alpha,beta")
    try:
        if unimodular is not None:
            c1, c2, c3 = parse_reals(unimodular, 3, "unimodular")
            return UnimodularStructure(c1=c1, c2=c2, c3=c3)
        alpha, beta = parse_reals(nonunimodular, 2, "nonunimodular")
        return NonUnimodularStructure(alpha=alpha, beta=beta)
    except ValidationError as exc:
        message = "; ".join(err["msg"] for err in exc.errors())
        raise StructureInputError(f"invalid structure: {message}") from None
