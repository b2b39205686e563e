from typing import Optional

from fastapi import HTTPException, Query, status

from app.errors import StructureInputError
from app.services.algebra import AnyStructure
from app.services.parsing import parse_structure


async def get_structure(
    unimodular: Optional[str] = Query(None, description="c1,c2,c3"),
    nonunimodular: Optional[str] = Query(None, description="alpha,beta"),
) -> AnyStructure:
    """Structure from query parameters, exactly one of the two families."""
    try:
        return parse_structure(unimodular, nonunimodular)
    except StructureInputError as exc:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(exc),
        )
