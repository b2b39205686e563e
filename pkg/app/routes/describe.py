from fastapi import APIRouter, Depends

from app.middleware.structure import get_structure
from app.schemas.report import Report
from app.services.algebra import AnyStructure
from app.services.report import describe_report

router = APIRouter()


@router.get("/describe", response_model=Report)
def describe(structure: AnyStructure = Depends(get_structure)):
    """Connection, curvature and invariants of a structure."""
    return describe_report(structure)
