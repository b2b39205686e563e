import logging

from fastapi import APIRouter, HTTPException, status

from app.errors import NonUnitVectorError
from app.schemas.report import CheckRequest, Report
from app.services.report import check_report

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/check", response_model=Report)
def check(request: CheckRequest):
    """Check one unit field; `q` is solved for when omitted."""
    try:
        return check_report(request.structure, request.x.as_tuple(), request.q, request.tolerance)
    except NonUnitVectorError as exc:
        logger.info("rejected check request: %s", exc)
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=str(exc),
        )
