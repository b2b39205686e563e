from fastapi import APIRouter

from app.schemas.report import Report, SolveRequest
from app.services.report import solve_report

router = APIRouter()


@router.post("/solve", response_model=Report)
def solve(request: SolveRequest):
    """Closed-form classification, numeric scan, or both with a comparison."""
    return solve_report(request.structure, request.mode, request.grid_n, request.tolerance)
