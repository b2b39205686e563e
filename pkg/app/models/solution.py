from typing import Optional

from app.schemas.classify import ScanPoint, SolutionComponent
from app.schemas.report import ReproduceRow

SOLUTION_COLUMNS = ["kind", "axis/plane", "x1", "x2", "x3", "q_kind", "q_value", "max_residual"]


def solution_row_helper(component: SolutionComponent, max_residual: Optional[float] = None) -> dict:
    """Convert a solution component to a flat CSV row."""
    if component.kind == "great_circle":
        where = f"{component.plane[0]}-{component.plane[1]}"
    elif component.kind == "point_pair":
        axes = [i + 1 for i, v in enumerate(component.point.as_tuple()) if abs(v) == 1.0]
        where = str(axes[0]) if axes else ""
    else:
        where = ""
    x = component.point.as_tuple() if component.point is not None else (None, None, None)
    return {
        "kind": component.kind,
        "axis/plane": where,
        "x1": x[0],
        "x2": x[1],
        "x3": x[2],
        "q_kind": component.q.kind,
        "q_value": component.q.value,
        "max_residual": max_residual,
    }


def scan_point_helper(point: ScanPoint) -> dict:
    """Convert a scan point to a flat CSV row."""
    x1, x2, x3 = point.x.as_tuple()
    return {
        "kind": "scan_point",
        "axis/plane": "",
        "x1": x1,
        "x2": x2,
        "x3": x3,
        "q_kind": point.q.kind,
        "q_value": point.q.value,
        "max_residual": point.residual,
    }


def reproduce_row_helper(row: ReproduceRow) -> dict:
    """Convert a reproduce row to a flat CSV row."""
    return {
        "row": row.row,
        "passed": row.passed,
        "samples": len(row.samples),
        "matched": sum(1 for s in row.samples if s.matched),
        "structures": ";".join(s.structure.label() for s in row.samples),
    }
