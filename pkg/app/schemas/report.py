from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from app.schemas.classify import MatchReport, ScanResult, SolutionSet
from app.schemas.geometry import StructureDescription
from app.schemas.magnetic import CheckResult
from app.schemas.structure import FrameVector, Structure


# ==================== REPRODUCE SCHEMAS ====================

class ReproduceSample(BaseModel):
    structure: Structure
    case_label: str
    components: int
    scan_points: int
    unmatched_points: int
    matched: bool


class ReproduceRow(BaseModel):
    row: str
    passed: bool
    samples: List[ReproduceSample] = []


class ReproduceMatrix(BaseModel):
    family: Literal["unimodular", "nonunimodular"]
    samples: int
    seed: int
    grid_n: int
    rows: List[ReproduceRow] = []
    passed: bool = False


# ==================== REPORT ====================

class Report(BaseModel):
    """Everything one command produced; `--format` only changes the rendering."""
    mode: Literal["describe", "check", "solve", "reproduce"]
    structure: Optional[Structure] = None
    tolerance: float
    description: Optional[StructureDescription] = None
    check: Optional[CheckResult] = None
    solution_set: Optional[SolutionSet] = None
    component_residuals: Optional[List[float]] = None
    scan: Optional[ScanResult] = None
    match: Optional[MatchReport] = None
    reproduce: Optional[ReproduceMatrix] = None
    timing: Optional[float] = None


# ==================== REQUEST SCHEMAS ====================

class CheckRequest(BaseModel):
    """Schema for checking one field."""
    structure: Structure
    x: FrameVector
    q: Optional[float] = None
    tolerance: Optional[float] = Field(None, gt=0)


class SolveRequest(BaseModel):
    """Schema for solving one structure."""
    structure: Structure
    mode: Literal["symbolic", "numeric", "both"] = "symbolic"
    grid_n: int = Field(128, ge=16, le=512)
    tolerance: Optional[float] = Field(None, gt=0)

