from enum import Enum
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel

from app.schemas.magnetic import QConstraint
from app.schemas.structure import FrameVector, Structure


# ==================== CASE LABELS ====================

class UnimodularRow(str, Enum):
    """Rows of the unimodular table, constants sorted c1 >= c2 >= c3."""
    ALL_EQUAL_NONZERO = "c1=c2=c3!=0"
    ALL_ZERO = "c1=c2=c3=0"
    TOP_NONZERO_PAIR = "c1>c2=c3!=0"
    TOP_ZERO_PAIR = "c1>c2=c3=0"
    BOTTOM_NONZERO_PAIR = "c1=c2>c3,c1!=0"
    BOTTOM_ZERO_PAIR = "c1=c2=0>c3"
    DISTINCT_PPP = "c1>c2>c3>0"
    DISTINCT_PPM = "c1>c2>0>c3"
    DISTINCT_PMM = "c1>0>c2>c3"
    DISTINCT_MMM = "0>c1>c2>c3"
    DISTINCT_LAST_ZERO = "c1>c2>c3=0"
    DISTINCT_MIDDLE_ZERO = "c1>c2=0>c3"
    DISTINCT_FIRST_ZERO = "0=c1>c2>c3"


class NonUnimodularRow(str, Enum):
    D_ABOVE_ONE = "D>1"
    D_ONE_HYPERBOLIC = "D=1,alpha=0,beta=0"
    D_ONE = "D=1,alpha in (0,1),beta=alpha/sqrt(1-alpha^2)"
    D_BETWEEN_BETA_ZERO = "0<D<1,beta=0"
    D_BETWEEN = "0<D<1,beta!=0"
    D_ZERO_BETA_ZERO = "D=0,alpha=1,beta=0"
    D_ZERO = "D=0,alpha=1,beta!=0"
    D_NEGATIVE_BETA_ZERO = "D<0,beta=0"
    D_NEGATIVE = "D<0,beta!=0"


CaseLabel = Union[UnimodularRow, NonUnimodularRow]


# ==================== SOLUTION SCHEMAS ====================

class SolutionComponent(BaseModel):
    """One connected family of unit magnetic fields with its charge constraint.

    Frame indices in `plane` are 1-based; `point` is a unit vector standing for
    the pair {+point, -point}.
    """
    kind: Literal["full_sphere", "great_circle", "point_pair"]
    plane: Optional[Tuple[int, int]] = None
    point: Optional[FrameVector] = None
    q: QConstraint
    double_root: bool = False  # merged pair of the kernel quadratic (D = 1)

    def describe(self) -> str:
        if self.kind == "full_sphere":
            where = "S"
        elif self.kind == "great_circle":
            where = f"S ∩ span(e{self.plane[0]},e{self.plane[1]})"
        else:
            where = "±({:.6g}, {:.6g}, {:.6g})".format(*self.point.as_tuple())
        return f"{where}: {self.q.label()}"

    class Config:
        frozen = True


class SolutionSet(BaseModel):
    structure: Structure
    case_label: str
    components: List[SolutionComponent] = []


class ScanPoint(BaseModel):
    x: FrameVector
    q: QConstraint
    residual: float


class ScanStats(BaseModel):
    grid_points: int
    seeds: int
    converged: int
    failed: int
    max_iterations: int
    mean_iterations: float


class ScanResult(BaseModel):
    structure: Structure
    grid_n: int
    q_mode: str
    points: List[ScanPoint] = []
    stats: ScanStats


class ComponentMatch(BaseModel):
    component: SolutionComponent
    hits: int
    required: int
    matched: bool


class MatchReport(BaseModel):
    matched: bool
    components: List[ComponentMatch] = []
    unmatched_points: List[ScanPoint] = []
    sphere_covered: bool = False
