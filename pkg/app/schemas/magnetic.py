import math
from typing import Literal, Optional

from pydantic import BaseModel, field_validator

from app.schemas.structure import FrameVector


class QConstraint(BaseModel):
    """Charge constraint: every q (`any`) or one fixed value."""
    kind: Literal["any", "fixed"]
    value: Optional[float] = None

    @field_validator("value")
    @classmethod
    def finite(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not math.isfinite(v):
            raise ValueError("fixed charge must be finite")
        return v

    @classmethod
    def any_q(cls) -> "QConstraint":
        return cls(kind="any")

    @classmethod
    def fixed(cls, value: float) -> "QConstraint":
        return cls(kind="fixed", value=float(value))

    @property
    def is_any(self) -> bool:
        return self.kind == "any"

    def label(self) -> str:
        return "any q" if self.is_any else f"q = {self.value:.12g}"

    class Config:
        frozen = True


class ResidualPair(BaseModel):
    """first: curvature-trace equation, second: rough-Laplacian equation."""
    first: FrameVector
    second: FrameVector

    def norms(self) -> tuple:
        return (self.first.norm(), self.second.norm())

    def max_norm(self) -> float:
        return max(self.norms())


class AxisVerdict(BaseModel):
    axis: int
    q: Optional[QConstraint] = None


class CheckResult(BaseModel):
    """Outcome of checking one field."""
    x: FrameVector
    q: Optional[float] = None
    first_norm: float
    second_norm: float
    solved_q: Optional[QConstraint] = None
    magnetic: bool
