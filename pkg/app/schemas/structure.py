import math
from enum import Enum
from typing import Annotated, Literal, Tuple, Union

from pydantic import BaseModel, Field, field_validator


# ==================== STRUCTURE SCHEMAS ====================

class UnimodularStructure(BaseModel):
    """Milnor frame: [e1,e2] = c3 e3, [e2,e3] = c1 e1, [e3,e1] = c2 e2."""
    family: Literal["unimodular"] = "unimodular"
    c1: float
    c2: float
    c3: float

    @field_validator("c1", "c2", "c3")
    @classmethod
    def finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("structure constants must be finite")
        return float(v)

    @property
    def constants(self) -> Tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)

    def label(self) -> str:
        return f"unimodular({self.c1:g},{self.c2:g},{self.c3:g})"

    class Config:
        frozen = True


class NonUnimodularStructure(BaseModel):
    """Normalized non-unimodular frame with e2, e3 spanning the unimodular kernel."""
    family: Literal["nonunimodular"] = "nonunimodular"
    alpha: float = Field(..., ge=0)
    beta: float = Field(..., ge=0)

    @field_validator("alpha", "beta")
    @classmethod
    def finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("structure parameters must be finite")
        return float(v)

    def label(self) -> str:
        return f"nonunimodular({self.alpha:g},{self.beta:g})"

    class Config:
        frozen = True


Structure = Annotated[
    Union[UnimodularStructure, NonUnimodularStructure],
    Field(discriminator="family"),
]


class FrameVector(BaseModel):
    """Coefficients of a left-invariant field in the orthonormal frame."""
    x1: float
    x2: float
    x3: float

    @classmethod
    def from_array(cls, values) -> "FrameVector":
        a, b, c = (float(v) for v in values)
        return cls(x1=a, x2=b, x3=c)

    @classmethod
    def axis(cls, index: int) -> "FrameVector":
        """Unit axis e_index, 1-based."""
        values = [0.0, 0.0, 0.0]
        values[index - 1] = 1.0
        return cls.from_array(values)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)

    def norm(self) -> float:
        return math.sqrt(self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2)

    class Config:
        frozen = True


# ==================== DERIVED CONSTANTS ====================

class MuConstants(BaseModel):
    """mu_i = (c1 + c2 + c3)/2 - c_i."""
    mu1: float
    mu2: float
    mu3: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.mu1, self.mu2, self.mu3)


class StructureCoefficients(BaseModel):
    """[e1,e2] = a11 e2 + a12 e3, [e1,e3] = a21 e2 + a22 e3."""
    a11: float
    a12: float
    a21: float
    a22: float


class UVW(BaseModel):
    u: float
    v: float
    w: float


class SignatureTag(str, Enum):
    SU2 = "SU2"
    SL2R = "SL2R"
    E2 = "E2"
    E11 = "E11"
    HEISENBERG = "Heisenberg"
    ABELIAN = "Abelian"


class SignatureClass(BaseModel):
    """Milnor signature, pattern sorted + before 0 before -."""
    tag: SignatureTag
    pattern: Tuple[str, str, str]
    flipped: bool = False  # classified through the global sign flip

