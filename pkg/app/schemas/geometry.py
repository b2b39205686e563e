from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel


class ConnectionTable(BaseModel):
    """gamma[i][j][k] is the e_k coefficient of nabla_{e_i} e_j (0-based lists)."""
    gamma: List[List[List[float]]]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ConnectionTable":
        return cls(gamma=np.asarray(arr, dtype=float).tolist())

    def array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)

    def entry(self, i: int, j: int, k: int) -> float:
        """1-based lookup."""
        return self.gamma[i - 1][j - 1][k - 1]


class CurvatureTensor(BaseModel):
    """r[i][j][k][l] is the e_l coefficient of R(e_i,e_j)e_k (0-based lists)."""
    r: List[List[List[List[float]]]]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "CurvatureTensor":
        return cls(r=np.asarray(arr, dtype=float).tolist())

    def array(self) -> np.ndarray:
        return np.asarray(self.r, dtype=float)

    def entry(self, i: int, j: int, k: int, l: int) -> float:
        return self.r[i - 1][j - 1][k - 1][l - 1]


class RicciData(BaseModel):
    principal: Tuple[float, float, float]
    scalar: float


class SectionalCurvatures(BaseModel):
    k12: float
    k13: float
    k23: float


class PhiSectional(BaseModel):
    """Constant phi-sectional curvature data for c1 = 2."""
    phi_k: float
    kappa: float
    mu: float
    sasakian: bool


class StructureDescription(BaseModel):
    """Everything `describe` reports about one structure."""
    signature: Optional[str] = None
    milnor_invariant: Optional[float] = None
    constants: Dict[str, float]
    connection: ConnectionTable
    ricci: RicciData
    sectional: SectionalCurvatures
    rough_laplacian: List[List[float]]
    phi_sectional: Optional[PhiSectional] = None
