"""Request and response models for the service endpoints."""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class ProfileRequest(BaseModel):
    kind: Literal["heat", "riesz", "multiplier"]
    nu: float = Field(gt=0)
    t: Optional[float] = None
    rmin: float
    rmax: float
    n: int = Field(ge=2, le=1_000_000)
    multiplier: Optional[str] = None


class ProfileResponse(BaseModel):
    kind: str
    nu: float
    r: List[float]
    H: List[float]


class PlanePayload(BaseModel):
    """Tensor-grid samples, ``values[iu][ix]`` — row-major in u then x."""

    x: List[float]
    u: List[float]
    values: List[List[float]]


class CzRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    nu: float = Field(gt=0)
    lam: float = Field(alias="lambda", gt=0)
    plane: PlanePayload
    subcells: int = Field(default=8, ge=2, le=64)


class AdmissibleSetModel(BaseModel):
    m: int
    l: int
    u: float
    r: float


class CzReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda")
    kappa: float
    n_bad: int
    l1_good: float
    l1_bad_total: float
    measure_bad_total: float
    residuals: Dict[str, float]
    bad_sets: List[AdmissibleSetModel]


class VerifyRequest(BaseModel):
    suite: str = "all"
    seed: int = 0


class CheckModel(BaseModel):
    id: str
    description: str
    measured: float
    expected: float
    tolerance: float
    status: str


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    checks: List[CheckModel]
