"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from .. import __version__
from ..estimators import EstimatorConfig

EstimatorName = Literal["lrs", "improved", "generalized"]
FormatName = Literal["raw_bitpacked", "bytes_one_symbol", "text_symbols"]
FamilyName = Literal["bms", "markov", "near_uniform", "inverted_near_uniform"]
ModeName = Literal["overlapping", "non_overlapping"]


class EstimatorConfigModel(BaseModel):
    alpha: int = Field(2, ge=2)
    cutoff: int = Field(35, ge=2)
    confidence_z: float = Field(2.576, ge=0.0)
    mode: ModeName = "overlapping"
    bisect_tol: float = Field(1e-12, gt=0.0)
    apply_confidence: bool = True
    allow_high_alpha: bool = False

    def to_config(self) -> EstimatorConfig:
        return EstimatorConfig(**self.model_dump())

    @classmethod
    def from_config(cls, cfg: EstimatorConfig) -> "EstimatorConfigModel":
        return cls(
            alpha=cfg.alpha,
            cutoff=cfg.cutoff,
            confidence_z=cfg.confidence_z,
            mode=cfg.mode,
            bisect_tol=cfg.bisect_tol,
            apply_confidence=cfg.apply_confidence,
            allow_high_alpha=cfg.allow_high_alpha,
        )


class InputDescriptorModel(BaseModel):
    """How to parse a submitted payload into symbols."""

    format: FormatName = "raw_bitpacked"
    bits_per_symbol: int = Field(1, ge=1, le=16)
    max_symbols: Optional[int] = Field(None, ge=1)


class EstimateRequest(InputDescriptorModel):
    data_base64: str
    estimator: EstimatorName = "improved"
    config: EstimatorConfigModel = EstimatorConfigModel()


class ResultDocument(BaseModel):
    """Full record of one estimation: auditable and replayable."""

    tool_version: str = __version__
    input_sha256: str
    estimator: EstimatorName
    config: EstimatorConfigModel
    sequence_length: int
    alphabet_size: int
    h_estimate: float
    theta_hat: float
    theta_tilde: float
    u: int
    v: int
    winning_w: int
    per_w: dict[int, float]
    m_tilde: Optional[float]
    clamped_uniform: bool
    duration_seconds: float


class SimulateRequest(BaseModel):
    family: FamilyName
    param: float
    L: int = Field(..., ge=1)
    k: int = Field(2, ge=2)
    seed: int = Field(0, ge=0)
    stream: int = Field(0, ge=0)
    binarize: bool = False
    format: FormatName = "raw_bitpacked"
    bits_per_symbol: Optional[int] = Field(None, ge=1, le=16)


class SimulateResponse(BaseModel):
    tool_version: str = __version__
    family: FamilyName
    param: float
    L: int
    k: int
    seed: int
    stream: int
    binarized: bool
    n_symbols: int
    format: FormatName
    bits_per_symbol: int
    data_base64: str
    output_sha256: str


class EstimatorJobModel(BaseModel):
    """One estimator column of a sweep; the label defaults to something readable."""

    estimator: EstimatorName
    alpha: int = Field(2, ge=2)
    label: Optional[str] = None

    def resolved_label(self) -> str:
        if self.label:
            return self.label
        if self.estimator == "generalized":
            return f"generalized_a{self.alpha}"
        return self.estimator


class BiasSweepRequest(BaseModel):
    family: FamilyName
    params: list[float]
    estimators: list[EstimatorJobModel]
    L: int = Field(100_000, ge=2)
    k: int = Field(2, ge=2)
    n_trials: int = Field(100, ge=2)
    base_seed: int = Field(0, ge=0)
    config: EstimatorConfigModel = EstimatorConfigModel()


class VarianceSweepRequest(BaseModel):
    alphas: list[int]
    L: int = Field(100_000, ge=2)
    n_trials: int = Field(200, ge=2)
    base_seed: int = Field(0, ge=0)
    cutoff: int = Field(35, ge=2)
    mode: ModeName = "non_overlapping"


class BoundsRequest(BaseModel):
    k: int = Field(..., ge=2)
    pc_values: list[float]


class TableResponse(BaseModel):
    """A data table: column names in order plus one dict per row."""

    tool_version: str = __version__
    columns: list[str]
    rows: list[dict]


class ErrorResponse(BaseModel):
    error_code: str
    detail: str


class HealthResponse(BaseModel):
    status: str = "ok"
    tool_version: str = __version__
