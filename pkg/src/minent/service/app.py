"""FastAPI application exposing estimation, simulation and sweeps."""

from __future__ import annotations

import base64
import binascii
import hashlib
import math
import time

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__, analysis, seqio, sources
from ..estimators import EstimationDomainError, EstimatorConfig, estimate_from_index
from ..tuples import SequenceIndex
from . import schemas

PARSE_ERROR_STATUS = 400
DOMAIN_ERROR_STATUS = 422


def _error(status: int, code: str, detail: str) -> JSONResponse:
    body = schemas.ErrorResponse(error_code=code, detail=detail)
    return JSONResponse(status_code=status, content=body.model_dump())


def create_app() -> FastAPI:
    app = FastAPI(title="minent", version=__version__)

    @app.exception_handler(seqio.SequenceFormatError)
    async def _format_error(request, exc):
        return _error(PARSE_ERROR_STATUS, "parse_error", str(exc))

    @app.exception_handler(EstimationDomainError)
    async def _domain_error(request, exc):
        return _error(DOMAIN_ERROR_STATUS, "estimation_error", str(exc))

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return _error(DOMAIN_ERROR_STATUS, "invalid_parameter", str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse()

    @app.post("/estimate", response_model=schemas.ResultDocument)
    def estimate(req: schemas.EstimateRequest):
        started = time.perf_counter()
        data = _decode_payload(req.data_base64)
        fmt = seqio.SequenceFormat(req.format, req.bits_per_symbol, req.max_symbols)
        seq = seqio.decode_sequence(data, fmt)
        est = estimate_from_index(SequenceIndex(seq), req.config.to_config(), req.estimator)
        return schemas.ResultDocument(
            input_sha256=hashlib.sha256(data).hexdigest(),
            estimator=req.estimator,
            config=req.config,
            sequence_length=seq.L,
            alphabet_size=seq.k,
            h_estimate=est.h_estimate,
            theta_hat=est.theta_hat,
            theta_tilde=est.theta_tilde,
            u=est.u,
            v=est.v,
            winning_w=est.winning_w,
            per_w=est.per_w,
            m_tilde=est.m_tilde,
            clamped_uniform=est.clamped_uniform,
            duration_seconds=time.perf_counter() - started,
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        spec = sources.SourceSpec(
            family=req.family,
            param=req.param,
            L=req.L,
            k=req.k,
            seed=req.seed,
            stream=req.stream,
        )
        seq = sources.generate(spec)
        if req.binarize:
            seq = sources.binarize(seq)
        bits = req.bits_per_symbol or max(seq.k - 1, 1).bit_length()
        fmt = seqio.SequenceFormat(req.format, bits)
        data = seqio.encode_sequence(seq, fmt)
        return schemas.SimulateResponse(
            family=req.family,
            param=req.param,
            L=req.L,
            k=req.k,
            seed=req.seed,
            stream=req.stream,
            binarized=req.binarize,
            n_symbols=seq.L,
            format=req.format,
            bits_per_symbol=bits,
            data_base64=base64.b64encode(data).decode("ascii"),
            output_sha256=hashlib.sha256(data).hexdigest(),
        )

    @app.post("/sweep/bias", response_model=schemas.TableResponse)
    def sweep_bias(req: schemas.BiasSweepRequest):
        jobs = [
            analysis.EstimatorJob(
                label=j.resolved_label(),
                estimator=j.estimator,
                config=req.config.to_config()
                if j.estimator != "generalized"
                else _with_alpha(req.config, j.alpha),
            )
            for j in req.estimators
        ]
        rows = analysis.bias_sweep(
            family=req.family,
            params=req.params,
            jobs=jobs,
            L=req.L,
            n_trials=req.n_trials,
            base_seed=req.base_seed,
            k=req.k,
        )
        return schemas.TableResponse(columns=analysis.bias_sweep_columns(jobs), rows=_json_rows(rows))

    @app.post("/sweep/variance", response_model=schemas.TableResponse)
    def sweep_variance(req: schemas.VarianceSweepRequest):
        rows = analysis.variance_sweep(
            alphas=req.alphas,
            L=req.L,
            n_trials=req.n_trials,
            base_seed=req.base_seed,
            cutoff=req.cutoff,
            mode=req.mode,
        )
        return schemas.TableResponse(columns=analysis.VARIANCE_SWEEP_COLUMNS, rows=_json_rows(rows))

    @app.post("/bounds", response_model=schemas.TableResponse)
    def bounds(req: schemas.BoundsRequest):
        rows = analysis.bound_curves(req.pc_values, req.k)
        return schemas.TableResponse(columns=analysis.BOUND_CURVE_COLUMNS, rows=_json_rows(rows))

    return app


def _with_alpha(cfg: schemas.EstimatorConfigModel, alpha: int) -> EstimatorConfig:
    model = cfg.model_copy(update={"alpha": alpha})
    return model.to_config()


def _decode_payload(data_base64: str) -> bytes:
    try:
        return base64.b64decode(data_base64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise seqio.SequenceFormatError(f"payload is not valid base64: {exc}") from exc


def _json_rows(rows: list[dict]) -> list[dict]:
    # NaN is not valid JSON; emit null instead.
    out = []
    for row in rows:
        out.append(
            {
                key: (None if isinstance(val, float) and math.isnan(val) else val)
                for key, val in row.items()
            }
        )
    return out


app = create_app()
