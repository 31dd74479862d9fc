"""Scenario-optimization HTTP API over a fitted model bundle.

Two endpoints under /api/v1: GET /model describes the fitted objective and
default bounds, POST /optimize re-solves the LP for caller-supplied bounds
and budget constraints. The bundle is immutable; every request is stateless.

Error contract: malformed bodies return 400, structurally valid but
unsolvable scenarios return 422 with a machine-readable reason.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import mixopt
from .errors import InfeasibleBounds
from .pipeline import ModelBundle


class ConstraintBody(BaseModel):
    total: float | None = None
    weights: dict[str, float] | None = None
    bound: float | None = None
    sense: str = "<="


class OptimizeBody(BaseModel):
    lower: float | dict[str, float] | None = None
    upper: float | dict[str, float] | None = None
    constraints: list[ConstraintBody] | None = None


def _bound_array(
    value: float | dict[str, float] | None,
    names: tuple[str, ...],
    default: np.ndarray,
) -> np.ndarray:
    if value is None:
        return default.copy()
    if isinstance(value, dict):
        unknown = sorted(set(value) - set(names))
        if unknown:
            raise HTTPException(status_code=400, detail=f"unknown variables: {unknown}")
        out = default.copy()
        for i, n in enumerate(names):
            if n in value:
                out[i] = float(value[n])
        return out
    return np.full(len(names), float(value))


def _constraints(
    bodies: list[ConstraintBody] | None,
    names: tuple[str, ...],
    default: tuple[mixopt.LinearConstraint, ...],
) -> tuple[mixopt.LinearConstraint, ...]:
    if bodies is None:
        return default
    out = []
    for c in bodies:
        if c.sense not in mixopt.SENSES:
            raise HTTPException(status_code=400, detail=f"sense must be one of {mixopt.SENSES}")
        if (c.total is None) == (c.weights is None):
            raise HTTPException(
                status_code=400, detail="constraint needs exactly one of 'total' or 'weights'"
            )
        if c.total is not None:
            out.append(
                mixopt.LinearConstraint(np.ones(len(names)), float(c.total), c.sense, "total")
            )
        else:
            unknown = sorted(set(c.weights) - set(names))
            if unknown:
                raise HTTPException(status_code=400, detail=f"unknown variables: {unknown}")
            if c.bound is None:
                raise HTTPException(status_code=400, detail="weights constraint needs 'bound'")
            w = np.array([float(c.weights.get(n, 0.0)) for n in names])
            out.append(mixopt.LinearConstraint(w, float(c.bound), c.sense))
    return tuple(out)


def _clean(value: float) -> float | None:
    return None if value is None or not math.isfinite(value) else float(value)


def create_app(bundle: ModelBundle) -> FastAPI:
    app = FastAPI(title="mediamix scenario service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"status": "invalid", "detail": exc.errors()},
        )

    names = bundle.objective.names
    meta = {m.name: m for m in bundle.meta}

    @app.get("/api/v1/model")
    def model():
        return {
            "variables": [
                {
                    "name": n,
                    "mean": meta[n].mean,
                    "sd": meta[n].sd,
                    "min": meta[n].min,
                    "max": meta[n].max,
                    "coefficient": float(bundle.objective.coefficients[i]),
                }
                for i, n in enumerate(names)
            ],
            "intercept": bundle.objective.intercept,
            "default_bounds": {
                "lower": {n: _clean(bundle.lp_lower[i]) for i, n in enumerate(names)},
                "upper": {n: _clean(bundle.lp_upper[i]) for i, n in enumerate(names)},
            },
            "default_constraints": [
                {
                    "weights": {n: float(c.weights[i]) for i, n in enumerate(names)},
                    "bound": c.bound,
                    "sense": c.sense,
                    "label": c.label,
                }
                for c in bundle.lp_constraints
            ],
            "provenance": {"seed": bundle.seed, "config_hash": bundle.config_hash},
        }

    @app.post("/api/v1/optimize")
    def optimize(body: OptimizeBody):
        lower = _bound_array(body.lower, names, bundle.lp_lower)
        upper = _bound_array(body.upper, names, bundle.lp_upper)
        constraints = _constraints(body.constraints, names, bundle.lp_constraints)
        problem = mixopt.LPProblem(bundle.objective, lower, upper, constraints)
        try:
            solution = mixopt.solve_lp(problem)
        except InfeasibleBounds as exc:
            raise HTTPException(
                status_code=422,
                detail={
                    "status": "infeasible",
                    "reason": "bounds",
                    "variable": exc.variable,
                    "message": str(exc),
                },
            ) from exc
        if solution.status != "optimal":
            raise HTTPException(
                status_code=422,
                detail={
                    "status": solution.status,
                    "reason": "constraints",
                    "message": solution.reason,
                },
            )
        return {
            "status": "optimal",
            "names": list(names),
            "z_star": solution.z_star.tolist(),
            "objective_value": solution.objective_value,
            "contributions": solution.contributions.tolist(),
            "binding": solution.binding,
            "intercept": bundle.objective.intercept,
            "predicted_volume": bundle.objective.intercept + solution.objective_value,
            "allocation": [
                {
                    "variable": n,
                    "z": float(solution.z_star[i]),
                    "level": meta[n].mean + float(solution.z_star[i]) * meta[n].sd,
                    "contribution": float(solution.contributions[i]),
                }
                for i, n in enumerate(names)
            ],
        }

    return app


def serve(bundle: ModelBundle, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(bundle), host=host, port=port)
