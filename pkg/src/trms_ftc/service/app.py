"""FastAPI application wrapping the simulation and synthesis core.

All computation endpoints are stateless POSTs taking a scenario
configuration document; the heavy lifting happens in the core package and
results stream back as JSON documents or a CSV trace body.
"""

from __future__ import annotations

from io import StringIO

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..config import ScenarioConfig
from ..exceptions import ConfigError, DesignError, InfeasibleTrimError
from ..harness import (FaultProfile, compute_metrics, profile_from_config,
                       run_scenario, trace_from_csv)
from ..multimodel import bank_to_doc, build_bank
from ..synthesis import design_gains, gains_to_doc
from .schemas import (BankDoc, DesignDoc, HealthResponse, MetricsRequest,
                      MetricsResponse)


def _bank_from_config(cfg: ScenarioConfig):
    return build_bank(cfg.trms_params(), nodes=cfg.bank.nodes,
                      sigma=cfg.bank.sigma, fault_spec=cfg.bank.fault_spec())


def create_app() -> FastAPI:
    app = FastAPI(title="trms-ftc", version=__version__,
                  description="Twin-rotor fault-tolerant control: linearization, "
                              "gain design, closed-loop fault-injection simulation")

    @app.exception_handler(ConfigError)
    @app.exception_handler(InfeasibleTrimError)
    @app.exception_handler(DesignError)
    async def _domain_error(request: Request, exc: Exception):
        return JSONResponse(status_code=400,
                            content={"detail": f"{type(exc).__name__}: {exc}"})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/linearize", response_model=BankDoc, response_model_by_alias=True)
    def linearize(cfg: ScenarioConfig) -> BankDoc:
        return BankDoc.model_validate(bank_to_doc(_bank_from_config(cfg)))

    @app.post("/design", response_model=DesignDoc, response_model_by_alias=True)
    def design(cfg: ScenarioConfig) -> DesignDoc:
        bank = _bank_from_config(cfg)
        zeta, rho = cfg.controller.knobs()
        gains, uio = design_gains(bank, zeta=zeta, rho=rho)
        doc = gains_to_doc(bank_to_doc(bank), gains, uio,
                           controller_type=cfg.controller.type)
        return DesignDoc.model_validate(doc)

    @app.post("/sim", response_class=PlainTextResponse,
              responses={200: {"content": {"text/csv": {}}}})
    def sim(cfg: ScenarioConfig) -> PlainTextResponse:
        trace = run_scenario(cfg)
        return PlainTextResponse(trace.to_csv_text(), media_type="text/csv")

    @app.post("/metrics", response_model=MetricsResponse)
    def metrics(req: MetricsRequest) -> MetricsResponse:
        trace = trace_from_csv(StringIO(req.csv))
        profile = None
        if req.fault_start is not None:
            profile = FaultProfile(kind="step", channels=(0,), amplitude=0.0,
                                   t_start=req.fault_start,
                                   t_stop=float(trace.t[-1]) + 1.0)
        result = compute_metrics(trace, profile, u_sat=req.u_sat, band=req.band)
        return MetricsResponse(**result.to_dict())

    return app


app = create_app()
