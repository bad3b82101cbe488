"""Response models of the HTTP service.

Requests reuse the scenario configuration model directly; these models pin
the shapes of what comes back.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class LocalModelDoc(BaseModel):
    a: list[list[float]]
    b: list[list[float]]
    c: list[list[float]]
    delta_x: list[float]
    l: list[list[float]]
    op_state: list[float]
    op_input: list[float]


class BankDoc(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_id: str = Field(alias="schema")
    nodes: list[float]
    sigma: float
    models: list[LocalModelDoc]


class ControllerDoc(BaseModel):
    type: str
    zeta: float
    rho: float


class GainsDoc(BaseModel):
    k1: list[list[list[float]]]
    s_comp: list[list[list[float]]]


class UioDoc(BaseModel):
    h_proj: list[list[list[float]]]
    k2: list[list[list[float]]]
    a_bar: list[list[list[float]]]
    k_nom: list[list[list[float]]]


class DesignDoc(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_id: str = Field(alias="schema")
    bank: BankDoc
    controller: ControllerDoc
    gains: GainsDoc
    uio: UioDoc


class MetricsRequest(BaseModel):
    csv: str
    u_sat: float = 2.5
    band: float = 0.02
    fault_start: Optional[float] = None


class MetricsResponse(BaseModel):
    rms_pitch_pre: Optional[float]
    rms_pitch_post: Optional[float]
    rms_yaw_pre: Optional[float]
    rms_yaw_post: Optional[float]
    fault_rms: Optional[float]
    settle_pitch: Optional[float]
    settle_yaw: Optional[float]
    sat_duty_main: float
    sat_duty_tail: float
